"""Built-in parameter sets for the three reference systems.

These are the package's canonical demonstrations: one cycle through a
real-saddle equilibrium (1), one through a saddle-focus (2), and a
saddle-focus pair of cycles (3).  Expected certification outcomes and key
derived numbers are pinned by the acceptance suite.
"""

from __future__ import annotations

import math

from .model import SystemParams


def example_params(n: int) -> SystemParams:
    """Parameter set of built-in example ``n`` (1, 2, or 3)."""
    if n == 1:
        return SystemParams(rho=1.0, omega=10.0, mu=5.0,
                            b11=-2.0, b12=1.0, b21=0.0, b22=-1.0, lam=2.0,
                            q1=1.2, q2=0.0, q3=0.2, d=1.2)
    if n == 2:
        d = math.sqrt(35.0 / 11.0)
        return SystemParams(rho=1.0, omega=math.sqrt(35.0), mu=5.0,
                            b11=-0.5, b12=4.0, b21=-4.0, b22=-0.5, lam=2.0,
                            q1=d, q2=-4.5, q3=d + 1.0, d=d)
    if n == 3:
        return SystemParams(rho=1.0, omega=3.0, mu=4.0,
                            b11=-3.5, b12=6.0, b21=-6.0, b22=-3.5, lam=2.0,
                            q1=2.0, q2=0.0, q3=2.0, d=2.0)
    raise ValueError(f"no built-in example {n!r}; choose 1, 2, or 3")
