"""Quick end-to-end checks against closed-form values."""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np


def _nu_consistency() -> float:
    from .free_moments import nu, nu_ode

    worst = 0.0
    for t in (0.25, 1.0):
        ode = nu_ode(t, 6)
        worst = max(worst, max(abs(nu(t, n) - ode[n]) for n in range(7)))
    return worst


def _planar(name: str, loop: str, expected: Callable[[dict], float]) -> Callable[[], float]:
    def run():
        from .gallery import sample
        from .planar import eval_planar

        s = sample(name)
        a = {f: float(x) for f, x in s.areas.items()}
        return abs(eval_planar(s.map, s.loops[loop], a) - expected(a))

    return run


def _mm_eight() -> float:
    from .gallery import sample
    from .maps import intersection_profile
    from .planar import mm_residual

    s = sample("eight")
    a = {f: float(x) for f, x in s.areas.items()}
    v = intersection_profile(s.map, s.loops["L"]).transverse[0]
    return abs(mm_residual(s.map, s.loops["L"], a, v, 1e-3).residual)


def _magic() -> float:
    from .groups import GroupSpec, magic_check
    from .ymmc import sample_haar, stream

    worst = 0.0
    for fam in ("U", "SU", "SO", "Sp"):
        g = GroupSpec(fam, 3)
        for i in range(3):
            rng = stream(7, i)
            worst = max(worst, *magic_check(g, sample_haar(g, rng), sample_haar(g, rng)))
    return worst


def _torus() -> float:
    from .cover import FundamentalPolygonMap, eval_surface
    from .gallery import sample

    s = sample("torus")
    fpm = FundamentalPolygonMap.from_sides(s.polygon)
    worst = abs(eval_surface(fpm, s.loops["alpha"], {0: 1.0}).value)
    return max(worst, abs(eval_surface(fpm, s.loops["comm"], {0: 1.0}).value - math.exp(-0.5)))


def _tfree() -> float:
    from .tfree import tfree_moment

    return abs(tfree_moment("XYX*Y*", 0.5) - math.exp(-1.0))


CHECKS: list[tuple[str, Callable[[], float], float]] = [
    ("moments: closed form vs ODE", _nu_consistency, 1e-8),
    ("plane: simple loop", _planar("simple", "L", lambda a: math.exp(-sum(a.values()) / 2)), 1e-10),
    (
        "plane: figure eight",
        _planar("eight", "L", lambda a: math.exp(-sum(a.values()) / 2)),
        1e-10,
    ),
    ("plane: Makeenko-Migdal at the figure eight", _mm_eight, 1e-5),
    ("groups: Casimir trace identities", _magic, 1e-12),
    ("torus: alpha and commutator", _torus, 1e-8),
    ("t-free: commutator", _tfree, 1e-6),
]


def run_checks() -> list[tuple[str, float, float, bool, float]]:
    """``(name, error, tolerance, passed, milliseconds)`` per check."""
    out = []
    for name, fn, tol in CHECKS:
        t0 = time.perf_counter()
        err = float(fn())
        ms = round((time.perf_counter() - t0) * 1e3, 3)
        out.append((name, err, tol, bool(np.isfinite(err) and err < tol), ms))
    return out
