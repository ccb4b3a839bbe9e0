"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -s`` or as a script.
"""

import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from _acceptance import report  # noqa: E402
from _loops import random_loop  # noqa: E402
from masterfield.cli import default_workers  # noqa: E402
from masterfield.construct import (  # noqa: E402
    cone_face,
    map_from_drawing,
    split_face,
    subdivide_edge,
)
from masterfield.cover import FundamentalPolygonMap, eval_surface  # noqa: E402
from masterfield.free_moments import (  # noqa: E402
    FreeMomentEvaluator,
    GeneratorLaw,
    GeneratorWord,
    nu,
    nu_ode,
)
from masterfield.gallery import sample  # noqa: E402
from masterfield.groups import FAMILIES, GroupSpec, magic_check  # noqa: E402
from masterfield.homology import mm_space_matches  # noqa: E402
from masterfield.maps import intersection_profile, reduce_path  # noqa: E402
from masterfield.planar import (  # noqa: E402
    check_decomposition,
    eval_planar,
    lasso_basis,
    mm_residual,
)
from masterfield.tfree import phi_T_word, tfree_moment  # noqa: E402
from masterfield.ymmc import sample_haar, stream, wilson_estimate, wilson_for_map  # noqa: E402

COMM = "XYX*Y*"
SEPARATING = "XY^2X*Y^-2"


def _areas(s):
    return {f: float(a) for f, a in s.areas.items()}


def test_criterion_1_moment_consistency():
    start = time.perf_counter()
    err = 0.0
    for t in (0.25, 1.0, 4.0):
        ode = nu_ode(t, 8)
        err = max(err, *(abs(nu(t, n) - ode[n]) for n in range(9)))
    exact = max(abs(nu(t, 1) - math.exp(-t / 2)) for t in (0.25, 1.0, 4.0))
    zero = abs(nu(1.0, 2))
    took = time.perf_counter() - start
    ok = err < 1e-8 and exact < 1e-12 and zero < 1e-12 and took < 1.0
    report(1, ok, f"max |nu - nu_ode| = {err:.2e}, |nu(t,1) - e^(-t/2)| = {exact:.1e}, "
                  f"|nu(1,2)| = {zero:.1e}, {took:.2f} s")
    assert ok


def test_criterion_2_planar_closed_forms():
    start = time.perf_counter()
    s, e = sample("simple"), sample("eight")
    f = s.map.inner_faces[0]
    f1, f2 = e.map.inner_faces
    err = 0.0
    for t in (0.3, 1.0, 2.5):
        err = max(err, abs(eval_planar(s.map, s.loops["L"], {f: t}) - math.exp(-t / 2)))
        err = max(err, abs(eval_planar(s.map, s.loops["L2"], {f: t}) - nu(t, 2)))
    for t1, t2 in ((0.3, 0.8), (1.0, 1.0), (2.0, 0.25)):
        val = eval_planar(e.map, e.loops["L"], {f1: t1, f2: t2})
        err = max(err, abs(val - math.exp(-(t1 + t2) / 2)))
    took = time.perf_counter() - start
    ok = err < 1e-10 and took < 1.0
    report(2, ok, f"simple, double and figure-eight loops, max error {err:.1e}, {took:.2f} s")
    assert ok


def test_criterion_3_mm_residuals():
    start = time.perf_counter()
    hs = (1e-2, 5e-3, 1e-3)
    worst, orders = 0.0, []
    for name, areas in (("eight", (1.0, 0.7)), ("chain", (0.6, 1.1, 0.8))):
        s = sample(name)
        m, loop = s.map, s.loops["L"]
        a = dict(zip(m.inner_faces, areas))
        for v in intersection_profile(m, loop).transverse:
            r = [abs(mm_residual(m, loop, a, v, h).residual) for h in hs]
            worst = max(worst, r[-1])
            # least-squares slope of log r against log h
            xs, ys = [math.log(h) for h in hs], [math.log(max(x, 1e-300)) for x in r]
            mx, my = sum(xs) / 3, sum(ys) / 3
            orders.append(sum((x - mx) * (y - my) for x, y in zip(xs, ys))
                          / sum((x - mx) ** 2 for x in xs))
    took = time.perf_counter() - start
    ok = worst < 1e-5 and all(1.8 < p < 2.2 for p in orders) and took < 5.0
    report(3, ok, f"max |residual| at h=1e-3 {worst:.1e}, orders "
                  f"{', '.join(f'{p:.2f}' for p in orders)}, {took:.2f} s")
    assert ok


def test_criterion_4_trace_identities():
    start = time.perf_counter()
    worst = 0.0
    for family in FAMILIES:
        for n in (2, 3, 4):
            g = GroupSpec(family, n)
            for i in range(20):
                rng = stream(11, i)
                a, b = sample_haar(g, rng), sample_haar(g, rng)
                worst = max(worst, *magic_check(g, a, b))
    took = time.perf_counter() - start
    ok = worst < 1e-12 and took < 10.0
    report(4, ok, f"U, SU, SO, Sp at N = 2, 3, 4, 20 pairs, max residual {worst:.1e}, {took:.2f} s")
    assert ok


def test_criterion_5_mm_space():
    start = time.perf_counter()
    names = ("eight", "chain", "twisted-torus")
    results = {}
    for name in names:
        s = sample(name)
        results[name] = s.map.n_faces <= 8 and mm_space_matches(s.map, s.loops["L"])
    took = time.perf_counter() - start
    ok = all(results.values()) and took < 1.0
    report(5, ok, f"exact span equality on {', '.join(names)}, {took:.2f} s")
    assert ok


def _drawn_square():
    dm = map_from_drawing([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1), (1, 2), (2, 3), (3, 0)])
    return dm, dm.path([0, 1, 2, 3, 0])


def test_criterion_6_torus():
    start = time.perf_counter()
    s = sample("torus")
    fpm = FundamentalPolygonMap.from_sides(s.polygon)
    m = s.map
    zero = True
    for n in (1, 2, 3):
        loop = m.loop(s.loops["alpha"].darts * n)
        zero &= eval_surface(fpm, loop, {0: 1.0}).value == 0.0
        zero &= eval_surface(fpm, m.inverse(loop), {0: 1.0}).value == 0.0
    comm = max(abs(eval_surface(fpm, s.loops["comm"], {0: T}).value - math.exp(-T / 2))
               for T in (0.5, 1.0, 2.0))
    g = sample("torus-grid")
    gfpm = FundamentalPolygonMap.from_sides(g.polygon)
    dm, sq = _drawn_square()
    on_torus = eval_surface(gfpm, g.loops["square"], _areas(g)).value
    in_plane = eval_planar(dm.map, sq, {dm.map.inner_faces[0]: 1 / 9})
    local = abs(on_torus - in_plane)
    took = time.perf_counter() - start
    ok = zero and comm < 1e-8 and local < 1e-10 and took < 2.0
    report(6, ok, f"alpha^n exactly 0: {zero}, commutator error {comm:.1e}, "
                  f"grid square vs plane {local:.1e}, {took:.2f} s")
    assert ok


def test_criterion_7_interpolation():
    start = time.perf_counter()
    powers = max(abs(phi_T_word(f"({COMM})^{n}", T) - nu(T, n))
                 for n in (1, 2, 3) for T in (0.5, 1.0, 2.0))
    comm = max(abs(tfree_moment(COMM, t) - math.exp(-2 * t)) for t in (0.25, 0.5, 1.0))
    t = 0.5
    phi = phi_T_word(SEPARATING, 4 * t)
    free = tfree_moment(SEPARATING, t)
    sep = abs(phi - math.exp(-4 * t)) < 1e-6 and abs(free - math.exp(-2 * t)) < 1e-6 and phi < free
    took = time.perf_counter() - start
    ok = powers < 1e-6 and comm < 1e-6 and sep and took < 10.0
    report(7, ok, f"powers error {powers:.1e}, commutator error {comm:.1e}, "
                  f"separating word Phi = {phi:.6f} < {free:.6f}, {took:.2f} s")
    assert ok


@pytest.mark.slow
def test_criterion_8_monte_carlo():
    start = time.perf_counter()
    workers = default_workers()
    g = GroupSpec("U", 128)
    gates, parts = [], []
    for name, exact in (("simple", math.exp(-0.5)), ("eight", math.exp(-1.0))):
        s = sample(name)
        a = {f: 1.0 for f in s.map.inner_faces}
        est = wilson_for_map(s.map, s.loops["L"], a, g, 2000, seed=8, steps=10, workers=workers)
        bound = 3 * est.stderr + 5 / g.N
        gates.append(abs(est.mean - exact) <= bound)
        parts.append(f"{name} {est.mean:.4f} vs {exact:.4f} (bound {bound:.4f})")
        if name == "simple":
            var128 = est.variance
    h = sample("holed-torus")
    basis = lasso_basis(h.map)
    est = wilson_estimate(basis.loops[("handle", 0)], basis, _areas(h), g, 2000, seed=8,
                          steps=10, workers=workers)
    gates.append(abs(est.mean) <= 3 * est.stderr)
    parts.append(f"handle loop {est.mean:.2e} (3 stderr {3 * est.stderr:.2e})")
    s = sample("simple")
    est64 = wilson_for_map(s.map, s.loops["L"], {s.map.inner_faces[0]: 1.0}, GroupSpec("U", 64),
                           500, seed=8, steps=10, workers=workers)
    parts.append(f"variance N=64 {est64.variance:.2e}, N=128 {var128:.2e}")
    took = time.perf_counter() - start
    ok = all(gates) and took < 600
    report(8, ok, "; ".join(parts) + f", {took:.0f} s")
    assert ok


def _refine(m, loop, areas, rng):
    inner = list(m.inner_faces)
    kind = rng.choice(["subdivide", "split", "cone"])
    if kind == "subdivide":
        r = subdivide_edge(m, rng.randrange(m.n_darts))
        return r.map, r.path(loop), r.areas(areas)
    f = rng.choice(inner)
    if kind == "split" and len(m.faces[f]) > 1:
        r = split_face(m, *rng.sample(m.faces[f], 2))
    else:
        r = cone_face(m, f)
    w = {f: [Fraction(rng.randint(1, 5)) for _ in r.face_image[f]]}
    return r.map, r.path(loop), r.areas(areas, w)


def test_criterion_9_property_suites():
    rng = random.Random(9)
    names = ["simple", "eight", "chain", "limacon", "holed-torus"]
    fails = {"reduce": 0, "decompose": 0, "refine": 0, "tracial": 0}
    for _ in range(200):
        m = sample(rng.choice(names)).map
        loop = random_loop(m, rng, rng.randint(0, 25), rng.randrange(m.n_vertices))
        once = reduce_path(m, loop)
        fails["reduce"] += reduce_path(m, once) != once
        fails["decompose"] += not check_decomposition(lasso_basis(m, rng.randrange(m.n_vertices)), loop)
    for _ in range(200):
        s = sample(rng.choice(names[:4]))
        m, loop, areas = s.map, s.loops["L"], dict(s.areas)
        ref = eval_planar(m, loop, {f: float(x) for f, x in areas.items()})
        for _ in range(rng.randint(1, 4)):
            m, loop, areas = _refine(m, loop, areas, rng)
        val = eval_planar(m, loop, {f: float(x) for f, x in areas.items()})
        fails["refine"] += abs(val - ref) > 1e-10
    for _ in range(200):
        laws = {g: GeneratorLaw.haar() if rng.random() < 0.3 else GeneratorLaw.fub(rng.uniform(0, 3))
                for g in "abc"}
        ev = FreeMomentEvaluator(laws)
        letters = [(rng.choice("abc"), rng.choice([1, -1, 2, -2]))
                   for _ in range(rng.randint(1, 6))]
        w = GeneratorWord.of(letters)
        v = ev(w)
        k = rng.randrange(len(letters))
        rotated = ev(GeneratorWord.of(letters[k:] + letters[:k]))
        fails["tracial"] += abs(v) > 1 + 1e-12 or abs(rotated - v) > 1e-12
    ok = not any(fails.values())
    report(9, ok, "failures " + ", ".join(f"{k} {v}" for k, v in fails.items())
                  + " (200 loops, 200 refinements, 200 words)")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
