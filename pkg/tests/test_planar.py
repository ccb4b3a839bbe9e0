import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from _loops import random_loop
from masterfield.errors import (
    AreaMismatch,
    BoundaryOfSimplex,
    WrongBoundaryCount,
    WrongGenus,
)
from masterfield.free_moments import nu
from masterfield.gallery import sample
from masterfield.homology import winding_function
from masterfield.maps import desingularize, intersection_profile
from masterfield.planar import (
    AreaVector,
    check_decomposition,
    decompose,
    eval_one_boundary,
    eval_planar,
    lasso_basis,
    mm_residual,
)


def _areas(s, scale=1.0):
    return {f: float(a) * scale for f, a in s.areas.items()}


def test_simple_loop():
    s = sample("simple")
    f = s.map.inner_faces[0]
    for t in (0.1, 1.0, 3.7):
        assert eval_planar(s.map, s.loops["L"], {f: t}) == pytest.approx(
            math.exp(-t / 2), abs=1e-12
        )
        assert eval_planar(s.map, s.loops["L2"], {f: t}) == pytest.approx(nu(t, 2), abs=1e-12)
        back = s.map.inverse(s.loops["L"])
        assert eval_planar(s.map, back, {f: t}) == pytest.approx(math.exp(-t / 2), abs=1e-12)


def test_figure_eight():
    s = sample("eight")
    f1, f2 = s.map.inner_faces
    for t1, t2 in ((0.3, 0.8), (1.0, 1.0), (2.0, 0.25)):
        assert eval_planar(s.map, s.loops["L"], {f1: t1, f2: t2}) == pytest.approx(
            math.exp(-(t1 + t2) / 2), abs=1e-12
        )


def test_limacon():
    # the inner face is wound twice
    s = sample("limacon")
    m = s.map
    n = winding_function(m, s.loops["L"])
    inner = max(m.inner_faces, key=lambda f: n[f])
    outer = [f for f in m.inner_faces if f != inner][0]
    for a, b in ((0.5, 0.5), (1.0, 0.3)):
        val = eval_planar(m, s.loops["L"], {inner: a, outer: b})
        assert val == pytest.approx(math.exp(-b / 2) * nu(a, 2), abs=1e-12)


def test_chain_value():
    s = sample("chain")
    assert eval_planar(s.map, s.loops["L"], _areas(s)) == pytest.approx(math.exp(-1.5), abs=1e-12)


def test_area_validation():
    s = sample("eight")
    with pytest.raises(AreaMismatch):
        eval_planar(s.map, s.loops["L"], {s.map.inner_faces[0]: 1.0})
    with pytest.raises(AreaMismatch):
        AreaVector.for_map(s.map, {f: -1.0 for f in s.map.inner_faces})


def test_wrong_surfaces():
    with pytest.raises(WrongBoundaryCount):
        eval_planar(sample("torus").map, sample("torus").loops["comm"], {0: 1.0})
    h = sample("holed-torus")
    with pytest.raises(WrongGenus):
        eval_planar(h.map, h.loops["a1"], _areas(h))
    # genus one with one boundary face is fine for the one-boundary evaluator
    assert abs(eval_one_boundary(h.map, h.loops["a1"], _areas(h))) < 1e-15


def test_lasso_basis_shape():
    s = sample("chain")
    b = lasso_basis(s.map)
    assert set(b.face_generators) == set(s.map.inner_faces)
    assert b.handle_generators == []
    h = sample("holed-torus")
    assert len(lasso_basis(h.map).handle_generators) == 2


def test_desingularized_halves_of_the_eight():
    s = sample("eight")
    m = s.map
    v = int(s.notes["crossing"])
    l1, l2 = desingularize(m, s.loops["L"], v)
    a = _areas(s)
    assert eval_planar(m, l1, a) * eval_planar(m, l2, a) == pytest.approx(
        eval_planar(m, s.loops["L"], a), abs=1e-12
    )


def _mm_setup(name, areas):
    s = sample(name)
    m, L = s.map, s.loops["L"]
    a = dict(zip(m.inner_faces, areas))
    return m, L, a, intersection_profile(m, L).transverse


@pytest.mark.parametrize(
    "name, areas",
    [("eight", (1.0, 0.7)), ("chain", (0.6, 1.1, 0.8)), ("limacon", (0.4, 0.9))],
)
def test_mm_second_order(name, areas):
    m, L, a, crossings = _mm_setup(name, areas)
    for v in crossings:
        r1 = mm_residual(m, L, a, v, 1e-2).residual
        r2 = mm_residual(m, L, a, v, 1e-3).residual
        assert abs(r2) < 1e-5
        if abs(r1) > 1e-12:
            order = math.log10(abs(r1) / abs(r2))
            assert 1.8 < order < 2.2


def test_mm_at_simplex_boundary():
    m, L, a, (v,) = _mm_setup("eight", (1e-4, 1.0))
    with pytest.raises(BoundaryOfSimplex):
        mm_residual(m, L, a, v, 1e-3)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["simple", "eight", "chain", "limacon", "holed-torus"]),
       st.integers(0, 2**32 - 1), st.integers(0, 25))
def test_decomposition_is_sound(name, seed, length):
    m = sample(name).map
    rng = random.Random(seed)
    root = rng.randrange(m.n_vertices)
    loop = random_loop(m, rng, length, root)
    assert check_decomposition(lasso_basis(m, rng.randrange(m.n_vertices)), loop)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["eight", "chain", "limacon"]), st.integers(0, 2**32 - 1),
       st.integers(1, 6))
def test_values_are_bounded_and_base_free(name, seed, length):
    s = sample(name)
    m = s.map
    rng = random.Random(seed)
    loop = random_loop(m, rng, length)
    a = _areas(s)
    v = eval_planar(m, loop, a)
    assert abs(v) <= 1 + 1e-12
    other = lasso_basis(m, rng.randrange(m.n_vertices))
    assert eval_planar(m, loop, a, other) == pytest.approx(v, abs=1e-12)
    assert len(decompose(other, loop).generators()) <= len(m.inner_faces)
