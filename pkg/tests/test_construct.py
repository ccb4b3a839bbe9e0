import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from masterfield.construct import (
    bouquet_map,
    cone_face,
    map_from_drawing,
    remove_edges,
    split_face,
    subdivide_edge,
    torus_grid,
    torus_with_diagonal,
)
from masterfield.errors import MapError, NotOnMap
from masterfield.gallery import BUILDERS, sample
from masterfield.homology import check_basis
from masterfield.planar import eval_planar


def test_drawing_areas():
    dm = map_from_drawing([(0, 0), (2, 0), (2, 3), (0, 3)], [(0, 1), (1, 2), (2, 3), (3, 0)])
    inner = dm.map.inner_faces[0]
    assert dm.area[inner] == pytest.approx(6.0)
    assert dm.area[dm.outer_face] == pytest.approx(-6.0)
    with pytest.raises(NotOnMap):
        dm.path([0, 2])


def test_duplicate_edge_rejected():
    with pytest.raises(MapError):
        map_from_drawing([(0, 0), (1, 0)], [(0, 1), (1, 0)])


def test_polygon_sides_cut_open():
    for ps in (bouquet_map(2), torus_grid(2, 3), torus_with_diagonal()):
        m = ps.map
        loops = [m.loop(list(d)) for d in ps.sides.values()]
        check_basis(m, loops)


def test_subdivide_keeps_loop_shape():
    s = sample("eight")
    d = s.loops["L"].darts[2]
    r = subdivide_edge(s.map, d)
    assert r.map.n_vertices == s.map.n_vertices + 1
    assert len(r.path(s.loops["L"])) == len(s.loops["L"]) + 1


def test_split_and_cone_counts():
    s = sample("simple")
    f = s.map.inner_faces[0]
    cyc = s.map.faces[f]
    r = split_face(s.map, cyc[0], cyc[2])
    assert r.map.n_faces == 3 and len(r.face_image[f]) == 2
    c = cone_face(s.map, f)
    assert c.map.n_faces == 2 + 3 and c.map.n_vertices == 5
    with pytest.raises(MapError):
        split_face(s.map, cyc[0], cyc[0])
    with pytest.raises(MapError):
        cone_face(s.map, s.map.boundary[0])


def test_refined_areas_sum():
    s = sample("simple")
    f = s.map.inner_faces[0]
    c = cone_face(s.map, f)
    a = c.areas({f: Fraction(1)}, {f: [1, 2, 3, 4]})
    assert sum(a.values()) == 1 and sorted(a.values()) == [Fraction(k, 10) for k in (1, 2, 3, 4)]


def test_remove_edges():
    m = torus_grid(3, 3).map
    m2, new = remove_edges(m, [m.positive[0]])
    assert (m2.n_edges, m2.n_faces, m2.genus) == (m.n_edges - 1, m.n_faces - 1, 1)
    assert len(new) == m.n_darts - 2
    one = bouquet_map(1).map
    with pytest.raises(MapError):
        remove_edges(one, [0])


def test_gallery_builds():
    for name in BUILDERS:
        s = sample(name)
        assert set(s.areas) == set(s.map.inner_faces)


def _refine(m, loop, areas, rng):
    """Apply one random refinement; returns the new map, loop and areas."""
    kind = rng.choice(["subdivide", "split", "cone"])
    inner = list(m.inner_faces)
    if kind == "subdivide":
        r = subdivide_edge(m, rng.randrange(m.n_darts))
        return r.map, r.path(loop), r.areas(areas)
    f = rng.choice(inner)
    if kind == "split" and len(m.faces[f]) > 1:
        d1, d2 = rng.sample(m.faces[f], 2)
        r = split_face(m, d1, d2)
    else:
        r = cone_face(m, f)
    w = {f: [Fraction(rng.randint(1, 5)) for _ in r.face_image[f]]}
    return r.map, r.path(loop), r.areas(areas, w)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["simple", "eight", "chain", "limacon"]), st.integers(0, 2**32 - 1),
       st.integers(1, 4))
def test_refinement_invariance(name, seed, depth):
    rng = random.Random(seed)
    s = sample(name)
    m, loop, areas = s.map, next(iter(s.loops.values())), dict(s.areas)
    ref = eval_planar(m, loop, {f: float(a) for f, a in areas.items()})
    for _ in range(depth):
        m, loop, areas = _refine(m, loop, areas, rng)
    assert sum(areas.values()) == sum(s.areas.values())
    val = eval_planar(m, loop, {f: float(a) for f, a in areas.items()})
    assert val == pytest.approx(ref, abs=1e-10)


def test_square_value_survives_many_cones():
    s = sample("simple")
    m, loop, areas = s.map, s.loops["L"], dict(s.areas)
    for _ in range(3):
        f = max(m.inner_faces)
        r = cone_face(m, f)
        m, loop, areas = r.map, r.path(loop), r.areas(areas)
    assert eval_planar(m, loop, {f: float(a) for f, a in areas.items()}) == pytest.approx(
        math.exp(-0.5), abs=1e-12
    )
