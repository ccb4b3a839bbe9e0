"""Named sample maps with loops and areas.

Each sample bundles a map, a few named loops and a default area for every
inner face (every face for closed maps). They serve as fixtures for the
command line (``builtin:NAME``), the self test and the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .construct import PolygonSides, bouquet_map, map_from_drawing, remove_edges, torus_grid
from .errors import MapError, UsageError
from .maps import CombinatorialMap, Path, with_boundary


@dataclass
class Sample:
    name: str
    map: CombinatorialMap
    loops: dict[str, Path]
    areas: dict[int, Fraction]
    polygon: PolygonSides | None = None
    notes: dict[str, str] = field(default_factory=dict)


def _simple() -> Sample:
    dm = map_from_drawing([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1), (1, 2), (2, 3), (3, 0)])
    loop = dm.path([0, 1, 2, 3, 0])
    m = dm.map
    twice = m.path(loop.darts * 2)
    areas = {f: Fraction(1) for f in m.inner_faces}
    return Sample("simple", m, {"L": loop, "L2": twice}, areas)


def _eight() -> Sample:
    pts = [(0, 0), (1, 1), (2, 0), (1, -1), (-1, 1), (-2, 0), (-1, -1)]
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 0)]
    dm = map_from_drawing(pts, edges)
    loop = dm.path([0, 1, 2, 3, 0, 4, 5, 6, 0])
    areas = {f: Fraction(1) for f in dm.map.inner_faces}
    return Sample("eight", dm.map, {"L": loop}, areas, notes={"crossing": str(dm.vertex[0])})


def _chain() -> Sample:
    # three lobes in a row, crossing at points 0 and 1
    pts = [
        (0, 0), (4, 0), (2, 1), (2, -1),
        (5, 1), (6, 0), (5, -1),
        (-1, 1), (-2, 0), (-1, -1),
    ]
    edges = [
        (0, 2), (2, 1), (1, 3), (3, 0),
        (1, 6), (6, 5), (5, 4), (4, 1),
        (0, 7), (7, 8), (8, 9), (9, 0),
    ]
    dm = map_from_drawing(pts, edges)
    loop = dm.path([0, 2, 1, 6, 5, 4, 1, 3, 0, 7, 8, 9, 0])
    areas = {f: Fraction(1) for f in dm.map.inner_faces}
    return Sample(
        "chain", dm.map, {"L": loop}, areas,
        notes={"crossings": f"{dm.vertex[0]},{dm.vertex[1]}"},
    )


def _limacon() -> Sample:
    # a loop with an inner loop: one crossing, the inner face is wound twice
    pts = [(0, 0), (2, 2), (-2, 2), (-2, -2), (2, -2), (1, 0), (0, 1), (-1, 0)]
    edges = [
        (0, 4), (4, 1), (1, 2), (2, 3), (3, 0),
        (0, 5), (5, 6), (6, 7), (7, 0),
    ]
    dm = map_from_drawing(pts, edges)
    loop = dm.path([0, 4, 1, 2, 3, 0, 5, 6, 7, 0])
    areas = {f: Fraction(1, 2) for f in dm.map.inner_faces}
    return Sample("limacon", dm.map, {"L": loop}, areas)


def _torus() -> Sample:
    ps = bouquet_map(1)
    m = ps.map
    x, y = ps.sides["x1"][0], ps.sides["y1"][0]
    ax, ay = m.alpha[x], m.alpha[y]
    loops = {
        "alpha": m.loop([x]),
        "beta": m.loop([y]),
        "comm": m.loop([x, y, ax, ay]),
        "comm2": m.loop([x, y, ax, ay] * 2),
        "rect": m.loop([x, y, y, ax, ay, ay]),
    }
    return Sample("torus", m, loops, {0: Fraction(1)}, ps)


def _torus_grid() -> Sample:
    ps = torus_grid(3, 3)
    m = ps.map
    h = lambda i, j: 2 * ((i % 3) + 3 * (j % 3))  # noqa: E731
    v = lambda i, j: 2 * (9 + (i % 3) + 3 * (j % 3))  # noqa: E731
    square = [h(1, 1), v(2, 1), m.alpha[h(1, 2)], m.alpha[v(1, 1)]]
    loops = {
        "alpha": m.loop(list(ps.sides["x1"])),
        "square": m.loop(square),
        "square2": m.loop(square * 2),
    }
    areas = {f: Fraction(1, 9) for f in range(m.n_faces)}
    return Sample("torus-grid", m, loops, areas, ps)


def _twisted_torus() -> Sample:
    # a loop winding once around the torus with a curl that crosses itself;
    # edges it does not use are removed until six faces remain
    m = torus_grid(3, 3).map
    h = lambda i, j: 2 * ((i % 3) + 3 * (j % 3))  # noqa: E731
    v = lambda i, j: 2 * (9 + (i % 3) + 3 * (j % 3))  # noqa: E731
    a = m.alpha
    loop = [h(0, 1), h(1, 1), v(2, 1), a[h(1, 2)], a[v(1, 1)], a[v(1, 0)], h(1, 0), h(2, 0), v(0, 0)]
    used = {m.edge_of[d] for d in loop}
    alive = {d: d for d in range(m.n_darts)}
    for d in [x for x in m.positive if m.edge_of[x] not in used]:
        if m.n_faces <= 6:
            break
        try:
            m2, new = remove_edges(m, [alive[d]])
        except MapError:
            continue
        m = m2
        alive = {k: new[x] for k, x in alive.items() if x in new}
    darts = [alive[d] for d in loop]
    areas = {f: Fraction(1, 6) for f in range(m.n_faces)}
    return Sample("twisted-torus", m, {"L": m.loop(darts)}, areas)


def _holed_torus() -> Sample:
    ps = torus_grid(2, 2)
    m = with_boundary(ps.map, [ps.map.faces[0][0]])
    loops = {"a1": m.loop(list(ps.sides["x1"])), "b1": m.loop(list(ps.sides["y1"]))}
    areas = {f: Fraction(1, 3) for f in m.inner_faces}
    return Sample("holed-torus", m, loops, areas)


def _genus2() -> Sample:
    ps = bouquet_map(2)
    m = ps.map
    s = ps.sides
    rel = []
    for k in (1, 2):
        x, y = s[f"x{k}"][0], s[f"y{k}"][0]
        rel += [x, y, m.alpha[x], m.alpha[y]]
    loops = {"rel": m.loop(rel), "x1": m.loop(list(s["x1"]))}
    return Sample("genus2", m, loops, {0: Fraction(1)}, ps)


BUILDERS: dict[str, Callable[[], Sample]] = {
    "simple": _simple,
    "eight": _eight,
    "chain": _chain,
    "limacon": _limacon,
    "torus": _torus,
    "torus-grid": _torus_grid,
    "twisted-torus": _twisted_torus,
    "holed-torus": _holed_torus,
    "genus2": _genus2,
}


def sample(name: str) -> Sample:
    try:
        return BUILDERS[name]()
    except KeyError:
        raise UsageError(f"unknown sample {name!r}; known: {', '.join(BUILDERS)}") from None
