"""Ready-made maps and map refinements.

Builders return plain :class:`~masterfield.maps.CombinatorialMap` objects,
sometimes bundled with bookkeeping (dart lookup by endpoints, polygon
sides, geometric face areas). Refinements return the finer map together with
the image of every old dart and face so loops and area vectors can be carried
over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import MapError, NotOnMap
from .maps import CombinatorialMap, Path, build_map, map_from_rotations


@dataclass
class DrawnMap:
    """Planar map built from a straight-line drawing."""

    map: CombinatorialMap
    points: list[tuple[float, float]]
    dart: dict[tuple[int, int], int]
    vertex: list[int]
    outer_face: int
    area: dict[int, float]

    def path(self, seq: Sequence[int]) -> Path:
        """Path through drawing points ``seq[0], seq[1], ...``."""
        darts = []
        for u, v in zip(seq, seq[1:]):
            if (u, v) not in self.dart:
                raise NotOnMap(f"no edge from point {u} to point {v}")
            darts.append(self.dart[(u, v)])
        if not darts:
            return Path((), self.vertex[seq[0]])
        return self.map.path(darts)


def map_from_drawing(
    points: Sequence[tuple[float, float]],
    edges: Sequence[tuple[int, int]],
    outer_boundary: bool = True,
) -> DrawnMap:
    """Planar map of a connected straight-line drawing.

    Edge ``k`` from point ``u`` to ``v`` gets darts ``2k`` (u to v) and
    ``2k + 1``. Rotations follow the angles of the segments. With
    ``outer_boundary`` the unbounded face becomes the boundary face.
    """
    n = 2 * len(edges)
    out: dict[int, list[tuple[float, int]]] = {i: [] for i in range(len(points))}
    dart = {}
    for k, (u, v) in enumerate(edges):
        for d, (a, b) in ((2 * k, (u, v)), (2 * k + 1, (v, u))):
            ang = math.atan2(points[b][1] - points[a][1], points[b][0] - points[a][0])
            out[a].append((ang, d))
            if (a, b) in dart:
                raise MapError(f"duplicate edge between points {a} and {b}")
            dart[(a, b)] = d
    rotations = [[d for _, d in sorted(lst)] for lst in out.values() if lst]
    used = [i for i, lst in out.items() if lst]
    m = map_from_rotations(rotations)
    area = {}
    for f, cyc in enumerate(m.faces):
        tails = [_tail_point(edges, d) for d in cyc]
        s = 0.0
        for i, p in enumerate(tails):
            q = tails[(i + 1) % len(tails)]
            s += points[p][0] * points[q][1] - points[q][0] * points[p][1]
        area[f] = s / 2
    outer = min(area, key=area.get)
    if outer_boundary:
        m = build_map(m.alpha, m.sigma, None, [m.faces[outer][0]])
    vertex = [-1] * len(points)
    for i in used:
        vertex[i] = m.tail(out[i][0][1])
    return DrawnMap(m, list(points), dart, vertex, outer, area)


def _tail_point(edges, d):
    u, v = edges[d // 2]
    return u if d % 2 == 0 else v


# --- closed surfaces ---------------------------------------------------------


@dataclass
class PolygonSides:
    """A closed map with a system of side loops cutting it into a polygon.

    ``sides`` maps labels ``x1, y1, x2, y2, ...`` to dart paths from the
    polygon corner ``corner``; read in that order the polygon boundary is
    ``x1 y1 x1^-1 y1^-1 x2 ...``.
    """

    map: CombinatorialMap
    sides: dict[str, tuple[int, ...]]
    corner: int


def side_labels(genus: int) -> list[str]:
    labels = []
    for k in range(1, genus + 1):
        labels += [f"x{k}", f"y{k}"]
    return labels


def bouquet_map(genus: int) -> PolygonSides:
    """One vertex, ``2g`` edges and a single ``4g``-gon face.

    Side ``x_k`` is dart ``4(k-1)``, side ``y_k`` is dart ``4(k-1) + 2``, and
    the face reads ``x1 y1 x1^-1 y1^-1 ...`` counter-clockwise.
    """
    if genus < 1:
        raise MapError("a bouquet needs genus at least 1")
    n = 4 * genus
    cycle = []
    for k in range(genus):
        x, y = 4 * k, 4 * k + 2
        cycle += [x, y, x + 1, y + 1]
    sigma = [0] * n
    alpha = [d ^ 1 for d in range(n)]
    for i, c in enumerate(cycle):
        nxt = cycle[(i + 1) % n]
        sigma[nxt] = alpha[c]
    m = build_map(alpha, sigma)
    sides = {}
    for k in range(genus):
        sides[f"x{k + 1}"] = (4 * k,)
        sides[f"y{k + 1}"] = (4 * k + 2,)
    return PolygonSides(m, sides, 0)


def torus_grid(nx: int, ny: int) -> PolygonSides:
    """Square ``nx`` by ``ny`` grid on the torus.

    Vertex ``(i, j)`` is point ``i + nx*j``. Horizontal edge ``(i, j)`` to
    ``(i+1, j)`` has darts ``2h, 2h+1`` with ``h = i + nx*j``; vertical edge
    ``(i, j)`` to ``(i, j+1)`` has darts ``2v, 2v+1`` with ``v = nx*ny + i + nx*j``.
    Side ``x1`` runs along the row ``j = 0`` and ``y1`` along the column ``i = 0``.
    """
    if nx < 1 or ny < 1:
        raise MapError("grid dimensions must be positive")
    off = nx * ny

    def h(i, j):
        return 2 * ((i % nx) + nx * (j % ny))

    def v(i, j):
        return 2 * (off + (i % nx) + nx * (j % ny))

    rotations = []
    for j in range(ny):
        for i in range(nx):
            rotations.append([h(i, j), v(i, j), h(i - 1, j) + 1, v(i, j - 1) + 1])
    m = map_from_rotations(rotations)
    sides = {
        "x1": tuple(h(i, 0) for i in range(nx)),
        "y1": tuple(v(0, j) for j in range(ny)),
    }
    return PolygonSides(m, sides, m.tail(h(0, 0)))


def torus_with_diagonal() -> PolygonSides:
    """One-vertex torus with sides ``a = 0``, ``b = 2`` and a diagonal ``e = 4``.

    The two faces are triangles; ``e`` runs from the corner of the square
    to the opposite corner.
    """
    m = map_from_rotations([[0, 4, 2, 1, 5, 3]])
    return PolygonSides(m, {"x1": (0,), "y1": (2,)}, 0)


# --- refinements -------------------------------------------------------------


@dataclass
class Refinement:
    """A finer map with the images of old darts and faces."""

    map: CombinatorialMap
    dart_image: dict[int, tuple[int, ...]]
    face_image: dict[int, tuple[int, ...]]

    def path(self, p: Path) -> Path:
        darts = tuple(x for d in p.darts for x in self.dart_image[d])
        if darts:
            return self.map.path(darts)
        return Path((), self.map.tail(self._vertex_dart(p.start)))

    def _vertex_dart(self, v):
        return self._old_vertex_darts[v]

    def areas(
        self,
        areas: Mapping[int, Fraction | float],
        weights: Mapping[int, Sequence[float | Fraction]] | None = None,
    ) -> dict[int, Fraction | float]:
        """Push an area vector forward; split faces share area by ``weights``."""
        out = {}
        for f, a in areas.items():
            img = self.face_image[f]
            if len(img) == 1:
                out[img[0]] = a
                continue
            w = weights[f] if weights and f in weights else [1] * len(img)
            tot = sum(w)
            for g, wi in zip(img, w):
                out[g] = a * wi / tot
        return out


def _finish(old, alpha, sigma, positive, dart_image, face_image_fn) -> Refinement:
    bdarts = [old.faces[f][0] for f in old.boundary]
    m = build_map(alpha, sigma, positive, bdarts)
    ref = Refinement(m, dart_image, face_image_fn(m))
    ref._old_vertex_darts = [cyc[0] for cyc in old.vertices]
    return ref


def subdivide_edge(m: CombinatorialMap, d: int) -> Refinement:
    """Insert a degree-two vertex in the middle of the edge of dart ``d``."""
    m.check_dart(d)
    n = m.n_darts
    a = m.alpha[d]
    p, q = n, n + 1  # p: middle -> head(d), q: middle -> tail(d)
    alpha = list(m.alpha) + [0, 0]
    alpha[d], alpha[q] = q, d
    alpha[a], alpha[p] = p, a
    sigma = list(m.sigma) + [q, p]
    positive = [x for x in m.positive] + [p if d in m.positive else q]
    image = {x: (x,) for x in range(n)}
    image[d] = (d, p)
    image[a] = (a, q)

    def faces(new):
        return {f: (new.face_of[cyc[0]],) for f, cyc in enumerate(m.faces)}

    return _finish(m, alpha, sigma, positive, image, faces)


def split_face(m: CombinatorialMap, d1: int, d2: int) -> Refinement:
    """Add a chord across the face containing ``d1`` and ``d2``.

    The new edge goes from ``tail(d1)`` to ``tail(d2)`` through the face's
    corners following ``d1`` and ``d2``. Boundary faces cannot be split.
    """
    m.check_dart(d1)
    m.check_dart(d2)
    f = m.face_of[d1]
    if d1 == d2 or m.face_of[d2] != f:
        raise MapError("split_face needs two distinct darts of the same face")
    if f in m.boundary:
        raise MapError("boundary faces cannot be split")
    n = m.n_darts
    c, cb = n, n + 1
    alpha = list(m.alpha) + [cb, c]
    sigma = list(m.sigma) + [m.sigma[d1], m.sigma[d2]]
    sigma[d1] = c
    sigma[d2] = cb
    positive = list(m.positive) + [c]
    image = {x: (x,) for x in range(n)}

    def faces(new):
        out = {g: (new.face_of[cyc[0]],) for g, cyc in enumerate(m.faces)}
        out[f] = tuple(sorted({new.face_of[c], new.face_of[cb]}))
        return out

    return _finish(m, alpha, sigma, positive, image, faces)


def cone_face(m: CombinatorialMap, f: int) -> Refinement:
    """Add a vertex inside face ``f`` joined to each of its corners."""
    if f in m.boundary:
        raise MapError("boundary faces cannot be coned")
    cyc = m.faces[f]
    k = len(cyc)
    n = m.n_darts
    s = [n + 2 * i for i in range(k)]  # corner -> centre
    t = [n + 2 * i + 1 for i in range(k)]  # centre -> corner
    alpha = list(m.alpha) + [0] * (2 * k)
    sigma = list(m.sigma) + [0] * (2 * k)
    for i, d in enumerate(cyc):
        alpha[s[i]], alpha[t[i]] = t[i], s[i]
        sigma[s[i]] = m.sigma[d]
        sigma[d] = s[i]
        sigma[t[i]] = t[(i + 1) % k]
    positive = list(m.positive) + s
    image = {x: (x,) for x in range(n)}

    def faces(new):
        out = {g: (new.face_of[c[0]],) for g, c in enumerate(m.faces)}
        out[f] = tuple(new.face_of[d] for d in cyc)
        return out

    return _finish(m, alpha, sigma, positive, image, faces)


def remove_edges(m: CombinatorialMap, darts: Sequence[int]) -> tuple[CombinatorialMap, dict[int, int]]:
    """Delete the edges of ``darts``, merging the faces on either side.

    Returns the smaller map and the renumbering of the surviving darts. Each
    deleted edge must separate two distinct faces and must not leave an
    isolated vertex, so the genus is unchanged.
    """
    gone: set[int] = set()
    for d in darts:
        m.check_dart(d)
        gone |= {d, m.alpha[d]}
    keep = [d for d in range(m.n_darts) if d not in gone]
    new = {d: i for i, d in enumerate(keep)}
    rotations = []
    for cyc in m.vertices:
        rot = [new[d] for d in cyc if d not in gone]
        if not rot:
            raise MapError(f"removing edges isolates the vertex of dart {cyc[0]}")
        rotations.append(rot)
    sigma = [0] * len(keep)
    for rot in rotations:
        for i, d in enumerate(rot):
            sigma[d] = rot[(i + 1) % len(rot)]
    alpha = [new[m.alpha[d]] for d in keep]
    positive = [new[d] for d in m.positive if d not in gone]
    bdarts = []
    for f in m.boundary:
        kept = [new[d] for d in m.faces[f] if d not in gone]
        if not kept:
            raise MapError(f"boundary face {f} disappears")
        bdarts.append(kept[0])
    out = build_map(alpha, sigma, positive, bdarts)
    if out.genus != m.genus:
        raise MapError("edge removal changed the genus")
    return out, new
