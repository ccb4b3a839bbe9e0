"""Lifting loops to the universal cover of a closed surface.

A :class:`FundamentalPolygonMap` is a closed map of genus ``g >= 1`` with
``2g`` side loops through a corner vertex that cut the surface into a
polygon with boundary word ``x1 y1 x1^-1 y1^-1 ... xg yg xg^-1 yg^-1``.

A dart of the universal cover is written ``(h, d)``: the copy of dart ``d``
whose left face lies in the copy of the polygon labelled by the deck element
``h``. Crossing a side dart from its left to its right multiplies the tile
label on the right by a generator of the deck group; going once around the
corner multiplies these generators into the defining relator.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .construct import PolygonSides, side_labels
from .errors import AreaMismatch, NoPolygonStructure, NotRegularWrtPolygon
from .homology import homology_class
from .maps import CombinatorialMap, Path, build_map, intersection_profile
from .planar import eval_planar
from .surface_group import (
    ElementRegistry,
    SurfaceGroup,
    commutator_relator,
    free_reduce,
    inverse,
    word_to_str,
)


class _Torus:
    """Deck group of the torus: Z^2 in the crossing generators."""

    def __init__(self):
        self.identity = (0, 0)

    def step(self, h, letter):
        if letter is None:
            return h
        g, s = letter
        v = list(h)
        v[g] += s
        return tuple(v)

    def key(self, h):
        return h

    def is_identity(self, h):
        return h == (0, 0)


class _Hyperbolic:
    """Deck group of genus ``g >= 2``, words kept Dehn-reduced and registered."""

    def __init__(self, group: SurfaceGroup):
        self.group = group
        self.registry = ElementRegistry(group)
        self.identity = ()
        self.registry.canonical(())

    def step(self, h, letter):
        if letter is None:
            return h
        return self.registry.canonical(h + (letter,))[1]

    def key(self, h):
        return self.registry.canonical(h)[0]

    def is_identity(self, h):
        return self.group.is_identity(h)


@dataclass(frozen=True)
class LiftedPath:
    """Lift of a path starting in the tile of the identity.

    ``tiles[i]`` labels the tile holding the left face of dart ``i``;
    ``deck`` is the label reached when the lift comes back over the start
    dart (``None`` for paths that are not loops).
    """

    darts: tuple[int, ...]
    tiles: tuple
    deck: object
    closed: bool


@dataclass(frozen=True)
class TilingStats:
    """Tiles visited by the vertices of a loop, consecutive repeats removed."""

    path: tuple
    length: int


class FundamentalPolygonMap:
    """Closed map with a polygon structure given by side loops."""

    def __init__(self, m: CombinatorialMap, sides: Mapping[str, Sequence[int]], corner: int | None = None):
        self.map = m
        g = m.genus
        if m.boundary:
            raise NoPolygonStructure("polygon maps must be closed")
        if g < 1:
            raise NoPolygonStructure("polygon structure needs genus at least one")
        self.genus = g
        self.labels = side_labels(g)
        if sorted(sides) != sorted(self.labels):
            raise NoPolygonStructure(f"expected sides {self.labels}, got {sorted(sides)}")
        self.sides = {k: tuple(int(d) for d in sides[k]) for k in self.labels}
        self._check_sides(corner)
        # crossing generator of each side dart
        self.crossing: dict[int, tuple[int, int]] = {}
        for i, k in enumerate(self.labels):
            for d in self.sides[k]:
                self.crossing[d] = (i, 1)
                self.crossing[m.alpha[d]] = (i, -1)
        self.relator = self._corner_relator()
        self._check_relator()
        if g == 1:
            self.deck = _Torus()
        else:
            self.group = SurfaceGroup(self.relator, 2 * g)
            if not self.group.satisfies_small_cancellation():
                raise NoPolygonStructure("corner relator fails small cancellation")
            self.deck = _Hyperbolic(self.group)
        self._side_images()

    @classmethod
    def from_sides(cls, ps: PolygonSides) -> "FundamentalPolygonMap":
        return cls(ps.map, ps.sides, ps.corner)

    # --- validation -------------------------------------------------------------
    def _check_sides(self, corner):
        m = self.map
        used = set()
        inner_vertices = []
        starts = set()
        for k, path in self.sides.items():
            if not path:
                raise NoPolygonStructure(f"side {k} is empty")
            try:
                m.loop(path)
            except Exception as exc:
                raise NoPolygonStructure(f"side {k} is not a loop: {exc}") from exc
            starts.add(m.tail(path[0]))
            for d in path:
                e = m.edge_of[d]
                if e in used:
                    raise NoPolygonStructure(f"edge of dart {d} used twice by the sides")
                used.add(e)
            inner_vertices += [m.head(d) for d in path[:-1]]
        if len(starts) != 1:
            raise NoPolygonStructure("sides do not share a corner")
        self.corner = starts.pop()
        if corner is not None and corner != self.corner:
            raise NoPolygonStructure("corner does not match the sides")
        if len(set(inner_vertices)) != len(inner_vertices) or self.corner in inner_vertices:
            raise NoPolygonStructure("sides meet away from the corner")
        self.side_edges = frozenset(used)
        self.side_vertices = frozenset(inner_vertices) | {self.corner}
        # cutting along the sides must leave a disc
        v_cut = m.n_vertices - len(inner_vertices) - 1 + 2 * len(inner_vertices) + 4 * self.genus
        e_cut = m.n_edges + len(used)
        if v_cut - e_cut + m.n_faces != 1:
            raise NoPolygonStructure("cutting along the sides does not give a disc")
        seen = {0}
        todo = [0]
        while todo:
            f = todo.pop()
            for x in m.faces[f]:
                if m.edge_of[x] in used:
                    continue
                g = m.right_face(x)
                if g not in seen:
                    seen.add(g)
                    todo.append(g)
        if len(seen) != m.n_faces:
            raise NoPolygonStructure("faces are disconnected once the sides are cut")

    def _corner_relator(self):
        m = self.map
        word = []
        start = m.vertices[self.corner][0]
        x = start
        while True:
            x = m.sigma[x]
            if x in self.crossing:
                g, s = self.crossing[x]
                word.append((g, -s))
            if x == start:
                break
        return free_reduce(word)

    def _check_relator(self):
        rel = self.relator
        if len(rel) != 4 * self.genus:
            raise NoPolygonStructure("corner relator has the wrong length")
        for g in range(2 * self.genus):
            if sorted(s for h, s in rel if h == g) != [-1, 1]:
                raise NoPolygonStructure("corner relator is not a surface relator")

    def _side_images(self):
        # deck element of each side loop, in crossing generators
        self.side_deck = {k: self.lift(self.map.path(self.sides[k])).deck for k in self.labels}
        if self.genus == 1:
            (a1, a2), (b1, b2) = self.side_deck["x1"], self.side_deck["y1"]
            det = a1 * b2 - a2 * b1
            if abs(det) != 1:
                raise NoPolygonStructure("side loops do not generate the deck group")
            # inverse of the matrix with columns side_deck[x1], side_deck[y1]
            self._to_sides = ((b2 * det, -b1 * det), (-a2 * det, a1 * det))
            return
        self.side_group = SurfaceGroup(commutator_relator(self.genus), 2 * self.genus)
        self._crossing_in_sides = self._crossing_words()
        for i, k in enumerate(self.labels):
            if not self.side_group.equal(self.deck_in_sides(self.side_deck[k]), ((i, 1),)):
                raise NoPolygonStructure("side loops do not match the polygon gluing")

    def _crossing_words(self):
        """Each crossing generator as a word in the side loops.

        Crossing side ``L`` from the polygon copy where ``L`` runs forward to
        the copy where it runs backward is homotopic to walking along the
        polygon boundary from the home corner to the start of the forward
        copy, then from the start of the backward copy back to the home corner.
        """
        m = self.map
        boundary = commutator_relator(self.genus)  # side letters in polygon order
        n = len(boundary)
        out_dart = []
        for g, s in boundary:
            side = self.sides[self.labels[g]]
            out_dart.append(side[0] if s > 0 else m.alpha[side[-1]])
        corner_of = {d: i for i, d in enumerate(out_dart)}
        x = m.vertices[self.corner][0]
        while x not in corner_of:
            x = m.sigma_inv[x]
        home = corner_of[x]

        def walk(i, j):
            word = []
            while i != j:
                word.append(boundary[i])
                i = (i + 1) % n
            return word

        words = {}
        for g in range(2 * self.genus):
            fwd = boundary.index((g, 1))
            bwd = boundary.index((g, -1))
            words[g] = free_reduce(walk(home, fwd) + walk((bwd + 1) % n, home))
        return words

    # --- lifting ----------------------------------------------------------------
    def _letter(self, d, inverse_=False):
        lt = self.crossing.get(d)
        if lt is None:
            return None
        g, s = lt
        return (g, -s) if inverse_ else (g, s)

    def turn(self, h, x: int, y: int):
        """Tile label of the copy of ``y`` reached by turning counter-clockwise from ``(h, x)``."""
        m = self.map
        while x != y:
            x = m.sigma[x]
            h = self.deck.step(h, self._letter(x, inverse_=True))
        return h

    def arrive(self, h, d: int):
        """Tile label of the reversed copy of ``(h, d)``."""
        return self.deck.step(h, self._letter(d))

    def lift(self, path: Path) -> LiftedPath:
        """Lift a path; tiles are measured from the first dart of the start vertex.

        Using a fixed reference dart at the base vertex makes the deck
        element of a loop a homomorphism of the fundamental group.
        """
        m = self.map
        ds = path.darts
        if not ds:
            return LiftedPath((), (), self.deck.identity, True)
        home = m.vertices[m.tail(ds[0])][0]
        tiles = [self.turn(self.deck.identity, home, ds[0])]
        for a, b in zip(ds, ds[1:]):
            h = self.arrive(tiles[-1], a)
            tiles.append(self.turn(h, m.alpha[a], b))
        deck = None
        closed = False
        if m.head(ds[-1]) == m.tail(ds[0]):
            deck = self.turn(self.arrive(tiles[-1], ds[-1]), m.alpha[ds[-1]], home)
            closed = self.deck.is_identity(deck)
        return LiftedPath(tuple(ds), tuple(tiles), deck, closed)

    # --- reporting ----------------------------------------------------------------
    def deck_in_sides(self, h):
        """Deck element in terms of side loops: a vector for the torus, a word otherwise."""
        if self.genus == 1:
            (p, q), (r, s) = self._to_sides
            return (p * h[0] + q * h[1], r * h[0] + s * h[1])
        out = []
        for g, s in h:
            piece = self._crossing_in_sides[g]
            out += piece if s > 0 else inverse(piece)
        return self.side_group.reduce(out)

    def deck_str(self, h) -> str:
        if self.genus == 1:
            return str(self.deck_in_sides(h))
        return word_to_str(self.deck_in_sides(h), self.labels)

    def homology_basis(self) -> list[Path]:
        return [self.map.path(self.sides[k]) for k in self.labels]

    def homology_class(self, loop: Path) -> tuple[int, ...]:
        return homology_class(self.map, loop, self.homology_basis())


def lift_loop(fpm: FundamentalPolygonMap, loop: Path) -> LiftedPath:
    return fpm.lift(loop)


def is_contractible(fpm: FundamentalPolygonMap, loop: Path) -> bool:
    return fpm.lift(loop).closed


def tiling_stats(fpm: FundamentalPolygonMap, loop: Path, strict: bool = False) -> TilingStats:
    """Sequence of tiles met by the vertices of a loop and its number of changes.

    A vertex on the polygon sides lies in several tiles; it is assigned to the
    tile of the copy of the first dart of its rotation. With ``strict`` the
    loop must avoid the sides' edges, be based off the sides and cross itself
    only off the sides.
    """
    m = fpm.map
    if strict:
        _check_regular(fpm, loop)
    lift = fpm.lift(loop)
    ds = loop.darts
    if not ds:
        return TilingStats((fpm.deck_in_sides(fpm.deck.identity),), 0)
    seq = []
    for h, x in zip(lift.tiles, ds):
        home = m.vertices[m.tail(x)][0]
        seq.append(fpm.turn(h, x, home))
    last = fpm.arrive(lift.tiles[-1], ds[-1])
    seq.append(fpm.turn(last, m.alpha[ds[-1]], m.vertices[m.head(ds[-1])][0]))
    path = []
    keys = []
    for h in seq:
        k = fpm.deck.key(h)
        if not keys or keys[-1] != k:
            keys.append(k)
            path.append(fpm.deck_in_sides(h))
    return TilingStats(tuple(path), len(path) - 1)


def _check_regular(fpm, loop):
    m = fpm.map
    if any(m.edge_of[d] in fpm.side_edges for d in loop.darts):
        raise NotRegularWrtPolygon("loop runs along a polygon side")
    if loop.start in fpm.side_vertices:
        raise NotRegularWrtPolygon("loop is based on a polygon side")
    try:
        prof = intersection_profile(m, loop)
    except Exception as exc:
        raise NotRegularWrtPolygon(str(exc)) from exc
    if any(v in fpm.side_vertices for v in prof.crossings):
        raise NotRegularWrtPolygon("loop crosses itself on a polygon side")


# --- evaluation through a planar patch ------------------------------------------------


@dataclass
class LiftedPatch:
    """Finite planar piece of the cover around a contractible lifted loop."""

    map: CombinatorialMap
    loop: Path
    face_of_base: dict[int, int]


def lifted_patch(fpm: FundamentalPolygonMap, loop: Path) -> LiftedPatch:
    """Planar map made of the lifted faces touching or enclosed by the lift.

    Everything else becomes the single boundary face.
    """
    m = fpm.map
    lift = fpm.lift(loop)
    if not lift.closed:
        raise NotRegularWrtPolygon("loop does not lift to a closed loop")
    key = fpm.deck.key

    faces: dict[tuple, tuple] = {}  # (tile key, face) -> (tile, face)

    def add_face(h, f):
        faces.setdefault((key(h), f), (h, f))

    for h, x in zip(lift.tiles, lift.darts):
        add_face(h, m.face_of[x])
        add_face(fpm.arrive(h, x), m.face_of[m.alpha[x]])

    while True:
        pm, dart_ids, face_map = _patch_map(fpm, faces)
        outside = [f for f in range(pm.n_faces) if f not in face_map]
        if len(outside) == 1:
            break
        holes = _find_holes(fpm, pm, dart_ids, outside, faces)
        for h, f in holes:
            add_face(h, f)

    ids = {v: k for k, v in dart_ids.items()}
    darts = tuple(ids[(key(h), x)] for h, x in zip(lift.tiles, lift.darts))
    bd = pm.faces[outside[0]][0]
    pm = build_map(pm.alpha, pm.sigma, pm.positive, [bd])
    return LiftedPatch(pm, pm.path(darts), {f: face_map[f] for f in face_map})


def _patch_map(fpm, faces):
    m = fpm.map
    key = fpm.deck.key
    darts: dict[tuple, tuple] = {}
    for h, f in faces.values():
        for x in m.faces[f]:
            darts[(key(h), x)] = (h, x)
            r = fpm.arrive(h, x)
            darts[(key(r), m.alpha[x])] = (r, m.alpha[x])
    order = sorted(darts, key=lambda k: (str(k[0]), k[1]))
    # pair each dart with its reverse so ids 2k, 2k+1 share an edge
    ids: dict[tuple, int] = {}
    for k in order:
        if k in ids:
            continue
        h, x = darts[k]
        r = fpm.arrive(h, x)
        rk = (key(r), m.alpha[x])
        n = len(ids)
        ids[k] = n
        ids[rk] = n + 1
    n = len(ids)
    alpha = [i ^ 1 for i in range(n)]
    sigma = [0] * n
    for k, i in ids.items():
        h, x = darts[k]
        y = x
        while True:
            y_next = m.sigma[y]
            h = fpm.deck.step(h, fpm._letter(y_next, inverse_=True))
            y = y_next
            kk = (key(h), y)
            if kk in ids:
                sigma[i] = ids[kk]
                break
    positive = [i for i in range(0, n, 2)]
    pm = build_map(alpha, sigma, positive)
    face_map = {}
    for (tk, f), (h, _) in faces.items():
        i = ids[(tk, m.faces[f][0])]
        face_map[pm.face_of[i]] = f
    dart_ids = {i: k for k, i in ids.items()}
    return pm, dart_ids, face_map


def _find_holes(fpm, pm, dart_ids, outside, faces):
    """Flood the regions outside the patch in turn; all but the last to grow forever are holes."""
    m = fpm.map
    key = fpm.deck.key
    states = []
    for f in outside:
        seen = {}
        todo = deque()
        for i in pm.faces[f]:
            tk, x = dart_ids[i]
            h = _tile_of(fpm, pm, dart_ids, i)
            fk = (tk, m.face_of[x])
            if fk not in faces and fk not in seen:
                seen[fk] = (h, m.face_of[x])
                todo.append((h, m.face_of[x]))
        states.append((seen, todo))
    done = [False] * len(states)
    while sum(not d for d in done) > 1:
        for j, (seen, todo) in enumerate(states):
            if done[j]:
                continue
            if not todo:
                done[j] = True
                continue
            h, f = todo.popleft()
            for x in m.faces[f]:
                r = fpm.arrive(h, x)
                g = m.face_of[m.alpha[x]]
                fk = (key(r), g)
                if fk in faces or fk in seen:
                    continue
                seen[fk] = (r, g)
                todo.append((r, g))
    holes = []
    for j, (seen, _) in enumerate(states):
        if done[j]:
            holes.extend(seen.values())
    return holes


def _tile_of(fpm, pm, dart_ids, i):
    # the patch stores tile keys; recover a tile word by re-walking is avoided
    # by keeping representatives in the registry
    tk, _ = dart_ids[i]
    if fpm.genus == 1:
        return tk
    return fpm.deck.registry.words[tk]


@dataclass(frozen=True)
class SurfaceValue:
    value: float
    provenance: str
    contractible: bool


def eval_surface(
    fpm: FundamentalPolygonMap, loop: Path, areas: Mapping[int, float]
) -> SurfaceValue:
    """Master field of a loop on a closed surface through its planar lift.

    Non-contractible loops get zero. Results on the torus are exact; for
    genus two and more they rest on a conjectured formula and are tagged as
    such.
    """
    m = fpm.map
    prov = "exact" if fpm.genus == 1 else "conjectural"
    if set(areas) != set(range(m.n_faces)):
        raise AreaMismatch("areas must be given for every face of the closed map")
    if not loop.darts:
        return SurfaceValue(1.0, prov, True)
    if not fpm.lift(loop).closed:
        return SurfaceValue(0.0, prov, False)
    patch = lifted_patch(fpm, loop)
    a = {f: float(areas[g]) for f, g in patch.face_of_base.items()}
    return SurfaceValue(eval_planar(patch.map, patch.loop, a), prov, True)
