"""Combinatorial maps, paths and loops.

A map is stored as a rotation system on darts ``0 .. n-1``:

* ``alpha`` is a fixed-point-free involution pairing the two darts of an
  edge,
* ``sigma`` rotates the darts leaving a vertex counter-clockwise.

Vertices are the orbits of ``sigma``. Faces are the orbits of
``phi = sigma^-1 o alpha``, so that a dart belongs to the face lying on its
left and every face boundary is read counter-clockwise. The corner swept
counter-clockwise from a dart ``d`` to ``sigma(d)`` belongs to the face of
``d``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import (
    BoundaryAdjacent,
    DisconnectedMap,
    EdgeReused,
    HasBoundary,
    MapError,
    NegativeGenus,
    NotACrossing,
    NotALoop,
    NotInvolution,
    NotOnMap,
    NotPermutation,
    VertexOverused,
)


def _cycles(perm: Sequence[int]) -> list[tuple[int, ...]]:
    """Cycles of a permutation, each starting at its least element, sorted."""
    seen = [False] * len(perm)
    out = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        d = start
        while not seen[d]:
            seen[d] = True
            cyc.append(d)
            d = perm[d]
        out.append(tuple(cyc))
    return out


def _check_permutation(perm: Sequence[int], n: int, name: str) -> None:
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise NotPermutation(f"{name} is not a permutation of 0..{n - 1}")


class CombinatorialMap:
    """Rotation system with optional boundary faces.

    Use :func:`build_map` rather than calling the constructor directly; the
    constructor trusts its input apart from cheap consistency checks.
    """

    def __init__(
        self,
        alpha: Sequence[int],
        sigma: Sequence[int],
        positive: Sequence[int] | None = None,
        boundary: Iterable[int] = (),
    ):
        n = len(alpha)
        self.n_darts = n
        self.alpha = tuple(int(a) for a in alpha)
        self.sigma = tuple(int(s) for s in sigma)
        inv = [0] * n
        for d, s in enumerate(self.sigma):
            inv[s] = d
        self.sigma_inv = tuple(inv)
        self.phi = tuple(self.sigma_inv[self.alpha[d]] for d in range(n))

        self.vertices = _cycles(self.sigma)
        self.faces = _cycles(self.phi)
        self.vertex_of = [0] * n
        for i, cyc in enumerate(self.vertices):
            for d in cyc:
                self.vertex_of[d] = i
        self.face_of = [0] * n
        for i, cyc in enumerate(self.faces):
            for d in cyc:
                self.face_of[d] = i

        if positive is None:
            positive = [d for d in range(n) if d < self.alpha[d]]
        self.positive = tuple(sorted(int(d) for d in positive))
        self.edge_of = [0] * n
        self.edge_sign = [0] * n
        for k, d in enumerate(self.positive):
            self.edge_of[d] = k
            self.edge_of[self.alpha[d]] = k
            self.edge_sign[d] = 1
            self.edge_sign[self.alpha[d]] = -1
        # boundary faces are given by face index
        self.boundary = tuple(sorted(set(int(f) for f in boundary)))

    # --- counts -----------------------------------------------------------
    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return self.n_darts // 2

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    @property
    def inner_faces(self) -> tuple[int, ...]:
        """Faces that are not boundary faces."""
        b = set(self.boundary)
        return tuple(f for f in range(self.n_faces) if f not in b)

    # --- incidence ----------------------------------------------------------
    def tail(self, d: int) -> int:
        return self.vertex_of[d]

    def head(self, d: int) -> int:
        return self.vertex_of[self.alpha[d]]

    def left_face(self, d: int) -> int:
        return self.face_of[d]

    def right_face(self, d: int) -> int:
        return self.face_of[self.alpha[d]]

    def face_containing(self, d: int) -> int:
        return self.face_of[d]

    def darts_at(self, v: int) -> tuple[int, ...]:
        return self.vertices[v]

    def rotation_from(self, d: int) -> list[int]:
        """Darts at ``tail(d)`` in counter-clockwise order starting at ``d``."""
        out = [d]
        x = self.sigma[d]
        while x != d:
            out.append(x)
            x = self.sigma[x]
        return out

    def check_dart(self, d: int) -> int:
        if not isinstance(d, int) or d < 0 or d >= self.n_darts:
            raise NotOnMap(f"dart {d!r} is not a dart of this map")
        return d

    def __eq__(self, other):
        if not isinstance(other, CombinatorialMap):
            return NotImplemented
        return (
            self.alpha == other.alpha
            and self.sigma == other.sigma
            and self.positive == other.positive
            and self.boundary == other.boundary
        )

    def __hash__(self):
        return hash((self.alpha, self.sigma, self.positive, self.boundary))

    def __repr__(self):
        return (
            f"CombinatorialMap(V={self.n_vertices}, E={self.n_edges}, "
            f"F={self.n_faces}, genus={self.genus}, boundary={list(self.boundary)})"
        )

    # --- paths ------------------------------------------------------------
    def path(self, darts: Sequence[int], start: int | None = None) -> "Path":
        """Validated path along ``darts``; ``start`` is needed only if empty."""
        darts = tuple(int(d) for d in darts)
        for d in darts:
            self.check_dart(d)
        if darts:
            if start is not None and start != self.tail(darts[0]):
                raise NotOnMap("start vertex does not match the first dart")
            start = self.tail(darts[0])
        elif start is None:
            raise NotOnMap("an empty path needs a start vertex")
        elif not 0 <= start < self.n_vertices:
            raise NotOnMap(f"vertex {start} is not a vertex of this map")
        for a, b in zip(darts, darts[1:]):
            if self.head(a) != self.tail(b):
                raise NotOnMap(f"darts {a} and {b} are not consecutive")
        return Path(darts, start)

    def loop(self, darts: Sequence[int], base: int | None = None) -> "Path":
        """Validated loop; raises :class:`NotALoop` if it does not close."""
        p = self.path(darts, base)
        if p.darts and self.head(p.darts[-1]) != p.start:
            raise NotALoop("path does not end where it starts")
        return p

    def end(self, p: "Path") -> int:
        return self.head(p.darts[-1]) if p.darts else p.start

    def inverse(self, p: "Path") -> "Path":
        return Path(tuple(self.alpha[d] for d in reversed(p.darts)), self.end(p))

    def concat(self, p: "Path", q: "Path") -> "Path":
        if self.end(p) != q.start:
            raise NotOnMap("paths are not composable")
        return Path(p.darts + q.darts, p.start)

    def face_boundary(self, f: int, start: int | None = None) -> "Path":
        """Counter-clockwise boundary loop of face ``f``."""
        cyc = self.faces[f]
        if start is not None:
            i = cyc.index(start)
            cyc = cyc[i:] + cyc[:i]
        return Path(tuple(cyc), self.tail(cyc[0]))


@dataclass(frozen=True)
class Path:
    """Sequence of darts with its start vertex (kept for empty paths)."""

    darts: tuple[int, ...]
    start: int

    def __len__(self):
        return len(self.darts)

    def __iter__(self):
        return iter(self.darts)


def _orbits_connected(n: int, perms: Sequence[Sequence[int]]) -> bool:
    if n == 0:
        return True
    seen = {0}
    todo = [0]
    while todo:
        d = todo.pop()
        for p in perms:
            e = p[d]
            if e not in seen:
                seen.add(e)
                todo.append(e)
    return len(seen) == n


def build_map(
    alpha: Sequence[int],
    sigma: Sequence[int],
    orientation: Sequence[int] | None = None,
    boundary_darts: Iterable[int] = (),
) -> CombinatorialMap:
    """Validate a rotation system and build the map.

    ``orientation`` lists one dart per edge (the positively oriented one);
    by default the smaller dart of each pair is positive. Boundary faces are
    designated by any dart on their boundary.
    """
    n = len(alpha)
    if n == 0 or n % 2:
        raise NotInvolution("number of darts must be positive and even")
    _check_permutation(alpha, n, "alpha")
    _check_permutation(sigma, n, "sigma")
    for d, a in enumerate(alpha):
        if a == d or alpha[a] != d:
            raise NotInvolution(f"alpha is not a fixed-point-free involution at dart {d}")
    if orientation is not None:
        orientation = [int(d) for d in orientation]
        pairs = {min(d, alpha[d]) for d in orientation}
        if len(orientation) != n // 2 or len(pairs) != n // 2:
            raise NotInvolution("orientation must pick exactly one dart per edge")
    if not _orbits_connected(n, [alpha, sigma]):
        raise DisconnectedMap("the map is not connected")
    m = CombinatorialMap(alpha, sigma, orientation)
    if m.euler_characteristic > 2 or m.euler_characteristic % 2:
        raise NegativeGenus(f"Euler characteristic {m.euler_characteristic} gives no valid genus")
    faces = []
    for d in boundary_darts:
        m.check_dart(int(d))
        faces.append(m.face_of[int(d)])
    m = CombinatorialMap(alpha, sigma, orientation, faces)
    _check_boundary(m)
    return m


def _check_boundary(m: CombinatorialMap) -> None:
    bset = set(m.boundary)
    for d in m.positive:
        f, g = m.left_face(d), m.right_face(d)
        if f != g and f in bset and g in bset:
            raise BoundaryAdjacent(f"boundary faces {f} and {g} share edge of dart {d}")


def map_from_rotations(
    rotations: Sequence[Sequence[int]],
    alpha: Sequence[int] | None = None,
    orientation: Sequence[int] | None = None,
    boundary_darts: Iterable[int] = (),
) -> CombinatorialMap:
    """Build a map from counter-clockwise dart lists, one per vertex.

    Without ``alpha`` the darts are paired as ``(2k, 2k+1)``.
    """
    n = sum(len(r) for r in rotations)
    sigma = [-1] * n
    for rot in rotations:
        for i, d in enumerate(rot):
            if not 0 <= d < n or sigma[d] != -1:
                raise NotPermutation(f"dart {d} listed twice or out of range")
            sigma[d] = rot[(i + 1) % len(rot)]
    if alpha is None:
        alpha = [d ^ 1 for d in range(n)]
    return build_map(alpha, sigma, orientation, boundary_darts)


def with_boundary(m: CombinatorialMap, boundary_darts: Iterable[int]) -> CombinatorialMap:
    """Same map with boundary faces designated by the given darts."""
    return build_map(m.alpha, m.sigma, m.positive, boundary_darts)


def dual_map(m: CombinatorialMap) -> CombinatorialMap:
    """Dual map with the same dart ids.

    Dual vertices are the faces of ``m`` and dual darts keep their ids: dual
    dart ``d`` leaves the face of ``d`` and crosses ``d`` from its left to its
    right. The dual of a positive edge ``e`` is oriented from the face on the
    right of ``e`` to the face on its left, so ``alpha(e)`` is its positive dart.
    """
    if m.boundary:
        raise HasBoundary("dual map is defined for maps without boundary")
    positive = [m.alpha[e] for e in m.positive]
    return build_map(m.alpha, m.phi, positive)


# --- path algebra ------------------------------------------------------------


def reduce_path(m: CombinatorialMap, p: Path) -> Path:
    """Erase backtracks ``e e^-1`` until none remain."""
    stack: list[int] = []
    for d in p.darts:
        if stack and stack[-1] == m.alpha[d]:
            stack.pop()
        else:
            stack.append(d)
    return Path(tuple(stack), p.start)


def cyclically_reduce(m: CombinatorialMap, loop: Path) -> Path:
    """Reduce, then strip matching backtracks across the base point."""
    darts = list(reduce_path(m, loop).darts)
    i, j = 0, len(darts) - 1
    while i < j and darts[j] == m.alpha[darts[i]]:
        i += 1
        j -= 1
    core = tuple(darts[i : j + 1])
    start = m.tail(core[0]) if core else (m.head(darts[i - 1]) if i else loop.start)
    return Path(core, start)


def _least_rotation(seq: Sequence) -> int:
    n = len(seq)
    return min(range(n), key=lambda k: tuple(seq[k:]) + tuple(seq[:k])) if n else 0


def cyclic_canonical(m: CombinatorialMap, loop: Path) -> Path:
    """Representative of the rotation class of a loop.

    The dart sequence is rotated to its lexicographically least rotation and
    the base point moves with it. A constant loop keeps its base vertex.
    """
    if not loop.darts:
        return loop
    if m.head(loop.darts[-1]) != loop.start:
        raise NotALoop("path is not closed")
    k = _least_rotation(loop.darts)
    darts = loop.darts[k:] + loop.darts[:k]
    return Path(darts, m.tail(darts[0]))


def rotate_loop(m: CombinatorialMap, loop: Path, k: int) -> Path:
    """Same loop read from its ``k``-th dart."""
    if not loop.darts:
        return loop
    k %= len(loop.darts)
    darts = loop.darts[k:] + loop.darts[:k]
    return Path(darts, m.tail(darts[0]))


# --- self-intersections -------------------------------------------------------


class CrossingKind(str, Enum):
    """How a loop meets itself at a vertex it visits twice."""

    TRANSVERSE = "transverse"
    TANGENT_CCW = "tangent_ccw"
    TANGENT_CW = "tangent_cw"
    TANGENT_OPPOSITE = "tangent_opposite"


@dataclass(frozen=True)
class Crossing:
    """A vertex visited twice.

    ``darts`` are four outgoing darts at the vertex. For a transverse crossing
    they are ``(e1, e2, e3, e4)`` in counter-clockwise order, the loop arriving
    along ``e1`` and leaving along ``e3``, then arriving along ``e2`` and
    leaving along ``e4``. For tangencies they are
    ``(in_1, out_1, in_2, out_2)`` in the order of the two passages.
    """

    vertex: int
    kind: CrossingKind
    darts: tuple[int, int, int, int]
    passages: tuple[int, int]


@dataclass(frozen=True)
class IntersectionProfile:
    """Edge and vertex usage of a loop."""

    edge_use: Mapping[int, int]
    visits: Mapping[int, tuple[int, ...]]
    crossings: Mapping[int, Crossing] = field(default_factory=dict)

    @property
    def transverse(self) -> tuple[int, ...]:
        return tuple(
            v for v, c in sorted(self.crossings.items()) if c.kind is CrossingKind.TRANSVERSE
        )

    @property
    def is_tame(self) -> bool:
        return all(c.kind is CrossingKind.TRANSVERSE for c in self.crossings.values())


def passages(m: CombinatorialMap, loop: Path) -> list[tuple[int, int, int]]:
    """``(vertex, incoming, outgoing)`` for each position of a loop.

    Position ``i`` is the visit between dart ``i-1`` and dart ``i`` (cyclically);
    ``incoming`` is the outgoing dart at that vertex along which the loop
    arrived.
    """
    ds = loop.darts
    return [(m.tail(ds[i]), m.alpha[ds[i - 1]], ds[i]) for i in range(len(ds))]


def intersection_profile(m: CombinatorialMap, loop: Path) -> IntersectionProfile:
    """Check that a loop is an admissible self-intersecting loop and classify it.

    Raises :class:`EdgeReused` when an edge is traversed twice and
    :class:`VertexOverused` when a vertex is visited more than twice.
    """
    if loop.darts and m.head(loop.darts[-1]) != loop.start:
        raise NotALoop("path is not closed")
    use: dict[int, int] = {}
    for d in loop.darts:
        e = m.edge_of[d]
        use[e] = use.get(e, 0) + 1
        if use[e] > 1:
            raise EdgeReused(f"edge {e} (dart {d}) is used more than once")
    visits: dict[int, list[int]] = {}
    pas = passages(m, loop)
    for i, (v, _, _) in enumerate(pas):
        visits.setdefault(v, []).append(i)
        if len(visits[v]) > 2:
            raise VertexOverused(f"vertex {v} is visited more than twice")
    crossings = {}
    for v, idx in visits.items():
        if len(idx) == 2:
            crossings[v] = _classify(m, v, pas[idx[0]], pas[idx[1]], tuple(idx))
    return IntersectionProfile(
        edge_use=use,
        visits={v: tuple(i) for v, i in visits.items()},
        crossings=crossings,
    )


def _classify(m, v, pa, pb, idx) -> Crossing:
    _, in_a, out_a = pa
    _, in_b, out_b = pb
    rot = m.rotation_from(in_a)
    pos = {d: i for i, d in enumerate(rot)}
    four = sorted((in_a, out_a, in_b, out_b), key=pos.__getitem__)
    # four darts in ccw order starting at in_a
    j = four.index(out_a)
    if j == 2:
        # in_b and out_b sit on different sides of the in_a/out_a chord
        nxt = {four[i]: four[(i + 1) % 4] for i in range(4)}
        incoming = (in_a, in_b)
        e1 = next(x for x in incoming if nxt[x] in incoming)
        e2 = nxt[e1]
        e3 = out_a if e1 == in_a else out_b
        e4 = out_b if e1 == in_a else out_a
        return Crossing(v, CrossingKind.TRANSVERSE, (e1, e2, e3, e4), idx)
    # passage a occupies two consecutive slots; ccw turn when out follows in
    turn_a = j == 1
    ib, ob = four.index(in_b), four.index(out_b)
    turn_b = (ib + 1) % 4 == ob
    if turn_a and turn_b:
        kind = CrossingKind.TANGENT_CCW
    elif not turn_a and not turn_b:
        kind = CrossingKind.TANGENT_CW
    else:
        kind = CrossingKind.TANGENT_OPPOSITE
    return Crossing(v, kind, (in_a, out_a, in_b, out_b), idx)


def desingularize(m: CombinatorialMap, loop: Path, v: int) -> tuple[Path, Path]:
    """Split a loop at a transverse self-crossing into two loops based at ``v``.

    With the crossing darts ``(e1, e2, e3, e4)`` the first loop leaves along
    ``e3`` and comes back along ``e2``; the second leaves along ``e4`` and comes
    back along ``e1``. Their concatenation is a rotation of the input.
    """
    prof = intersection_profile(m, loop)
    c = prof.crossings.get(v)
    if c is None or c.kind is not CrossingKind.TRANSVERSE:
        raise NotACrossing(f"vertex {v} is not a transverse self-crossing")
    e1, e2, e3, e4 = c.darts
    ds = loop.darts
    i = ds.index(e3)
    rot = ds[i:] + ds[:i]
    j = rot.index(m.alpha[e2])
    first, second = rot[: j + 1], rot[j + 1 :]
    assert second[0] == e4 and second[-1] == m.alpha[e1]
    return Path(first, v), Path(second, v)


def is_simple(m: CombinatorialMap, loop: Path) -> bool:
    try:
        prof = intersection_profile(m, loop)
    except MapError:
        return False
    return not prof.crossings
