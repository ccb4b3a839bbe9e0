"""Discrete forms on a map, homology of loops and Makeenko-Migdal vectors.

A ``k``-form stores one rational number per ``k``-cell: per vertex, per
positively oriented edge (in the order of ``m.positive``) or per face. A
1-form evaluated on the reverse of a positive dart changes sign.

Sign conventions:

* ``(d f)(e) = f(head e) - f(tail e)``
* ``(d w)(F) = sum of w over the counter-clockwise boundary of F``
* ``(d* mu)(e) = mu(left face of e) - mu(right face of e)``
* ``(d* w)(v) = sum_e w(e) [head e = v] - w(e) [tail e = v]``

so that ``d*`` is the adjoint of ``d`` for the counting inner products.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import exact
from .errors import (
    BasisNotIndependent,
    DegreeMismatch,
    MapError,
    NonZeroHomology,
    NotACrossing,
    NotALoop,
    NotTame,
)
from .maps import CombinatorialMap, CrossingKind, Path, intersection_profile


@dataclass(frozen=True)
class DiscreteForm:
    """Rational cochain of a given degree."""

    degree: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise DegreeMismatch(f"degree must be 0, 1 or 2, got {self.degree}")
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))

    def _check(self, other: "DiscreteForm"):
        if self.degree != other.degree or len(self.values) != len(other.values):
            raise DegreeMismatch("forms of different degree or size")

    def __add__(self, other):
        self._check(other)
        return DiscreteForm(self.degree, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other):
        self._check(other)
        return DiscreteForm(self.degree, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self):
        return DiscreteForm(self.degree, tuple(-a for a in self.values))

    def __mul__(self, c):
        c = Fraction(c)
        return DiscreteForm(self.degree, tuple(c * a for a in self.values))

    __rmul__ = __mul__

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def is_zero(self) -> bool:
        return not any(self.values)

    def dot(self, other: "DiscreteForm") -> Fraction:
        self._check(other)
        return sum((a * b for a, b in zip(self.values, other.values)), Fraction(0))


def _size(m: CombinatorialMap, degree: int) -> int:
    return (m.n_vertices, m.n_edges, m.n_faces)[degree]


def zero_form(m: CombinatorialMap, degree: int) -> DiscreteForm:
    return DiscreteForm(degree, (Fraction(0),) * _size(m, degree))


def _check_on(m: CombinatorialMap, w: DiscreteForm):
    if len(w.values) != _size(m, w.degree):
        raise DegreeMismatch("form does not match the map")


def value_on_dart(m: CombinatorialMap, w: DiscreteForm, d: int) -> Fraction:
    if w.degree != 1:
        raise DegreeMismatch("only 1-forms are evaluated on darts")
    return m.edge_sign[d] * w.values[m.edge_of[d]]


def d(m: CombinatorialMap, w: DiscreteForm) -> DiscreteForm:
    """Exterior derivative."""
    _check_on(m, w)
    if w.degree == 0:
        vals = [w.values[m.head(e)] - w.values[m.tail(e)] for e in m.positive]
        return DiscreteForm(1, vals)
    if w.degree == 1:
        vals = [sum((value_on_dart(m, w, x) for x in cyc), Fraction(0)) for cyc in m.faces]
        return DiscreteForm(2, vals)
    raise DegreeMismatch("d is not defined on 2-forms")


def d_star(m: CombinatorialMap, w: DiscreteForm) -> DiscreteForm:
    """Adjoint of :func:`d`."""
    _check_on(m, w)
    if w.degree == 2:
        vals = [w.values[m.left_face(e)] - w.values[m.right_face(e)] for e in m.positive]
        return DiscreteForm(1, vals)
    if w.degree == 1:
        vals = [Fraction(0)] * m.n_vertices
        for k, e in enumerate(m.positive):
            vals[m.head(e)] += w.values[k]
            vals[m.tail(e)] -= w.values[k]
        return DiscreteForm(0, vals)
    raise DegreeMismatch("d* is not defined on 0-forms")


def dart_form(m: CombinatorialMap, dart: int) -> DiscreteForm:
    """The 1-form of a single dart: +1 on its edge if positive, -1 otherwise."""
    vals = [Fraction(0)] * m.n_edges
    vals[m.edge_of[dart]] = Fraction(m.edge_sign[dart])
    return DiscreteForm(1, vals)


def face_form(m: CombinatorialMap, f: int) -> DiscreteForm:
    vals = [Fraction(0)] * m.n_faces
    vals[f] = Fraction(1)
    return DiscreteForm(2, vals)


def constant_area_form(m: CombinatorialMap) -> DiscreteForm:
    """The 2-form equal to one on every face."""
    return DiscreteForm(2, (Fraction(1),) * m.n_faces)


def loop_one_form(m: CombinatorialMap, path: Path) -> DiscreteForm:
    """Signed number of passages of a path through each edge."""
    vals = [Fraction(0)] * m.n_edges
    for x in path.darts:
        vals[m.edge_of[x]] += m.edge_sign[x]
    return DiscreteForm(1, vals)


# --- homology ------------------------------------------------------------------


def spanning_tree(m: CombinatorialMap, root: int = 0) -> list[int | None]:
    """Breadth-first spanning tree; entry ``v`` is the dart from the parent of ``v``."""
    parent: list[int | None] = [None] * m.n_vertices
    seen = {root}
    todo = deque([root])
    while todo:
        v = todo.popleft()
        for x in m.vertices[v]:
            w = m.head(x)
            if w not in seen:
                seen.add(w)
                parent[w] = x
                todo.append(w)
    return parent


def tree_path(m: CombinatorialMap, parent: Sequence[int | None], root: int, v: int) -> Path:
    """Path from the root to ``v`` inside the tree."""
    darts = []
    while v != root:
        x = parent[v]
        darts.append(x)
        v = m.tail(x)
    return Path(tuple(reversed(darts)), root)


def tree_cotree(m: CombinatorialMap, root: int = 0, root_face: int | None = None):
    """Split the positive edges into a tree, a dual tree and the leftovers.

    Returns ``(parent, cotree, leftover)`` where ``parent`` describes the
    primal spanning tree, ``cotree`` maps each non-root face to the positive
    dart crossed to reach it from its dual parent together with the parent
    face, and ``leftover`` lists the ``2g`` remaining positive darts.
    """
    parent = spanning_tree(m, root)
    tree_edges = {m.edge_of[x] for x in parent if x is not None}
    if root_face is None:
        root_face = m.boundary[0] if m.boundary else 0
    cotree: dict[int, tuple[int, int]] = {}
    seen = {root_face}
    order = [root_face]
    todo = deque([root_face])
    cot_edges = set()
    while todo:
        f = todo.popleft()
        for x in m.faces[f]:
            e = m.edge_of[x]
            if e in tree_edges or e in cot_edges:
                continue
            g = m.right_face(x)
            if g not in seen:
                seen.add(g)
                cot_edges.add(e)
                cotree[g] = (x, f)
                order.append(g)
                todo.append(g)
    leftover = [x for x in m.positive if m.edge_of[x] not in tree_edges | cot_edges]
    return parent, cotree, leftover, order


def homology_basis(m: CombinatorialMap, root: int = 0) -> list[Path]:
    """``2g`` loops at ``root`` whose classes form a basis of first homology."""
    parent, _, leftover, _ = tree_cotree(m, root)
    out = []
    for x in leftover:
        a = tree_path(m, parent, root, m.tail(x))
        b = tree_path(m, parent, root, m.head(x))
        out.append(Path(a.darts + (x,) + m.inverse(b).darts, root))
    return out


def _homology_columns(m, basis):
    cols = [list(loop_one_form(m, b).values) for b in basis]
    cols += [list(d_star(m, face_form(m, f)).values) for f in range(m.n_faces)]
    return cols


def check_basis(m: CombinatorialMap, basis: Sequence[Path]) -> None:
    """Raise :class:`BasisNotIndependent` unless ``basis`` spans homology freely."""
    if len(basis) != 2 * m.genus:
        raise BasisNotIndependent(f"need {2 * m.genus} loops, got {len(basis)}")
    for b in basis:
        if b.darts and m.head(b.darts[-1]) != m.tail(b.darts[0]):
            raise NotALoop("basis element is not closed")
    cols = _homology_columns(m, basis)
    if exact.rank(cols, m.n_edges) != 2 * m.genus + m.n_faces - 1:
        raise BasisNotIndependent("basis loops are dependent modulo boundaries")


def homology_class(
    m: CombinatorialMap, loop: Path, basis: Sequence[Path] | None = None
) -> tuple[int, ...]:
    """Integer coordinates of the homology class of a loop.

    Without ``basis`` the loops of :func:`homology_basis` are used.
    """
    if loop.darts and m.head(loop.darts[-1]) != loop.start:
        raise NotALoop("path is not closed")
    if basis is None:
        basis = homology_basis(m)
    else:
        check_basis(m, basis)
    cols = _homology_columns(m, basis)
    sol = exact.solve(cols, list(loop_one_form(m, loop).values))
    if sol is None:
        raise NotALoop("1-form of the loop is not a cycle")
    coords = sol[: len(basis)]
    if any(c.denominator != 1 for c in coords):
        raise BasisNotIndependent("basis does not generate integral homology")
    return tuple(int(c) for c in coords)


def winding_function(
    m: CombinatorialMap, loop: Path, zero_face: int | None = None
) -> DiscreteForm:
    """Winding number ``n`` of a null-homologous loop: ``d* n`` is its 1-form.

    ``n`` is unique up to a constant. It is pinned to vanish on ``zero_face``,
    by default the first boundary face; maps without boundary get the
    normalisation ``sum_F n(F) = 0`` instead.
    """
    omega = loop_one_form(m, loop)
    cols = [list(d_star(m, face_form(m, f)).values) for f in range(m.n_faces)]
    sol = exact.solve(cols, list(omega.values))
    if sol is None:
        raise NonZeroHomology("loop is not homologous to zero")
    n = DiscreteForm(2, sol)
    if zero_face is None and m.boundary:
        zero_face = m.boundary[0]
    if zero_face is not None:
        shift = n.values[zero_face]
    else:
        shift = sum(n.values, Fraction(0)) / m.n_faces
    return DiscreteForm(2, tuple(v - shift for v in n.values))


def is_null_homologous(m: CombinatorialMap, loop: Path) -> bool:
    try:
        winding_function(m, loop)
    except NonZeroHomology:
        return False
    return True


# --- Makeenko-Migdal vectors -----------------------------------------------------


def _tame_profile(m, loop):
    try:
        prof = intersection_profile(m, loop)
    except MapError as exc:
        raise NotTame(str(exc)) from exc
    if not prof.is_tame:
        bad = [v for v, c in prof.crossings.items() if c.kind is not CrossingKind.TRANSVERSE]
        raise NotTame(f"loop touches itself without crossing at vertices {sorted(bad)}")
    return prof


def mm_vector(m: CombinatorialMap, loop: Path, v: int) -> DiscreteForm:
    """Area variation attached to a transverse self-crossing.

    With crossing darts ``(e1, e2, e3, e4)`` this is ``d w_e1 + d w_e3``: it adds
    one to the corner faces between ``e1, e2`` and between ``e3, e4`` and
    removes one from the corner faces between ``e2, e3`` and ``e4, e1``.
    """
    prof = _tame_profile(m, loop)
    c = prof.crossings.get(v)
    if c is None:
        raise NotACrossing(f"vertex {v} is not a self-crossing of the loop")
    e1, e2, e3, e4 = c.darts
    mu = d(m, dart_form(m, e1)) + d(m, dart_form(m, e3))
    if len(m.vertices[v]) == 4:
        assert mu == -(d(m, dart_form(m, e2)) + d(m, dart_form(m, e4)))
    return mu


def mm_generators(m: CombinatorialMap, loop: Path) -> list[DiscreteForm]:
    """MM vectors of all crossings plus ``d w_e`` for edges the loop avoids."""
    prof = _tame_profile(m, loop)
    gens = [mm_vector(m, loop, v) for v in prof.transverse]
    used = set(prof.edge_use)
    gens += [d(m, dart_form(m, e)) for k, e in enumerate(m.positive) if k not in used]
    return gens


def mm_constraints(m: CombinatorialMap, loop: Path) -> list[DiscreteForm]:
    """Linear functionals cutting out the MM space.

    Always the total area; for a null-homologous loop also the pairing with
    its winding function.
    """
    out = [constant_area_form(m)]
    try:
        out.append(winding_function(m, loop))
    except NonZeroHomology:
        pass
    return out


def mm_space_matches(m: CombinatorialMap, loop: Path) -> bool:
    """Exact check that the MM generators span the constrained subspace."""
    gens = [list(g.values) for g in mm_generators(m, loop)]
    cons = [list(c.values) for c in mm_constraints(m, loop)]
    kernel = exact.nullspace(cons, m.n_faces)
    return exact.same_span(gens, kernel, m.n_faces) if gens or kernel else True


def in_mm_space(m: CombinatorialMap, loop: Path, alpha: DiscreteForm) -> bool:
    """Whether a 2-form lies in the MM space of a tame loop."""
    _tame_profile(m, loop)
    if alpha.degree != 2:
        raise DegreeMismatch("MM space lives in 2-forms")
    _check_on(m, alpha)
    return all(c.dot(alpha) == 0 for c in mm_constraints(m, loop))
