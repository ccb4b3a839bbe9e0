"""Lasso bases and master-field values on maps with one boundary face.

The group of reduced loops based at a vertex is free. A convenient free basis
consists of one lasso per inner face (a tree path out, the face boundary, the
tree path back) and one loop per handle. Under the master field the face
lassos become free unitary Brownian motions run for the area of their face,
handles become Haar unitaries, and all of them are free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

from .errors import AreaMismatch, BoundaryOfSimplex, WrongBoundaryCount, WrongGenus
from .free_moments import FreeMomentEvaluator, GeneratorLaw, GeneratorWord
from .homology import mm_vector, tree_cotree, tree_path
from .maps import CombinatorialMap, Path, desingularize, reduce_path


@dataclass
class LassoBasis:
    """Free basis of the reduced loops based at ``root``.

    ``loops`` maps generator names to based loops: ``("face", f)`` for the
    lasso around inner face ``f`` and ``("handle", i)`` for handle loops.
    ``substitution`` expresses the loop through each non-tree edge, oriented
    along its positive dart, as a word in these generators.
    """

    map: CombinatorialMap
    root: int
    loops: dict[Hashable, Path]
    substitution: dict[int, GeneratorWord]
    tree_edges: frozenset[int] = field(default_factory=frozenset)
    parent: list = field(default_factory=list)

    @property
    def face_generators(self) -> dict[int, Hashable]:
        return {name[1]: name for name in self.loops if name[0] == "face"}

    @property
    def handle_generators(self) -> list[Hashable]:
        return [name for name in self.loops if name[0] == "handle"]

    def edge_word(self, loop: Path) -> list[tuple[int, int]]:
        """Non-tree edges crossed by a path, with signs."""
        m = self.map
        return [
            (m.edge_of[x], m.edge_sign[x])
            for x in loop.darts
            if m.edge_of[x] not in self.tree_edges
        ]


def _one_boundary(m: CombinatorialMap) -> int:
    if len(m.boundary) != 1:
        raise WrongBoundaryCount(f"expected one boundary face, found {len(m.boundary)}")
    return m.boundary[0]


def lasso_basis(m: CombinatorialMap, root: int = 0) -> LassoBasis:
    """Face lassos and handle loops based at ``root``.

    Faces are peeled off the dual spanning tree rooted at the boundary face,
    leaves first, which makes the change of basis from edge loops triangular.
    """
    outer = _one_boundary(m)
    parent, cotree, leftover, order = tree_cotree(m, root, outer)
    tree_edges = frozenset(m.edge_of[x] for x in parent if x is not None)

    def conj(x0: int, darts) -> Path:
        a = tree_path(m, parent, root, m.tail(x0))
        return Path(a.darts + tuple(darts) + m.inverse(a).darts, root)

    loops: dict[Hashable, Path] = {}
    sub: dict[int, GeneratorWord] = {}
    for i, x in enumerate(leftover):
        name = ("handle", i)
        b = tree_path(m, parent, root, m.head(x))
        a = tree_path(m, parent, root, m.tail(x))
        loops[name] = Path(a.darts + (x,) + m.inverse(b).darts, root)
        sub[m.edge_of[x]] = GeneratorWord(((name, 1),))
    for f in sorted(m.inner_faces):
        cyc = m.faces[f]
        loops[("face", f)] = conj(cyc[0], cyc)

    def letter_word(e: int, s: int) -> GeneratorWord:
        return sub[e] if s > 0 else sub[e].inverse()

    for g in reversed(order[1:]):
        x, _ = cotree[g]
        cyc = m.faces[g]
        crossing = m.alpha[x]
        k = cyc.index(crossing)
        before = [y for y in cyc[:k] if m.edge_of[y] not in tree_edges]
        after = [y for y in cyc[k + 1 :] if m.edge_of[y] not in tree_edges]
        p = GeneratorWord()
        for y in before:
            p = p * letter_word(m.edge_of[y], m.edge_sign[y])
        q = GeneratorWord()
        for y in after:
            q = q * letter_word(m.edge_of[y], m.edge_sign[y])
        lam = GeneratorWord(((("face", g), 1),))
        word = p.inverse() * lam * q.inverse()
        sub[m.edge_of[x]] = word if m.edge_sign[crossing] > 0 else word.inverse()
    return LassoBasis(m, root, loops, sub, tree_edges, parent)


def decompose(basis: LassoBasis, loop: Path) -> GeneratorWord:
    """Word in the lasso basis representing a loop.

    A loop based elsewhere is read as its conjugate by the tree path from the
    root, which does not change any trace.
    """
    w = GeneratorWord()
    for e, s in basis.edge_word(loop):
        w = w * (basis.substitution[e] if s > 0 else basis.substitution[e].inverse())
    return w


def substitute(basis: LassoBasis, word: GeneratorWord) -> Path:
    """Concatenate generator loops along a word, without reduction."""
    m = basis.map
    darts: list[int] = []
    for name, e in word.letters:
        lp = basis.loops[name]
        piece = lp.darts if e > 0 else m.inverse(lp).darts
        darts.extend(piece * abs(e))
    return Path(tuple(darts), basis.root)


class AreaVector(dict):
    """Areas of the inner faces of a map, keyed by face index."""

    @classmethod
    def for_map(cls, m: CombinatorialMap, areas: Mapping[int, float | Fraction]) -> "AreaVector":
        inner = set(m.inner_faces)
        keys = set(areas)
        if keys != inner:
            raise AreaMismatch(
                f"areas given for faces {sorted(keys)}, inner faces are {sorted(inner)}"
            )
        for f, a in areas.items():
            if a < 0:
                raise AreaMismatch(f"negative area {a} on face {f}")
        return cls(areas)

    @property
    def total(self):
        return sum(self.values())


def _laws(basis: LassoBasis, areas: Mapping[int, float]) -> dict:
    laws = {}
    for f, name in basis.face_generators.items():
        laws[name] = GeneratorLaw.fub(float(areas[f]))
    for name in basis.handle_generators:
        laws[name] = GeneratorLaw.haar()
    return laws


def eval_one_boundary(
    m: CombinatorialMap,
    loop: Path,
    areas: Mapping[int, float],
    basis: LassoBasis | None = None,
) -> float:
    """Master field of a loop on a surface with one boundary face."""
    _one_boundary(m)
    areas = AreaVector.for_map(m, areas)
    if basis is None:
        basis = lasso_basis(m, loop.start)
    return FreeMomentEvaluator(_laws(basis, areas))(decompose(basis, loop))


def eval_planar(
    m: CombinatorialMap,
    loop: Path,
    areas: Mapping[int, float],
    basis: LassoBasis | None = None,
) -> float:
    """Master field of a loop drawn in the plane.

    The map must have genus zero and exactly one boundary face, which plays
    the role of the unbounded region.
    """
    _one_boundary(m)
    if m.genus != 0:
        raise WrongGenus(f"planar evaluation needs genus 0, map has genus {m.genus}")
    return eval_one_boundary(m, loop, areas, basis)


@dataclass(frozen=True)
class MMResidual:
    """Finite-difference check of the Makeenko-Migdal equation at one crossing."""

    vertex: int
    step: float
    derivative: float
    product: float

    @property
    def residual(self) -> float:
        return self.derivative - self.product


def mm_residual(
    m: CombinatorialMap,
    loop: Path,
    areas: Mapping[int, float],
    v: int,
    h: float = 1e-3,
) -> MMResidual:
    """Central difference of the master field along the MM vector of ``v``.

    Compares it with the product of the values of the two loops obtained by
    splitting at ``v``. The boundary face carries no area and is ignored.
    """
    areas = AreaVector.for_map(m, areas)
    mu = mm_vector(m, loop, v)
    for f in m.inner_faces:
        if mu[f] and areas[f] - h * abs(float(mu[f])) <= 0:
            raise BoundaryOfSimplex(f"face {f} would reach zero area at step {h}")
    basis = lasso_basis(m, loop.start)
    word = decompose(basis, loop)

    def value(shift: float, w: GeneratorWord) -> float:
        a = {f: float(areas[f]) + shift * float(mu[f]) for f in m.inner_faces}
        return FreeMomentEvaluator(_laws(basis, a))(w)

    deriv = (value(h, word) - value(-h, word)) / (2 * h)
    l1, l2 = desingularize(m, loop, v)
    lb1 = lasso_basis(m, v)
    ev = FreeMomentEvaluator(_laws(lb1, {f: float(a) for f, a in areas.items()}))
    prod = ev(decompose(lb1, l1)) * ev(decompose(lb1, l2))
    return MMResidual(v, h, deriv, prod)


def check_decomposition(basis: LassoBasis, loop: Path) -> bool:
    """Substituting generator loops back and reducing recovers the loop."""
    m = basis.map
    a = tree_path(m, basis.parent, basis.root, loop.start)
    conj = Path(a.darts + loop.darts + m.inverse(a).darts, basis.root)
    back = substitute(basis, decompose(basis, loop))
    return reduce_path(m, back).darts == reduce_path(m, conj).darts

