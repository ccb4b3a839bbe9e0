"""Mixed moments of two unitaries under t-free independence.

Two unitaries ``X`` and ``Y`` start classically independent at ``t = 0``;
conjugating the algebra of ``Y`` by a free unitary Brownian motion drives
their joint tracial state towards freeness. The state obeys

    d/dt tau_t(P) = (tau_t (x) tau_t)(D P)

for an alternating monomial ``P``, where ``D`` counts the ``Y`` letters of
``P`` and reconnects them pairwise (see :func:`delta_ad`). Monomials are
cyclic words of ``(algebra, exponent)`` letters with algebra 0 for ``X`` and
1 for ``Y``.

The same moments appear as the master field of lattice loops on a torus of
total area ``4t`` (:func:`phi_T_word`), which this module uses to compare
the two pictures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .construct import bouquet_map
from .cover import FundamentalPolygonMap, eval_surface
from .errors import ClosureExplosion, NegativeTime, UnknownGenerator
from .free_moments import _canonical

MAX_MONOMIALS = 100_000

Monomial = tuple[tuple[int, int], ...]
Moments = Callable[[int], float]


def haar_moments(k: int) -> float:
    return 1.0 if k == 0 else 0.0


def parse_word(text: str) -> Monomial:
    """Parse words such as ``"X Y X* Y*"``, ``"XY^2X*Y^-2"`` or ``"(XYX*Y*)^3"``."""
    tokens = _tokens(text.replace(" ", ""))
    letters, pos = _parse_seq(tokens, 0)
    if pos != len(tokens):
        raise UnknownGenerator(f"cannot parse word {text!r}")
    return tuple(letters)


def _tokens(s: str) -> list[str]:
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c in "XY()*":
            out.append(c)
            i += 1
        elif c == "^":
            j = i + 1
            if j < len(s) and s[j] in "+-":
                j += 1
            k = j
            while k < len(s) and s[k].isdigit():
                k += 1
            if k == j:
                raise UnknownGenerator(f"missing exponent at {i} in {s!r}")
            out.append(s[i:k])
            i = k
        else:
            raise UnknownGenerator(f"unexpected character {c!r} in {s!r}")
    return out


def _parse_seq(tokens, pos):
    letters: list[tuple[int, int]] = []
    while pos < len(tokens) and tokens[pos] != ")":
        tok = tokens[pos]
        if tok == "(":
            inner, pos = _parse_seq(tokens, pos + 1)
            if pos >= len(tokens) or tokens[pos] != ")":
                raise UnknownGenerator("unbalanced parentheses")
            pos += 1
            block = inner
        elif tok in ("X", "Y"):
            block = [(0 if tok == "X" else 1, 1)]
            pos += 1
        else:
            raise UnknownGenerator(f"unexpected token {tok!r}")
        while pos < len(tokens) and (tokens[pos] == "*" or tokens[pos].startswith("^")):
            if tokens[pos] == "*":
                block = [(a, -e) for a, e in reversed(block)]
            else:
                p = int(tokens[pos][1:])
                base = block if p >= 0 else [(a, -e) for a, e in reversed(block)]
                block = base * abs(p)
            pos += 1
        letters += block
    return letters, pos


def word_to_str(word: Sequence[tuple[int, int]]) -> str:
    if not word:
        return "1"
    parts = []
    for a, e in word:
        name = "XY"[a]
        parts.append(name if e == 1 else f"{name}*" if e == -1 else f"{name}^{e}")
    return "".join(parts)


class Monomials:
    """Canonical cyclic monomials: merged, rotated to the least rotation."""

    @staticmethod
    def canonical(word: Iterable[tuple[int, int]]) -> Monomial:
        return _canonical([list(x) for x in word])


def delta_ad(word: Sequence[tuple[int, int]]) -> list[tuple[float, Monomial, Monomial]]:
    """Terms ``(coefficient, left, right)`` of the generator applied to a monomial.

    ``word`` is read linearly; with ``Y`` letters at positions ``i < j`` and
    ``P = P11 Y_i P2 Y_j P12`` the terms are

    * ``-d/2 (P (x) 1 + 1 (x) P)`` with ``d`` the number of ``Y`` letters,
    * ``+ Y_i (x) P11 P12'`` for every single ``Y`` letter,
    * ``- Y_i P2 (x) P11 Y_j P12 - P11 Y_i P12 (x) P2 Y_j``
      ``+ P11 P12 (x) Y_i P2 Y_j + P11 Y_i Y_j P12 (x) P2`` for every pair.
    """
    w = list(word)
    ys = [k for k, (a, _) in enumerate(w) if a == 1]
    d = len(ys)
    terms: list[tuple[float, list, list]] = []
    if d:
        terms.append((-d / 2, w, []))
        terms.append((-d / 2, [], w))
    for j in ys:
        terms.append((1.0, [w[j]], w[:j] + w[j + 1 :]))
    for a_i, i in enumerate(ys):
        for j in ys[a_i + 1 :]:
            p11, p2, p12 = w[:i], w[i + 1 : j], w[j + 1 :]
            yi, yj = [w[i]], [w[j]]
            terms.append((-1.0, yi + p2, p11 + yj + p12))
            terms.append((-1.0, p11 + yi + p12, p2 + yj))
            terms.append((1.0, p11 + p12, yi + p2 + yj))
            terms.append((1.0, p11 + yi + yj + p12, p2))
    return [(c, Monomials.canonical(l), Monomials.canonical(r)) for c, l, r in terms]


@dataclass
class TFreeSystem:
    """Closed ODE system for the moments reachable from a seed monomial."""

    unknowns: list[Monomial]
    index: dict[Monomial, int]
    terms: list[list[tuple[float, Monomial, Monomial]]]


def _known(word: Monomial, mx: Moments, my: Moments):
    if not word:
        return 1.0
    if len(word) == 1:
        a, e = word[0]
        return mx(e) if a == 0 else my(e)
    return None


def closure(seed: Monomial, mx: Moments = haar_moments, my: Moments = haar_moments) -> TFreeSystem:
    """Monomials whose moments feed into the seed's ODE."""
    seed = Monomials.canonical(seed)
    unknowns: list[Monomial] = []
    index: dict[Monomial, int] = {}
    terms = []
    todo = []
    if _known(seed, mx, my) is None:
        index[seed] = 0
        unknowns.append(seed)
        todo.append(seed)
    while todo:
        w = todo.pop()
        ts = delta_ad(w)
        terms.append((index[w], ts))
        for _, l, r in ts:
            for part in (l, r):
                if part not in index and _known(part, mx, my) is None:
                    index[part] = len(unknowns)
                    unknowns.append(part)
                    todo.append(part)
                    if len(unknowns) > MAX_MONOMIALS:
                        raise ClosureExplosion(
                            f"more than {MAX_MONOMIALS} monomials in the closure"
                        )
    ordered = [None] * len(unknowns)
    for i, ts in terms:
        ordered[i] = ts
    return TFreeSystem(unknowns, index, ordered)


def _initial(word: Monomial, mx: Moments, my: Moments) -> float:
    ex = sum(e for a, e in word if a == 0)
    ey = sum(e for a, e in word if a == 1)
    return mx(ex) * my(ey)


def tfree_moments(
    seed: Monomial,
    t: float,
    mx: Moments = haar_moments,
    my: Moments = haar_moments,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> dict[Monomial, float]:
    """Values at time ``t`` of every monomial in the closure of ``seed``."""
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    sys_ = closure(seed, mx, my)
    n = len(sys_.unknowns)
    if n == 0:
        return {}
    consts: list[float] = []
    const_index: dict[Monomial, int] = {}

    def slot(word):
        if word in sys_.index:
            return sys_.index[word]
        if word not in const_index:
            const_index[word] = n + len(consts)
            consts.append(_known(word, mx, my))
        return const_index[word]

    tgt, coef, li, ri = [], [], [], []
    for i, ts in enumerate(sys_.terms):
        for c, l, r in ts:
            tgt.append(i)
            coef.append(c)
            li.append(slot(l))
            ri.append(slot(r))
    tgt_a = np.array(tgt, dtype=np.intp)
    coef_a = np.array(coef)
    li_a = np.array(li, dtype=np.intp)
    ri_a = np.array(ri, dtype=np.intp)
    const_a = np.array(consts)

    def rhs(_, y):
        z = np.concatenate([y, const_a])
        out = np.zeros(n)
        np.add.at(out, tgt_a, coef_a * z[li_a] * z[ri_a])
        return out

    y0 = np.array([_initial(w, mx, my) for w in sys_.unknowns])
    if t == 0:
        y = y0
    else:
        sol = solve_ivp(rhs, (0.0, t), y0, method="RK45", rtol=rtol, atol=atol)
        y = sol.y[:, -1]
    return {w: float(v) for w, v in zip(sys_.unknowns, y)}


def tfree_moment(
    word: Sequence[tuple[int, int]] | str,
    t: float,
    mx: Moments = haar_moments,
    my: Moments = haar_moments,
) -> float:
    """``tau_t`` of a monomial in ``X, X*, Y, Y*``."""
    if isinstance(word, str):
        word = parse_word(word)
    w = Monomials.canonical(word)
    known = _known(w, mx, my)
    if known is not None:
        return float(known)
    return tfree_moments(w, t, mx, my)[w]


# --- torus comparison ---------------------------------------------------------------


def phi_T_word(word: Sequence[tuple[int, int]] | str, T: float) -> float:
    """Master field on a torus of area ``T`` of the lattice loop spelled by a word.

    ``X`` steps along the first side of the square and ``Y`` along the second.
    """
    if T < 0:
        raise NegativeTime(f"area must be non-negative, got {T}")
    if isinstance(word, str):
        word = parse_word(word)
    ps = bouquet_map(1)
    fpm = FundamentalPolygonMap.from_sides(ps)
    m = fpm.map
    step = {0: ps.sides["x1"][0], 1: ps.sides["y1"][0]}
    darts = []
    for a, e in word:
        darts += [step[a] if e > 0 else m.alpha[step[a]]] * abs(e)
    loop = fpm.map.loop(darts, fpm.corner)
    return eval_surface(fpm, loop, {0: T}).value


def classical_value(word: Sequence[tuple[int, int]]) -> float:
    """Independent Haar unitaries: one exactly when both exponent sums vanish."""
    ex = sum(e for a, e in word if a == 0)
    ey = sum(e for a, e in word if a == 1)
    return 1.0 if ex == 0 and ey == 0 else 0.0


def free_value(word: Sequence[tuple[int, int]]) -> float:
    """Free Haar unitaries: one exactly when the word reduces to the identity."""
    return 1.0 if not Monomials.canonical(word) else 0.0


@dataclass(frozen=True)
class InterpolationRow:
    word: str
    T: float
    phi: float
    tfree: float
    classical: float
    free: float

    @property
    def gap(self) -> float:
        return abs(self.phi - self.tfree)


def interpolation_report(T: float, words: Iterable[str]) -> list[InterpolationRow]:
    """Torus master field against t-free moments at ``t = T/4`` and both limits."""
    rows = []
    for text in words:
        w = parse_word(text)
        rows.append(
            InterpolationRow(
                word=word_to_str(w),
                T=T,
                phi=phi_T_word(w, T),
                tfree=tfree_moment(w, T / 4),
                classical=classical_value(w),
                free=free_value(w),
            )
        )
    return rows
