"""Moments of free unitary Brownian motion and mixed moments of free families.

The moments of free unitary Brownian motion at time ``t`` are

    nu_t(n) = exp(-n t / 2) * sum_{k=0}^{n-1} (-t)^k / k! * n^(k-1) * C(n, k+1)

for ``n >= 1`` and ``nu_t(0) = 1``; negative orders use ``nu_t(-n) = nu_t(n)``.
They also solve the moment ODE integrated by :func:`nu_ode`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import NegativeOrder, NegativeTime, UnknownGenerator

# exp(-700) is already far below double precision resolution of any moment
UNDERFLOW = 700.0


def _moment_polynomial(n: int, t: Fraction) -> Fraction:
    total = Fraction(0)
    term = Fraction(1)  # (-t)^k / k!
    for k in range(n):
        if k:
            term *= -t / k
        total += term * Fraction(n) ** (k - 1) * math.comb(n, k + 1)
    return total


def nu(t: float, n: int) -> float:
    """``n``-th moment of free unitary Brownian motion at time ``t``.

    The polynomial part is summed in exact rational arithmetic since its
    terms alternate and grow like ``exp(n t)``.
    """
    if n < 0:
        raise NegativeOrder(f"order must be non-negative, got {n}")
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    if n == 0:
        return 1.0
    if t * n > UNDERFLOW:
        return 0.0
    poly = _moment_polynomial(n, Fraction(t))
    return float(poly) * math.exp(-n * t / 2)


def _nu_rhs(y: Sequence[float]) -> list[float]:
    # y[m] = nu(m), y[0] = 1 stays constant
    n = len(y) - 1
    out = [0.0] * (n + 1)
    for m in range(1, n + 1):
        conv = sum(y[l] * y[m - l] for l in range(1, m))
        out[m] = -0.5 * m * y[m] - 0.5 * m * conv
    return out


def nu_ode(t: float, n_max: int, steps: int | None = None) -> list[float]:
    """Moments ``nu_t(0..n_max)`` by classical fourth order Runge-Kutta.

    Integrates ``d/dt nu(m) = -m/2 nu(m) - m/2 sum_{l=1}^{m-1} nu(l) nu(m-l)``
    from ``nu_0(m) = 1``.
    """
    if n_max < 0:
        raise NegativeOrder(f"order must be non-negative, got {n_max}")
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    if steps is None:
        steps = max(400, math.ceil(400 * t))
    h = t / steps if steps else 0.0
    y = [1.0] * (n_max + 1)
    for _ in range(steps if t > 0 else 0):
        k1 = _nu_rhs(y)
        k2 = _nu_rhs([a + h / 2 * b for a, b in zip(y, k1)])
        k3 = _nu_rhs([a + h / 2 * b for a, b in zip(y, k2)])
        k4 = _nu_rhs([a + h * b for a, b in zip(y, k3)])
        y = [a + h / 6 * (b + 2 * c + 2 * e + f) for a, b, c, e, f in zip(y, k1, k2, k3, k4)]
    return y


# --- laws and words ------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorLaw:
    """Law of a unitary generator: ``"haar"`` or free unitary Brownian motion."""

    kind: str
    time: float = 0.0

    def __post_init__(self):
        if self.kind not in ("haar", "fub"):
            raise ValueError(f"unknown law {self.kind!r}")
        if self.time < 0:
            raise NegativeTime(f"time must be non-negative, got {self.time}")

    @classmethod
    def haar(cls) -> "GeneratorLaw":
        return cls("haar")

    @classmethod
    def fub(cls, t: float) -> "GeneratorLaw":
        return cls("fub", float(t))

    def moment(self, k: int) -> float:
        if k == 0:
            return 1.0
        if self.kind == "haar":
            return 0.0
        return nu(self.time, abs(k))


Letter = tuple[Hashable, int]


@dataclass(frozen=True)
class GeneratorWord:
    """Word in unitary generators: a tuple of ``(generator, exponent)`` letters."""

    letters: tuple[Letter, ...] = ()

    @classmethod
    def of(cls, letters: Iterable[Letter]) -> "GeneratorWord":
        return cls(tuple((g, int(e)) for g, e in letters)).reduced()

    def reduced(self) -> "GeneratorWord":
        """Merge neighbouring powers of the same generator and drop zero powers."""
        out: list[list] = []
        for g, e in self.letters:
            if out and out[-1][0] == g:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            elif e:
                out.append([g, e])
        return GeneratorWord(tuple((g, e) for g, e in out))

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "GeneratorWord") -> "GeneratorWord":
        return GeneratorWord(self.letters + other.letters).reduced()

    def __pow__(self, n: int) -> "GeneratorWord":
        base = self if n >= 0 else self.inverse()
        return GeneratorWord(base.letters * abs(n)).reduced()

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def generators(self) -> set:
        return {g for g, _ in self.letters}

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(f"{g}^{e}" if e != 1 else str(g) for g, e in self.letters)


def _cyclic_merge(letters: list[list[int]]) -> list[list[int]]:
    """Merge equal neighbours, including across the ends, until stable."""
    changed = True
    while changed and letters:
        changed = False
        out: list[list[int]] = []
        for g, e in letters:
            if out and out[-1][0] == g:
                out[-1][1] += e
                changed = True
                if out[-1][1] == 0:
                    out.pop()
            elif e:
                out.append([g, e])
            else:
                changed = True
        if len(out) > 1 and out[0][0] == out[-1][0]:
            out[0][1] += out[-1][1]
            out.pop()
            if out[0][1] == 0:
                out.pop(0)
            changed = True
        letters = out
    return letters


def _canonical(letters: list[list[int]]) -> tuple[tuple[int, int], ...]:
    lst = [tuple(x) for x in _cyclic_merge([list(x) for x in letters])]
    n = len(lst)
    if n <= 1:
        return tuple(lst)
    k = min(range(n), key=lambda i: lst[i:] + lst[:i])
    return tuple(lst[k:] + lst[:k])


class FreeMomentEvaluator:
    """Tracial state on the free product of the given unitary laws.

    Words are reduced cyclically and memoised. A word is expanded over the
    non-crossing block containing its first letter: mixed free cumulants
    vanish, so that block only visits letters of the same generator, and the
    gaps between its letters are traces of shorter words. The cost is
    polynomial in the word length and exponential only in the number of
    occurrences of a single generator.
    """

    def __init__(self, laws: Mapping[Hashable, GeneratorLaw]):
        self.names = sorted(laws, key=repr)
        self.index = {g: i for i, g in enumerate(self.names)}
        self.laws = [laws[g] for g in self.names]
        self._memo: dict[tuple, float] = {(): 1.0}
        self._kappa_memo: dict[tuple, float] = {}

    def __call__(self, word: GeneratorWord) -> float:
        letters = []
        for g, e in word.letters:
            if g not in self.index:
                raise UnknownGenerator(f"no law given for generator {g!r}")
            letters.append([self.index[g], e])
        return self._tau(_canonical(letters))

    def _kappa(self, g: int, exps: tuple[int, ...]) -> float:
        """Free cumulant of ``u^e1, ..., u^ek`` for the generator ``g``."""
        key = (g, exps)
        hit = self._kappa_memo.get(key)
        if hit is not None:
            return hit
        law = self.laws[g]
        k = len(exps)
        val = law.moment(sum(exps))
        # subtract every other non-crossing partition, grouped by the first block
        for r in range(0, k - 1):
            for rest in combinations(range(1, k), r):
                idx = (0,) + rest
                term = self._kappa(g, tuple(exps[i] for i in idx))
                bounds = idx + (k,)
                for a, b in zip(bounds, bounds[1:]):
                    if b > a + 1:
                        term *= law.moment(sum(exps[a + 1 : b]))
                val -= term
        self._kappa_memo[key] = val
        return val

    def _tau(self, w: tuple[tuple[int, int], ...]) -> float:
        hit = self._memo.get(w)
        if hit is not None:
            return hit
        n = len(w)
        g = w[0][0]
        same = [i for i in range(1, n) if w[i][0] == g]
        val = 0.0
        for r in range(len(same) + 1):
            for rest in combinations(same, r):
                idx = (0,) + rest
                term = self._kappa(g, tuple(w[i][1] for i in idx))
                if term == 0.0:
                    continue
                bounds = idx + (n,)
                for a, b in zip(bounds, bounds[1:]):
                    if b > a + 1:
                        term *= self._tau(_canonical([list(x) for x in w[a + 1 : b]]))
                        if term == 0.0:
                            break
                val += term
        self._memo[w] = val
        return val


def free_moment(word: GeneratorWord, laws: Mapping[Hashable, GeneratorLaw]) -> float:
    """Trace of a word in free unitaries with the given laws."""
    return FreeMomentEvaluator(laws)(word)
