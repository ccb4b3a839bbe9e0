"""One-relator surface groups and Dehn's algorithm.

Elements are words, tuples of ``(generator, +1 | -1)`` letters. For a
relator satisfying the small cancellation condition C'(1/6), which holds for
the closed orientable surfaces of genus at least two, Dehn's algorithm
decides whether a word is trivial: repeatedly replace a subword covering more
than half of a cyclic conjugate of the relator (or its inverse) by the
inverse of the shorter remainder.
"""

from __future__ import annotations

from typing import Hashable, Sequence

Letter = tuple[int, int]
Word = tuple[Letter, ...]


def free_reduce(word: Sequence[Letter]) -> Word:
    out: list[Letter] = []
    for g, s in word:
        if out and out[-1][0] == g and out[-1][1] == -s:
            out.pop()
        else:
            out.append((g, s))
    return tuple(out)


def inverse(word: Sequence[Letter]) -> Word:
    return tuple((g, -s) for g, s in reversed(word))


def commutator_relator(genus: int) -> Word:
    """``[a1, b1] ... [ag, bg]`` with generators ``0 .. 2g-1``."""
    rel: list[Letter] = []
    for k in range(genus):
        a, b = 2 * k, 2 * k + 1
        rel += [(a, 1), (b, 1), (a, -1), (b, -1)]
    return tuple(rel)


def _rotations(word: Word) -> list[Word]:
    return [word[i:] + word[:i] for i in range(len(word))]


def max_piece(relator: Word) -> int:
    """Length of the longest piece among cyclic conjugates of ``r`` and ``r^-1``."""
    rots = sorted(set(_rotations(relator) + _rotations(inverse(relator))))
    best = 0
    for i, u in enumerate(rots):
        for v in rots[i + 1 :]:
            k = 0
            while k < len(u) and u[k] == v[k]:
                k += 1
            best = max(best, k)
    return best


class SurfaceGroup:
    """Group with one relator, solved by Dehn's algorithm."""

    def __init__(self, relator: Sequence[Letter], n_generators: int | None = None):
        self.relator = tuple((int(g), int(s)) for g, s in relator)
        self.n_generators = n_generators or (1 + max(g for g, _ in self.relator))
        self.length = len(self.relator)
        self._rots = sorted(set(_rotations(self.relator) + _rotations(inverse(self.relator))))
        self._by_first: dict[Letter, list[Word]] = {}
        for r in self._rots:
            self._by_first.setdefault(r[0], []).append(r)

    def satisfies_small_cancellation(self) -> bool:
        return 6 * max_piece(self.relator) < self.length

    def reduce(self, word: Sequence[Letter]) -> Word:
        """Dehn-reduced form; empty exactly when the word is trivial."""
        w = list(free_reduce(word))
        half = self.length // 2
        changed = True
        while changed:
            changed = False
            for i in range(len(w)):
                for r in self._by_first.get(w[i], ()):
                    k = 0
                    while k < self.length and i + k < len(w) and w[i + k] == r[k]:
                        k += 1
                    if k > half:
                        w[i : i + k] = list(inverse(r[k:]))
                        w = list(free_reduce(w))
                        changed = True
                        break
                if changed:
                    break
        return tuple(w)

    def is_identity(self, word: Sequence[Letter]) -> bool:
        return not self.reduce(word)

    def equal(self, u: Sequence[Letter], v: Sequence[Letter]) -> bool:
        return self.is_identity(tuple(inverse(u)) + tuple(v))

    def abelian(self, word: Sequence[Letter]) -> tuple[int, ...]:
        vec = [0] * self.n_generators
        for g, s in word:
            vec[g] += s
        return tuple(vec)


class ElementRegistry:
    """Assigns one representative word and an integer id per group element.

    Lookups are bucketed by abelianisation and resolved with the word
    problem, so equal elements written differently get the same id.
    """

    def __init__(self, group: SurfaceGroup):
        self.group = group
        self._buckets: dict[tuple[int, ...], list[tuple[Word, int]]] = {}
        self.words: list[Word] = []

    def canonical(self, word: Sequence[Letter]) -> tuple[int, Word]:
        w = self.group.reduce(word)
        key = self.group.abelian(w)
        bucket = self._buckets.setdefault(key, [])
        for rep, idx in bucket:
            if rep == w or self.group.equal(rep, w):
                return idx, rep
        idx = len(self.words)
        self.words.append(w)
        bucket.append((w, idx))
        return idx, w


def word_to_str(word: Sequence[Letter], names: Sequence[Hashable]) -> str:
    if not word:
        return "1"
    return " ".join(f"{names[g]}" if s > 0 else f"{names[g]}^-1" for g, s in word)
