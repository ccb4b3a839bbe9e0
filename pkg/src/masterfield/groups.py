"""Compact classical matrix groups, their Lie algebras and the Casimir trace identities.

Groups are realised as complex matrices of size ``d``: ``U(N)``, ``SU(N)`` and
``SO(N)`` with ``d = N``, and ``Sp(N)`` as quaternionic unitary matrices of
size ``d = 2N`` preserving the form ``J = [[0, I], [-I, 0]]``. The trace
``tr`` is normalised by ``d``.

The inner product on each Lie algebra is ``<X, Y> = -c Tr(XY)`` with ``c``
chosen so that, for an orthonormal basis ``B``,

    sum_X tr(A X B X) = -tr A tr B - (beta - 2)/(beta N) tr(A B^-1) + gamma/N^2 tr(AB)

holds for all group elements ``A, B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import NotInGroup, UnsupportedFamily

FAMILIES = ("U", "SU", "SO", "Sp")


@dataclass(frozen=True)
class GroupSpec:
    """One of ``U(N)``, ``SU(N)``, ``SO(N)``, ``Sp(N)``."""

    family: str
    N: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedFamily(f"unknown family {self.family!r}, expected one of {FAMILIES}")
        if self.N < 2:
            raise UnsupportedFamily(f"rank must be at least 2, got {self.N}")

    @property
    def d(self) -> int:
        """Matrix size."""
        return 2 * self.N if self.family == "Sp" else self.N

    @property
    def beta(self) -> int:
        return {"SO": 1, "Sp": 4}.get(self.family, 2)

    @property
    def gamma(self) -> int:
        return 1 if self.family == "SU" else 0

    @property
    def real(self) -> bool:
        return self.family == "SO"

    @property
    def dim(self) -> int:
        n = self.N
        return {"U": n * n, "SU": n * n - 1, "SO": n * (n - 1) // 2, "Sp": n * (2 * n + 1)}[
            self.family
        ]

    @property
    def inner_product_scale(self) -> float:
        """``c`` in ``<X, Y> = -c Tr(XY)``."""
        return self.N / 2 if self.family == "SO" else float(self.N)

    def __str__(self):
        return f"{self.family}({self.N})"

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """``"U(128)"``, ``"Sp(2)"`` and the like."""
        text = text.strip()
        if not text.endswith(")") or "(" not in text:
            raise UnsupportedFamily(f"cannot parse group {text!r}")
        fam, n = text[:-1].split("(", 1)
        try:
            return cls(fam, int(n))
        except ValueError:
            raise UnsupportedFamily(f"cannot parse group {text!r}") from None


def symplectic_form(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _unitary_basis(d: int) -> list[np.ndarray]:
    """Basis of ``u(d)`` orthonormal for ``-Tr(XY)``."""
    out = []
    for a in range(d):
        x = np.zeros((d, d), complex)
        x[a, a] = 1j
        out.append(x)
    s = 1 / np.sqrt(2)
    for a in range(d):
        for b in range(a + 1, d):
            x = np.zeros((d, d), complex)
            x[a, b], x[b, a] = s, -s
            out.append(x)
            y = np.zeros((d, d), complex)
            y[a, b] = y[b, a] = 1j * s
            out.append(y)
    return out


def _orthonormalise(mats: list[np.ndarray]) -> list[np.ndarray]:
    """Orthonormal basis of the real span for ``-Tr(XY)``."""
    # anti-Hermitian X gives -Tr(XY) = Re <vec X, vec Y>
    vecs = np.array([np.concatenate([m.ravel().real, m.ravel().imag]) for m in mats])
    u, s, vt = np.linalg.svd(vecs, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    d = mats[0].shape[0]
    out = []
    for row in vt[:rank]:
        half = len(row) // 2
        out.append((row[:half] + 1j * row[half:]).reshape(d, d))
    return out


@lru_cache(maxsize=None)
def _basis(family: str, n: int) -> tuple[np.ndarray, ...]:
    g = GroupSpec(family, n)
    if family == "U":
        raw = _unitary_basis(n)
    elif family == "SU":
        raw = _unitary_basis(n)
        centre = 1j * np.eye(n) / np.sqrt(n)
        raw = [x - (-np.trace(x @ centre)).real * centre for x in raw]
        raw = _orthonormalise(raw)
    elif family == "SO":
        s = 1 / np.sqrt(2)
        raw = []
        for a in range(n):
            for b in range(a + 1, n):
                x = np.zeros((n, n))
                x[a, b], x[b, a] = s, -s
                raw.append(x)
    else:
        j = symplectic_form(n)
        # X in sp iff X = J X^T J; average over that involution
        raw = _orthonormalise([(x + j @ x.T @ j) / 2 for x in _unitary_basis(2 * n)])
    scale = 1 / np.sqrt(g.inner_product_scale)
    out = tuple(np.asarray(x * scale) for x in raw)
    if len(out) != g.dim:
        raise AssertionError(f"basis of {g} has {len(out)} elements, expected {g.dim}")
    for x in out:
        x.setflags(write=False)
    return out


def lie_basis(g: GroupSpec) -> list[np.ndarray]:
    """Orthonormal basis of the Lie algebra of ``g``."""
    return list(_basis(g.family, g.N))


def casimir(g: GroupSpec) -> np.ndarray:
    """``sum_X X^2``, a negative multiple of the identity."""
    return sum(x @ x for x in lie_basis(g))


# --- membership ----------------------------------------------------------------------


def group_residual(g: GroupSpec, a: np.ndarray) -> float:
    """Distance of ``a`` from the group, measured by its defining equations."""
    d = g.d
    if a.shape != (d, d):
        return float("inf")
    eye = np.eye(d)
    r = np.max(np.abs(a.conj().T @ a - eye))
    if g.family == "SO":
        r = max(r, np.max(np.abs(a.imag)), abs(np.linalg.det(a.real) - 1))
    elif g.family == "SU":
        r = max(r, abs(np.linalg.det(a) - 1))
    elif g.family == "Sp":
        j = symplectic_form(g.N)
        r = max(r, np.max(np.abs(a.T @ j @ a - j)))
    return float(r)


def check_in_group(g: GroupSpec, a: np.ndarray, tol: float = 1e-8) -> None:
    r = group_residual(g, a)
    if not r < tol:
        raise NotInGroup(f"matrix is not in {g}: residual {r:.3g}")


def tr(a: np.ndarray) -> complex:
    return np.trace(a) / a.shape[0]


# --- magic formulas ------------------------------------------------------------------


class MagicResidual(NamedTuple):
    """Left minus right side of the two Casimir trace identities."""

    tr1: float
    tr2: float


def magic_sides(g: GroupSpec, a: np.ndarray, b: np.ndarray) -> dict[str, complex]:
    """Both sides of the trace identities, computed independently.

    The product-of-traces identity is checked in the form

        sum_X tr(AX) tr(BX) = 1/d^2 [ -tr(AB) + e tr(AB^-1) + gamma tr A tr B ],

    with ``e = 1`` for ``SO`` and ``Sp`` and ``e = 0`` for ``U`` and ``SU``,
    which is what a direct basis computation gives. The right side of the
    variant ``-tr(AB) - (beta-2)/(beta N) tr(AB^-1) + gamma tr A tr B`` is
    returned as ``"rhs2_variant"`` for comparison.
    """
    n = g.N
    basis = lie_basis(g)
    binv = np.linalg.inv(b)
    lhs1 = sum(tr(a @ x @ b @ x) for x in basis)
    lhs2 = sum(tr(a @ x) * tr(b @ x) for x in basis)
    beta, gamma = g.beta, g.gamma
    ta, tb, tab, tabi = tr(a), tr(b), tr(a @ b), tr(a @ binv)
    rhs1 = -ta * tb - (beta - 2) / (beta * n) * tabi + gamma / n**2 * tab
    e = 0 if beta == 2 else 1
    rhs2 = (-tab + e * tabi + gamma * ta * tb) / g.d**2
    variant = -tab - (beta - 2) / (beta * n) * tabi + gamma * ta * tb
    return {"lhs1": lhs1, "rhs1": rhs1, "lhs2": lhs2, "rhs2": rhs2, "rhs2_variant": variant}


def magic_check(g: GroupSpec, a: np.ndarray, b: np.ndarray) -> MagicResidual:
    """Residuals of the two Casimir trace identities at ``(A, B)``."""
    check_in_group(g, a)
    check_in_group(g, b)
    s = magic_sides(g, a, b)
    return MagicResidual(float(abs(s["lhs1"] - s["rhs1"])), float(abs(s["lhs2"] - s["rhs2"])))


def calibrate_scale(g: GroupSpec, a: np.ndarray, b: np.ndarray) -> float:
    """Inner-product scale ``c`` making the first identity hold at ``(A, B)``.

    The left side is proportional to ``1/c``; this solves for ``c`` from a
    basis orthonormal for ``-Tr(XY)``.
    """
    basis = [x * np.sqrt(g.inner_product_scale) for x in lie_basis(g)]
    lhs = sum(tr(a @ x @ b @ x) for x in basis)
    s = magic_sides(g, a, b)
    return float((lhs / s["rhs1"]).real)
