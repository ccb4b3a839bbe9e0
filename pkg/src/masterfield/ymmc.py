"""Finite-N sampling of the discrete Yang-Mills measure on one-boundary maps.

On a map with one boundary face the holonomies of the lasso basis are
independent: face lassos follow the heat kernel at the area of their face,
handle loops are Haar distributed. A Wilson loop is then the normalised trace
of a product of independent random matrices.

Sampling is reproducible: sample ``i`` of a run with seed ``s`` draws from
its own stream ``SeedSequence(s, spawn_key=(i,))``, and means are summed
exactly with :func:`math.fsum`, so results do not depend on the number of
workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, NamedTuple

import numpy as np

from .errors import NegativeTime, WrongBoundaryCount
from .free_moments import GeneratorWord
from .groups import GroupSpec, symplectic_form, tr
from .homology import mm_vector
from .maps import CombinatorialMap, Path, desingularize
from .planar import AreaVector, LassoBasis, decompose, lasso_basis

RENORMALISE_EVERY = 64

HolonomySample = dict


def default_steps(t: float) -> int:
    return max(100, math.ceil(100 * t))


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


# --- Lie algebra noise and exponentials ----------------------------------------------


def gaussian_lie(g: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    """Standard Gaussian vector of the Lie algebra, as a matrix.

    Equal in law to ``sum_i xi_i X_i`` over an orthonormal basis, without
    building the basis.
    """
    d = g.d
    scale = 1 / math.sqrt(g.inner_product_scale)
    if g.family == "SO":
        a = rng.standard_normal((d, d))
        return (a - a.T) / 2 * scale
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    x = 1j * (z + z.conj().T) / math.sqrt(2)
    if g.family == "SU":
        x -= np.trace(x) / d * np.eye(d)
    elif g.family == "Sp":
        j = symplectic_form(g.N)
        x = (x + j @ x.T @ j) / 2
    return x * scale


def exp_lie(g: GroupSpec, x: np.ndarray) -> np.ndarray:
    """Exponential of a Lie algebra element, through a Hermitian eigendecomposition."""
    w, v = np.linalg.eigh(1j * x)
    e = (v * np.exp(-1j * w)) @ v.conj().T
    return e.real if g.real else e


def project_to_group(g: GroupSpec, a: np.ndarray) -> np.ndarray:
    """Nearest unitary matrix (polar factor), undoing rounding drift."""
    u, _, vh = np.linalg.svd(a)
    p = u @ vh
    if g.family == "SU":
        p = p * np.linalg.det(p) ** (-1 / g.d)
    return p.real if g.real else p


# --- samplers ------------------------------------------------------------------------


def sample_haar(g: GroupSpec, rng: np.random.Generator) -> np.ndarray:
    """Haar distributed element of ``g``."""
    d = g.d
    if g.family == "SO":
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        return q
    if g.family == "Sp":
        return _haar_symplectic(g.N, rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    if g.family == "SU":
        q = q * np.linalg.det(q) ** (-1 / d)
    return q


def _haar_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    # Gram-Schmidt on Gaussian quaternionic columns: column k and its partner
    # -J conj(u_k) span one quaternionic line.
    j = symplectic_form(n)
    cols: list[np.ndarray] = []
    partners: list[np.ndarray] = []
    for _ in range(n):
        u = (rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n)) / math.sqrt(2)
        for c in cols + partners:
            u = u - (c.conj() @ u) * c
        u = u / np.linalg.norm(u)
        cols.append(u)
        partners.append(-j @ u.conj())
    return np.column_stack(cols + partners)


def sample_heat_kernel(
    g: GroupSpec,
    t: float,
    rng: np.random.Generator,
    steps: int | None = None,
) -> np.ndarray:
    """Brownian motion on ``g`` at time ``t``, started at the identity.

    Product of ``steps`` geodesic increments ``exp(sqrt(t/steps) Xi)``. The
    generator is half the Laplacian, so ``E tr`` tends to ``exp(-t/2)`` for
    the unitary groups as ``N`` grows.
    """
    if t < 0:
        raise NegativeTime(f"time must be non-negative, got {t}")
    if steps is None:
        steps = default_steps(t)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    u = np.eye(g.d) if g.real else np.eye(g.d, dtype=complex)
    if t == 0:
        return u
    s = math.sqrt(t / steps)
    for k in range(steps):
        u = u @ exp_lie(g, s * gaussian_lie(g, rng))
        if (k + 1) % RENORMALISE_EVERY == 0:
            u = project_to_group(g, u)
    return u


def _heat_increments(g, steps, rng):
    return [gaussian_lie(g, rng) for _ in range(steps)]


def _heat_from_increments(g, t, incs):
    u = np.eye(g.d) if g.real else np.eye(g.d, dtype=complex)
    if t == 0:
        return u
    s = math.sqrt(t / len(incs))
    for k, x in enumerate(incs):
        u = u @ exp_lie(g, s * x)
        if (k + 1) % RENORMALISE_EVERY == 0:
            u = project_to_group(g, u)
    return u


def _check_one_boundary(m: CombinatorialMap):
    if len(m.boundary) != 1:
        raise WrongBoundaryCount(f"expected one boundary face, found {len(m.boundary)}")


def sample_ym_one_boundary(
    basis: LassoBasis,
    areas: Mapping[int, float],
    g: GroupSpec,
    rng: np.random.Generator,
    steps: int | None = None,
    only: Iterable[Hashable] | None = None,
) -> HolonomySample:
    """One draw of the lasso holonomies.

    ``only`` restricts sampling to the listed generators; the others are
    independent, so skipping them does not change the law of the rest.
    """
    _check_one_boundary(basis.map)
    areas = AreaVector.for_map(basis.map, areas)
    wanted = set(basis.loops) if only is None else set(only)
    out: HolonomySample = {}
    for name in basis.loops:
        if name not in wanted:
            continue
        if name[0] == "face":
            t = float(areas[name[1]])
            out[name] = sample_heat_kernel(g, t, rng, steps if steps else None)
        else:
            out[name] = sample_haar(g, rng)
    return out


def holonomy(word: GeneratorWord, sample: Mapping[Hashable, np.ndarray]) -> np.ndarray:
    """Holonomy of a word: multiplicative in reverse order, ``h(ab) = h(b) h(a)``."""
    d = next(iter(sample.values())).shape[0] if sample else 1
    h = np.eye(d, dtype=complex)
    for name, e in word.letters:
        m = sample[name]
        p = np.linalg.matrix_power(m if e > 0 else m.conj().T, abs(e))
        h = p @ h
    return h


# --- Wilson loop estimates -----------------------------------------------------------


class WilsonEstimate(NamedTuple):
    mean: float
    stderr: float
    n_samples: int
    variance: float
    imag_mean: float


@dataclass(frozen=True)
class _Job:
    word: GeneratorWord
    basis: LassoBasis
    areas: dict
    group: GroupSpec
    seed: int
    steps: int | None


def _sample_values(job: _Job, indices: range) -> list[complex]:
    gens = job.word.generators()
    vals = []
    for i in indices:
        rng = stream(job.seed, i)
        s = sample_ym_one_boundary(job.basis, job.areas, job.group, rng, job.steps, only=gens)
        if not s:
            vals.append(1.0 + 0j)
            continue
        vals.append(complex(tr(holonomy(job.word, s))))
    return vals


def _run_chunk(args):
    job, start, stop = args
    return _sample_values(job, range(start, stop))


def _summarise(vals: list[complex]) -> WilsonEstimate:
    n = len(vals)
    re = [v.real for v in vals]
    mean = math.fsum(re) / n
    var = math.fsum((x - mean) ** 2 for x in re) / (n - 1) if n > 1 else 0.0
    imag = math.fsum(v.imag for v in vals) / n
    return WilsonEstimate(mean, math.sqrt(var / n), n, var, imag)


def wilson_estimate(
    loop: Path,
    basis: LassoBasis,
    areas: Mapping[int, float],
    g: GroupSpec,
    n_samples: int,
    seed: int = 0,
    steps: int | None = None,
    workers: int = 1,
) -> WilsonEstimate:
    """Monte Carlo mean and standard error of ``Re tr(h_loop)``."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    word = decompose(basis, loop)
    job = _Job(word, basis, dict(areas), g, seed, steps)
    AreaVector.for_map(basis.map, areas)
    if workers <= 1:
        vals = _sample_values(job, range(n_samples))
    else:
        bounds = np.linspace(0, n_samples, workers + 1).astype(int)
        chunks = [(job, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            vals = [v for part in pool.map(_run_chunk, chunks) for v in part]
    return _summarise(vals)


def wilson_for_map(
    m: CombinatorialMap,
    loop: Path,
    areas: Mapping[int, float],
    g: GroupSpec,
    n_samples: int,
    seed: int = 0,
    steps: int | None = None,
    workers: int = 1,
) -> WilsonEstimate:
    """:func:`wilson_estimate` with the lasso basis rooted at the loop's base."""
    _check_one_boundary(m)
    basis = lasso_basis(m, loop.start)
    return wilson_estimate(loop, basis, areas, g, n_samples, seed, steps, workers)


# --- experimental: finite-N Makeenko-Migdal -------------------------------------------


class MCMMResidual(NamedTuple):
    derivative: float
    derivative_stderr: float
    product: float
    product_stderr: float


def mm_residual_mc(
    m: CombinatorialMap,
    loop: Path,
    areas: Mapping[int, float],
    v: int,
    g: GroupSpec,
    n_samples: int,
    h: float = 0.05,
    seed: int = 0,
    steps: int = 20,
) -> MCMMResidual:
    """Monte Carlo version of the Makeenko-Migdal check at a crossing.

    The derivative along the MM vector is a central difference with common
    random numbers: both shifted area vectors reuse the same increments. For
    ``U(N)`` the derivative of ``E tr(h)`` equals ``E[tr(h_1) tr(h_2)]`` for
    the two loops of the desingularisation; other families add ``1/N``
    corrections. This has no acceptance gate; the noise is large.
    """
    _check_one_boundary(m)
    areas = AreaVector.for_map(m, areas)
    mu = mm_vector(m, loop, v)
    basis = lasso_basis(m, loop.start)
    word = decompose(basis, loop)
    l1, l2 = desingularize(m, loop, v)
    b1 = lasso_basis(m, v)
    w1, w2 = decompose(b1, l1), decompose(b1, l2)
    diffs, prods = [], []
    faces = sorted(m.inner_faces)
    for i in range(n_samples):
        rng = stream(seed, i)
        incs = {f: _heat_increments(g, steps, rng) for f in faces}
        handles = {name: sample_haar(g, rng) for name in basis.handle_generators}

        def draw(bs, shift):
            s = dict(handles) if bs is basis else {}
            for f, name in bs.face_generators.items():
                t = float(areas[f]) + shift * float(mu[f])
                s[name] = _heat_from_increments(g, t, incs[f])
            return s

        up, down = draw(basis, h), draw(basis, -h)
        diffs.append((tr(holonomy(word, up)) - tr(holonomy(word, down))).real / (2 * h))
        base = draw(b1, 0.0)
        for name in b1.handle_generators:
            base[name] = handles.get(name, sample_haar(g, rng))
        prods.append((tr(holonomy(w1, base)) * tr(holonomy(w2, base))).real)
    d = _summarise([complex(x) for x in diffs])
    p = _summarise([complex(x) for x in prods])
    return MCMMResidual(d.mean, d.stderr, p.mean, p.stderr)
