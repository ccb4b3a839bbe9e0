import math

import numpy as np
import pytest

from masterfield.errors import WrongBoundaryCount
from masterfield.free_moments import GeneratorWord, nu
from masterfield.gallery import sample
from masterfield.groups import FAMILIES, GroupSpec, casimir, group_residual, lie_basis, tr
from masterfield.planar import lasso_basis
from masterfield.ymmc import (
    default_steps,
    exp_lie,
    gaussian_lie,
    holonomy,
    sample_haar,
    sample_heat_kernel,
    stream,
    wilson_estimate,
    wilson_for_map,
)


def test_default_steps():
    assert default_steps(0.5) == 100 and default_steps(2.5) == 250


def test_streams_are_reproducible_and_distinct():
    a = stream(3, 0).standard_normal(4)
    assert np.array_equal(a, stream(3, 0).standard_normal(4))
    assert not np.array_equal(a, stream(3, 1).standard_normal(4))


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [2, 3, 5])
def test_samples_lie_in_group(family, n):
    g = GroupSpec(family, n)
    rng = stream(0, n)
    assert group_residual(g, sample_haar(g, rng)) < 1e-12
    assert group_residual(g, sample_heat_kernel(g, 0.7, rng, steps=20)) < 1e-12


@pytest.mark.parametrize("family", FAMILIES)
def test_gaussian_covariance_matches_basis(family):
    # E <X, Y_i> <X, Y_j> = delta_ij for the orthonormal basis
    g = GroupSpec(family, 3)
    basis = lie_basis(g)
    c = g.inner_product_scale
    rng = stream(1, 0)
    coords = np.array(
        [[(-c * np.trace(gaussian_lie(g, rng) @ y)).real for y in basis] for _ in range(4000)]
    )
    cov = coords.T @ coords / len(coords)
    assert np.abs(cov - np.eye(g.dim)).max() < 0.12


def test_exp_of_zero_and_drift():
    g = GroupSpec("U", 4)
    assert np.allclose(exp_lie(g, np.zeros((4, 4), complex)), np.eye(4))
    assert np.array_equal(sample_heat_kernel(g, 0.0, stream(0, 0)), np.eye(4))
    u = sample_heat_kernel(g, 1.0, stream(0, 1), steps=10_000)
    assert group_residual(g, u) < 1e-8


def test_haar_moments_small_n():
    # E tr U = 0 and E |Tr U|^2 = 1 for U(N)
    g = GroupSpec("U", 3)
    vals = np.array([np.trace(sample_haar(g, stream(4, i))) for i in range(4000)])
    se = 1 / math.sqrt(len(vals))
    assert abs(vals.mean()) < 4 * se
    sq = np.abs(vals) ** 2
    assert abs(sq.mean() - 1) < 4 * sq.std() / math.sqrt(len(sq))


@pytest.mark.parametrize("family", FAMILIES)
def test_heat_kernel_mean_trace(family):
    # E U_t = exp(t C / 2) with C the Casimir scalar
    g = GroupSpec(family, 3)
    t = 0.8
    c = casimir(g)[0, 0].real
    vals = [tr(sample_heat_kernel(g, t, stream(9, i), steps=40)).real for i in range(1500)]
    se = np.std(vals) / math.sqrt(len(vals))
    assert abs(np.mean(vals) - math.exp(t * c / 2)) < 4 * se + 5e-3


def test_heat_kernel_semigroup():
    # U_s U_t has the law of U_{s+t}: compare E tr of both at U(4)
    g = GroupSpec("U", 4)
    s, t = 0.3, 0.5
    a = [tr(sample_heat_kernel(g, s, stream(1, i), 20) @ sample_heat_kernel(g, t, stream(2, i), 20))
         for i in range(1500)]
    b = [tr(sample_heat_kernel(g, s + t, stream(3, i), 40)) for i in range(1500)]
    ra, rb = np.real(a), np.real(b)
    se = math.hypot(ra.std(), rb.std()) / math.sqrt(1500)
    assert abs(ra.mean() - rb.mean()) < 4 * se
    assert abs(ra.mean() - math.exp(-0.4)) < 4 * se + 5e-3


def test_holonomy_order():
    a = sample_haar(GroupSpec("U", 3), stream(0, 0))
    b = sample_haar(GroupSpec("U", 3), stream(0, 1))
    w = GeneratorWord.of([("a", 1), ("b", -2)])
    h = holonomy(w, {"a": a, "b": b})
    assert np.allclose(h, b.conj().T @ b.conj().T @ a)


def test_simple_loop_estimate():
    s = sample("simple")
    g = GroupSpec("U", 16)
    est = wilson_for_map(s.map, s.loops["L"], {f: 1.0 for f in s.map.inner_faces}, g, 150,
                         seed=1, steps=20)
    # E tr U_t = exp(-t/2) at every N for the unitary group
    assert abs(est.mean - math.exp(-0.5)) < 4 * est.stderr + 5e-3
    assert abs(est.imag_mean) < 0.05


def test_double_loop_approaches_free_moment():
    s = sample("simple")
    g = GroupSpec("U", 24)
    est = wilson_for_map(s.map, s.loops["L2"], {f: 0.5 for f in s.map.inner_faces}, g, 150,
                         seed=2, steps=20)
    assert abs(est.mean - nu(0.5, 2)) < 4 * est.stderr + 5 / g.N


def test_estimates_do_not_depend_on_workers():
    s = sample("eight")
    a = {f: 0.5 for f in s.map.inner_faces}
    g = GroupSpec("SO", 4)
    one = wilson_for_map(s.map, s.loops["L"], a, g, 12, seed=5, steps=10, workers=1)
    two = wilson_for_map(s.map, s.loops["L"], a, g, 12, seed=5, steps=10, workers=2)
    assert one == two


def test_handle_loop_has_zero_mean():
    h = sample("holed-torus")
    basis = lasso_basis(h.map)
    loop = basis.loops[("handle", 0)]
    a = {f: float(x) for f, x in h.areas.items()}
    est = wilson_estimate(loop, basis, a, GroupSpec("U", 8), 300, seed=3, steps=10)
    assert abs(est.mean) < 4 * est.stderr


def test_closed_maps_rejected():
    s = sample("torus")
    with pytest.raises(WrongBoundaryCount):
        wilson_for_map(s.map, s.loops["comm"], {}, GroupSpec("U", 2), 2)
