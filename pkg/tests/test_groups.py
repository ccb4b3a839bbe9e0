import numpy as np
import pytest

from masterfield.errors import NotInGroup, UnsupportedFamily
from masterfield.groups import (
    FAMILIES,
    GroupSpec,
    calibrate_scale,
    casimir,
    check_in_group,
    group_residual,
    lie_basis,
    magic_check,
    magic_sides,
    symplectic_form,
    tr,
)
from masterfield.ymmc import sample_haar, stream

GROUPS = [GroupSpec(f, n) for f in FAMILIES for n in (2, 3, 4)]


def _casimir_scalar(g):
    n = g.N
    return {"U": -1.0, "SU": -(1 - 1 / n**2), "SO": -(n - 1) / n, "Sp": -(2 * n + 1) / (2 * n)}[
        g.family
    ]


def test_parse():
    assert GroupSpec.parse("U(128)") == GroupSpec("U", 128)
    assert GroupSpec.parse(" Sp(2) ").d == 4
    for bad in ("U128", "G(2)", "U(x)", "SO(1)"):
        with pytest.raises(UnsupportedFamily):
            GroupSpec.parse(bad)


@pytest.mark.parametrize("g", GROUPS, ids=str)
def test_lie_basis(g):
    basis = lie_basis(g)
    assert len(basis) == g.dim
    c = g.inner_product_scale
    gram = np.array([[(-c * np.trace(x @ y)).real for y in basis] for x in basis])
    assert np.allclose(gram, np.eye(g.dim), atol=1e-12)
    j = symplectic_form(g.N) if g.family == "Sp" else None
    for x in basis:
        assert np.allclose(x.conj().T, -x, atol=1e-14)
        if g.family in ("SU", "Sp", "SO"):
            assert abs(np.trace(x)) < 1e-12
        if j is not None:
            assert np.allclose(x.T @ j + j @ x, 0, atol=1e-14)
        if g.real:
            assert np.isrealobj(x) or np.allclose(x.imag, 0)


@pytest.mark.parametrize("g", GROUPS, ids=str)
def test_casimir_is_scalar(g):
    assert np.allclose(casimir(g), _casimir_scalar(g) * np.eye(g.d), atol=1e-12)


@pytest.mark.parametrize("g", GROUPS, ids=str)
def test_trace_identities(g):
    worst = 0.0
    for i in range(20):
        rng = stream(11, i)
        a, b = sample_haar(g, rng), sample_haar(g, rng)
        worst = max(worst, *magic_check(g, a, b))
    assert worst < 1e-12


def test_identity_at_unit_matrices():
    for n in (2, 3, 5):
        g = GroupSpec("U", n)
        s = magic_sides(g, np.eye(n), np.eye(n))
        assert s["lhs1"] == pytest.approx(-1.0, abs=1e-12)


def test_printed_variant_differs():
    # the variant form of the second identity misses the 1/d^2 scale
    g = GroupSpec("U", 3)
    rng = stream(5, 0)
    a, b = sample_haar(g, rng), sample_haar(g, rng)
    s = magic_sides(g, a, b)
    assert abs(s["lhs2"] - s["rhs2"]) < 1e-12
    assert abs(s["rhs2_variant"] * (1 / g.d**2) - s["rhs2"]) < 1e-12


@pytest.mark.parametrize("family", FAMILIES)
def test_calibrated_scale(family):
    g = GroupSpec(family, 3)
    rng = stream(2, 0)
    c = calibrate_scale(g, sample_haar(g, rng), sample_haar(g, rng))
    assert c == pytest.approx(g.inner_product_scale, rel=1e-10)


def test_membership():
    g = GroupSpec("SU", 3)
    with pytest.raises(NotInGroup):
        check_in_group(g, 2 * np.eye(3))
    with pytest.raises(NotInGroup):
        check_in_group(g, np.exp(0.3j) * np.eye(3))
    assert group_residual(g, np.eye(2)) == float("inf")
    with pytest.raises(NotInGroup):
        magic_check(g, np.eye(3), 2 * np.eye(3))


def test_normalised_trace():
    assert tr(np.eye(7)) == 1
