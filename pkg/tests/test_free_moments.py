import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from masterfield.errors import NegativeOrder, NegativeTime, UnknownGenerator
from masterfield.free_moments import (
    FreeMomentEvaluator,
    GeneratorLaw,
    GeneratorWord,
    free_moment,
    nu,
    nu_ode,
)


def test_nu_low_orders():
    for t in (0.0, 0.3, 1.0, 2.5):
        assert nu(t, 0) == 1.0
        assert nu(t, 1) == pytest.approx(math.exp(-t / 2), abs=1e-15)
        assert nu(t, 2) == pytest.approx(math.exp(-t) * (1 - t), abs=1e-15)
        # third moment written out by hand
        assert nu(t, 3) == pytest.approx(math.exp(-1.5 * t) * (1 - 3 * t + 1.5 * t * t), abs=1e-14)


def test_nu_vanishes_at_one_for_order_two():
    assert abs(nu(1.0, 2)) < 1e-15


def test_nu_at_zero_time_is_one():
    assert all(nu(0.0, n) == 1.0 for n in range(10))


def test_nu_matches_ode():
    for t in (0.25, 1.0, 4.0):
        ode = nu_ode(t, 8)
        for n in range(9):
            assert abs(nu(t, n) - ode[n]) < 1e-8


def test_nu_underflow_guard():
    assert nu(1000.0, 5) == 0.0
    assert abs(nu(60.0, 10)) < 1e-100


def test_nu_rejects_bad_input():
    with pytest.raises(NegativeOrder):
        nu(1.0, -1)
    with pytest.raises(NegativeTime):
        nu(-0.1, 2)
    with pytest.raises(NegativeTime):
        nu_ode(-1.0, 3)


def test_nu_large_order_is_bounded():
    for n in (20, 40, 80):
        assert abs(nu(0.7, n)) <= 1.0


def test_word_algebra():
    a = GeneratorWord.of([("a", 1), ("a", 2), ("b", -1), ("b", 1)])
    assert a.letters == (("a", 3),)
    w = GeneratorWord.of([("a", 1), ("b", 1)])
    assert (w * w.inverse()).letters == ()
    assert (w ** -2).letters == (("b", -1), ("a", -1), ("b", -1), ("a", -1))
    assert len(w ** 3) == 6
    assert str(GeneratorWord()) == "1"


def test_single_generator_moments():
    laws = {"u": GeneratorLaw.fub(0.8)}
    for k in range(-4, 5):
        assert free_moment(GeneratorWord(((("u"), k),)), laws) == pytest.approx(nu(0.8, abs(k)))


def test_haar_words():
    laws = {"a": GeneratorLaw.haar(), "b": GeneratorLaw.haar()}
    assert free_moment(GeneratorWord.of([("a", 1), ("b", 1), ("a", -1), ("b", -1)]), laws) == 0.0
    assert free_moment(GeneratorWord.of([("a", 1), ("b", 1), ("b", -1), ("a", -1)]), laws) == 1.0


def test_four_letter_oracle():
    # tau(a1 b1 a2 b2) = tau(a1 a2) tau(b1) tau(b2) + tau(a1) tau(a2) tau(b1 b2)
    #                    - tau(a1) tau(a2) tau(b1) tau(b2)
    s, t = 0.4, 1.3
    laws = {"a": GeneratorLaw.fub(s), "b": GeneratorLaw.fub(t)}
    for (i, j, k, l) in [(1, 1, 1, 1), (1, 2, -1, 1), (2, -1, 3, 2), (1, -1, 1, -1)]:
        w = GeneratorWord(((("a"), i), ("b", j), ("a", k), ("b", l)))
        exp = (
            nu(s, abs(i + k)) * nu(t, abs(j)) * nu(t, abs(l))
            + nu(s, abs(i)) * nu(s, abs(k)) * nu(t, abs(j + l))
            - nu(s, abs(i)) * nu(s, abs(k)) * nu(t, abs(j)) * nu(t, abs(l))
        )
        assert free_moment(w, laws) == pytest.approx(exp, abs=1e-14)


def test_commutator_of_haar_and_brownian():
    laws = {"a": GeneratorLaw.fub(1.0), "h": GeneratorLaw.haar()}
    w = GeneratorWord.of([("a", 1), ("h", 1), ("a", -1), ("h", -1)])
    assert free_moment(w, laws) == pytest.approx(math.exp(-1.0), abs=1e-15)


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        free_moment(GeneratorWord.of([("z", 1)]), {"a": GeneratorLaw.haar()})


def test_law_validation():
    with pytest.raises(ValueError):
        GeneratorLaw("gauss")
    with pytest.raises(NegativeTime):
        GeneratorLaw.fub(-1)


_letters = st.lists(
    st.tuples(st.sampled_from("abc"), st.integers(-3, 3).filter(bool)), min_size=1, max_size=6
)
_times = st.tuples(*[st.one_of(st.none(), st.floats(0.0, 3.0)) for _ in range(3)])


def _laws(times):
    return {
        g: GeneratorLaw.haar() if t is None else GeneratorLaw.fub(t) for g, t in zip("abc", times)
    }


@settings(max_examples=150, deadline=None)
@given(_letters, _times, st.integers(0, 5))
def test_traciality_and_bound(letters, times, k):
    ev = FreeMomentEvaluator(_laws(times))
    w = GeneratorWord.of(letters)
    val = ev(w)
    assert abs(val) <= 1 + 1e-12
    lt = list(w.letters)
    if lt:
        k %= len(lt)
        rotated = GeneratorWord.of(lt[k:] + lt[:k])
        assert ev(rotated) == pytest.approx(val, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(_letters, _times)
def test_inverse_word_has_same_moment(letters, times):
    # laws are symmetric, so the state is invariant under inversion
    ev = FreeMomentEvaluator(_laws(times))
    w = GeneratorWord.of(letters)
    assert ev(w.inverse()) == pytest.approx(ev(w), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 5.0), st.integers(1, 12))
def test_nu_exact_polynomial_agrees_with_float_sum(t, n):
    tf = Fraction(t)
    poly = sum(
        (-tf) ** k / math.factorial(k) * Fraction(n) ** (k - 1) * math.comb(n, k + 1)
        for k in range(n)
    )
    assert nu(t, n) == pytest.approx(float(poly) * math.exp(-n * t / 2), abs=1e-12)


def _centered_oracle(letters, laws):
    """Freeness written out directly: tau(prod (a_i - m_i)) = 0 on alternating words."""
    from itertools import combinations

    def merge(ls):
        out = []
        for g, e in ls:
            if out and out[-1][0] == g:
                out[-1] = (g, out[-1][1] + e)
                if out[-1][1] == 0:
                    out.pop()
            else:
                out.append((g, e))
        while len(out) > 1 and out[0][0] == out[-1][0]:
            g, e = out.pop()
            out[0] = (g, out[0][1] + e)
            if out[0][1] == 0:
                out.pop(0)
        return out

    def tau(ls):
        ls = merge(ls)
        if not ls:
            return 1.0
        if len(ls) == 1:
            return laws[ls[0][0]].moment(ls[0][1])
        m = [laws[g].moment(e) for g, e in ls]
        val = 0.0
        for r in range(1, len(ls) + 1):
            for drop in combinations(range(len(ls)), r):
                coef = math.prod(-m[i] for i in drop)
                if coef:
                    val -= coef * tau([x for i, x in enumerate(ls) if i not in drop])
        return val

    return tau(list(letters))


@settings(max_examples=150, deadline=None)
@given(_letters, _times)
def test_matches_centered_expansion(letters, times):
    laws = _laws(times)
    w = GeneratorWord.of(letters)
    assert free_moment(w, laws) == pytest.approx(_centered_oracle(w.letters, laws), abs=1e-12)
