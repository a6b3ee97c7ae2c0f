import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylpinch import forms
from weylpinch import identities as ids
from weylpinch.curvature import curvature_at
from weylpinch.identities import IdentityError, PsiInputs
from weylpinch.metrics import builtin_model
from weylpinch.spectral import LambdaTriple, spectrum

TWO_THIRDS = Fraction(2, 3)
reals = st.floats(-20, 20, allow_nan=False)
small_ints = st.integers(-40, 40)


def random_triples(rng, n, scale=5.0):
    raw = rng.normal(scale=scale, size=(n, 3))
    return LambdaTriple(raw[:, 0], raw[:, 1], raw[:, 2])


def random_rational_triple(rng):
    nums = rng.integers(-50, 51, size=3)
    dens = rng.integers(1, 13, size=3)
    return LambdaTriple(*(Fraction(int(a), int(b)) for a, b in zip(nums, dens)))


# Psi coefficients ------------------------------------------------------------------


def test_coefficients_worked_example():
    assert ids.psi_coefficients((-2, -1, 3)) == (Fraction(8, 3), Fraction(8, 3), Fraction(-8, 3))
    A, B, C = ids.psi_coefficients((-2.0, -1.0, 3.0), 2.0 / 3.0)
    assert (A, B, C) == pytest.approx((8 / 3, 8 / 3, -8 / 3), abs=1e-14)


def test_coefficients_vanish_on_zero_triple():
    for k in (TWO_THIRDS, Fraction(1), 0.3):
        assert tuple(ids.psi_coefficients((0, 0, 0), k)) == (0, 0, 0)


def test_coefficients_vanish_when_twice_middle_cancels_top():
    # 2 l2 + l3 = 0
    assert tuple(ids.psi_coefficients((-1, -1, 2))) == (0, 0, 0)


def test_coefficients_general_k_follow_definition():
    l1, l2, l3 = -3, 1, 2
    k = Fraction(5, 7)
    A, B, C = ids.psi_coefficients((l1, l2, l3), k)
    assert A == 2 * l2 * (l3 - l2) + k * (l2 - l3) ** 2
    assert B == 2 * l2 * (l1 - l2) + k * (l2 - l1) ** 2
    assert C == k * (l2 - l1) * (l2 - l3)


def test_factored_forms_checked_on_float_batches(rng):
    t = random_triples(rng, 10_000)
    A, B, C = ids.psi_coefficients(t, 2.0 / 3.0)
    assert A.shape == (10_000,)


# Psi value ---------------------------------------------------------------------------


def test_psi_worked_examples():
    t = (-2, -1, 3)
    assert ids.psi_value(PsiInputs(t, 1, 1, -1)) == Fraction(32, 3)
    assert ids.psi_value(PsiInputs(t, 1, 1, 1)) == 0
    assert ids.psi_value(PsiInputs(t, 0, 0, 0)) == 0


def test_psi_inputs_enforce_constraints():
    with pytest.raises(IdentityError, match="Cauchy-Schwarz"):
        PsiInputs((-2, -1, 3), 1, 1, 2)
    with pytest.raises(IdentityError, match="non-negative"):
        PsiInputs((-2, -1, 3), -1, 1, 0)
    with pytest.raises(IdentityError, match="Cauchy-Schwarz"):
        PsiInputs((-2.0, -1.0, 3.0), 1.0, 1.0, 1.01)


def test_psi_nonnegative_under_pinching(rng):
    n = 100_000
    t = random_triples(rng, n)
    keep = t.l1 + t.l3 >= 0
    t = LambdaTriple(t.l1[keep], t.l2[keep], t.l3[keep])
    m = len(t.l1)
    a2 = rng.exponential(size=m)
    c2 = rng.exponential(size=m)
    ac = rng.uniform(-1, 1, size=m) * np.sqrt(a2 * c2)
    # include the boundary of the Cauchy-Schwarz range
    ac[: m // 10] = np.sqrt(a2 * c2)[: m // 10]
    psi = ids.psi_value(PsiInputs(t, a2, c2, ac))
    scale = np.maximum(np.abs(t.l1), np.abs(t.l3)) ** 2 * (a2 + c2)
    assert m > 40_000
    assert np.all(psi >= -1e-12 * scale)


def test_psi_vanishes_on_omega_set(rng):
    # l3 = -2 l2 makes A = B = C = 0
    for _ in range(50):
        l2 = -Fraction(int(rng.integers(1, 1000)), int(rng.integers(1, 100)))
        t = LambdaTriple(l2, l2, -2 * l2)
        a2, c2 = Fraction(int(rng.integers(0, 9))), Fraction(int(rng.integers(0, 9)))
        assert ids.psi_value(PsiInputs(t, a2, c2, 0)) == 0


@given(small_ints, small_ints, small_ints, st.integers(0, 30), st.integers(0, 30), st.integers(1, 5))
def test_psi_homogeneity(a, b, c, a2, c2, factor):
    t = LambdaTriple(a, b, c)
    base = ids.psi_value(PsiInputs(t, a2, c2, 0))
    scaled = ids.psi_value(PsiInputs(t.scaled(factor), a2 * factor, c2 * factor, 0))
    # A, B, C are quadratic in lambda, so the total degree is 2 in lambda and 1 in |a|^2
    assert scaled == base * factor**3


# AB - C^2 ----------------------------------------------------------------------------


def test_ab_minus_c2_examples():
    assert ids.ab_minus_c2((-2, -1, 3)) == 0
    assert ids.ab_minus_c2((0, 0, 0)) == 0
    A, B, C = ids.psi_coefficients((-2, -1, 3))
    assert A * B == Fraction(64, 9) == C * C


def test_ab_minus_c2_float_sweep(rng):
    t = random_triples(rng, 100_000)
    res = ids.ab_minus_c2(t)
    bound = 1e-10 * np.maximum(1.0, t.l3) ** 4
    assert np.all(np.abs(res) < bound)


def test_ab_minus_c2_exact_rationals(rng):
    for _ in range(100):
        t = random_rational_triple(rng)
        assert isinstance(t.l1, Fraction)
        assert ids.ab_minus_c2(t) == 0
        first, second = ids.ab_minus_c2_factored(t)
        assert first == 0 and second == 0


def test_ab_minus_c2_is_not_zero_off_the_trace_free_locus():
    # without re-centering the factored form carries the trace; guard against a vacuous identity
    l1, l2, l3 = Fraction(-2), Fraction(-1), Fraction(4)
    A = TWO_THIRDS * (l3 - l2) * (2 * l2 + l3)
    B = -TWO_THIRDS * (l2 - l1) * (2 * l2 + l1)
    C = TWO_THIRDS * (l2 - l1) * (l2 - l3)
    assert A * B - C * C == -Fraction(4, 3) * l2 * (l3 - l2) * (l2 - l1) * (l1 + l2 + l3) != 0


@given(small_ints, small_ints, small_ints, st.integers(1, 4))
def test_ab_minus_c2_homogeneity_in_coefficients(a, b, c, factor):
    t = LambdaTriple(a, b, c)
    A, B, C = ids.psi_coefficients(t)
    A2, B2, C2 = ids.psi_coefficients(t.scaled(factor))
    assert A2 * B2 - C2 * C2 == (A * B - C * C) * factor**4
    assert (A2, B2, C2) == (A * factor**2, B * factor**2, C * factor**2)


# sign lemmas -------------------------------------------------------------------------------


def test_sign_lemma_nonpositive_s_examples():
    r = ids.sign_lemma_nonpositive_s((-1, -1, 2), 0)
    assert r.value == -6 and r.is_nonpositive and r.precondition_ok
    assert r.equality_flags == (True, False)
    r = ids.sign_lemma_nonpositive_s((0, 0, 0), 0)
    assert r.value == 0 and r.is_nonpositive and r.equality_flags == (True, True)
    r = ids.sign_lemma_nonpositive_s((-1, 0, 1), -12)
    assert r.value == -4 and r.is_nonpositive and r.precondition_ok


def test_sign_lemma_nonpositive_s_reports_violated_precondition():
    r = ids.sign_lemma_nonpositive_s((-2, 1, 1), 0)
    assert not r.precondition_ok
    assert r.value == 2 + 4 * (-2)
    assert not ids.sign_lemma_nonpositive_s((-1, -1, 2), 3).precondition_ok


def test_sign_lemma_nonnegative_s_examples():
    r = ids.sign_lemma_nonnegative_s((-1, -1, 2), 6)
    assert r.value == -3 and r.is_nonpositive and r.precondition_ok
    assert r.chain_bound >= r.value
    r = ids.sign_lemma_nonnegative_s((-1, -1, 2), 12)
    assert r.value == 0 and r.is_nonpositive and r.precondition_ok
    r = ids.sign_lemma_nonnegative_s((0, 0, 0), 0)
    assert r.value == 0 and r.is_nonpositive
    assert not ids.sign_lemma_nonnegative_s((-1, -1, 2), 13).precondition_ok


def test_sign_lemmas_over_constrained_samples(rng):
    n = 100_000
    t = random_triples(rng, n)
    keep = t.l1 + t.l3 >= 0
    pinched = LambdaTriple(t.l1[keep], t.l2[keep], t.l3[keep])
    s_neg = -rng.exponential(scale=20.0, size=len(pinched.l1))
    r = ids.sign_lemma_nonpositive_s(pinched, s_neg)
    assert r.precondition_ok
    assert np.all(r.is_nonpositive)

    # l2 <= -s/12 with s >= 0: draw s in [0, -12 l2]
    neg = t.l2 < 0
    band = LambdaTriple(t.l1[neg], t.l2[neg], t.l3[neg])
    s_pos = rng.uniform(0, 1, size=len(band.l1)) * (-12.0 * band.l2)
    r = ids.sign_lemma_nonnegative_s(band, s_pos)
    assert r.precondition_ok
    assert np.all(r.is_nonpositive)
    scale = np.maximum(1.0, np.maximum(np.abs(band.l1), band.l3)) ** 2
    assert np.all(r.chain_bound >= r.value - 1e-12 * scale)
    assert len(pinched.l1) > 40_000 and len(band.l1) > 40_000


# Weitzenboeck gap -------------------------------------------------------------------------


def test_weitzenboeck_gap_on_kahler_spectrum():
    s = 24
    assert ids.weitzenboeck_gap((Fraction(-s, 12), Fraction(-s, 12), Fraction(s, 6)), s) == 0
    assert ids.weitzenboeck_gap((0, 0, 0), 5) == 0


@given(st.floats(-100, 100, allow_nan=False))
def test_weitzenboeck_gap_kahler_family(s):
    gap = ids.weitzenboeck_gap((-s / 12, -s / 12, s / 6), s)
    assert abs(gap) <= 1e-10 * max(1.0, abs(s) ** 3)


def test_weitzenboeck_gap_nonzero_elsewhere():
    assert ids.weitzenboeck_gap((-1, 0, 1), 1) == -2


def test_weitzenboeck_gap_fubini_study_pipeline():
    metric = builtin_model("fubini_study_cp2")
    c = curvature_at(metric, [0.4, -0.3, 0.2, 0.7])
    spec = spectrum(forms.curvature_operator(c, forms.orthonormal_frame(c.metric)))
    s = float(c.scalar)
    assert abs(ids.weitzenboeck_gap(spec, s)) < 1e-7 * s**3


# eigenvalue chain ----------------------------------------------------------------------


def test_chain_rigid_spectrum():
    r = ids.eigenvalue_chain((-1, -1, 2), 12)
    assert r.holds and r.precondition_ok
    assert r.equality_lambda1_eq_lambda2 and r.equality_lambda3_plus_2lambda1
    names = [link.name for link in r.links]
    assert r.links[names.index("|W|^2 <= 6 lambda1^2")].lhs == pytest.approx(6.0)
    assert r.links[names.index("-lambda1 <= s/12")].lhs == pytest.approx(1.0)


def test_chain_generic_spectrum():
    r = ids.eigenvalue_chain((-1, 0, 1), 24)
    assert r.holds and r.precondition_ok
    first = r.links[0]
    assert first.lhs == pytest.approx(math.sqrt(2) / math.sqrt(6))
    assert r.links[3].lhs == pytest.approx(2.0)
    assert not r.equality_lambda1_eq_lambda2


def test_chain_zero_spectrum():
    r = ids.eigenvalue_chain((0, 0, 0), 1)
    assert r.holds and r.precondition_ok
    assert r.links[0].lhs == 0.0 and r.links[0].rhs == 0.0


def test_chain_reports_violated_precondition():
    r = ids.eigenvalue_chain((-2, 0, 2), 12)
    assert not r.precondition_ok
    assert not r.holds


@given(reals, reals, reals)
def test_chain_holds_whenever_precondition_does(a, b, c):
    t = LambdaTriple(a, b, c)
    s = 12.0 * max(-t.l1, 1e-3)
    r = ids.eigenvalue_chain(t, s)
    assert r.precondition_ok and r.holds


# norm identity and zero set -----------------------------------------------------------


def test_norm_identity_exact(rng):
    for _ in range(200):
        assert ids.norm_identity_residual(random_rational_triple(rng)) == 0


def test_norm_identity_float(rng):
    t = random_triples(rng, 10_000)
    res = ids.norm_identity_residual(t)
    assert np.all(np.abs(res) <= 1e-12 * np.maximum(1.0, t.l3) ** 2)


@given(small_ints, small_ints, small_ints)
def test_zero_spectrum_forced(a, b, c):
    assert ids.zero_spectrum_forced(LambdaTriple(a, b, c))


@given(small_ints)
def test_zero_spectrum_forced_on_the_l2_zero_slice(k):
    # trace-free with l2 = 0 means (-k, 0, k); only k = 0 has D l2 >= 0
    t = LambdaTriple(-abs(k), 0, abs(k))
    assert ids.zero_spectrum_forced(t)
    assert ids.zero_spectrum_without_laplacian_sign(t) == (k == 0)


def test_zero_spectrum_float_tolerance():
    assert ids.zero_spectrum_forced(LambdaTriple(-1e-14, 0.0, 1e-14), tol=1e-12)
    assert ids.zero_spectrum_forced(LambdaTriple(-1.0, 0.0, 1.0), tol=1e-12)
    assert not ids.zero_spectrum_without_laplacian_sign(LambdaTriple(-1.0, 0.0, 1.0))


# Laplacian right-hand sides --------------------------------------------------------------


@given(small_ints, small_ints, small_ints, small_ints, st.integers(0, 9), st.integers(0, 9), st.integers(0, 9))
def test_laplacians_sum_to_zero(a, b, c, s, a2, b2, c2):
    t = LambdaTriple(a, b, c)
    assert ids.phi_rearrangement_residual(t, s, a2, b2, c2) == 0


def test_phi_laplacian_matches_middle_eigenvalue():
    t = LambdaTriple(-2, -1, 3)
    expected = 2 * 1 + 4 * (-2) * 3 - (-1) * 6 / 2 + 2 * (-2 + 1) * 5 + 2 * (3 + 1) * 7
    assert ids.phi_laplacian(t, 6, 7, 11, 5) == expected


def test_phi_laplacian_without_gradients_is_the_sign_lemma_value():
    t = LambdaTriple(-2, -1, 3)
    zero_grad = ids.phi_laplacian(t, 0, 0, 0, 0)
    assert zero_grad == ids.sign_lemma_nonpositive_s(t, 0).value
