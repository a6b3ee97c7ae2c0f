import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weylpinch.curvature import curvature_at
from weylpinch.forms import curvature_operator, orthonormal_frame
from weylpinch.metrics import builtin_model
from weylpinch.spectral import (
    POLOMBO_LOWER,
    LambdaTriple,
    SpectrumError,
    cubic_eigenvalues,
    eigen3_sym,
    pinch_predicates,
    spectral_inequalities,
    spectrum,
)

reals = st.floats(-50, 50, allow_nan=False)


def random_tracefree_triples(rng, n):
    raw = rng.normal(size=(n, 3)) * rng.lognormal(0, 2, size=(n, 1))
    raw -= raw.mean(axis=1, keepdims=True)
    return np.sort(raw, axis=1)


def point_spectrum(name, params, point, orientation=1):
    c = curvature_at(builtin_model(name, params), point)
    return spectrum(curvature_operator(c, orthonormal_frame(c.metric, orientation))), float(c.scalar)


def test_triple_constructor_centers_and_sorts():
    t = LambdaTriple(3.0, 1.0, 2.0)
    assert t.as_tuple() == (-1.0, 0.0, 1.0)
    exact = LambdaTriple(1, 2, 6)
    assert exact.as_tuple() == (Fraction(-2), Fraction(-1), Fraction(3))
    assert sum(exact.as_tuple()) == 0


@given(reals, reals, reals)
def test_triple_trace_is_exactly_zero(a, b, c):
    t = LambdaTriple(a, b, c)
    assert t.l1 <= t.l2 <= t.l3
    assert t.l1 + t.l2 + t.l3 == 0.0 or abs(t.l1 + t.l2 + t.l3) <= 4 * np.finfo(float).eps * abs(t.l3)


def test_eigen_diag_example():
    vals, vecs, deg = eigen3_sym(np.diag([-1.0, -1.0, 2.0]))
    np.testing.assert_array_equal(vals, [-1.0, -1.0, 2.0])
    np.testing.assert_array_equal(vecs, np.eye(3))
    assert deg


def test_eigen_zero_matrix():
    vals, vecs, deg = eigen3_sym(np.zeros((3, 3)))
    np.testing.assert_array_equal(vals, 0.0)
    np.testing.assert_array_equal(vecs, np.eye(3))
    assert deg


def test_eigen_rejects_asymmetric():
    with pytest.raises(SpectrumError):
        eigen3_sym(np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=float))


def test_eigen_matches_cubic_oracle_and_residual(rng):
    for _ in range(500):
        a = rng.normal(size=(3, 3)) * rng.lognormal(0, 1.5)
        a = a + a.T
        a -= np.trace(a) / 3 * np.eye(3)
        vals, vecs, _ = eigen3_sym(a)
        scale = max(1.0, np.linalg.norm(a))
        np.testing.assert_allclose(vals, cubic_eigenvalues(a), atol=1e-10 * scale)
        assert np.abs(a @ vecs - vecs * vals).max() < 1e-10 * scale
        np.testing.assert_allclose(vecs.T @ vecs, np.eye(3), atol=1e-12)


def test_degenerate_eigenvectors_are_deterministic(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    a = q @ np.diag([-1.0, -1.0, 2.0]) @ q.T
    _, v1, _ = eigen3_sym(a)
    _, v2, _ = eigen3_sym(a + 1e-15 * np.diag([1.0, -1.0, 0.0]))
    np.testing.assert_allclose(v1, v2, atol=1e-8)


def test_eigen_batches(rng):
    a = rng.normal(size=(7, 3, 3))
    a = a + np.swapaxes(a, -1, -2)
    vals, vecs, deg = eigen3_sym(a)
    assert vals.shape == (7, 3) and vecs.shape == (7, 3, 3) and deg.shape == (7,)


@pytest.mark.parametrize(
    "name,params,point",
    [
        ("fubini_study_cp2", (1.0,), [0.2, 0.3, -0.4, 0.1]),
        ("product_s2xs2", (1.0, 1.0), [1.0, 2.0, 0.7, 4.0]),
        ("product_s2xs2", (1.0, 2.0), [1.0, 2.0, 0.7, 4.0]),
        ("complex_hyperbolic_ch2", (1.0,), [0.1, 0.2, 0.05, -0.3]),
    ],
)
def test_kahler_spectrum(name, params, point):
    spec, s = point_spectrum(name, params, point)
    np.testing.assert_allclose(spec.lambda_plus, sorted([-s / 12, -s / 12, s / 6]), atol=1e-7 * abs(s))
    assert spec.degenerate_plus
    assert spec.norm_sq_plus == pytest.approx(s * s / 24, rel=1e-9)
    # the simple eigenvalue's eigenform is the Kahler form up to sign and normalization
    top = spec.eigenforms_plus[2 if s > 0 else 0]
    assert abs(top[0] + top[5]) == pytest.approx(math.sqrt(2.0), abs=1e-7)


def test_product_anti_self_dual_spectrum():
    spec, s = point_spectrum("product_s2xs2", (1.0, 1.0), [1.0, 2.0, 0.7, 4.0])
    assert s == pytest.approx(4.0)
    np.testing.assert_allclose(spec.lambda_minus, [-1 / 3, -1 / 3, 2 / 3], atol=1e-10)


def test_flat_spectrum_is_zero():
    spec, _ = point_spectrum("flat_t4", (), [1.0, 1.0, 1.0, 1.0])
    assert spec.lambda_plus == (0.0, 0.0, 0.0) and spec.lambda_minus == (0.0, 0.0, 0.0)
    assert spec.in_zero_set


def test_spectrum_invariants_on_generic_point():
    from weylpinch.metrics import parse_metric_spec

    metric = parse_metric_spec(
        "coords: a b c d\ng[1][1] = 1 + 0.3*sin(b)*cos(c)\ng[2][2] = 1 + 0.2*a^2\n"
        "g[2][3] = 0.1*d\ng[3][3] = 1 + 0.4*sin(d)\ng[4][4] = exp(0.1*a*b)"
    )
    c = curvature_at(metric, [0.3, 0.6, -0.2, 0.4])
    spec = spectrum(curvature_operator(c, orthonormal_frame(c.metric)))
    l1, l2, l3 = spec.lambda_plus
    assert l1 <= l2 <= l3
    assert abs(l1 + l2 + l3) <= 1e-9 * max(1.0, math.sqrt(spec.norm_sq_plus))
    assert spec.norm_sq_plus == pytest.approx(l1 * l1 + l2 * l2 + l3 * l3, rel=1e-9)
    bound = math.sqrt(spec.norm_sq_plus) / math.sqrt(6.0)
    assert l3 >= bound - 1e-12 and -l1 >= bound - 1e-12
    assert not spec.degenerate_plus
    for lam, form in zip(spec.lambda_plus, spec.eigenforms_plus):
        assert np.linalg.norm(form) == pytest.approx(1.0)


def test_pinch_examples():
    r = pinch_predicates((-1.0, -0.5, 1.5), s=-3.0)
    assert r.polombo_band
    assert -POLOMBO_LOWER == pytest.approx(1.0718, abs=1e-4)
    assert r.margins["polombo_lower"] == pytest.approx(1.5 - 8 * (1 - math.sqrt(3) / 2))
    assert r.margins["polombo_upper"] == pytest.approx(0.5)
    r = pinch_predicates((-1.0, -1.0, 2.0), s=0.0)
    assert r.det_nonneg and r.sum13_nonneg
    assert r.margins["det"] == 2.0 and r.margins["sum13"] == 1.0
    assert r.lambda2_sign == -1
    r = pinch_predicates((-2.0, 1.0, 1.0), s=0.0)
    assert not r.det_nonneg and not r.sum13_nonneg
    assert r.margins["det"] == -2.0 and r.margins["sum13"] == -1.0


def test_polombo_band_edges():
    # the upper edge lambda3 = -2 lambda1 is attained at (-1, -1, 2) and never crossed by sorted triples
    lo = -POLOMBO_LOWER
    r = pinch_predicates((-1.0, -1.0, 2.0), 0.0)
    assert r.polombo_band and r.margins["polombo_upper"] == 0.0
    rng = np.random.default_rng(4)
    for row in random_tracefree_triples(rng, 500):
        assert pinch_predicates(row, 0.0).margins["polombo_upper"] >= -1e-12 * abs(row).max()
    assert pinch_predicates((-1.0, 1.0 - lo, lo), 0.0, tol=1e-12).polombo_band
    assert not pinch_predicates((-1.0, 1.0 - (lo - 0.01), lo - 0.01), 0.0).polombo_band


def test_gursky_band():
    assert pinch_predicates((-1.0, -1.0, 2.0), 12.0).gursky_band
    assert not pinch_predicates((-1.0, -1.0, 2.0), 12.5).gursky_band


def test_equivalence_sweep():
    rng = np.random.default_rng(2024)
    trip = random_tracefree_triples(rng, 100_000)
    norm = np.linalg.norm(trip, axis=1)
    trip = trip[norm > 1e-6]
    t = LambdaTriple(trip[:, 0], trip[:, 1], trip[:, 2])
    det = t.l1 * t.l2 * t.l3
    sum13 = t.l1 + t.l3
    assert np.array_equal(det >= 0, sum13 >= 0)
    assert np.array_equal(sum13 >= 0, t.l2 <= 0)


def test_scalar_predicates_agree_with_batch_sweep():
    rng = np.random.default_rng(8)
    for row in random_tracefree_triples(rng, 2000):
        if np.linalg.norm(row) < 1e-6:
            continue
        r = pinch_predicates(row, 0.0)
        assert r.det_nonneg == r.sum13_nonneg == (r.lambda2_sign <= 0)


def test_berger_algebra_forces_zero():
    # lambda3 <= 0 with the trace-free ordering leaves only the zero triple
    rng = np.random.default_rng(9)
    for row in random_tracefree_triples(rng, 1000):
        t = LambdaTriple(*row)
        assert t.l3 >= 0
        if t.l3 <= 0:
            assert t.as_tuple() == (0.0, 0.0, 0.0)
    assert LambdaTriple(0, 0, 0).as_tuple() == (0, 0, 0)


def test_polombo_lower_bound_implies_sum():
    rng = np.random.default_rng(10)
    trip = random_tracefree_triples(rng, 100_000)
    inside = trip[:, 2] >= POLOMBO_LOWER * trip[:, 0]
    assert inside.any()
    assert np.all(trip[inside, 0] + trip[inside, 2] >= -1e-12 * np.abs(trip[inside]).max(axis=1))


@given(st.floats(0.01, 100), st.tuples(reals, reals, reals))
def test_scale_equivariance(c, raw):
    t = LambdaTriple(*raw)
    scaled = t.scaled(c)
    np.testing.assert_allclose(scaled.as_tuple(), np.array(t.as_tuple()) * c, atol=1e-12 * c * max(1, abs(t.l3)))
    if np.linalg.norm(t.as_tuple()) < 1e-6:
        return
    a, b = pinch_predicates(t, 1.0), pinch_predicates(scaled, 1.0)
    tol = 1e-9
    if min(abs(v) for k, v in a.margins.items() if k != "gursky") > tol * max(1.0, abs(t.l3)) ** 3:
        assert (a.det_nonneg, a.sum13_nonneg, a.polombo_band) == (b.det_nonneg, b.sum13_nonneg, b.polombo_band)


def test_inequality_examples():
    checks = spectral_inequalities((-2.0, -1.0, 3.0))
    by = {c.name: c for c in checks}
    assert by["|W|^2 = 2(lambda1^2 - lambda2 lambda3)"].lhs == 14.0
    assert by["|W|^2 = 2(lambda1^2 - lambda2 lambda3)"].rhs == 14.0
    assert by["|W|/sqrt(6) <= lambda3"].lhs == pytest.approx(1.5275, abs=1e-4)
    assert all(c.slack >= 0 for c in checks)

    eq = spectral_inequalities((-1.0, -1.0, 2.0))[-1]
    assert eq.lhs == 6.0 and eq.rhs == 6.0 and eq.equality is True

    zero = spectral_inequalities((0.0, 0.0, 0.0))
    assert all(c.slack == 0.0 for c in zero)


def test_inequalities_on_random_triples():
    rng = np.random.default_rng(12)
    for row in random_tracefree_triples(rng, 3000):
        for c in spectral_inequalities(row):
            assert c.slack >= -1e-9 * max(1.0, abs(row).max()) ** 2, c


def test_exact_inequalities():
    checks = spectral_inequalities(LambdaTriple(Fraction(-5, 3), Fraction(1, 3), Fraction(4, 3)))
    ident = checks[2]
    assert ident.lhs == ident.rhs and isinstance(ident.lhs, Fraction)
