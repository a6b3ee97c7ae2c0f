import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weylpinch import forms
from weylpinch import kahler as kh
from weylpinch.curvature import curvature_at
from weylpinch.metrics import builtin_model
from weylpinch.spectral import spectrum

KAHLER = [
    ("fubini_study_cp2", (1.0,)),
    ("product_s2xs2", (1.0, 1.0)),
    ("product_s2xs2", (1.0, 2.0)),
    ("complex_hyperbolic_ch2", (1.0,)),
]
KAHLER_EINSTEIN = [m for m in KAHLER if m != ("product_s2xs2", (1.0, 2.0))]


def _point(name, params, seed=3):
    metric = builtin_model(name, params)
    return metric, metric.sample_points(1, np.random.default_rng(seed))[0]


@lru_cache(maxsize=None)
def setup(name, params, seed=3, pointwise=False):
    metric, x = _point(name, params, seed)
    c = curvature_at(metric, x)
    k = kh.kahler_structure(metric, c, pointwise=pointwise)
    return c, k, spectrum(forms.curvature_operator(c, k.frame))


@lru_cache(maxsize=None)
def extremized(name, params, seed=3):
    c, k, spec = setup(name, params, seed)
    return kh.extremize_curvatures(c, k)


def _sphere_vectors(rng, n):
    v = rng.standard_normal((n, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# structure ---------------------------------------------------------------------


@pytest.mark.parametrize("name,params", KAHLER + [("flat_t4", ())])
def test_structure_invariants(name, params):
    c, k, _ = setup(name, params)
    res = kh.structure_residuals(k, c.metric.g)
    assert all(v < 1e-10 for v in res.values()), res
    assert k.is_integrable_kahler


def test_pointwise_structure_on_sphere_is_not_kahler():
    c, k, _ = setup("round_s4", (1.0,), pointwise=True)
    assert not k.is_integrable_kahler
    assert all(v < 1e-10 for v in kh.structure_residuals(k, c.metric.g).values())


def test_reversed_orientation_makes_omega_anti_self_dual():
    metric, x = _point("fubini_study_cp2", (1.0,))
    c = curvature_at(metric, x)
    k = kh.kahler_structure(metric, c, orientation=-1)
    np.testing.assert_allclose(forms.star(k.omega), -k.omega, atol=1e-10)


# holomorphic sectional curvature -----------------------------------------------


def test_product_holomorphic_sectional_values():
    c, k, _ = setup("product_s2xs2", (1.0, 1.0))
    assert kh.holomorphic_sectional(c, k, k.to_chart([1, 0, 0, 0])) == pytest.approx(1.0, abs=1e-12)
    split = k.to_chart(np.array([1.0, 0.0, 1.0, 0.0]) / math.sqrt(2.0))
    assert kh.holomorphic_sectional(c, k, split) == pytest.approx(0.5, abs=1e-12)


def test_product_holomorphic_sectional_matches_factor_oracle(rng):
    # H = a^4 K1 + b^4 K2 with a, b the factor lengths of X
    r1, r2 = 1.0, 2.0
    c, k, _ = setup("product_s2xs2", (r1, r2))
    M = forms.simple_operator(c.riemann, k.frame.vectors)
    x = _sphere_vectors(rng, 200)
    a2 = x[:, 0] ** 2 + x[:, 1] ** 2
    b2 = x[:, 2] ** 2 + x[:, 3] ** 2
    np.testing.assert_allclose(kh.H_frame(M, k.frame_J, x), a2**2 / r1**2 + b2**2 / r2**2, atol=1e-12)


def test_fubini_study_constant_holomorphic_sectional(rng):
    c, k, _ = setup("fubini_study_cp2", (1.0,))
    M = forms.simple_operator(c.riemann, k.frame.vectors)
    vals = kh.H_frame(M, k.frame_J, _sphere_vectors(rng, 500))
    assert np.ptp(vals) < 1e-9
    assert vals[0] == pytest.approx(float(c.scalar) / 6.0, abs=1e-9)


def test_non_unit_vector_rejected():
    c, k, _ = setup("fubini_study_cp2", (1.0,))
    with pytest.raises(kh.KahlerError, match="unit"):
        kh.holomorphic_sectional(c, k, k.to_chart([2.0, 0, 0, 0]))
    with pytest.raises(kh.KahlerError, match="orthonormal"):
        kh.sectional(c, k, k.to_chart([1.0, 0, 0, 0]), k.to_chart([1.0, 0, 0, 0]))


@pytest.mark.parametrize("name,params", KAHLER)
def test_quantities_invariant_under_j_and_sign(name, params, rng):
    c, k, _ = setup(name, params)
    M = forms.simple_operator(c.riemann, k.frame.vectors)
    jf = k.frame_J
    x = _sphere_vectors(rng, 100)
    jx = x @ jf.T
    h = kh.H_frame(M, jf, x)
    b = kh.B_frame(M, jf, x)
    scale = max(1.0, float(np.abs(h).max()))
    for y in (jx, -x, -jx):
        assert np.abs(kh.H_frame(M, jf, y) - h).max() < 1e-12 * scale
        assert np.abs(kh.B_frame(M, jf, y) - b).max() < 1e-12 * scale


def test_kperp_invariant_under_complement(rng):
    c, k, _ = setup("product_s2xs2", (1.0, 2.0))
    samples = extremized("product_s2xs2", (1.0, 2.0))
    for _ in range(20):
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        x, y, u, v = q.T
        kp = 0.5 * (samples.K(x, y) + samples.K(u, v))
        kp_swapped = 0.5 * (samples.K(u, v) + samples.K(x, y))
        assert kp == pytest.approx(kp_swapped, abs=1e-12)
        # sign flips and swapping the spanning pair describe the same planes
        assert samples.K(-y, x) == pytest.approx(samples.K(x, y), abs=1e-12)


# extremization -----------------------------------------------------------------


def test_product_unit_extrema():
    s = extremized("product_s2xs2", (1.0, 1.0))
    ex = s.extrema
    assert ex["H_max"] == pytest.approx(1.0, abs=1e-8)
    assert ex["H_min"] == pytest.approx(0.5, abs=1e-8)
    assert s.H_av == pytest.approx(2.0 / 3.0, abs=1e-12)
    # equality cases H_av = (2/3) H_max and H_max = 2 H_min
    assert abs(s.H_av - 2.0 / 3.0 * ex["H_max"]) < 1e-9
    assert abs(ex["H_max"] - 2.0 * ex["H_min"]) < 1e-9


@pytest.mark.parametrize("name,params", KAHLER)
def test_extrema_bracket_average(name, params):
    s = extremized(name, params)
    ex = s.extrema
    assert ex["H_min"] - 1e-12 <= s.H_av <= ex["H_max"] + 1e-12
    assert ex["B_min"] <= ex["B_max"] + 1e-12
    assert ex["Kperp_min"] <= ex["Kperp_max"] + 1e-12
    assert all(g < 1e-10 for g in s.grad_norms.values()), s.grad_norms


def test_fubini_study_extrema_collapse():
    c, _, _ = setup("fubini_study_cp2", (1.0,))
    ex = extremized("fubini_study_cp2", (1.0,)).extrema
    assert ex["H_max"] - ex["H_min"] < 1e-8
    assert ex["B_max"] == pytest.approx(float(c.scalar) / 12.0, abs=1e-8)
    assert ex["B_min"] == pytest.approx(float(c.scalar) / 12.0, abs=1e-8)


def test_budget_too_small_rejected():
    c, k, _ = setup("fubini_study_cp2", (1.0,))
    with pytest.raises(kh.KahlerError, match="budget too small"):
        kh.extremize_curvatures(c, k, budget=999)


@pytest.mark.parametrize("name,params", KAHLER_EINSTEIN)
def test_holomorphic_extremes_from_anti_self_dual_spectrum(name, params):
    c, k, spec = setup(name, params)
    res = kh.verify_holomorphic_extremes(c, k, spec, extremized(name, params))
    assert max(res.values()) < 1e-6, res


@pytest.mark.parametrize("name,params", KAHLER + [("flat_t4", ())])
def test_bisectional_extremes_from_anti_self_dual_spectrum(name, params):
    c, k, spec = setup(name, params)
    res = kh.verify_bisectional_extremes(c, k, spec, kh.extremize_curvatures(c, k) if name == "flat_t4" else extremized(name, params))
    assert max(res.values()) < 1e-6, res
    if name == "fubini_study_cp2":
        assert max(res.values()) < 1e-8


def test_bisectional_check_requires_kahler_model():
    c, k, spec = setup("round_s4", (1.0,), pointwise=True)
    with pytest.raises(kh.KahlerError, match="Kaehler"):
        kh.verify_bisectional_extremes(c, k, spec, None)


@pytest.mark.parametrize("name,params", KAHLER)
def test_biorthogonal_extremes_match_spectra(name, params):
    c, k, spec = setup(name, params)
    res = kh.verify_biorthogonal_extremes(c, k, spec, extremized(name, params))
    assert max(res.values()) < 1e-6, res


def test_product_kperp_min_vanishes():
    ex = extremized("product_s2xs2", (1.0, 1.0)).extrema
    assert abs(ex["Kperp_min"]) < 1e-8


def test_complex_hyperbolic_kperp_max():
    c, _, _ = setup("complex_hyperbolic_ch2", (1.0,))
    ex = extremized("complex_hyperbolic_ch2", (1.0,)).extrema
    assert ex["Kperp_max"] == pytest.approx(float(c.scalar) / 24.0, abs=1e-7)


def test_sphere_kperp_is_constant():
    c, k, spec = setup("round_s4", (1.0,), pointwise=True)
    ex = kh.extremize_curvatures(c, k, budget=kh.MIN_SPHERE_SAMPLES).extrema
    assert ex["Kperp_max"] == pytest.approx(1.0, abs=1e-10)
    assert ex["Kperp_min"] == pytest.approx(1.0, abs=1e-10)
    res = kh.verify_biorthogonal_extremes(c, k, spec, kh.extremize_curvatures(c, k, budget=kh.MIN_SPHERE_SAMPLES))
    assert max(res.values()) < 1e-10


@pytest.mark.parametrize("factor", [0.5, 2.0])
def test_residual_formulas_scale_with_metric(factor):
    # g -> c^2 g divides curvature by c^2; extrema and predictions follow
    base = extremized("product_s2xs2", (1.0, 2.0)).extrema
    c, k, spec = setup("product_s2xs2", (factor, 2.0 * factor))
    samples = kh.extremize_curvatures(c, k)
    for key, val in base.items():
        assert samples.extrema[key] == pytest.approx(val / factor**2, abs=1e-8)
    res = kh.verify_bisectional_extremes(c, k, spec, samples)
    res.update(kh.verify_biorthogonal_extremes(c, k, spec, samples))
    assert max(res.values()) < 1e-6 / factor**2


# sphere averages -----------------------------------------------------------------


@pytest.mark.parametrize("name,params", KAHLER)
def test_average_holomorphic_sectional_is_s_over_6(name, params, rng):
    metric = builtin_model(name, params)
    for x in metric.sample_points(10, rng):
        c = curvature_at(metric, x)
        avg = kh.sphere_average_H(c, kh.kahler_structure(metric, c))
        scale = max(1.0, abs(float(c.scalar)))
        assert abs(avg["H_av"] - avg["berger_pred"]) < 1e-10 * scale
        assert abs(avg["s_star"] - float(c.scalar)) < 1e-9 * scale


def test_average_with_pointwise_structure_on_non_kahler_chart(rng):
    from test_curvature import WARPED

    for metric in (builtin_model("round_s4"), WARPED):
        for x in metric.sample_points(20, rng):
            c = curvature_at(metric, x)
            avg = kh.sphere_average_H(c, kh.kahler_structure(metric, c, pointwise=True))
            assert abs(avg["H_av"] - avg["hall_murphy_pred"]) < 1e-10


def test_sphere_rule_is_degree_four_exact(rng):
    # moments of the uniform measure on S^3: E[x1^4] = 1/8, E[x1^2 x2^2] = 1/24
    pts = kh.cell24_vertices()
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0)
    assert np.mean(pts[:, 0] ** 4) == pytest.approx(1 / 8, abs=1e-15)
    assert np.mean(pts[:, 0] ** 2 * pts[:, 1] ** 2) == pytest.approx(1 / 24, abs=1e-15)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    rotated = pts @ q.T
    assert np.mean(rotated[:, 2] ** 4) == pytest.approx(1 / 8, abs=1e-14)


# adapted frame for anti-self-dual forms ----------------------------------------------


def test_adapted_frame_canonical_case():
    phi = math.sqrt(2.0) * forms.LAMBDA_BASIS[3]
    b = kh.asd_adapted_frame(phi)
    assert b.reconstruction_residual < 1e-12
    assert b.orthonormality_residual < 1e-12


def test_adapted_frame_random_forms(rng):
    worst_rec = worst_orth = 0.0
    for _ in range(1000):
        phi = kh.random_asd_form(rng)
        b = kh.asd_adapted_frame(phi)
        E1, JE1, E3, JE3 = b.basis.T
        direct = forms.bivector(E1, JE1) - forms.bivector(E3, JE3)
        worst_rec = max(worst_rec, float(np.abs(direct - phi).max()))
        worst_orth = max(worst_orth, float(np.abs(b.basis.T @ b.basis - np.eye(4)).max()))
        np.testing.assert_allclose(kh.STANDARD_J @ E1, JE1, atol=1e-12)
    assert worst_rec < 1e-9
    assert worst_orth < 1e-10


@settings(max_examples=200)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_adapted_frame_property(coeffs):
    c = np.asarray(coeffs)
    phi = (math.sqrt(2.0) / np.linalg.norm(c)) * c @ forms.LAMBDA_BASIS[3:]
    b = kh.asd_adapted_frame(phi)
    assert b.reconstruction_residual < 1e-9
    assert b.orthonormality_residual < 1e-10


def test_adapted_frame_preconditions(rng):
    phi = kh.random_asd_form(rng)
    with pytest.raises(kh.KahlerError, match="norm must be sqrt"):
        kh.asd_adapted_frame(phi / math.sqrt(2.0))
    with pytest.raises(kh.KahlerError, match="anti-self-dual"):
        kh.asd_adapted_frame(math.sqrt(2.0) * forms.LAMBDA_BASIS[0])


# pointwise identities ------------------------------------------------------------------


@pytest.mark.parametrize("name,params", KAHLER + [("flat_t4", ())])
def test_kahler_pointwise_identities(name, params):
    c, k, _ = setup(name, params)
    res = kh.kahler_pointwise_identities(c, k, rng=np.random.default_rng(1))
    assert max(res.values()) < 1e-8, res
    metric = builtin_model(name, params)
    assert ("s/4 - H - B" in res) == metric.einstein


def test_pointwise_identities_detect_non_kahler_structure():
    from test_curvature import WARPED

    c = curvature_at(WARPED, [0.2, 0.5, 0.3, 0.7])
    k = kh.kahler_structure(WARPED, c, pointwise=True)
    res = kh.kahler_pointwise_identities(c, k, rng=np.random.default_rng(1))
    assert res["R_ij13 - R_ij24"] > 1e-4
