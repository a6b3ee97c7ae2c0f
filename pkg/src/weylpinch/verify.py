"""Verification suites: each runs a family of checks across the model catalog
and returns worst-case residuals against fixed tolerances."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import forms
from . import identities as idl
from . import kahler as kh
from .curvature import curvature_at, weyl_plus_at
from .invariants import atlas_for, gursky_lebrun_comparison, integrate_invariants
from .metrics import builtin_model
from .spectral import LambdaTriple, spectrum

KAHLER_MODELS = (
    ("fubini_study_cp2", ()),
    ("product_s2xs2", (1.0, 1.0)),
    ("product_s2xs2", (1.0, 2.0)),
    ("complex_hyperbolic_ch2", ()),
)
KAHLER_EINSTEIN = (("fubini_study_cp2", ()), ("product_s2xs2", (1.0, 1.0)), ("complex_hyperbolic_ch2", ()))
INTEGRATED = (("flat_t4", ()), ("round_s4", ()), ("fubini_study_cp2", ()), ("product_s2xs2", (1.0, 1.0)))

SUITES = ("lemma1", "lemma2", "lemma3", "prop2", "berger", "hall_murphy", "psi", "weitzenboeck", "signature", "chi")


@dataclass
class SuiteCheck:
    suite: str
    name: str
    formula: str
    worst: float
    tolerance: float
    samples: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst)) and self.worst <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "name": self.name,
            "formula": self.formula,
            "worst_residual": float(self.worst),
            "tolerance": self.tolerance,
            "samples": self.samples,
            "status": "PASS" if self.passed else "FAIL",
            "details": self.details,
        }


def config_seed(config: dict) -> int:
    """Deterministic 63-bit seed from a JSON-serializable config."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big") >> 1


def _label(name, params) -> str:
    return f"{name}({', '.join(repr(float(p)) for p in params)})" if params else name


def _kahler_point(metric, x):
    c = curvature_at(metric, x)
    k = kh.kahler_structure(metric, c)
    spec = spectrum(forms.curvature_operator(c, k.frame))
    return c, k, spec


class VerifyContext:
    """Shared state of one verify run: seeded RNG, options, cached integrals."""

    def __init__(self, budget: int | None = None, order: int = 32, points: int = 5, seed: int = 0):
        self.budget = budget
        self.order = order
        self.points = points
        self.seed = seed
        self._integrals: dict = {}

    def rng(self, tag: str) -> np.random.Generator:
        return np.random.default_rng([self.seed, config_seed({"tag": tag})])

    def sphere_budget(self) -> int:
        return max(kh.MIN_SPHERE_SAMPLES, self.budget or kh.DEFAULT_SPHERE_SAMPLES)

    def integral(self, name, params):
        key = (name, tuple(params), self.order)
        if key not in self._integrals:
            metric = builtin_model(name, params)
            atlas = atlas_for(metric, self.order)
            rep = integrate_invariants(metric, atlas)
            self._integrals[key] = (rep, gursky_lebrun_comparison(metric, atlas, rep))
        return self._integrals[key]


def suite_lemma1(ctx: VerifyContext) -> list[SuiteCheck]:
    n = ctx.budget or 1000
    rng = ctx.rng("lemma1")
    worst_rec = worst_orth = 0.0
    for _ in range(n):
        b = kh.asd_adapted_frame(kh.random_asd_form(rng))
        worst_rec = max(worst_rec, b.reconstruction_residual)
        worst_orth = max(worst_orth, b.orthonormality_residual)
    return [
        SuiteCheck("lemma1", "adapted basis reconstructs phi", "phi = E1^JE1 - E3^JE3", worst_rec, 1e-9, n),
        SuiteCheck("lemma1", "adapted basis is orthonormal", "(E1, JE1, E3, JE3) orthonormal", worst_orth, 1e-9, n),
    ]


def _extremal_suite(ctx: VerifyContext, suite: str, models, fn, formula: str, tol: float = 1e-6) -> list[SuiteCheck]:
    out = []
    for name, params in models:
        metric = builtin_model(name, params)
        pts = metric.sample_points(ctx.points, ctx.rng(f"{suite}:{name}:{params}"))
        worst: dict[str, float] = {}
        for x in pts:
            c, k, spec = _kahler_point(metric, x)
            samples = kh.extremize_curvatures(c, k, ctx.sphere_budget())
            for key, val in fn(c, k, spec, samples).items():
                worst[key] = max(worst.get(key, 0.0), float(val))
        for key, val in worst.items():
            out.append(SuiteCheck(suite, f"{_label(name, params)}: {key}", formula, val, tol, len(pts)))
    return out


def suite_lemma2(ctx: VerifyContext) -> list[SuiteCheck]:
    return _extremal_suite(
        ctx,
        "lemma2",
        (("product_s2xs2", (1.0, 2.0)), ("fubini_study_cp2", ())),
        kh.verify_bisectional_extremes,
        "s/6 - lambda3- = 2 B_min, s/6 - lambda1- = 2 B_max",
    )


def suite_lemma3(ctx: VerifyContext) -> list[SuiteCheck]:
    out = _extremal_suite(
        ctx, "lemma3", KAHLER_EINSTEIN, kh.verify_holomorphic_extremes, "H_max = s/6 + lambda3-/2, H_min = s/6 + lambda1-/2"
    )
    # closed values on the unit product of spheres
    metric = builtin_model("product_s2xs2", (1.0, 1.0))
    x = metric.sample_points(1, ctx.rng("lemma3:values"))[0]
    c, k, _ = _kahler_point(metric, x)
    smp = kh.extremize_curvatures(c, k, ctx.sphere_budget())
    got = (smp.extrema["H_max"], smp.extrema["H_min"], smp.H_av)
    dev = max(abs(a - b) for a, b in zip(got, (1.0, 0.5, 2.0 / 3.0)))
    out.append(
        SuiteCheck("lemma3", "product_s2xs2(1.0, 1.0): (H_max, H_min, H_av) = (1, 1/2, 2/3)", "H on S2 x S2", dev, 1e-6, 1,
                   {"H_max": got[0], "H_min": got[1], "H_av": got[2]})
    )
    return out


def suite_prop2(ctx: VerifyContext) -> list[SuiteCheck]:
    return _extremal_suite(
        ctx, "prop2", KAHLER_MODELS, kh.verify_biorthogonal_extremes, "Kperp_max - s/12 = (lambda3+ + lambda3-)/2 (and min)"
    )


def _average_suite(ctx: VerifyContext, suite: str, models, pointwise: bool, key: str, formula: str) -> list[SuiteCheck]:
    out = []
    n = 20 if ctx.points <= 20 else ctx.points
    for name, params in models:
        metric = builtin_model(name, params)
        pts = metric.sample_points(n, ctx.rng(f"{suite}:{name}:{params}"))
        worst = 0.0
        for x in pts:
            c = curvature_at(metric, x)
            k = kh.kahler_structure(metric, c, pointwise=pointwise)
            av = kh.sphere_average_H(c, k)
            worst = max(worst, abs(av["H_av"] - av[key]))
        out.append(SuiteCheck(suite, f"{_label(name, params)}: |H_av - prediction|", formula, worst, 1e-10, n))
    return out


def suite_berger(ctx: VerifyContext) -> list[SuiteCheck]:
    return _average_suite(ctx, "berger", KAHLER_MODELS, False, "berger_pred", "H_av = s/6")


def suite_hall_murphy(ctx: VerifyContext) -> list[SuiteCheck]:
    models = (("round_s4", ()), ("product_s2xs2", (1.0, 2.0)), ("fubini_study_cp2", ()))
    return _average_suite(ctx, "hall_murphy", models, True, "hall_murphy_pred", "H_av = (s + 3 s*)/24")


def _random_triples(rng, n, scale=5.0):
    x = rng.normal(size=(3, n)) * scale
    return LambdaTriple(*x)


def suite_psi(ctx: VerifyContext) -> list[SuiteCheck]:
    n = ctx.budget or 100_000
    rng = ctx.rng("psi")
    t = _random_triples(rng, n)
    res = np.abs(idl.ab_minus_c2(t)) / np.maximum(1.0, np.abs(t.l3)) ** 4
    out = [SuiteCheck("psi", "AB - C^2 over random triples", "AB - C^2 = 0 (k = 2/3)", float(res.max()), 1e-10, n)]

    exact_worst = 0
    for _ in range(100):
        num = rng.integers(-50, 51, size=3)
        den = rng.integers(1, 20, size=3)
        tr = LambdaTriple(*(Fraction(int(a), int(b)) for a, b in zip(num, den)))
        exact_worst = max(exact_worst, abs(idl.ab_minus_c2(tr)), abs(idl.norm_identity_residual(tr)))
    out.append(SuiteCheck("psi", "exact rational AB - C^2 and norm identity", "residual exactly 0", float(exact_worst), 0.0, 100))

    # Psi >= 0 under lambda1 + lambda3 >= 0: flip samples into the constrained half
    t = _random_triples(rng, n)
    l1, l2, l3 = t.as_tuple()
    flip = l1 + l3 < 0
    t = LambdaTriple(np.where(flip, -l3, l1), np.where(flip, -l2, l2), np.where(flip, -l1, l3))
    a2 = rng.exponential(size=n)
    c2 = rng.exponential(size=n)
    ac = rng.uniform(-1.0, 1.0, size=n) * np.sqrt(a2 * c2)
    psi = idl.psi_value(idl.PsiInputs(t, a2, c2, ac, 2.0 / 3.0))
    scale = np.maximum(1.0, np.abs(t.l3)) ** 2 * np.maximum(1.0, np.maximum(a2, c2))
    out.append(SuiteCheck("psi", "Psi >= 0 when lambda1 + lambda3 >= 0", "A|a|^2 + B|c|^2 + 2C<a,c> >= 0",
                          float(max(0.0, (-psi / scale).max())), 1e-12, n))

    t = _random_triples(rng, n)
    res = np.abs(idl.norm_identity_residual(t)) / np.maximum(1.0, np.abs(t.l3)) ** 2
    out.append(SuiteCheck("psi", "|W|^2 = 2(lambda1^2 - lambda2 lambda3)", "trace-free norm identity", float(res.max()), 1e-12, n))

    # sign lemmas on constrained samples
    t = _random_triples(rng, n)
    l1, l2, l3 = t.as_tuple()
    flip = l1 + l3 < 0
    t = LambdaTriple(np.where(flip, -l3, l1), np.where(flip, -l2, l2), np.where(flip, -l1, l3))
    s = -np.abs(rng.normal(size=n)) * 10.0
    lem = idl.sign_lemma_nonpositive_s(t, s)
    sc = np.maximum(1.0, np.maximum(np.abs(t.l3), np.abs(s)))
    out.append(SuiteCheck("psi", "sign lemma, s <= 0", "2 lambda2^2 + 4 lambda1 lambda3 - lambda2 s/2 <= 0",
                          float(max(0.0, (lem.value / sc).max())), 1e-12, n))

    t = _random_triples(rng, n)
    s = np.abs(rng.normal(size=n)) * 10.0
    l1, l2, l3 = t.as_tuple()
    keep = l2 <= -s / 12.0
    t = LambdaTriple(l1[keep], l2[keep], l3[keep])
    s = s[keep]
    lem = idl.sign_lemma_nonnegative_s(t, s)
    sc = np.maximum(1.0, np.maximum(np.abs(t.l3), np.abs(s)))
    worst = max(float(max(0.0, (lem.value / sc).max())), float(max(0.0, ((lem.value - lem.chain_bound) / sc**2).max())))
    out.append(SuiteCheck("psi", "sign lemma, s >= 0, lambda2 <= -s/12", "value <= -lambda2(2 lambda2 + 4 lambda1 + s/2) <= 0",
                          worst, 1e-12, int(keep.sum())))
    return out


def suite_weitzenboeck(ctx: VerifyContext) -> list[SuiteCheck]:
    rng = ctx.rng("weitzenboeck")
    s = rng.normal(size=ctx.budget or 100_000) * 20.0
    t = LambdaTriple(-s / 12.0, -s / 12.0, s / 6.0)
    gap = np.abs(idl.weitzenboeck_gap(t, s)) / np.maximum(1.0, np.abs(s)) ** 3
    out = [SuiteCheck("weitzenboeck", "Kaehler spectra (-s/12, -s/12, s/6)", "36 det W+ - s|W+|^2 = 0", float(gap.max()), 1e-10, len(s))]
    for name, params in KAHLER_EINSTEIN:
        metric = builtin_model(name, params)
        pts = metric.sample_points(ctx.points, ctx.rng(f"weitzenboeck:{name}"))
        worst = worst_div = 0.0
        for x in pts:
            c = curvature_at(metric, x)
            spec = spectrum(forms.curvature_operator(c, forms.orthonormal_frame(c.metric)))
            worst = max(worst, abs(idl.weitzenboeck_gap(spec.triple_plus, spec.scalar)) / max(1.0, abs(spec.scalar)) ** 3)
            worst_div = max(worst_div, float(weyl_plus_at(metric, x).divergence_norm))
        out.append(SuiteCheck("weitzenboeck", f"{_label(name, params)}: pipeline gap", "36 det W+ - s|W+|^2 = 0", worst, 1e-7, len(pts)))
        out.append(SuiteCheck("weitzenboeck", f"{_label(name, params)}: |delta W+|", "delta W+ = 0", worst_div, 1e-5, len(pts)))
    return out


def _integer_suite(ctx: VerifyContext, suite: str, key: str, formula: str) -> list[SuiteCheck]:
    out = []
    for name, params in INTEGRATED:
        metric = builtin_model(name, params)
        rep, gl = ctx.integral(name, params)
        want = metric.reference[key]
        got = rep.tau if key == "tau" else rep.chi
        out.append(SuiteCheck(suite, f"{_label(name, params)}: {key} = {want}", formula, abs(got - want), 1e-3, rep.node_count,
                              {"value": got, "expected": want, "volume": rep.volume}))
        if key == "tau" and metric.kahler and metric.einstein and gl.s2_integral > 0:
            rel = abs(gl.gap) / gl.s2_integral
            out.append(SuiteCheck(suite, f"{_label(name, params)}: Kaehler equality", "int |W+|^2 = int s^2/24", rel, 1e-6,
                                  rep.node_count, {"wplus_integral": gl.wplus_integral, "s2_integral": gl.s2_integral}))
    return out


def suite_signature(ctx: VerifyContext) -> list[SuiteCheck]:
    return _integer_suite(ctx, "signature", "tau", "tau = (1/12 pi^2) int (|W+|^2 - |W-|^2)")


def suite_chi(ctx: VerifyContext) -> list[SuiteCheck]:
    return _integer_suite(ctx, "chi", "chi", "chi - 3 tau = (1/8 pi^2) int (s^2/24 - |W+|^2 + 3|W-|^2 - |ric0|^2/2)")


SUITE_FUNCS = {
    "lemma1": suite_lemma1,
    "lemma2": suite_lemma2,
    "lemma3": suite_lemma3,
    "prop2": suite_prop2,
    "berger": suite_berger,
    "hall_murphy": suite_hall_murphy,
    "psi": suite_psi,
    "weitzenboeck": suite_weitzenboeck,
    "signature": suite_signature,
    "chi": suite_chi,
}


def run_suites(names, ctx: VerifyContext) -> list[SuiteCheck]:
    if isinstance(names, str):
        names = [names]
    expanded: list[str] = []
    for n in names:
        if n == "all":
            expanded.extend(SUITES)
        elif n in SUITE_FUNCS:
            expanded.append(n)
        else:
            raise ValueError(f"unknown suite {n!r}; choose from all, {', '.join(SUITES)}")
    seen: list[str] = []
    for n in expanded:
        if n not in seen:
            seen.append(n)
    checks: list[SuiteCheck] = []
    for n in seen:
        checks.extend(SUITE_FUNCS[n](ctx))
    return checks
