"""Quadrature atlases for the compact catalog models and the curvature integrals

    tau         = 1/(12 pi^2) int (|W+|^2 - |W-|^2)
    chi - 3 tau = 1/(8 pi^2)  int (s^2/24 - |W+|^2 + 3|W-|^2 - |ric0|^2 / 2)

with |W+-|^2 the operator-block norms (sum of squared eigenvalues) and
|ric0|^2 the frame sum of squares.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import forms
from .curvature import christoffel, riemann_tensor
from .metrics import ChartMetric, builtin_model, metric_at, metric_values
from .spectral import block_norms

CHUNK = 16384
COMPACT_MODELS = ("flat_t4", "round_s4", "fubini_study_cp2", "product_s2xs2")
TWO_PI = 2.0 * math.pi


class AtlasError(ValueError):
    pass


def thread_count() -> int:
    """Worker threads from WEYLPINCH_THREADS (0 or unset = one per CPU)."""
    raw = os.environ.get("WEYLPINCH_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"WEYLPINCH_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"WEYLPINCH_THREADS must be a non-negative integer, got {raw!r}")
    return n or (os.cpu_count() or 1)


def pairwise_sum(values: np.ndarray) -> float:
    """Sum in a fixed balanced binary tree over the node order."""
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.append(a, 0.0)
        a = a[0::2] + a[1::2]
    return float(a[0])


@dataclass(frozen=True)
class QuadratureAtlas:
    model: str
    params: tuple
    nodes: np.ndarray
    weights: np.ndarray
    exactness: str
    excluded_locus_measure: float = 0.0
    # where pointwise invariants are evaluated; an isometric image of ``nodes``
    eval_nodes: np.ndarray | None = field(default=None, repr=False)

    @property
    def evaluation_points(self) -> np.ndarray:
        return self.nodes if self.eval_nodes is None else self.eval_nodes

    @property
    def volume(self) -> float:
        return pairwise_sum(self.weights)


def _gauss(n: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _periodic(n: int, period: float = TWO_PI):
    return np.arange(n) * (period / n), np.full(n, period / n)


def _product(rules):
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return pts, w


def _affine_representative(pts: np.ndarray) -> np.ndarray:
    """Map points with a coordinate modulus above 1 by z -> (1/z1, z2/z1), or its z2 analogue.

    The map is the swap [1:z1:z2] -> [z1:1:z2] of homogeneous coordinates, an
    orientation-preserving isometry of the affine chart onto itself, so pointwise
    invariants agree; the image has |w| <= sqrt(2), where the chart metric is well
    conditioned.
    """
    z1 = pts[:, 0] + 1j * pts[:, 1]
    z2 = pts[:, 2] + 1j * pts[:, 3]
    big1 = (np.abs(z1) >= np.abs(z2)) & (np.abs(z1) > 1.0)
    big2 = ~big1 & (np.abs(z2) > 1.0)
    w1, w2 = z1.copy(), z2.copy()
    w1[big1], w2[big1] = 1.0 / z1[big1], z2[big1] / z1[big1]
    w1[big2], w2[big2] = z1[big2] / z2[big2], 1.0 / z2[big2]
    return np.stack([w1.real, w1.imag, w2.real, w2.imag], axis=1)


def _density(metric: ChartMetric, pts: np.ndarray) -> np.ndarray:
    out = np.empty(len(pts))
    for start in range(0, len(pts), CHUNK):
        g = metric_values(metric, pts[start : start + CHUNK])
        out[start : start + CHUNK] = np.sqrt(np.linalg.det(g))
    return out


def atlas_for(model, order: int, params=()) -> QuadratureAtlas:
    """Product quadrature over a chart covering the model up to measure zero.

    Trapezoid rule on periodic axes, Gauss-Legendre on interval axes, ``order``
    nodes per axis.  The Fubini-Study chart is integrated in polar form
    z1 = tan(t) cos(eta) e^{i phi1}, z2 = tan(t) sin(eta) e^{i phi2}.
    ``model`` is a catalog name or a built-in :class:`ChartMetric`.
    """
    if isinstance(model, ChartMetric):
        metric = model
    else:
        if model == "complex_hyperbolic_ch2":
            raise AtlasError("complex_hyperbolic_ch2 is non-compact: no finite quadrature atlas")
        if model not in COMPACT_MODELS:
            raise AtlasError(f"unknown compact model {model!r}; choose from {', '.join(COMPACT_MODELS)}")
        metric = builtin_model(model, params)
    name = metric.name
    if name == "complex_hyperbolic_ch2":
        raise AtlasError("complex_hyperbolic_ch2 is non-compact: no finite quadrature atlas")
    if name not in COMPACT_MODELS:
        raise AtlasError(f"no quadrature atlas for {name!r}: only compact catalog models are integrable")
    if int(order) != order or order < 4:
        raise AtlasError("order must be an integer >= 4")
    n = int(order)
    if name == "flat_t4":
        pts, w = _product([_periodic(n)] * 4)
        exact = f"trapezoid {n} per axis on all four periodic axes"
    elif name == "round_s4":
        pts, w = _product([_gauss(n, 0.0, math.pi / 2), _periodic(n), _gauss(n, 0.0, math.pi), _periodic(n)])
        exact = f"Gauss-Legendre {n} on alpha, theta; trapezoid {n} on phi, psi"
    elif name == "product_s2xs2":
        pts, w = _product([_gauss(n, 0.0, math.pi), _periodic(n)] * 2)
        exact = f"Gauss-Legendre {n} on theta1, theta2; trapezoid {n} on phi1, phi2"
    else:
        polar, w = _product([_gauss(n, 0.0, math.pi / 2), _gauss(n, 0.0, math.pi / 2), _periodic(n), _periodic(n)])
        t, eta, p1, p2 = polar.T
        r = np.tan(t)
        a, b = r * np.cos(eta), r * np.sin(eta)
        pts = np.stack([a * np.cos(p1), a * np.sin(p1), b * np.cos(p2), b * np.sin(p2)], axis=1)
        # Lebesgue measure in polar form: r^3 cos(eta) sin(eta) dr ..., dr = sec^2(t) dt
        w = w * r**3 * np.cos(eta) * np.sin(eta) / np.cos(t) ** 2
        exact = f"Gauss-Legendre {n} on t (r = tan t) and eta; trapezoid {n} on both phases"
    w = w * _density(metric, pts)
    shifted = _affine_representative(pts) if name == "fubini_study_cp2" else None
    return QuadratureAtlas(name, tuple(metric.params), pts, w, exact, eval_nodes=shifted)


# integration -----------------------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    tau: float
    chi_minus_3tau: float
    chi: float
    integrand_stats: dict
    node_count: int
    volume: float
    integrals: dict = field(default_factory=dict)


def pointwise_integrands(metric: ChartMetric, points: np.ndarray, orientation: int = 1) -> dict[str, np.ndarray]:
    """|W+|^2, |W-|^2, s and |ric0|^2 at a batch of points."""
    mv = metric_at(metric, points)
    riem = riemann_tensor(mv, christoffel(mv))
    frame = forms.orthonormal_frame(mv, orientation)
    blocks = forms.blocks_from_simple(forms.simple_operator(riem, frame.vectors))
    return block_norms(blocks)


def integrate_invariants(metric: ChartMetric, atlas: QuadratureAtlas, orientation: int = 1) -> InvariantReport:
    """tau and chi from the curvature integrands over the atlas nodes.

    Node values are computed in fixed chunks (possibly on several threads)
    and reduced by :func:`pairwise_sum` in node order, so the result does not
    depend on the thread count.
    """
    if metric.name != atlas.model or tuple(metric.params) != tuple(atlas.params):
        raise AtlasError(f"atlas for {atlas.model}{atlas.params} does not match metric {metric.name}{metric.params}")
    nodes = atlas.evaluation_points
    starts = list(range(0, len(nodes), CHUNK))

    def work(start):
        return pointwise_integrands(metric, nodes[start : start + CHUNK], orientation)

    workers = min(thread_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(st) for st in starts]
    vals = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    wp, wm, s, r0 = vals["wplus_sq"], vals["wminus_sq"], vals["scalar"], vals["ric0_sq"]
    w = atlas.weights
    integrals = {
        "wplus_sq": pairwise_sum(w * wp),
        "wminus_sq": pairwise_sum(w * wm),
        "s_sq_over_24": pairwise_sum(w * (s * s / 24.0)),
        "ric0_sq": pairwise_sum(w * r0),
        "signature_integrand": pairwise_sum(w * (wp - wm)),
        "euler_integrand": pairwise_sum(w * (s * s / 24.0 - wp + 3.0 * wm - 0.5 * r0)),
    }
    tau = integrals["signature_integrand"] / (12.0 * math.pi**2)
    c3t = integrals["euler_integrand"] / (8.0 * math.pi**2)
    stats = {
        "wplus_sq": [float(wp.min()), float(wp.max())],
        "wminus_sq": [float(wm.min()), float(wm.max())],
        "scalar": [float(s.min()), float(s.max())],
        "ric0_sq": [float(r0.min()), float(r0.max())],
    }
    return InvariantReport(
        tau=tau,
        chi_minus_3tau=c3t,
        chi=c3t + 3.0 * tau,
        integrand_stats=stats,
        node_count=int(len(nodes)),
        volume=atlas.volume,
        integrals=integrals,
    )


class GurskyLeBrun(NamedTuple):
    wplus_integral: float
    s2_integral: float
    gap: float
    asserted: bool


def gursky_lebrun_comparison(metric: ChartMetric, atlas: QuadratureAtlas, report: InvariantReport | None = None) -> GurskyLeBrun:
    """int |W+|^2 against int s^2/24 with the signed gap.

    ``asserted`` is True when the inequality int |W+|^2 >= int s^2/24 is
    claimed for the model: Einstein, s > 0 and W+ not identically zero.
    """
    report = report or integrate_invariants(metric, atlas)
    wp = report.integrals["wplus_sq"]
    s2 = report.integrals["s_sq_over_24"]
    smin = report.integrand_stats["scalar"][0]
    wp_max = report.integrand_stats["wplus_sq"][1]
    asserted = bool(metric.einstein and smin > 0 and wp_max > 1e-12 * max(1.0, smin * smin))
    return GurskyLeBrun(wp, s2, wp - s2, asserted)
