"""Coordinate curvature tensors of a chart metric.

Conventions: ``gamma[..., k, i, j]`` is the Christoffel symbol of the second
kind, the Riemann tensor is fully lowered with ``R_ijij = K`` for the
sectional curvature ``K`` of the plane of ``d_i, d_j`` (so the unit sphere has
``R_ijij > 0``), ``Ric_jl = g^ik R_ijkl`` and ``ric0 = Ric - (s/4) g``.
All functions broadcast over leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .metrics import ChartMetric, MetricValue, metric_at

FD_STEP_COVARIANT = 1e-4


@dataclass(frozen=True)
class CurvaturePoint:
    metric: MetricValue
    gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    ric0: np.ndarray
    weyl: np.ndarray

    def __getitem__(self, idx) -> "CurvaturePoint":
        return CurvaturePoint(
            self.metric[idx],
            self.gamma[idx],
            self.riemann[idx],
            self.ricci[idx],
            self.scalar[idx],
            self.ric0[idx],
            self.weyl[idx],
        )


@dataclass(frozen=True)
class WeylPlusTensor:
    """Self-dual Weyl part with its covariant derivative data.

    ``grad_norm_sq`` is normalized like the operator-block norm (a quarter of
    the full tensor norm), so that it is comparable with ``|W+|^2 = sum lambda^2``.
    """

    wplus: np.ndarray
    wminus: np.ndarray
    grad_norm_sq: np.ndarray
    divergence: np.ndarray
    divergence_norm: np.ndarray


def christoffel_first(m: MetricValue) -> np.ndarray:
    """Gamma_{k i j} = (d_i g_jk + d_j g_ik - d_k g_ij) / 2, first index lowered."""
    dg = m.dg  # dg[i, j, k] = d_k g_ij
    a = np.einsum("...jki->...kij", dg)
    b = np.einsum("...ikj->...kij", dg)
    c = np.einsum("...ijk->...kij", dg)
    return 0.5 * (a + b - c)


def christoffel(m: MetricValue) -> np.ndarray:
    return np.einsum("...km,...mij->...kij", m.g_inv, christoffel_first(m))


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h o k)_ijkl = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il."""
    t1 = np.einsum("...ik,...jl->...ijkl", h, k)
    t2 = np.einsum("...il,...jk->...ijkl", h, k)
    return t1 + np.einsum("...ijkl->...jilk", t1) - t2 - np.einsum("...ijkl->...jilk", t2)


def riemann_tensor(m: MetricValue, gamma: np.ndarray | None = None) -> np.ndarray:
    if gamma is None:
        gamma = christoffel(m)
    lowered = np.einsum("...mn,...nij->...mij", m.g, gamma)
    d2 = m.d2g  # d2g[a, b, c, d] = d_c d_d g_ab
    second = 0.5 * (
        np.einsum("...iljk->...ijkl", d2)
        + np.einsum("...jkil->...ijkl", d2)
        - np.einsum("...jlik->...ijkl", d2)
        - np.einsum("...ikjl->...ijkl", d2)
    )
    # sum_m gamma[m, j, k] lowered[m, i, l] as a (jk) x (il) matrix product
    batch = gamma.shape[:-3]
    gt = np.swapaxes(gamma.reshape(batch + (4, 16)), -1, -2)
    prod = (gt @ lowered.reshape(batch + (4, 16))).reshape(batch + (4,) * 4)  # [j, k, i, l]
    quad = np.einsum("...jkil->...ijkl", prod) - np.einsum("...jlik->...ijkl", prod)
    return second + quad


def curvature_from_value(m: MetricValue) -> CurvaturePoint:
    gamma = christoffel(m)
    riem = riemann_tensor(m, gamma)
    ricci = np.einsum("...ik,...ijkl->...jl", m.g_inv, riem)
    ricci = 0.5 * (ricci + np.swapaxes(ricci, -1, -2))
    s = np.einsum("...jl,...jl->...", m.g_inv, ricci)
    ric0 = ricci - 0.25 * s[..., None, None] * m.g
    weyl = riem - 0.5 * kulkarni_nomizu(ric0, m.g) - (s / 24.0)[..., None, None, None, None] * kulkarni_nomizu(m.g, m.g)
    return CurvaturePoint(m, gamma, riem, ricci, s, ric0, weyl)


def curvature_at(metric: ChartMetric, point, backend: str | None = None) -> CurvaturePoint:
    """All pointwise curvature tensors at a point or batch of points."""
    return curvature_from_value(metric_at(metric, point, backend))


# Hodge star on the last index pair ------------------------------------------

_LEVI = np.zeros((4, 4, 4, 4))
for _p in permutations(range(4)):
    _inv = sum(1 for a in range(4) for b in range(a + 1, 4) if _p[a] > _p[b])
    _LEVI[_p] = -1.0 if _inv % 2 else 1.0


def volume_tensor(m: MetricValue, orientation: int = 1) -> np.ndarray:
    """epsilon_ijkl = orientation * sqrt(det g) * [ijkl], fully lowered."""
    return orientation * m.sqrt_det_g[..., None, None, None, None] * _LEVI


def star_last_pair(t: np.ndarray, m: MetricValue, orientation: int = 1) -> np.ndarray:
    """Hodge star applied to the trailing antisymmetric index pair of a lowered tensor."""
    eps = volume_tensor(m, orientation)
    raised = np.einsum("...ma,...nb,...ijmn->...ijab", m.g_inv, m.g_inv, t)
    return 0.5 * np.einsum("...ijmn,...mnkl->...ijkl", raised, eps)


def weyl_split(c: CurvaturePoint, orientation: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(W+, W-) as lowered 4-tensors for the given orientation."""
    starred = star_last_pair(c.weyl, c.metric, orientation)
    return 0.5 * (c.weyl + starred), 0.5 * (c.weyl - starred)


def tensor_norm_sq(t: np.ndarray, g_inv: np.ndarray) -> np.ndarray:
    """Full contraction |T|^2 of a lowered tensor with trailing rank = t.ndim - g_inv.ndim + 2."""
    rank = t.ndim - (g_inv.ndim - 2)
    raised = t
    letters = "abcdefgh"[:rank]
    for pos in range(rank):
        src = letters
        dst = letters[:pos] + "z" + letters[pos + 1:]
        raised = np.einsum(f"...z{letters[pos]},...{src}->...{dst}", g_inv, raised)
    return np.einsum(f"...{letters},...{letters}->...", raised, t)


def _wplus_only(metric: ChartMetric, x: np.ndarray, orientation: int, backend: str | None) -> np.ndarray:
    return weyl_split(curvature_at(metric, x, backend), orientation)[0]


def weyl_plus_at(metric: ChartMetric, point, orientation: int = 1, backend: str | None = None) -> WeylPlusTensor:
    """W+ with |nabla W+|^2 and the divergence delta W+ = -g^{mi} nabla_m W+_ijkl.

    Coordinate derivatives of W+ come from central differences at neighboring
    points (step 1e-4); the connection terms are analytic.
    """
    x = np.asarray(point, dtype=float)
    c = curvature_at(metric, x, backend)
    wplus, wminus = weyl_split(c, orientation)
    batch = x.shape[:-1]
    dw = np.empty(batch + (4,) * 5)  # dw[..., m, i, j, k, l]
    for axis in range(4):
        e = np.zeros(4)
        e[axis] = FD_STEP_COVARIANT
        fwd = _wplus_only(metric, x + e, orientation, backend)
        bwd = _wplus_only(metric, x - e, orientation, backend)
        dw[..., axis, :, :, :, :] = (fwd - bwd) / (2.0 * FD_STEP_COVARIANT)
    gam = c.gamma
    nabla = (
        dw
        - np.einsum("...pmi,...pjkl->...mijkl", gam, wplus)
        - np.einsum("...pmj,...ipkl->...mijkl", gam, wplus)
        - np.einsum("...pmk,...ijpl->...mijkl", gam, wplus)
        - np.einsum("...pml,...ijkp->...mijkl", gam, wplus)
    )
    gi = c.metric.g_inv
    grad_sq = 0.25 * tensor_norm_sq(nabla, gi)
    div = -np.einsum("...mi,...mijkl->...jkl", gi, nabla)
    div_norm = np.sqrt(np.maximum(tensor_norm_sq(div, gi), 0.0))
    return WeylPlusTensor(wplus, wminus, grad_sq, div, div_norm)


def decomposition_residual(c: CurvaturePoint) -> np.ndarray:
    """max |R - W - ric0 o g / 2 - s/24 g o g| relative to max(1, max|R|)."""
    g = c.metric.g
    rebuilt = c.weyl + 0.5 * kulkarni_nomizu(c.ric0, g) + (c.scalar / 24.0)[..., None, None, None, None] * kulkarni_nomizu(g, g)
    scale = np.maximum(1.0, np.abs(c.riemann).max(axis=(-4, -3, -2, -1)))
    return np.abs(c.riemann - rebuilt).max(axis=(-4, -3, -2, -1)) / scale
