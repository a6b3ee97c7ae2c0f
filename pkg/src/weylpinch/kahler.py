"""Almost-Hermitian curvature quantities at a point.

Vectors are handled in the components of an oriented orthonormal frame, where
the curvature operator is the 6x6 matrix ``M = R(e_ab, e_cd)`` and the
almost-complex structure is an orthogonal matrix ``Jf`` with ``Jf @ Jf = -1``.
The Kaehler form is ``omega(X, Y) = g(JX, Y)``.

* holomorphic sectional curvature ``H(X) = R(X^JX, X^JX)``
* orthogonal holomorphic bisectional curvature ``B(X, Y) = R(X^JX, Y^JY)``
  for unit ``Y`` orthogonal to ``X, JX``; since ``X^JX + Y^JY = omega`` it
  depends on ``X`` alone
* biorthogonal curvature ``Kperp(P) = (K(P) + K(P^perp)) / 2``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from . import forms
from .curvature import CurvaturePoint
from .forms import Frame, OperatorBlocks
from .metrics import ChartMetric
from .spectral import WeylSpectrum

MIN_SPHERE_SAMPLES = 1000
DEFAULT_SPHERE_SAMPLES = 8192
REFINE_STARTS = 6
UNIT_TOL = 1e-10

STANDARD_J = np.array(
    [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)


class KahlerError(ValueError):
    pass


# structures ------------------------------------------------------------------


@dataclass(frozen=True)
class KahlerStructure:
    """J at a point, in chart components and in the components of ``frame``."""

    J: np.ndarray
    frame_J: np.ndarray
    omega: np.ndarray
    is_integrable_kahler: bool
    frame: Frame

    def to_frame(self, X) -> np.ndarray:
        return self.frame.coframe @ np.asarray(X, dtype=float)

    def to_chart(self, x) -> np.ndarray:
        return self.frame.vectors @ np.asarray(x, dtype=float)


def omega_from_frame_j(jf: np.ndarray) -> np.ndarray:
    """omega_ab = g(J e_a, e_b) = Jf[b, a] as a simple-basis 6-vector."""
    return forms.from_matrix(np.swapaxes(jf, -1, -2))


def kahler_structure(metric: ChartMetric, c: CurvaturePoint, orientation: int = 1, pointwise: bool = False) -> KahlerStructure:
    """The model's complex structure at the point of ``c``.

    With ``pointwise=True`` (or for charts without a declared J) the structure
    is built from the orthonormal frame, J e1 = e2 and J e3 = e4; it is then
    orthogonal and compatible with the orientation but in general not integrable.
    """
    frame = forms.orthonormal_frame(c.metric, orientation)
    if metric.complex_structure is not None and not pointwise:
        J = np.asarray(metric.complex_structure(c.metric.point), dtype=float)
        jf = frame.coframe @ J @ frame.vectors
        integrable = metric.kahler
    else:
        jf = STANDARD_J.copy()
        J = frame.vectors @ jf @ frame.coframe
        integrable = False
    return KahlerStructure(J, jf, omega_from_frame_j(jf), integrable, frame)


def structure_residuals(k: KahlerStructure, g: np.ndarray, rng: np.random.Generator | None = None) -> dict[str, float]:
    """J^2 = -1, g(JX, JY) = g(X, Y) on random vectors, *omega = omega and |omega| = sqrt(2)."""
    rng = rng or np.random.default_rng(0)
    X, Y = rng.standard_normal((2, 4))
    gxy = X @ g @ Y
    return {
        "J^2 + 1": float(np.abs(k.J @ k.J + np.eye(4)).max()),
        "g(JX,JY) - g(X,Y)": float(abs((k.J @ X) @ g @ (k.J @ Y) - gxy) / max(1.0, abs(gxy))),
        "*omega - omega": float(np.abs(forms.star(k.omega) - k.omega).max()),
        "|omega| - sqrt(2)": float(abs(forms.norm(k.omega) - math.sqrt(2.0))),
    }


# quartic forms and their gradients -------------------------------------------


def _hol_bivector(x: np.ndarray, jf: np.ndarray) -> np.ndarray:
    return forms.bivector(x, x @ jf.T)


def _bivector_jacobian(x: np.ndarray, jf: np.ndarray) -> np.ndarray:
    """d b_ab / d x_c for b = x ^ Jx, shape (6, 4)."""
    jx = jf @ x
    out = np.empty((6, 4))
    eye = np.eye(4)
    for k, (a, b) in enumerate(forms.PAIRS):
        out[k] = eye[a] * jx[b] + x[a] * jf[b] - eye[b] * jx[a] - x[b] * jf[a]
    return out


def H_frame(M: np.ndarray, jf: np.ndarray, x: np.ndarray) -> np.ndarray:
    """H at frame vectors x (shape (..., 4), not necessarily unit; quartic in x)."""
    b = _hol_bivector(x, jf)
    return np.einsum("...i,ij,...j->...", b, M, b)


def B_frame(M: np.ndarray, jf: np.ndarray, x: np.ndarray) -> np.ndarray:
    """B(x, y) for unit x and any unit y orthogonal to x, Jx."""
    b = _hol_bivector(x, jf)
    w = omega_from_frame_j(jf)
    return np.einsum("...i,ij,...j->...", b, M, w - b)


def _bivector_hessian(jf: np.ndarray) -> np.ndarray:
    """d^2 b_ab / dx_c dx_d for b = x ^ Jx (constant in x), shape (6, 4, 4)."""
    eye = np.eye(4)
    out = np.empty((6, 4, 4))
    for k, (a, b) in enumerate(forms.PAIRS):
        out[k] = (
            np.outer(eye[a], jf[b]) + np.outer(jf[b], eye[a]) - np.outer(eye[b], jf[a]) - np.outer(jf[a], eye[b])
        )
    return out


def _quartic(M, jf, x, a, v):
    """f = a b^T M b + b^T v with b = x ^ Jx: value, gradient and Hessian in R^4."""
    b = _hol_bivector(x, jf)
    db = _bivector_jacobian(x, jf)
    u = 2.0 * a * (M @ b) + v
    hess = 2.0 * a * db.T @ M @ db + np.einsum("k,kcd->cd", u, _bivector_hessian(jf))
    return float(a * b @ M @ b + b @ v), db.T @ u, hess


def _H_grad(M, jf, x):
    return _quartic(M, jf, x, 1.0, np.zeros(6))


def _B_grad(M, jf, x):
    return _quartic(M, jf, x, -1.0, M @ omega_from_frame_j(jf))


# sphere point sets -----------------------------------------------------------


def _roberts_alpha(d: int) -> np.ndarray:
    # the real root of x^(d+1) = x + 1 gives a low-discrepancy Kronecker lattice
    x = 2.0
    for _ in range(60):
        x = (1.0 + x) ** (1.0 / (d + 1))
    return np.array([x ** -(k + 1) for k in range(d)]) % 1.0


def s3_grid(n: int) -> np.ndarray:
    """Deterministic, nearly uniform points on S^3 (Kronecker lattice in Hopf coordinates)."""
    k = np.arange(n)[:, None] + 0.5
    u = (k * _roberts_alpha(3)) % 1.0
    r1 = np.sqrt(1.0 - u[:, 0])
    r2 = np.sqrt(u[:, 0])
    t1 = 2.0 * math.pi * u[:, 1]
    t2 = 2.0 * math.pi * u[:, 2]
    return np.stack([r1 * np.cos(t1), r1 * np.sin(t1), r2 * np.cos(t2), r2 * np.sin(t2)], axis=1)


def cell24_vertices() -> np.ndarray:
    """The 24 vertices of the 24-cell: an equal-weight spherical 5-design on S^3."""
    pts = []
    for i in range(4):
        for sgn in (1.0, -1.0):
            v = np.zeros(4)
            v[i] = sgn
            pts.append(v)
    for mask in range(16):
        pts.append(np.array([0.5 if (mask >> i) & 1 else -0.5 for i in range(4)]))
    return np.array(pts)


def quat_left(p: np.ndarray) -> np.ndarray:
    a, b, c, d = np.moveaxis(np.asarray(p), -1, 0)
    return np.stack(
        [
            np.stack([a, -b, -c, -d], -1),
            np.stack([b, a, -d, c], -1),
            np.stack([c, d, a, -b], -1),
            np.stack([d, -c, b, a], -1),
        ],
        -2,
    )


def quat_right(q: np.ndarray) -> np.ndarray:
    a, b, c, d = np.moveaxis(np.asarray(q), -1, 0)
    return np.stack(
        [
            np.stack([a, -b, -c, -d], -1),
            np.stack([b, a, d, -c], -1),
            np.stack([c, -d, a, b], -1),
            np.stack([d, c, -b, a], -1),
        ],
        -2,
    )


def kperp_from_rotation(M: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Kperp of the plane spanned by the first two columns of Q in SO(4)."""
    b1 = forms.bivector(Q[..., :, 0], Q[..., :, 1])
    b2 = forms.bivector(Q[..., :, 2], Q[..., :, 3])
    return 0.5 * (np.einsum("...i,ij,...j->...", b1, M, b1) + np.einsum("...i,ij,...j->...", b2, M, b2))


def _kperp_quat(M, y):
    p = y[:4] / np.linalg.norm(y[:4])
    q = y[4:] / np.linalg.norm(y[4:])
    return float(kperp_from_rotation(M, quat_left(p) @ quat_right(q)))


# extremization ---------------------------------------------------------------


@dataclass(frozen=True)
class Extremum:
    value: float
    argument: np.ndarray
    grad_norm: float


def _newton_polish(f_grad: Callable, x: np.ndarray, sign: float, steps: int = 25) -> np.ndarray:
    """Riemannian Newton iterations on S^3 with the analytic Hessian."""
    for _ in range(steps):
        v, g, hess = f_grad(x)
        proj = np.eye(4) - np.outer(x, x)
        rg = proj @ g
        if np.linalg.norm(rg) < 1e-15 * max(1.0, np.linalg.norm(g)):
            break
        rh = proj @ (hess - (x @ g) * np.eye(4)) @ proj
        step = -np.linalg.lstsq(rh, rg, rcond=1e-10)[0]
        step = proj @ step
        cand = (x + step) / np.linalg.norm(x + step)
        cv = f_grad(cand)[0]
        if sign * cv < sign * v - 1e-14 * max(1.0, abs(v)):
            break
        x = cand
    return x


def _refine_sphere(f_grad: Callable, starts: np.ndarray, sign: float) -> Extremum:
    """Best of BFGS runs of sign*f(y/|y|) from the given unit starts, Newton-polished."""

    def obj(y):
        n = np.linalg.norm(y)
        x = y / n
        v, g, _ = f_grad(x)
        tang = g - (g @ x) * x
        return -sign * v, -sign * tang / n

    best = None
    for x0 in starts:
        res = minimize(obj, x0, jac=True, method="BFGS", options={"gtol": 1e-14, "maxiter": 400})
        x = _newton_polish(f_grad, res.x / np.linalg.norm(res.x), sign)
        v, g, _ = f_grad(x)
        v0 = f_grad(x0)[0]
        if sign * v0 > sign * v:
            # never report worse than the sampled start
            x, v, g = x0, v0, f_grad(x0)[1]
        cand = Extremum(v, x, float(np.linalg.norm(g - (g @ x) * x)))
        if best is None or sign * cand.value > sign * best.value:
            best = cand
    return best


def _extremes_on_sphere(f_batch, f_grad, pts: np.ndarray) -> tuple[Extremum, Extremum]:
    vals = f_batch(pts)
    order = np.argsort(vals, kind="stable")
    lo = _refine_sphere(f_grad, pts[order[:REFINE_STARTS]], -1.0)
    hi = _refine_sphere(f_grad, pts[order[::-1][:REFINE_STARTS]], 1.0)
    return hi, lo


def _extremes_kperp(M: np.ndarray, per_factor: int) -> tuple[Extremum, Extremum]:
    grid = s3_grid(per_factor)
    Ls = quat_left(grid)
    Rs = quat_right(grid)
    Q = Ls[:, None] @ Rs[None, :]
    vals = kperp_from_rotation(M, Q).reshape(-1)
    order = np.argsort(vals, kind="stable")
    pairs = np.concatenate(
        [np.repeat(grid, per_factor, axis=0), np.tile(grid, (per_factor, 1))], axis=1
    )  # index i*m + j -> (p_i, q_j)

    def refine(idx, sign):
        best = None
        h = 1e-6
        for y0 in pairs[idx]:

            def obj(y):
                v = _kperp_quat(M, y)
                g = np.empty(8)
                for k in range(8):
                    e = np.zeros(8)
                    e[k] = h
                    g[k] = (_kperp_quat(M, y + e) - _kperp_quat(M, y - e)) / (2 * h)
                return -sign * v, -sign * g

            res = minimize(obj, y0, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 400})
            y = res.x if sign * _kperp_quat(M, res.x) >= sign * _kperp_quat(M, y0) else y0
            cand = Extremum(_kperp_quat(M, y), y, float(np.linalg.norm(obj(y)[1])))
            if best is None or sign * cand.value > sign * best.value:
                best = cand
        return best

    hi = refine(order[::-1][:REFINE_STARTS], 1.0)
    lo = refine(order[:REFINE_STARTS], -1.0)
    return hi, lo


@dataclass(frozen=True)
class CurvatureSamples:
    """Extrema of H, B and Kperp at a point, with the sphere average of H and s*.

    ``H`` and ``B`` take unit vectors in frame components; ``K`` takes an
    orthonormal frame-component pair.
    """

    H: Callable
    B: Callable
    K: Callable
    extrema: dict
    H_av: float
    s_star: float
    arguments: dict = field(default_factory=dict, repr=False)
    grad_norms: dict = field(default_factory=dict)


def _operator(c: CurvaturePoint, k: KahlerStructure) -> np.ndarray:
    return forms.simple_operator(c.riemann, k.frame.vectors)


def holomorphic_sectional(c: CurvaturePoint, k: KahlerStructure, X) -> float:
    """H(X) = R(X^JX, X^JX) for a unit tangent vector X given in chart components."""
    x = k.to_frame(X)
    if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
        raise KahlerError("X must be a unit vector")
    return float(H_frame(_operator(c, k), k.frame_J, x))


def sectional(c: CurvaturePoint, k: KahlerStructure, X, Y) -> float:
    """K of the plane spanned by an orthonormal pair given in chart components."""
    x, y = k.to_frame(X), k.to_frame(Y)
    if abs(np.linalg.norm(x) - 1) > UNIT_TOL or abs(np.linalg.norm(y) - 1) > UNIT_TOL or abs(x @ y) > UNIT_TOL:
        raise KahlerError("X, Y must be orthonormal")
    b = forms.bivector(x, y)
    return float(b @ _operator(c, k) @ b)


def sphere_average(M: np.ndarray, jf: np.ndarray) -> float:
    """Mean of H over the unit sphere; exact since H is a quartic and the rule is a 5-design."""
    pts = cell24_vertices()
    vals = H_frame(M, jf, pts)
    return float(math.fsum(vals) / len(vals))


def s_star_value(M: np.ndarray, jf: np.ndarray) -> float:
    w = omega_from_frame_j(jf)
    return float(2.0 * w @ M @ w)


def extremize_curvatures(c: CurvaturePoint, k: KahlerStructure, budget: int = DEFAULT_SPHERE_SAMPLES) -> CurvatureSamples:
    """Extrema of H, B and Kperp by dense deterministic sampling plus BFGS refinement.

    ``budget`` is the number of S^3 samples for H and B; the plane search uses
    a product of two S^3 grids with about ``budget`` pairs in total.
    """
    if budget < MIN_SPHERE_SAMPLES:
        raise KahlerError(f"budget too small: need at least {MIN_SPHERE_SAMPLES} sphere samples, got {budget}")
    M = _operator(c, k)
    jf = k.frame_J
    pts = s3_grid(budget)
    h_hi, h_lo = _extremes_on_sphere(lambda p: H_frame(M, jf, p), lambda x: _H_grad(M, jf, x), pts)
    b_hi, b_lo = _extremes_on_sphere(lambda p: B_frame(M, jf, p), lambda x: _B_grad(M, jf, x), pts)
    k_hi, k_lo = _extremes_kperp(M, int(math.ceil(math.sqrt(budget))))
    extrema = {
        "H_max": h_hi.value,
        "H_min": h_lo.value,
        "B_max": b_hi.value,
        "B_min": b_lo.value,
        "Kperp_max": k_hi.value,
        "Kperp_min": k_lo.value,
    }
    args = {"H_max": h_hi.argument, "H_min": h_lo.argument, "B_max": b_hi.argument, "B_min": b_lo.argument,
            "Kperp_max": k_hi.argument, "Kperp_min": k_lo.argument}
    grads = {"H_max": h_hi.grad_norm, "H_min": h_lo.grad_norm, "B_max": b_hi.grad_norm, "B_min": b_lo.grad_norm}

    def K(x, y):
        b = forms.bivector(np.asarray(x), np.asarray(y))
        return np.einsum("...i,ij,...j->...", b, M, b)

    return CurvatureSamples(
        H=lambda x: H_frame(M, jf, np.asarray(x)),
        B=lambda x: B_frame(M, jf, np.asarray(x)),
        K=K,
        extrema=extrema,
        H_av=sphere_average(M, jf),
        s_star=s_star_value(M, jf),
        arguments=args,
        grad_norms=grads,
    )


def sphere_average_H(c: CurvaturePoint, k: KahlerStructure) -> dict[str, float]:
    """H_av with the two closed forms s/6 and (s + 3 s*)/24, s* = 2 R(omega, omega)."""
    M = _operator(c, k)
    s = float(c.scalar)
    s_star = s_star_value(M, k.frame_J)
    return {
        "H_av": sphere_average(M, k.frame_J),
        "s_star": s_star,
        "berger_pred": s / 6.0,
        "hall_murphy_pred": (s + 3.0 * s_star) / 24.0,
    }


# constructive ASD frame --------------------------------------------------------


@dataclass(frozen=True)
class AdaptedBasis:
    """Orthonormal (E1, JE1, E3, JE3) as columns, in frame components."""

    basis: np.ndarray
    reconstruction_residual: float
    orthonormality_residual: float


def asd_adapted_frame(phi, jf: np.ndarray = STANDARD_J) -> AdaptedBasis:
    """Orthonormal basis {E1, JE1, E3, JE3} with phi = E1^JE1 - E3^JE3 for an
    anti-self-dual phi of norm sqrt(2).

    I is defined by g(IX, Y) = (sqrt(2)/|phi|) phi(X, Y); a unit V with
    g(IV, JV) = 0 is found by bisection along the segment between two basis
    vectors where that quadratic form changes sign, and then
    E1 ~ V - IJV, E3 ~ V + IJV.
    """
    phi = np.asarray(phi, dtype=float)
    nrm = float(forms.norm(phi))
    if abs(nrm - math.sqrt(2.0)) > 1e-9:
        raise KahlerError(f"norm must be sqrt(2), got {nrm!r}")
    if np.abs(forms.star(phi) + phi).max() > 1e-9:
        raise KahlerError("phi must be anti-self-dual")
    jf = np.asarray(jf, dtype=float)
    I = (math.sqrt(2.0) / nrm) * forms.to_matrix(phi).T

    def q(v):
        return float((I @ v) @ (jf @ v))

    eye = np.eye(4)
    qs = [q(e) for e in eye]
    zero = [i for i, v in enumerate(qs) if v == 0.0]
    if zero:
        V = eye[zero[0]]
    else:
        i = int(np.argmax(qs))
        j = int(np.argmin(qs))
        lo, hi = 0.0, 1.0  # q < 0 at t = lo, q > 0 at t = hi along t e_i + (1 - t) e_j
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if q(mid * eye[i] + (1 - mid) * eye[j]) > 0:
                hi = mid
            else:
                lo = mid
        t = 0.5 * (lo + hi)
        V = t * eye[i] + (1 - t) * eye[j]
    V = V / np.linalg.norm(V)
    ijv = I @ (jf @ V)
    E1 = V - ijv
    E3 = V + ijv
    E1 /= np.linalg.norm(E1)
    E3 /= np.linalg.norm(E3)
    basis = np.stack([E1, jf @ E1, E3, jf @ E3], axis=1)
    rebuilt = forms.bivector(E1, jf @ E1) - forms.bivector(E3, jf @ E3)
    return AdaptedBasis(
        basis,
        float(np.abs(rebuilt - phi).max()),
        float(np.abs(basis.T @ basis - np.eye(4)).max()),
    )


def random_asd_form(rng: np.random.Generator) -> np.ndarray:
    """Uniformly random anti-self-dual 2-form of norm sqrt(2)."""
    c = rng.standard_normal(3)
    c *= math.sqrt(2.0) / np.linalg.norm(c)
    return c @ forms.LAMBDA_BASIS[3:]


# verification ----------------------------------------------------------------


def _require_complex_orientation(k: KahlerStructure):
    if np.abs(forms.star(k.omega) - k.omega).max() > 1e-8:
        raise KahlerError("omega is not self-dual: use the complex orientation")


def bisectional_bridge(M: np.ndarray, jf: np.ndarray, blocks: OperatorBlocks, phi: np.ndarray) -> float:
    """Residual of (s/6)|phi|^2 - W-(phi, phi) = 4 R(E1^JE1, E3^JE3) for the adapted basis of phi."""
    basis = asd_adapted_frame(phi, jf).basis
    E1, JE1, E3, JE3 = basis.T
    rhs = 4.0 * forms.bivector(E1, JE1) @ M @ forms.bivector(E3, JE3)
    coeffs = forms.LAMBDA_BASIS[3:] @ phi
    s = 12.0 * float(blocks.scalar_term)
    lhs = (s / 6.0) * float(phi @ phi) - coeffs @ blocks.wminus_block @ coeffs
    return float(abs(lhs - rhs))


def verify_bisectional_extremes(c: CurvaturePoint, k: KahlerStructure, spec: WeylSpectrum, samples: CurvatureSamples) -> dict[str, float]:
    """|s/6 - lambda3- - 2 B_min|, |s/6 - lambda1- - 2 B_max| and the bridge identity on each W- eigenform."""
    if not k.is_integrable_kahler:
        raise KahlerError("requires a model declared Kaehler")
    _require_complex_orientation(k)
    M = _operator(c, k)
    blocks = forms.blocks_from_simple(M)
    s = float(c.scalar)
    l1, _, l3 = spec.lambda_minus
    out = {
        "s/6 - lambda3- - 2 B_min": abs(s / 6.0 - l3 - 2.0 * samples.extrema["B_min"]),
        "s/6 - lambda1- - 2 B_max": abs(s / 6.0 - l1 - 2.0 * samples.extrema["B_max"]),
    }
    for idx, form in enumerate(spec.eigenforms_minus):
        out[f"bridge eigenform {idx + 1}"] = bisectional_bridge(M, k.frame_J, blocks, math.sqrt(2.0) * form)
    return out


def verify_holomorphic_extremes(c: CurvaturePoint, k: KahlerStructure, spec: WeylSpectrum, samples: CurvatureSamples) -> dict[str, float]:
    """|H_max - (s/6 + lambda3-/2)| and |H_min - (s/6 + lambda1-/2)| (Kaehler-Einstein)."""
    _require_complex_orientation(k)
    s = float(c.scalar)
    l1, _, l3 = spec.lambda_minus
    return {
        "H_max - s/6 - lambda3-/2": abs(samples.extrema["H_max"] - s / 6.0 - l3 / 2.0),
        "H_min - s/6 - lambda1-/2": abs(samples.extrema["H_min"] - s / 6.0 - l1 / 2.0),
    }


def verify_biorthogonal_extremes(c: CurvaturePoint, k: KahlerStructure, spec: WeylSpectrum, samples: CurvatureSamples, s: float | None = None) -> dict[str, float]:
    """Kperp extrema against s/12 + (lambda+ + lambda-)/2, plus the sign-conditional bounds
    Kperp_min <= B_min/2 (s >= 0) and Kperp_max >= B_max/2 (s <= 0), reported as violations."""
    s = float(c.scalar) if s is None else float(s)
    ex = samples.extrema
    lp, lm = spec.lambda_plus, spec.lambda_minus
    out = {
        "Kperp_max - s/12 - (lambda3+ + lambda3-)/2": abs(ex["Kperp_max"] - s / 12.0 - (lp[2] + lm[2]) / 2.0),
        "Kperp_min - s/12 - (lambda1+ + lambda1-)/2": abs(ex["Kperp_min"] - s / 12.0 - (lp[0] + lm[0]) / 2.0),
    }
    if not k.is_integrable_kahler:
        return out
    if s >= 0:
        out["Kperp_min - s/24 - lambda1-/2"] = abs(ex["Kperp_min"] - s / 24.0 - lm[0] / 2.0)
        out["violation Kperp_min <= B_min/2"] = max(0.0, ex["Kperp_min"] - ex["B_min"] / 2.0)
    if s <= 0:
        out["Kperp_max - s/24 - lambda3-/2"] = abs(ex["Kperp_max"] - s / 24.0 - lm[2] / 2.0)
        out["violation Kperp_max >= B_max/2"] = max(0.0, ex["B_max"] / 2.0 - ex["Kperp_max"])
    return out


def adapted_basis(x: np.ndarray, jf: np.ndarray, seed_vector: np.ndarray | None = None) -> np.ndarray:
    """Orthonormal (x, Jx, y, Jy) with y obtained by Gram-Schmidt from ``seed_vector``."""
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    jx = jf @ x
    candidates = [seed_vector] if seed_vector is not None else []
    candidates += list(np.eye(4))
    for v in candidates:
        y = np.asarray(v, dtype=float) - (v @ x) * x - (v @ jx) * jx
        if np.linalg.norm(y) > 1e-3:
            y /= np.linalg.norm(y)
            return np.stack([x, jx, y, jf @ y], axis=1)
    raise KahlerError("could not complete an adapted basis")


def kahler_pointwise_identities(
    c: CurvaturePoint, k: KahlerStructure, n_bases: int = 8, rng: np.random.Generator | None = None
) -> dict[str, float]:
    """Worst residuals over random adapted bases {X, JX, Y, JY} of
    R_ij13 = R_ij24, R_ij14 = -R_ij23 and Ric(X, X) = H(X) + B(X, Y);
    for Einstein points also s/4 = H + B."""
    rng = rng or np.random.default_rng(0)
    rf = forms.frame_tensor(c.riemann, k.frame.vectors)
    ric = forms.frame_tensor(c.ricci, k.frame.vectors)
    M = forms.simple_operator(c.riemann, k.frame.vectors)
    s = float(c.scalar)
    einstein = float(np.abs(c.ric0).max()) < 1e-8 * max(1.0, abs(s))
    worst = {"R_ij13 - R_ij24": 0.0, "R_ij14 + R_ij23": 0.0, "Ric(X,X) - H - B": 0.0}
    if einstein:
        worst["s/4 - H - B"] = 0.0
    for _ in range(n_bases):
        x = rng.standard_normal(4)
        F = adapted_basis(x, k.frame_J, rng.standard_normal(4))
        ra = forms.frame_tensor(rf, F)
        worst["R_ij13 - R_ij24"] = max(worst["R_ij13 - R_ij24"], float(np.abs(ra[:, :, 0, 2] - ra[:, :, 1, 3]).max()))
        worst["R_ij14 + R_ij23"] = max(worst["R_ij14 + R_ij23"], float(np.abs(ra[:, :, 0, 3] + ra[:, :, 1, 2]).max()))
        X, Y = F[:, 0], F[:, 2]
        H = float(H_frame(M, k.frame_J, X))
        B = float(forms.bivector(X, k.frame_J @ X) @ M @ forms.bivector(Y, k.frame_J @ Y))
        worst["Ric(X,X) - H - B"] = max(worst["Ric(X,X) - H - B"], abs(X @ ric @ X - H - B))
        if einstein:
            worst["s/4 - H - B"] = max(worst["s/4 - H - B"], abs(s / 4.0 - H - B))
    return worst
