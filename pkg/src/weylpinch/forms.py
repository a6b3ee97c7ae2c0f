"""Orthonormal frames, 2-forms on a 4-dimensional inner product space and the
block structure of the curvature operator on Lambda^2 = Lambda^+ + Lambda^-.

2-forms are 6-vectors in the simple basis (e12, e13, e14, e23, e24, e34) of an
oriented orthonormal frame; each basis element has unit norm, so the inner
product is the Euclidean one on the six components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import CurvaturePoint
from .metrics import MetricValue

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
_PA = np.array([p[0] for p in PAIRS])
_PB = np.array([p[1] for p in PAIRS])

# Hodge star in the simple basis: *e12 = e34, *e13 = -e24, *e14 = e23
STAR = np.zeros((6, 6))
for _src, _dst, _sgn in ((0, 5, 1), (5, 0, 1), (1, 4, -1), (4, 1, -1), (2, 3, 1), (3, 2, 1)):
    STAR[_dst, _src] = _sgn

_R2 = 1.0 / math.sqrt(2.0)
# rows: alpha_1+, alpha_2+, alpha_3+, alpha_1-, alpha_2-, alpha_3-
LAMBDA_BASIS = _R2 * np.array(
    [
        [1, 0, 0, 0, 0, 1],  # e12 + e34
        [0, 1, 0, 0, -1, 0],  # e13 + e42
        [0, 0, 1, 1, 0, 0],  # e14 + e23
        [1, 0, 0, 0, 0, -1],
        [0, 1, 0, 0, 1, 0],
        [0, 0, 1, -1, 0, 0],
    ],
    dtype=float,
)


class FrameError(ValueError):
    """Degenerate metric or mismatched frame/curvature data."""


@dataclass(frozen=True)
class Frame:
    """Oriented orthonormal frame; ``vectors[..., i, a]`` is the i-th coordinate
    component of ``e_a`` and ``coframe[..., a, i]`` that of ``theta^a``."""

    vectors: np.ndarray
    coframe: np.ndarray
    point: np.ndarray
    orientation_sign: int = 1

    def __getitem__(self, idx) -> "Frame":
        return Frame(self.vectors[idx], self.coframe[idx], self.point[idx], self.orientation_sign)


@dataclass(frozen=True)
class OperatorBlocks:
    """Curvature operator as a symmetric bilinear form on Lambda^2.

    ``simple`` is the 6x6 matrix R(e_ab, e_cd) in the simple basis and
    ``full`` the same form in the (alpha+, alpha-) basis.
    """

    simple: np.ndarray
    full: np.ndarray
    wplus_block: np.ndarray
    wminus_block: np.ndarray
    ric0_block: np.ndarray
    scalar_term: np.ndarray

    def __getitem__(self, idx) -> "OperatorBlocks":
        return OperatorBlocks(
            self.simple[idx],
            self.full[idx],
            self.wplus_block[idx],
            self.wminus_block[idx],
            self.ric0_block[idx],
            self.scalar_term[idx],
        )

    def flipped(self) -> "OperatorBlocks":
        """The same operator seen with the opposite orientation (frame with e3, e4 swapped)."""
        return blocks_from_simple(_SWAP34 @ self.simple @ _SWAP34.T)


# e3 <-> e4 acting on the simple basis
_SWAP34 = np.zeros((6, 6))
for _k, (_a, _b) in enumerate(PAIRS):
    _m = {2: 3, 3: 2}
    _a2, _b2 = _m.get(_a, _a), _m.get(_b, _b)
    _sgn = 1.0
    if _a2 > _b2:
        _a2, _b2, _sgn = _b2, _a2, -1.0
    _SWAP34[PAIRS.index((_a2, _b2)), _k] = _sgn


def orthonormal_frame(m: MetricValue, orientation: int = 1) -> Frame:
    """Gram-Schmidt on the coordinate vectors d_1..d_4, in that order.

    ``orientation`` is the orientation of the coordinate chart relative to the
    manifold; for -1, e3 and e4 are swapped so the frame is positively oriented.
    """
    if orientation not in (1, -1):
        raise FrameError("orientation must be +1 or -1")
    try:
        chol = np.linalg.cholesky(m.g)
    except np.linalg.LinAlgError:
        raise FrameError("degenerate metric") from None
    # Gram-Schmidt of the coordinate basis is the upper-triangular L^-T
    eye = np.broadcast_to(np.eye(4), m.g.shape)
    linv = np.linalg.solve(chol, eye)
    vectors = np.swapaxes(linv, -1, -2).copy()
    coframe = np.swapaxes(chol, -1, -2).copy()
    if orientation < 0:
        vectors = vectors[..., [0, 1, 3, 2]]
        coframe = coframe[..., [0, 1, 3, 2], :]
    return Frame(vectors, coframe, np.asarray(m.point), orientation)


def rotate_frame(f: Frame, q: np.ndarray) -> Frame:
    """New frame e'_b = sum_a e_a q[a, b] for q in SO(4)."""
    q = np.asarray(q, dtype=float)
    if abs(np.linalg.det(q) - 1.0) > 1e-9 or np.abs(q.T @ q - np.eye(4)).max() > 1e-9:
        raise FrameError("rotation must lie in SO(4)")
    return Frame(f.vectors @ q, q.T @ f.coframe, f.point, f.orientation_sign)


def frame_tensor(t: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Components T(e_a, e_b, ...) of a lowered tensor in a frame."""
    rank = t.ndim - (vectors.ndim - 2)
    e = vectors.reshape(vectors.shape[:-2] + (1,) * (rank - 2) + (4, 4))
    out = t
    for _ in range(rank):
        out = np.moveaxis(out @ e, -1, -rank)
    return out


def simple_operator(riemann: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """6x6 matrix R(e_ab, e_cd) over the simple basis."""
    rf = frame_tensor(riemann, vectors)
    return rf[..., _PA[:, None], _PB[:, None], _PA[None, :], _PB[None, :]]


def blocks_from_simple(simple: np.ndarray) -> OperatorBlocks:
    simple = 0.5 * (simple + np.swapaxes(simple, -1, -2))
    full = LAMBDA_BASIS @ simple @ LAMBDA_BASIS.T
    s12 = np.trace(full, axis1=-2, axis2=-1) / 6.0
    eye = s12[..., None, None] * np.eye(3)
    return OperatorBlocks(
        simple=simple,
        full=full,
        wplus_block=full[..., :3, :3] - eye,
        wminus_block=full[..., 3:, 3:] - eye,
        ric0_block=full[..., :3, 3:],
        scalar_term=s12,
    )


def curvature_operator(c: CurvaturePoint, f: Frame) -> OperatorBlocks:
    """Curvature operator blocks at the frame's point.

    The diagonal term is s/12 with s = 2 tr(full), which equals the scalar
    curvature of ``c``.
    """
    if np.shape(f.point) != np.shape(c.metric.point) or not np.array_equal(f.point, c.metric.point):
        raise FrameError("frame and curvature data belong to different points")
    return blocks_from_simple(simple_operator(c.riemann, f.vectors))


# 2-form algebra --------------------------------------------------------------


def star(phi: np.ndarray) -> np.ndarray:
    return np.asarray(phi) @ STAR.T


def wedge(phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Coefficient of e1^e2^e3^e4 in phi ^ psi."""
    return np.einsum("...i,...i->...", np.asarray(phi) @ STAR.T, psi)


def inner(phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", phi, psi)


def norm(phi: np.ndarray) -> np.ndarray:
    return np.sqrt(inner(phi, phi))


def bivector(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x ^ y for frame-component vectors, as simple-basis components."""
    x = np.asarray(x)
    y = np.asarray(y)
    return x[..., _PA] * y[..., _PB] - x[..., _PB] * y[..., _PA]


def to_matrix(phi: np.ndarray) -> np.ndarray:
    """Antisymmetric 4x4 frame matrix F with F[a, b] = phi_ab."""
    phi = np.asarray(phi)
    out = np.zeros(phi.shape[:-1] + (4, 4))
    out[..., _PA, _PB] = phi
    out[..., _PB, _PA] = -phi
    return out


def from_matrix(mat: np.ndarray) -> np.ndarray:
    return np.asarray(mat)[..., _PA, _PB]


def lambda_basis(f: Frame | None = None) -> np.ndarray:
    """(alpha_1+, alpha_2+, alpha_3+, alpha_1-, alpha_2-, alpha_3-) as rows.

    Components are relative to the simple basis of ``f``, so the array does
    not depend on the frame; use :func:`coordinate_form` for chart components.
    """
    return LAMBDA_BASIS.copy()


def coordinate_form(phi: np.ndarray, f: Frame) -> np.ndarray:
    """Chart components F_ij of a 2-form given in the frame's simple basis."""
    mat = to_matrix(phi)
    return np.swapaxes(f.coframe, -1, -2) @ mat @ f.coframe
