"""Spectra of the W+/W- blocks and pointwise pinching predicates.

Eigenvalues are always sorted ascending, lambda1 <= lambda2 <= lambda3.
Boolean predicates are evaluated with an explicit slack ("margin"); a
predicate holds when its margin is >= -tol, where ``tol`` defaults to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .forms import LAMBDA_BASIS, OperatorBlocks

DEGENERACY_TOL = 1e-7
ZERO_SET_TOL = 1e-8
SYMMETRY_TOL = 1e-10
POLOMBO_LOWER = -8.0 * (1.0 - math.sqrt(3.0) / 2.0)
POLOMBO_UPPER = -2.0


class SpectrumError(ValueError):
    pass


# triples ---------------------------------------------------------------------


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


@dataclass(frozen=True)
class LambdaTriple:
    """Sorted trace-free eigenvalue triple.

    The constructor subtracts the mean and sorts; for float input lambda2 is
    then reset to -(lambda1 + lambda3) so the trace vanishes exactly.
    Ints and Fractions stay exact.  Arrays of equal shape give a batch of
    triples.
    """

    l1: object
    l2: object
    l3: object

    def __post_init__(self):
        a, b, c = self.l1, self.l2, self.l3
        if all(_is_exact(v) for v in (a, b, c)):
            a, b, c = (Fraction(v) for v in (a, b, c))
            mean = (a + b + c) / 3
            a, b, c = sorted((a - mean, b - mean, c - mean))
        else:
            arr = np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, c))), axis=-1)
            arr = np.sort(arr - arr.mean(axis=-1, keepdims=True), axis=-1)
            a, c = arr[..., 0], arr[..., 2]
            # an all-equal input can leave a same-signed rounding residue
            flat = (c <= 0) | (a >= 0)
            a, c = np.where(flat, 0.0, a), np.where(flat, 0.0, c)
            b = -(a + c)
            # a repeated eigenvalue can push b an ulp past its neighbour;
            # pin it to the neighbour and rebuild the lone value exactly
            hi, lo = b > c, b < a
            a = np.where(hi, -2.0 * c, a)
            c = np.where(lo, -2.0 * a, c)
            b = np.where(hi, c, np.where(lo, a, b))
            if np.ndim(a) == 0:
                a, b, c = float(a), float(b), float(c)
        object.__setattr__(self, "l1", a)
        object.__setattr__(self, "l2", b)
        object.__setattr__(self, "l3", c)

    def as_tuple(self) -> tuple:
        return (self.l1, self.l2, self.l3)

    def norm_sq(self):
        return self.l1 * self.l1 + self.l2 * self.l2 + self.l3 * self.l3

    def det(self):
        return self.l1 * self.l2 * self.l3

    def scaled(self, c) -> "LambdaTriple":
        return LambdaTriple(self.l1 * c, self.l2 * c, self.l3 * c)


def _triple(x) -> LambdaTriple:
    if isinstance(x, LambdaTriple):
        return x
    if isinstance(x, WeylSpectrum):
        return LambdaTriple(*x.lambda_plus)
    return LambdaTriple(*x)


# eigen-decomposition ---------------------------------------------------------


def _reference_vectors(vecs: np.ndarray, vals: np.ndarray, tol: float) -> np.ndarray:
    """Canonical eigenvectors for a single 3x3 problem: degenerate clusters are
    spanned by Gram-Schmidt of the fixed axes projected into the cluster, and
    each vector's largest-magnitude component is made positive."""
    out = vecs.copy()
    i = 0
    while i < 3:
        j = i
        while j + 1 < 3 and vals[j + 1] - vals[j] < tol:
            j += 1
        if j > i:
            basis = vecs[:, i : j + 1]
            proj = basis @ basis.T
            chosen: list[np.ndarray] = []
            for axis in np.eye(3):
                v = proj @ axis
                for u in chosen:
                    v = v - (u @ v) * u
                n = np.linalg.norm(v)
                if n > 1e-6:
                    chosen.append(v / n)
                if len(chosen) == j - i + 1:
                    break
            out[:, i : j + 1] = np.stack(chosen, axis=1)
        i = j + 1
    for k in range(3):
        v = out[:, k]
        if v[np.argmax(np.abs(v) - 1e-12 * np.arange(3))] < 0:
            out[:, k] = -v
    return out


def eigen3_sym(block, tol: float | None = None):
    """Eigenvalues (ascending) and unit eigenvectors (columns) of symmetric 3x3 matrices.

    Returns ``(values, vectors, degenerate)``; ``degenerate`` flags a gap
    below ``tol`` (default 1e-7 * max(1, |A|_F)).  Works on batches.
    """
    a = np.asarray(block, dtype=float)
    if a.shape[-2:] != (3, 3):
        raise SpectrumError(f"expected 3x3 blocks, got shape {a.shape}")
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))
    if np.any(np.abs(a - np.swapaxes(a, -1, -2)).max(axis=(-2, -1)) > SYMMETRY_TOL * scale):
        raise SpectrumError("block is not symmetric")
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    vals, vecs = np.linalg.eigh(a)
    gap_tol = DEGENERACY_TOL * scale if tol is None else np.broadcast_to(tol, scale.shape)
    degenerate = np.min(np.diff(vals, axis=-1), axis=-1) < gap_tol
    flat_vals = vals.reshape(-1, 3)
    flat_vecs = vecs.reshape(-1, 3, 3)
    flat_tol = np.broadcast_to(gap_tol, scale.shape).reshape(-1)
    fixed = np.stack(
        [_reference_vectors(flat_vecs[k], flat_vals[k], flat_tol[k]) for k in range(flat_vals.shape[0])]
    ).reshape(vecs.shape)
    return vals, fixed, degenerate


def cubic_eigenvalues(block) -> np.ndarray:
    """Roots of the characteristic polynomial by the trigonometric cubic formula."""
    a = np.asarray(block, dtype=float)
    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    b = a - q[..., None, None] * np.eye(3)
    p = np.sqrt(np.sum(b * b, axis=(-2, -1)) / 6.0)
    safe = np.where(p > 0, p, 1.0)
    r = np.linalg.det(b / safe[..., None, None]) / 2.0
    phi = np.arccos(np.clip(r, -1.0, 1.0)) / 3.0
    e3 = q + 2 * p * np.cos(phi)
    e1 = q + 2 * p * np.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3 * q - e1 - e3
    return np.stack([e1, e2, e3], axis=-1)


# spectra ---------------------------------------------------------------------


@dataclass(frozen=True)
class WeylSpectrum:
    lambda_plus: tuple
    lambda_minus: tuple
    norm_sq_plus: float
    norm_sq_minus: float
    det_plus: float
    det_minus: float
    eigenforms_plus: np.ndarray  # rows: unit 2-forms in the simple basis, matching lambda_plus
    eigenforms_minus: np.ndarray
    degenerate_plus: bool
    degenerate_minus: bool
    in_zero_set: bool
    scalar: float = field(default=float("nan"))

    @property
    def triple_plus(self) -> LambdaTriple:
        return LambdaTriple(*self.lambda_plus)

    @property
    def triple_minus(self) -> LambdaTriple:
        return LambdaTriple(*self.lambda_minus)


def _one_side(block: np.ndarray, rows: np.ndarray):
    vals, vecs, degenerate = eigen3_sym(block)
    trip = LambdaTriple(*vals)
    forms = vecs.T @ rows  # eigenvector coefficients on the alpha basis -> simple basis
    return trip, forms, bool(degenerate)


def spectrum(blocks: OperatorBlocks) -> WeylSpectrum:
    """Spectra of W+ and W- at a single point."""
    if np.ndim(blocks.scalar_term) != 0:
        raise SpectrumError("spectrum() takes the blocks of a single point; use spectra() for batches")
    tp, fp, dp = _one_side(blocks.wplus_block, LAMBDA_BASIS[:3])
    tm, fm, dm = _one_side(blocks.wminus_block, LAMBDA_BASIS[3:])
    norm_r = float(np.linalg.norm(blocks.full))
    return WeylSpectrum(
        lambda_plus=tp.as_tuple(),
        lambda_minus=tm.as_tuple(),
        norm_sq_plus=float(tp.norm_sq()),
        norm_sq_minus=float(tm.norm_sq()),
        det_plus=float(tp.det()),
        det_minus=float(tm.det()),
        eigenforms_plus=fp,
        eigenforms_minus=fm,
        degenerate_plus=dp,
        degenerate_minus=dm,
        in_zero_set=bool(math.sqrt(tp.norm_sq()) < ZERO_SET_TOL * max(1.0, norm_r)),
        scalar=float(12.0 * blocks.scalar_term),
    )


def spectra(blocks: OperatorBlocks) -> list[WeylSpectrum]:
    n = int(np.prod(np.shape(blocks.scalar_term)))
    flat = OperatorBlocks(*(getattr(blocks, f).reshape((n,) + getattr(blocks, f).shape[np.ndim(blocks.scalar_term):])
                            for f in ("simple", "full", "wplus_block", "wminus_block", "ric0_block", "scalar_term")))
    return [spectrum(flat[k]) for k in range(n)]


def block_norms(blocks: OperatorBlocks) -> dict[str, np.ndarray]:
    """Batch invariants without eigen-decomposition: |W+|^2, |W-|^2, s and |ric0|^2.

    ``ric0_sq`` is sum_ab (ric0)_ab^2 in an orthonormal frame, which is four
    times the squared Frobenius norm of the off-diagonal block.
    """
    wp = np.sum(blocks.wplus_block**2, axis=(-2, -1))
    wm = np.sum(blocks.wminus_block**2, axis=(-2, -1))
    r0 = 4.0 * np.sum(blocks.ric0_block**2, axis=(-2, -1))
    return {"wplus_sq": wp, "wminus_sq": wm, "scalar": 12.0 * blocks.scalar_term, "ric0_sq": r0}


# pinching predicates ---------------------------------------------------------


@dataclass(frozen=True)
class PinchReport:
    det_nonneg: bool
    sum13_nonneg: bool
    polombo_band: bool
    gursky_band: bool
    lambda2_sign: int
    margins: dict


def pinch_predicates(spec, s: float, tol: float = 0.0) -> PinchReport:
    """det W+ >= 0, lambda1 + lambda3 >= 0, the band
    -8(1 - sqrt(3)/2) lambda1 <= lambda3 <= -2 lambda1 and s/12 <= lambda1 + lambda3.

    ``spec`` may be a :class:`WeylSpectrum` (its W+ side is used), a
    :class:`LambdaTriple` or a plain 3-sequence.
    """
    t = _triple(spec)
    l1, l2, l3 = (float(v) for v in t.as_tuple())
    margins = {
        "det": l1 * l2 * l3,
        "sum13": l1 + l3,
        "polombo_lower": l3 - POLOMBO_LOWER * l1,
        "polombo_upper": POLOMBO_UPPER * l1 - l3,
        "gursky": (l1 + l3) - s / 12.0,
    }
    ok = {k: v >= -tol for k, v in margins.items()}
    return PinchReport(
        det_nonneg=ok["det"],
        sum13_nonneg=ok["sum13"],
        polombo_band=ok["polombo_lower"] and ok["polombo_upper"],
        gursky_band=ok["gursky"],
        lambda2_sign=int(np.sign(l2)) if abs(l2) > tol else 0,
        margins=margins,
    )


class Check(NamedTuple):
    name: str
    lhs: float
    rhs: float
    slack: float
    equality: bool | None = None


def spectral_inequalities(spec, tol: float = 1e-12) -> list[Check]:
    """Trace-free bounds on a spectrum: |W|/sqrt(6) <= lambda3, |W|/sqrt(6) <= -lambda1,
    |W|^2 = 2(lambda1^2 - lambda2 lambda3) and |W|^2 <= 6 lambda1^2.

    For inequalities ``slack = rhs - lhs``; for the identity it is ``-|lhs - rhs|``.
    The last entry's ``equality`` flag reports lambda1 = lambda2 and lambda3 + 2 lambda1 = 0.
    """
    t = _triple(spec)
    l1, l2, l3 = t.as_tuple()
    nsq = t.norm_sq()
    norm = math.sqrt(float(nsq))
    scale = max(1.0, float(abs(l1)), float(abs(l3)))
    ident = 2 * (l1 * l1 - l2 * l3)
    eq = abs(float(l1 - l2)) <= tol * scale and abs(float(l3 + 2 * l1)) <= tol * scale
    six = 6 * l1 * l1
    return [
        Check("|W|/sqrt(6) <= lambda3", norm / math.sqrt(6.0), float(l3), float(l3) - norm / math.sqrt(6.0)),
        Check("|W|/sqrt(6) <= -lambda1", norm / math.sqrt(6.0), float(-l1), float(-l1) - norm / math.sqrt(6.0)),
        Check("|W|^2 = 2(lambda1^2 - lambda2 lambda3)", nsq, ident, -abs(nsq - ident)),
        Check("|W|^2 <= 6 lambda1^2", nsq, six, six - nsq, eq),
    ]
