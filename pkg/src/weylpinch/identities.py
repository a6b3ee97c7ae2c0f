"""Algebraic identities on trace-free eigenvalue triples.

Every function accepts scalar triples (floats, ints or Fractions, which stay
exact) and batched triples whose entries are numpy arrays of a common shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .spectral import LambdaTriple, _triple

TWO_THIRDS = Fraction(2, 3)


class IdentityError(ValueError):
    pass


@dataclass(frozen=True)
class PsiInputs:
    """Arguments of the quadratic form Psi = A|a|^2 + B|c|^2 + 2C<a, c>.

    Construction enforces |a|^2, |c|^2 >= 0 and the Cauchy-Schwarz bound
    <a, c>^2 <= |a|^2 |c|^2 (up to a relative 1e-12 for floats).
    """

    triple: LambdaTriple
    a_norm_sq: object
    c_norm_sq: object
    ac_inner: object
    k: object = TWO_THIRDS

    def __post_init__(self):
        if not isinstance(self.triple, LambdaTriple):
            object.__setattr__(self, "triple", _triple(self.triple))
        a2, c2, ac = self.a_norm_sq, self.c_norm_sq, self.ac_inner
        if np.any(np.asarray(a2, dtype=float) < 0) or np.any(np.asarray(c2, dtype=float) < 0):
            raise IdentityError("|a|^2 and |c|^2 must be non-negative")
        if all(isinstance(v, (int, Fraction)) for v in (a2, c2, ac)):
            ok = ac * ac <= a2 * c2
        else:
            lhs = np.asarray(ac, dtype=float) ** 2
            rhs = np.asarray(a2, dtype=float) * np.asarray(c2, dtype=float)
            ok = bool(np.all(lhs <= rhs * (1 + 1e-12) + 1e-300))
        if not ok:
            raise IdentityError("Cauchy-Schwarz violated: <a,c>^2 > |a|^2 |c|^2")


class PsiCoefficients(NamedTuple):
    A: object
    B: object
    C: object


def psi_coefficients(t, k=TWO_THIRDS, check: bool = True) -> PsiCoefficients:
    """A = 2 l2 (l3 - l2) + k (l2 - l3)^2, B = 2 l2 (l1 - l2) + k (l2 - l1)^2,
    C = k (l2 - l1)(l2 - l3).

    For k = 2/3 the factored forms A = (2/3)(l3 - l2)(2 l2 + l3),
    B = -(2/3)(l2 - l1)(2 l2 + l1), C = (2/3)(l2 - l1)(l2 - l3) are compared
    with these (exactly for rationals, to 1e-12 relative for floats).
    """
    t = _triple(t)
    l1, l2, l3 = t.as_tuple()
    if isinstance(k, float) and abs(k - 2.0 / 3.0) < 1e-15 and isinstance(l1, Fraction):
        k = TWO_THIRDS
    A = 2 * l2 * (l3 - l2) + k * (l2 - l3) ** 2
    B = 2 * l2 * (l1 - l2) + k * (l2 - l1) ** 2
    C = k * (l2 - l1) * (l2 - l3)
    if check and _is_two_thirds(k):
        kk = TWO_THIRDS if isinstance(l1, Fraction) else 2.0 / 3.0
        fa = kk * (l3 - l2) * (2 * l2 + l3)
        fb = -kk * (l2 - l1) * (2 * l2 + l1)
        fc = kk * (l2 - l1) * (l2 - l3)
        scale = _scale(t) ** 2
        for name, x, y in (("A", A, fa), ("B", B, fb), ("C", C, fc)):
            if isinstance(l1, Fraction):
                if x != y:
                    raise IdentityError(f"factored form of {name} disagrees")
            elif np.any(np.abs(np.asarray(x) - np.asarray(y)) > 1e-12 * np.maximum(scale, 1e-300) + 1e-300):
                raise IdentityError(f"factored form of {name} disagrees")
    return PsiCoefficients(A, B, C)


def _is_two_thirds(k) -> bool:
    return k == TWO_THIRDS or (isinstance(k, float) and abs(k - 2.0 / 3.0) < 1e-15)


def _scale(t: LambdaTriple):
    return np.maximum(np.maximum(np.abs(np.asarray(t.l1, dtype=float)), np.abs(np.asarray(t.l3, dtype=float))), 0.0)


def psi_value(p: PsiInputs):
    A, B, C = psi_coefficients(p.triple, p.k)
    return A * p.a_norm_sq + B * p.c_norm_sq + 2 * C * p.ac_inner


def ab_minus_c2(t):
    """AB - C^2 at k = 2/3; identically zero on trace-free triples."""
    A, B, C = psi_coefficients(t, TWO_THIRDS if isinstance(_triple(t).l1, Fraction) else 2.0 / 3.0)
    return A * B - C * C


def ab_minus_c2_factored(t):
    """The two factored forms of AB - C^2 at k = 2/3.

    -(4/9)(l3 - l2)(l2 - l1)[(2 l2 + l3)(2 l2 + l1) + (l2 - l1)(l3 - l2)] and
    -(4/3) l2 (l3 - l2)(l2 - l1)(l1 + l2 + l3).
    """
    t = _triple(t)
    l1, l2, l3 = t.as_tuple()
    exact = isinstance(l1, Fraction)
    c49 = Fraction(4, 9) if exact else 4.0 / 9.0
    c43 = Fraction(4, 3) if exact else 4.0 / 3.0
    first = -c49 * (l3 - l2) * (l2 - l1) * ((2 * l2 + l3) * (2 * l2 + l1) + (l2 - l1) * (l3 - l2))
    second = -c43 * l2 * (l3 - l2) * (l2 - l1) * (l1 + l2 + l3)
    return first, second


class SignLemma(NamedTuple):
    value: object
    is_nonpositive: bool
    precondition_ok: bool
    equality_flags: tuple = ()
    chain_bound: object = None


def _exact_s(t: LambdaTriple, s):
    return Fraction(s) if isinstance(t.l1, Fraction) and isinstance(s, int) else s


def _sign_value(t: LambdaTriple, s):
    l1, l2, l3 = t.as_tuple()
    return 2 * l2 * l2 + 4 * l1 * l3 - l2 * s / 2


def sign_lemma_nonpositive_s(t, s, tol: float = 1e-12) -> SignLemma:
    """2 l2^2 + 4 l1 l3 - l2 s/2 under l1 + l3 >= 0 and s <= 0.

    ``equality_flags`` = (2 l1 + l3 == 0, l1 + l3 == 0) within ``tol`` * scale.
    Precondition violations are reported, not raised.
    """
    t = _triple(t)
    l1, _, l3 = t.as_tuple()
    value = _sign_value(t, s)
    scale = max(1.0, float(np.max(_scale(t))), abs(float(np.max(np.abs(s)))))
    pre = bool(np.all(np.asarray(l1 + l3, dtype=float) >= -tol * scale) and np.all(np.asarray(s, dtype=float) <= 0))
    flags = (
        np.abs(np.asarray(2 * l1 + l3, dtype=float)) <= tol * scale,
        np.abs(np.asarray(l1 + l3, dtype=float)) <= tol * scale,
    )
    if np.ndim(flags[0]) == 0:
        flags = tuple(bool(f) for f in flags)
    nonpos = np.asarray(value, dtype=float) <= tol * scale
    return SignLemma(value, bool(nonpos) if np.ndim(nonpos) == 0 else nonpos, pre, flags)


def sign_lemma_nonnegative_s(t, s, tol: float = 1e-12) -> SignLemma:
    """2 l2^2 + 4 l1 l3 - l2 s/2 under l2 <= -s/12 and s >= 0, with the chain
    value <= -l2 (2 l2 + 4 l1 + s/2) <= -l2 (6 l2 + s/2) <= 0.

    ``chain_bound`` is -l2 (2 l2 + 4 l1 + s/2), which dominates ``value``.
    """
    t = _triple(t)
    l1, l2, _ = t.as_tuple()
    s = _exact_s(t, s)
    value = _sign_value(t, s)
    chain = -l2 * (2 * l2 + 4 * l1 + s / 2)
    scale = max(1.0, float(np.max(_scale(t))), abs(float(np.max(np.abs(s)))))
    sf = np.asarray(s, dtype=float)
    pre = bool(np.all(np.asarray(l2, dtype=float) <= -sf / 12.0 + tol * scale) and np.all(sf >= 0))
    nonpos = np.asarray(value, dtype=float) <= tol * scale
    return SignLemma(value, bool(nonpos) if np.ndim(nonpos) == 0 else nonpos, pre, (), chain)


def weitzenboeck_gap(spec, s):
    """36 det W+ - s |W+|^2 (the zeroth-order part of the Laplacian of |W+|^2)."""
    t = _triple(spec)
    return 36 * t.det() - s * t.norm_sq()


class ChainLink(NamedTuple):
    name: str
    lhs: float
    rhs: float
    holds: bool


class ChainReport(NamedTuple):
    links: list
    equality_lambda1_eq_lambda2: bool
    equality_lambda3_plus_2lambda1: bool
    precondition_ok: bool

    @property
    def holds(self) -> bool:
        return all(link.holds for link in self.links)


def eigenvalue_chain(t, s, tol: float = 1e-12) -> ChainReport:
    """(1/sqrt 6)|W| <= -l1 <= s/12, |W|^2 = 2(l1^2 - l2 l3) <= 6 l1^2 under -s/12 <= l1."""
    t = _triple(t)
    l1, l2, l3 = (float(v) for v in t.as_tuple())
    s = float(s)
    nsq = float(t.norm_sq())
    norm = math.sqrt(nsq)
    scale = max(1.0, abs(l1), abs(l3), abs(s))
    ident = 2.0 * (l1 * l1 - l2 * l3)
    links = [
        ChainLink("|W|/sqrt(6) <= -lambda1", norm / math.sqrt(6.0), -l1, norm / math.sqrt(6.0) <= -l1 + tol * scale),
        ChainLink("-lambda1 <= s/12", -l1, s / 12.0, -l1 <= s / 12.0 + tol * scale),
        ChainLink("|W|^2 = 2(lambda1^2 - lambda2 lambda3)", nsq, ident, abs(nsq - ident) <= tol * scale * scale),
        ChainLink("|W|^2 <= 6 lambda1^2", nsq, 6.0 * l1 * l1, nsq <= 6.0 * l1 * l1 + tol * scale * scale),
    ]
    return ChainReport(
        links,
        abs(l1 - l2) <= tol * scale,
        abs(l3 + 2.0 * l1) <= tol * scale,
        s > 0 and -s / 12.0 <= l1 + tol * scale,
    )


def norm_identity_residual(t):
    """|W|^2 - 2(l1^2 - l2 l3): exactly 0 for rational trace-free triples."""
    t = _triple(t)
    l1, l2, l3 = t.as_tuple()
    return t.norm_sq() - 2 * (l1 * l1 - l2 * l3)


def zero_spectrum_forced(t, tol: float = 0.0) -> bool:
    """l2 = 0 and l1 + l3 = 0, together with D l2 = 4 l1 l3 >= 0 (or a repeated
    eigenvalue), force the zero triple.  Returns True when the triple is consistent
    with that implication.

    The extra hypothesis matters: (-1, 0, 1) has l2 = 0 and l1 + l3 = 0 but is not zero.
    """
    t = _triple(t)
    l1, l2, l3 = t.as_tuple()
    scale = max(1.0, abs(float(l1)), abs(float(l3)))
    if abs(l2) > tol or abs(l1 + l3) > tol:
        return True
    repeated = abs(2 * l1 + l3) <= tol * scale or abs(l1 + 2 * l3) <= tol * scale
    if repeated or l1 * l3 >= -tol * scale * scale:
        return abs(l1) <= tol * scale and abs(l3) <= tol * scale
    return True


def zero_spectrum_without_laplacian_sign(t, tol: float = 0.0) -> bool:
    """Whether l2 = 0 and l1 + l3 = 0 alone already give the zero triple."""
    t = _triple(t)
    l1, l2, l3 = t.as_tuple()
    if abs(l2) <= tol and abs(l1 + l3) <= tol:
        return abs(l1) <= tol and abs(l3) <= tol
    return True


# Laplacian right-hand sides ----------------------------------------------------


def laplacian_rhs(t, s, a_sq, b_sq, c_sq) -> tuple:
    """Right-hand sides of the eigenvalue Laplacians along a harmonic W+:

    D l1 = 2 l1^2 + 4 l2 l3 - l1 s/2 + 2(l2 - l1)|c|^2 + 2(l3 - l1)|b|^2
    D l2 = 2 l2^2 + 4 l1 l3 - l2 s/2 + 2(l1 - l2)|c|^2 + 2(l3 - l2)|a|^2
    D l3 = 2 l3^2 + 4 l1 l2 - l3 s/2 + 2(l1 - l3)|b|^2 + 2(l2 - l3)|a|^2

    Pure algebra on given magnitudes; the 1-forms a, b, c themselves are not computed.
    """
    t = _triple(t)
    l1, l2, l3 = t.as_tuple()
    d1 = 2 * l1 * l1 + 4 * l2 * l3 - l1 * s / 2 + 2 * (l2 - l1) * c_sq + 2 * (l3 - l1) * b_sq
    d2 = 2 * l2 * l2 + 4 * l1 * l3 - l2 * s / 2 + 2 * (l1 - l2) * c_sq + 2 * (l3 - l2) * a_sq
    d3 = 2 * l3 * l3 + 4 * l1 * l2 - l3 * s / 2 + 2 * (l1 - l3) * b_sq + 2 * (l2 - l3) * a_sq
    return d1, d2, d3


def phi_laplacian(t, s, a_sq, b_sq, c_sq):
    """-Delta Phi for Phi = -l2 = l1 + l3, i.e. the l2 right-hand side."""
    return laplacian_rhs(t, s, a_sq, b_sq, c_sq)[1]


def phi_rearrangement_residual(t, s, a_sq, b_sq, c_sq):
    """Delta(l1 + l3) + Delta(l2) must vanish by the trace condition; returns that sum."""
    d1, d2, d3 = laplacian_rhs(t, s, a_sq, b_sq, c_sq)
    return d1 + d2 + d3
