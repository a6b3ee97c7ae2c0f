"""Second-order forward-mode automatic differentiation.

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to ``n`` seed variables.  It is a multivariate hyper-dual number: the
``eps_i`` parts are the gradient and the ``eps_i eps_j`` parts the Hessian.
All three parts may carry a leading batch shape, so one evaluation of an
expression differentiates it at many points at once.

The module-level functions (:func:`sin`, :func:`log`, ...) accept jets, plain
floats and numpy arrays alike, and raise :class:`EvaluationError` instead of
returning NaN outside the function's domain.
"""

from __future__ import annotations

import numpy as np


class EvaluationError(ArithmeticError):
    """An expression was evaluated outside the domain of one of its operations."""


class Jet:
    """Value, gradient and Hessian of a scalar function of ``n`` variables.

    Shapes: ``val`` is ``batch``, ``grad`` is ``batch + (n,)`` and ``hess`` is
    ``batch + (n, n)``.
    """

    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 1000

    def __init__(self, val, grad, hess):
        self.val = val
        self.grad = grad
        self.hess = hess

    @classmethod
    def variables(cls, point) -> list["Jet"]:
        """Seed one jet per coordinate of ``point`` (shape ``batch + (n,)``)."""
        point = np.asarray(point, dtype=float)
        n = point.shape[-1]
        batch = point.shape[:-1]
        out = []
        for k in range(n):
            grad = np.zeros(batch + (n,))
            grad[..., k] = 1.0
            out.append(cls(point[..., k].copy(), grad, np.zeros(batch + (n, n))))
        return out

    @property
    def nvars(self) -> int:
        return self.grad.shape[-1]

    def _const(self, c) -> "Jet":
        c = np.asarray(c, dtype=float)
        shape = np.broadcast_shapes(np.shape(self.val), c.shape)
        n = self.nvars
        return Jet(np.broadcast_to(c, shape).astype(float), np.zeros(shape + (n,)), np.zeros(shape + (n, n)))

    def _chain(self, f0, f1, f2) -> "Jet":
        """Compose with a scalar function given its value and first two derivatives."""
        f1 = np.asarray(f1)
        f2 = np.asarray(f2)
        g = self.grad
        hess = f1[..., None, None] * self.hess + f2[..., None, None] * (g[..., :, None] * g[..., None, :])
        return Jet(f0, f1[..., None] * g, hess)

    # arithmetic -----------------------------------------------------------

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)
        return Jet(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val - other.val, self.grad - other.grad, self.hess - other.hess)
        return Jet(self.val - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet(other - self.val, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            va = np.asarray(a.val)[..., None]
            vb = np.asarray(b.val)[..., None]
            cross = a.grad[..., :, None] * b.grad[..., None, :]
            return Jet(
                a.val * b.val,
                va * b.grad + vb * a.grad,
                va[..., None] * b.hess + vb[..., None] * a.hess + cross + np.swapaxes(cross, -1, -2),
            )
        c = np.asarray(other)
        return Jet(self.val * c, self.grad * c[..., None], self.hess * c[..., None, None])

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        v = np.asarray(self.val)
        if np.any(v == 0.0):
            raise EvaluationError("division by zero")
        inv = 1.0 / v
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        c = np.asarray(other, dtype=float)
        if np.any(c == 0.0):
            raise EvaluationError("division by zero")
        return self * (1.0 / c)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, other):
        return power(self, other)

    def __rpow__(self, other):
        return power(other, self)

    def __repr__(self) -> str:
        return f"Jet(val={self.val!r}, grad={self.grad!r})"


def _is_integer(c) -> bool:
    c = np.asarray(c)
    return bool(np.all(np.isfinite(c)) and np.all(c == np.round(c)))


def power(base, expo):
    """``base ** expo`` for any mix of jets and numbers."""
    if isinstance(expo, Jet):
        if isinstance(base, Jet):
            return exp(expo * log(base))
        b = np.asarray(base, dtype=float)
        if np.any(b <= 0.0):
            raise EvaluationError("non-positive base raised to a variable power")
        return exp(expo * np.log(b))
    c = float(expo)
    if isinstance(base, Jet):
        v = np.asarray(base.val, dtype=float)
        if c == 0.0:
            return base._const(1.0)
        if c == 1.0:
            return base
        if c == 2.0:
            return base * base
        if _is_integer(c):
            if c < 0 and np.any(v == 0.0):
                raise EvaluationError("division by zero")
        elif np.any(v < 0.0) or (c < 2.0 and np.any(v == 0.0)):
            raise EvaluationError("fractional power outside its domain")
        return base._chain(v**c, c * v ** (c - 1.0), c * (c - 1.0) * v ** (c - 2.0))
    b = np.asarray(base, dtype=float)
    if not _is_integer(c) and np.any(b < 0.0):
        raise EvaluationError("fractional power of a negative number")
    if c < 0 and np.any(b == 0.0):
        raise EvaluationError("division by zero")
    out = b**c
    return float(out) if np.ndim(out) == 0 else out


def _unary(name, f0, f1, f2, check=None):
    def fn(x):
        v = x.val if isinstance(x, Jet) else np.asarray(x, dtype=float)
        if check is not None:
            check(v)
        if isinstance(x, Jet):
            return x._chain(f0(v), f1(v), f2(v))
        out = f0(v)
        return float(out) if np.ndim(out) == 0 else out

    fn.__name__ = name
    fn.__doc__ = f"{name} of a jet or number."
    return fn


def _check_log(v):
    if np.any(np.asarray(v) <= 0.0):
        raise EvaluationError("log of a non-positive number")


def _check_sqrt(v):
    if np.any(np.asarray(v) < 0.0):
        raise EvaluationError("sqrt of a negative number")


def _check_tan(v):
    if np.any(np.abs(np.cos(v)) < 1e-300):
        raise EvaluationError("tan at a pole")


def _sqrt_d1(v):
    if np.any(np.asarray(v) == 0.0):
        raise EvaluationError("sqrt is not differentiable at 0")
    return 0.5 / np.sqrt(v)


sin = _unary("sin", np.sin, np.cos, lambda v: -np.sin(v))
cos = _unary("cos", np.cos, lambda v: -np.sin(v), lambda v: -np.cos(v))
tan = _unary(
    "tan",
    np.tan,
    lambda v: 1.0 / np.cos(v) ** 2,
    lambda v: 2.0 * np.tan(v) / np.cos(v) ** 2,
    _check_tan,
)
sinh = _unary("sinh", np.sinh, np.cosh, np.sinh)
cosh = _unary("cosh", np.cosh, np.sinh, np.cosh)
tanh = _unary(
    "tanh",
    np.tanh,
    lambda v: 1.0 / np.cosh(v) ** 2,
    lambda v: -2.0 * np.tanh(v) / np.cosh(v) ** 2,
)
exp = _unary("exp", np.exp, np.exp, np.exp)
log = _unary("log", np.log, lambda v: 1.0 / v, lambda v: -1.0 / (v * v), _check_log)


def sqrt(x):
    """sqrt of a jet or number."""
    v = x.val if isinstance(x, Jet) else np.asarray(x, dtype=float)
    _check_sqrt(v)
    if isinstance(x, Jet):
        d1 = _sqrt_d1(v)
        return x._chain(np.sqrt(v), d1, -0.25 * np.asarray(v, dtype=float) ** -1.5)
    out = np.sqrt(v)
    return float(out) if np.ndim(out) == 0 else out


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sinh": sinh,
    "cosh": cosh,
    "tanh": tanh,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
}


def value(x):
    return x.val if isinstance(x, Jet) else x


def assert_finite(x) -> None:
    v = x.val if isinstance(x, Jet) else x
    if not np.all(np.isfinite(v)):
        raise EvaluationError("non-finite value")


__all__ = ["Jet", "EvaluationError", "FUNCTIONS", "power"]
