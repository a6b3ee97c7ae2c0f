"""Chart metrics: the built-in model catalog, the metric-spec file format, and
evaluation of g together with its first and second coordinate derivatives.

Every function here accepts a single point (shape ``(4,)``) or a batch of
points (shape ``(..., 4)``); results carry the same leading batch shape.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expr as ex
from . import hyperdual as hd
from .hyperdual import Jet

EPS = np.finfo(float).eps
FD_STEP_FIRST = EPS ** (1.0 / 3.0)
FD_STEP_SECOND = EPS ** (1.0 / 6.0)
# fourth-order central first-derivative stencil
_D1_4TH = ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0))
SINGULAR_TOL = 1e-12

# upper-triangle index pairs, in the order components are stored
UPPER = tuple((i, j) for i in range(4) for j in range(i, 4))


class MetricError(ValueError):
    """Invalid chart metric or evaluation point."""


class DomainError(MetricError):
    """Point outside the chart domain or on a declared coordinate-singular locus."""


class ModelError(ValueError):
    """Unknown built-in model or invalid model parameters."""


@dataclass(frozen=True)
class Interval:
    """Open interval ``(lo, hi)``, or a periodic axis when ``period`` is set."""

    lo: float = -math.inf
    hi: float = math.inf
    period: float | None = None

    def contains(self, x):
        if self.period is not None:
            return np.isfinite(x)
        return (x > self.lo) & (x < self.hi)

    def describe(self) -> str:
        if self.period is not None:
            return f"periodic {self.period!r}"
        return f"in ({self.lo!r}, {self.hi!r})"


@dataclass(frozen=True)
class ChartMetric:
    """A 4-dimensional coordinate chart carrying a Riemannian metric.

    ``evaluator`` maps a list of four coordinate values (floats, arrays or
    jets) to the ten upper-triangle components in :data:`UPPER` order; the
    lower triangle is filled by reference, so ``g_ij == g_ji`` exactly.
    ``singular`` lists excluded coordinate hyperplanes ``(axis, value)``;
    ``region`` is an optional extra open-set predicate on points.
    """

    name: str
    coords: tuple[str, str, str, str]
    evaluator: Callable[[list], list]
    domain: tuple[Interval, Interval, Interval, Interval]
    components: tuple[ex.Expr, ...] | None = None
    singular: tuple[tuple[int, float], ...] = ()
    region: Callable[[np.ndarray], np.ndarray] | None = None
    region_text: str = ""
    derivative_backend: str = "hyperdual"
    params: tuple[float, ...] = ()
    kahler: bool = False
    einstein: bool = False
    complex_structure: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    sampling_box: tuple[tuple[float, float], ...] | None = None
    reference: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return 4

    def with_backend(self, backend: str) -> "ChartMetric":
        if backend not in ("hyperdual", "finite_difference"):
            raise MetricError(f"unknown derivative backend {backend!r}")
        return _replace(self, derivative_backend=backend)

    def check_points(self, points) -> np.ndarray:
        """Validate points against the domain and singular loci; returns a float array."""
        x = np.asarray(points, dtype=float)
        if x.shape[-1:] != (4,):
            raise MetricError(f"expected points with a trailing axis of length 4, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite coordinate")
        for axis, v in self.singular:
            if np.any(np.abs(x[..., axis] - v) <= SINGULAR_TOL * max(1.0, abs(v))):
                raise DomainError(f"point on a coordinate-singular locus ({self.coords[axis]} = {v!r})")
        for axis, iv in enumerate(self.domain):
            if not np.all(iv.contains(x[..., axis])):
                raise DomainError(f"point outside the chart domain: {self.coords[axis]} {iv.describe()}")
        if self.region is not None and not np.all(self.region(x)):
            raise DomainError(f"point outside the chart domain: {self.region_text}")
        return x

    def box(self) -> tuple[tuple[float, float], ...]:
        """Coordinate box used for sampling and grids (inside the domain, away from singular loci)."""
        if self.sampling_box is not None:
            return self.sampling_box
        out = []
        for iv in self.domain:
            if iv.period is not None:
                out.append((0.0, iv.period))
            else:
                lo = iv.lo if math.isfinite(iv.lo) else -1.0
                hi = iv.hi if math.isfinite(iv.hi) else 1.0
                pad = 0.05 * (hi - lo)
                out.append((lo + pad, hi - pad))
        return tuple(out)

    def sample_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        box = np.array(self.box())
        pts = box[:, 0] + rng.random((n, 4)) * (box[:, 1] - box[:, 0])
        if self.region is not None:
            keep = self.region(pts)
            while not np.all(keep):
                fresh = box[:, 0] + rng.random((n, 4)) * (box[:, 1] - box[:, 0])
                pts = np.where(keep[:, None], pts, fresh)
                keep = self.region(pts)
        return pts


def _replace(metric: ChartMetric, **changes) -> ChartMetric:
    from dataclasses import replace

    return replace(metric, **changes)


@dataclass(frozen=True)
class MetricValue:
    """Metric, inverse and coordinate derivatives at one point (or a batch).

    ``dg[..., i, j, k] = d_k g_ij`` and ``d2g[..., i, j, k, l] = d_k d_l g_ij``.
    """

    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    sqrt_det_g: np.ndarray

    def __getitem__(self, idx) -> "MetricValue":
        return MetricValue(*(getattr(self, f)[idx] for f in ("point", "g", "g_inv", "dg", "d2g", "sqrt_det_g")))


# evaluation ------------------------------------------------------------------


def _assemble(comps, batch) -> np.ndarray:
    g = np.empty(batch + (4, 4))
    for (i, j), c in zip(UPPER, comps):
        v = np.broadcast_to(np.asarray(c, dtype=float), batch)
        g[..., i, j] = v
        g[..., j, i] = v
    return g


def metric_values(metric: ChartMetric, points) -> np.ndarray:
    """g at the given points (values only, no derivatives, no domain check)."""
    x = np.asarray(points, dtype=float)
    comps = metric.evaluator([x[..., k] for k in range(4)])
    return _assemble(comps, x.shape[:-1])


def _jet_derivatives(metric: ChartMetric, x: np.ndarray):
    batch = x.shape[:-1]
    variables = Jet.variables(x)
    comps = metric.evaluator(variables)
    g = np.empty(batch + (4, 4))
    dg = np.zeros(batch + (4, 4, 4))
    d2g = np.zeros(batch + (4, 4, 4, 4))
    for (i, j), c in zip(UPPER, comps):
        if isinstance(c, Jet):
            val, grad, hess = c.val, c.grad, c.hess
        else:
            val, grad, hess = c, 0.0, 0.0
        for a, b in {(i, j), (j, i)}:
            g[..., a, b] = val
            dg[..., a, b, :] = grad
            d2g[..., a, b, :, :] = hess
    return g, dg, d2g


def _fd_derivatives(metric: ChartMetric, x: np.ndarray):
    batch = x.shape[:-1]
    g0 = metric_values(metric, x)
    dg = np.empty(batch + (4, 4, 4))
    d2g = np.empty(batch + (4, 4, 4, 4))
    scale = np.maximum(1.0, np.abs(x))
    # exactly representable steps
    h1 = (x + FD_STEP_FIRST * scale) - x
    h2 = (x + FD_STEP_SECOND * scale) - x

    def at(offsets):
        d = np.zeros(batch + (4,))
        for axis, (mult, h) in offsets.items():
            d[..., axis] = mult * h[..., axis]
        return metric_values(metric, x + d)

    for k in range(4):
        hk = h1[..., k, None, None]
        dg[..., k] = (at({k: (1, h1)}) - at({k: (-1, h1)})) / (2.0 * hk)
        hk = h2[..., k, None, None]
        acc = -30.0 * g0
        for a, c in ((1, 16.0), (2, -1.0)):
            acc = acc + c * (at({k: (a, h2)}) + at({k: (-a, h2)}))
        d2g[..., k, k] = acc / (12.0 * hk * hk)
    for k in range(4):
        for m in range(k + 1, 4):
            acc = 0.0
            for a, ca in _D1_4TH:
                for b, cb in _D1_4TH:
                    acc = acc + ca * cb * at({k: (a, h2), m: (b, h2)})
            val = acc / (h2[..., k, None, None] * h2[..., m, None, None])
            d2g[..., k, m] = val
            d2g[..., m, k] = val
    return g0, dg, d2g


def metric_at(metric: ChartMetric, point, backend: str | None = None) -> MetricValue:
    """Evaluate g, g^-1, dg, d2g and sqrt(det g) at a point or batch of points.

    Raises :class:`DomainError` for points outside the chart or on a declared
    coordinate-singular locus, and :class:`MetricError` when g is not
    positive definite there.
    """
    x = metric.check_points(point)
    backend = backend or metric.derivative_backend
    try:
        if backend == "hyperdual":
            g, dg, d2g = _jet_derivatives(metric, x)
        elif backend == "finite_difference":
            g, dg, d2g = _fd_derivatives(metric, x)
        else:
            raise MetricError(f"unknown derivative backend {backend!r}")
    except hd.EvaluationError as exc:
        raise MetricError(f"metric evaluation failed: {exc}") from exc
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(dg)) and np.all(np.isfinite(d2g))):
        raise MetricError("metric evaluation produced non-finite values")
    try:
        chol = np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise MetricError("metric is not positive definite at the point") from None
    sqrt_det = np.prod(np.diagonal(chol, axis1=-2, axis2=-1), axis=-1)
    eye = np.broadcast_to(np.eye(4), g.shape)
    linv = np.linalg.solve(chol, eye)
    g_inv = np.swapaxes(linv, -1, -2) @ linv
    g_inv = 0.5 * (g_inv + np.swapaxes(g_inv, -1, -2))
    return MetricValue(x, g, g_inv, dg, d2g, sqrt_det)


# built-in models -------------------------------------------------------------

TWO_PI = 2.0 * math.pi


def _diag(d0, d1, d2, d3):
    return [d0, 0.0, 0.0, 0.0, d1, 0.0, 0.0, d2, 0.0, d3]


def _flat_t4():
    return ChartMetric(
        name="flat_t4",
        coords=("x1", "x2", "x3", "x4"),
        evaluator=lambda x: _diag(1.0, 1.0, 1.0, 1.0),
        domain=(Interval(period=TWO_PI),) * 4,
        kahler=True,
        einstein=True,
        complex_structure=_standard_j,
        reference=dict(scalar=0.0, volume=TWO_PI**4, tau=0, chi=0, kahler=True, einstein=True),
    )


def _round_s4(r: float):
    r2 = r * r

    def ev(x):
        # join coordinates S^4 = S^1 * S^2, alpha the join parameter
        alpha, _, theta, _ = x
        ca = hd.cos(alpha)
        sa = hd.sin(alpha)
        st = hd.sin(theta)
        return _diag(r2, r2 * ca * ca, r2 * sa * sa, r2 * sa * sa * st * st)

    return ChartMetric(
        name="round_s4",
        coords=("alpha", "phi", "theta", "psi"),
        evaluator=ev,
        domain=(Interval(0.0, math.pi / 2), Interval(period=TWO_PI), Interval(0.0, math.pi), Interval(period=TWO_PI)),
        singular=((0, 0.0), (0, math.pi / 2), (2, 0.0), (2, math.pi)),
        params=(r,),
        einstein=True,
        sampling_box=((0.15, math.pi / 2 - 0.15), (0.0, TWO_PI), (0.15, math.pi - 0.15), (0.0, TWO_PI)),
        reference=dict(scalar=12.0 / r2, volume=8.0 * math.pi**2 / 3.0 * r2 * r2, tau=0, chi=2, kahler=False, einstein=True),
    )


def _hermitian_ball(scale: float, curvature_sign: float, name: str):
    """Fubini-Study (sign +1) or complex-hyperbolic (sign -1) metric in an affine chart of C^2."""
    c2 = scale * scale
    k = curvature_sign

    def ev(x):
        u1, v1, u2, v2 = x
        rho = 1.0 + k * (u1 * u1 + v1 * v1 + u2 * u2 + v2 * v2)
        inv2 = c2 / (rho * rho)
        # h_ac = (rho delta_ac - k conj(z_a) z_c) / rho^2
        re11 = (rho - k * (u1 * u1 + v1 * v1)) * inv2
        re22 = (rho - k * (u2 * u2 + v2 * v2)) * inv2
        re12 = (-k * (u1 * u2 + v1 * v2)) * inv2
        im12 = (-k * (u1 * v2 - v1 * u2)) * inv2
        # coordinate order (u1, v1, u2, v2); g(du_a, dv_c) = Im h_ac
        return [re11, 0.0, re12, im12, re11, -im12, re12, re22, 0.0, re22]

    return ev


def _fubini_study(scale: float):
    s = 24.0 / (scale * scale)
    return ChartMetric(
        name="fubini_study_cp2",
        coords=("u1", "v1", "u2", "v2"),
        evaluator=_hermitian_ball(scale, 1.0, "fubini_study_cp2"),
        domain=(Interval(),) * 4,
        params=(scale,),
        kahler=True,
        einstein=True,
        complex_structure=_standard_j,
        sampling_box=((-1.5, 1.5),) * 4,
        reference=dict(scalar=s, volume=math.pi**2 / 2.0 * scale**4, tau=1, chi=3, kahler=True, einstein=True),
    )


def _ball(x):
    return np.sum(np.asarray(x) ** 2, axis=-1) < 1.0


def _complex_hyperbolic(scale: float):
    return ChartMetric(
        name="complex_hyperbolic_ch2",
        coords=("u1", "v1", "u2", "v2"),
        evaluator=_hermitian_ball(scale, -1.0, "complex_hyperbolic_ch2"),
        domain=(Interval(-1.0, 1.0),) * 4,
        region=_ball,
        region_text="u1^2 + v1^2 + u2^2 + v2^2 < 1",
        params=(scale,),
        kahler=True,
        einstein=True,
        complex_structure=_standard_j,
        sampling_box=((-0.35, 0.35),) * 4,
        reference=dict(scalar=-24.0 / (scale * scale), kahler=True, einstein=True, compact=False),
    )


def _product_s2xs2(r1: float, r2: float):
    a, b = r1 * r1, r2 * r2

    def ev(x):
        t1, _, t2, _ = x
        s1 = hd.sin(t1)
        s2 = hd.sin(t2)
        return _diag(a, a * s1 * s1, b, b * s2 * s2)

    def j(points):
        p = np.asarray(points, dtype=float)
        J = np.zeros(p.shape[:-1] + (4, 4))
        for blk, t in ((0, p[..., 0]), (2, p[..., 2])):
            st = np.sin(t)
            # J d_theta = d_phi / sin(theta), J d_phi = -sin(theta) d_theta
            J[..., blk + 1, blk] = 1.0 / st
            J[..., blk, blk + 1] = -st
        return J

    einstein = r1 == r2
    return ChartMetric(
        name="product_s2xs2",
        coords=("theta1", "phi1", "theta2", "phi2"),
        evaluator=ev,
        domain=(Interval(0.0, math.pi), Interval(period=TWO_PI)) * 2,
        singular=((0, 0.0), (0, math.pi), (2, 0.0), (2, math.pi)),
        params=(r1, r2),
        kahler=True,
        einstein=einstein,
        complex_structure=j,
        sampling_box=((0.15, math.pi - 0.15), (0.0, TWO_PI)) * 2,
        reference=dict(
            scalar=2.0 / a + 2.0 / b,
            volume=16.0 * math.pi**2 * a * b,
            tau=0,
            chi=4,
            kahler=True,
            einstein=einstein,
        ),
    )


def _standard_j(points):
    p = np.asarray(points, dtype=float)
    J = np.zeros(p.shape[:-1] + (4, 4))
    # J d_u = d_v, J d_v = -d_u on each complex coordinate
    for blk in (0, 2):
        J[..., blk + 1, blk] = 1.0
        J[..., blk, blk + 1] = -1.0
    return J


MODELS = {
    "flat_t4": ((), _flat_t4),
    "round_s4": ((1.0,), _round_s4),
    "fubini_study_cp2": ((1.0,), _fubini_study),
    "product_s2xs2": ((1.0, 1.0), _product_s2xs2),
    "complex_hyperbolic_ch2": ((1.0,), _complex_hyperbolic),
}


def builtin_model(name: str, params: Sequence[float] = ()) -> ChartMetric:
    """Instantiate a catalog model; missing parameters take their defaults."""
    if name not in MODELS:
        raise ModelError(f"unknown model {name!r}; known models: {', '.join(sorted(MODELS))}")
    defaults, factory = MODELS[name]
    params = tuple(float(p) for p in params)
    if len(params) > len(defaults):
        raise ModelError(f"{name} takes at most {len(defaults)} parameters, got {len(params)}")
    full = params + defaults[len(params):]
    if any(not (p > 0.0 and math.isfinite(p)) for p in full):
        raise ModelError(f"{name}: radius/scale parameters must be positive, got {full}")
    return factory(*full)


# metric spec files -----------------------------------------------------------

_COMPONENT_RE = re.compile(r"^\s*g\s*\[\s*(\d+)\s*\]\s*\[\s*(\d+)\s*\]\s*=")
_HEADER_RE = re.compile(r"^\s*([A-Za-z_]+)\s*:(.*)$")


def parse_metric_spec(text: str) -> ChartMetric:
    """Parse the metric-spec file format into a validated :class:`ChartMetric`.

    Example::

        coords: x1 x2 x3 x4
        domain: x2 in (0, pi)
        domain: x1 periodic 2*pi
        g[1][1] = sin(x2)^2
        g[2][2] = 1
        g[3][3] = 1
        g[4][4] = 1
    """
    name = "user_metric"
    coords: tuple[str, ...] | None = None
    domains: dict[str, tuple[Interval, int]] = {}
    comps: dict[tuple[int, int], tuple[ex.Expr, int]] = {}
    backend = "hyperdual"
    deferred: list[tuple[int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        m = _COMPONENT_RE.match(line)
        if m:
            deferred.append((lineno, line))
            continue
        h = _HEADER_RE.match(line)
        if not h:
            col = len(line) - len(line.lstrip()) + 1
            raise ex.ExprSyntaxError("expected a header line or a component 'g[i][j] = ...'", lineno, col)
        key, rest = h.group(1), h.group(2)
        rest_col = h.start(2)
        if key == "name":
            name = rest.strip() or name
        elif key == "coords":
            names = rest.split()
            if len(names) != 4:
                raise ex.ExprSyntaxError(f"dimension must be 4, got {len(names)} coordinates", lineno, rest_col + 1)
            if len(set(names)) != 4:
                raise ex.ExprSyntaxError("duplicate coordinate name", lineno, rest_col + 1)
            for nm in names:
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm) or nm in ex.FUNCTION_KINDS or nm == "pi":
                    raise ex.ExprSyntaxError(f"invalid coordinate name {nm!r}", lineno, rest_col + 1 + rest.find(nm))
            coords = tuple(names)
        elif key == "domain":
            deferred.append((lineno, line))
        elif key == "backend":
            backend = rest.strip()
            if backend not in ("hyperdual", "finite_difference"):
                raise ex.ExprSyntaxError(f"unknown backend {backend!r}", lineno, rest_col + 1)
        else:
            raise ex.ExprSyntaxError(f"unknown header {key!r}", lineno, h.start(1) + 1)

    if coords is None:
        raise ex.ExprSyntaxError("missing 'coords:' header", 1, 1)

    for lineno, line in deferred:
        m = _COMPONENT_RE.match(line)
        if m:
            i, j = int(m.group(1)), int(m.group(2))
            if not (1 <= i <= 4 and 1 <= j <= 4):
                raise ex.ExprSyntaxError("component index out of range 1..4 (dimension must be 4)", lineno, m.start(1) + 1)
            if i > j:
                raise ex.ExprSyntaxError(
                    f"asymmetric component declaration g[{i}][{j}]; declare only i <= j", lineno, m.start(1) + 1
                )
            if (i, j) in comps:
                raise ex.ExprSyntaxError(f"duplicate component g[{i}][{j}]", lineno, m.start(1) + 1)
            node = ex.parse(line[m.end():], coords, line=lineno, column_offset=m.end())
            comps[(i, j)] = (node, lineno)
        else:
            h = _HEADER_RE.match(line)
            rest, off = h.group(2), h.start(2)
            dm = re.match(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s+(in|periodic)\s+(.*)$", rest)
            if not dm:
                raise ex.ExprSyntaxError("expected 'domain: x in (lo, hi)' or 'domain: x periodic p'", lineno, off + 1)
            var = dm.group(1)
            if var not in coords:
                raise ex.ExprSyntaxError(f"unknown identifier {var!r}", lineno, off + dm.start(1) + 1)
            body, body_off = dm.group(3), off + dm.start(3)
            if dm.group(2) == "periodic":
                p = _const_value(body, lineno, body_off)
                if not p > 0:
                    raise ex.ExprSyntaxError("period must be positive", lineno, body_off + 1)
                iv = Interval(period=p)
            else:
                bm = re.match(r"^\s*\((.*),(.*)\)\s*$", body)
                if not bm:
                    raise ex.ExprSyntaxError("expected '(lo, hi)'", lineno, body_off + 1)
                lo = _const_value(bm.group(1), lineno, body_off + bm.start(1))
                hi = _const_value(bm.group(2), lineno, body_off + bm.start(2))
                if not lo < hi:
                    raise ex.ExprSyntaxError("empty interval", lineno, body_off + 1)
                iv = Interval(lo, hi)
            domains[var] = (iv, lineno)

    for d in range(1, 5):
        if (d, d) not in comps:
            raise ex.ExprSyntaxError(f"diagonal component g[{d}][{d}] is not specified", len(text.splitlines()) or 1, 1)

    zero = ex.const(0.0)
    nodes = tuple(comps.get((i + 1, j + 1), (zero, 0))[0] for i, j in UPPER)

    def ev(x):
        env = dict(zip(coords, x))
        return [ex.evaluate(n, env) for n in nodes]

    return ChartMetric(
        name=name,
        coords=coords,
        evaluator=ev,
        domain=tuple(domains.get(c, (Interval(), 0))[0] for c in coords),
        components=nodes,
        derivative_backend=backend,
    )


def _const_value(text: str, lineno: int, offset: int) -> float:
    node = ex.parse(text, (), line=lineno, column_offset=offset)
    try:
        return float(ex.evaluate(node, {}))
    except hd.EvaluationError as exc:
        raise ex.ExprSyntaxError(str(exc), lineno, offset + 1) from None


def load_metric_spec(path) -> ChartMetric:
    with open(path, encoding="utf-8") as fh:
        return parse_metric_spec(fh.read())
