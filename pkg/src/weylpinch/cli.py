"""Command-line front end: ``weylpinch analyze|verify|integrate|models``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, forms
from . import identities as idl
from . import kahler as kh
from .curvature import curvature_from_value, weyl_plus_at
from .expr import ExprSyntaxError
from .forms import FrameError
from .hyperdual import EvaluationError
from .invariants import AtlasError, atlas_for, gursky_lebrun_comparison, integrate_invariants, thread_count
from .metrics import MODELS, MetricError, ModelError, builtin_model, load_metric_spec, metric_at
from .spectral import pinch_predicates, spectrum
from .verify import VerifyContext, config_seed, run_suites

SCHEMA = 1
ANALYZE_SUITES = ("spectra", "pinch", "kahler", "invariants", "identities")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

SPECTRUM_TOL = 1e-7
STRUCTURE_TOL = 1e-8
AVERAGE_TOL = 1e-10
EXTREMAL_TOL = 1e-6
INTEGER_TOL = 1e-3


class ConfigError(ValueError):
    pass


# serialization -----------------------------------------------------------------


def _clean(obj):
    """JSON-ready copy: numpy scalars/arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def _flatten(rec: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list) and not v:
            out[key] = ""
        elif isinstance(v, list) and not isinstance(v[0], (dict, list)):
            for i, item in enumerate(v):
                out[f"{key}.{i}"] = item
        elif isinstance(v, list):
            out[key] = json.dumps(v, separators=(",", ":"))
        else:
            out[key] = v
    return out


def render(doc: dict, fmt: str) -> str:
    doc = _clean(doc)
    if fmt == "json":
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    rows = doc.get("records") or doc.get("summary", {}).get("checks") or doc.get("global") or []
    flat = [_flatten(r) for r in rows]
    cols: list[str] = []
    for r in flat:
        cols.extend(c for c in r if c not in cols)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in flat:
        w.writerow({c: repr(v) if isinstance(v, float) else v for c, v in r.items()})
    return buf.getvalue()


def emit(doc: dict, output: str | None, fmt: str) -> None:
    text = render(doc, fmt)
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _document(command: str, config: dict, records, global_records, checks) -> dict:
    checks = [c if isinstance(c, dict) else c.as_dict() for c in checks]
    failed = [c for c in checks if c["status"] != "PASS"]
    return {
        "schema": SCHEMA,
        "tool": "weylpinch",
        "version": __version__,
        "command": command,
        "config": config,
        "records": records,
        "global": global_records,
        "summary": {
            "passed": not failed,
            "n_checks": len(checks),
            "n_failed": len(failed),
            "worst_relative": max((c["worst_residual"] / c["tolerance"] for c in checks if c["tolerance"] > 0), default=0.0),
            "checks": checks,
        },
    }


def _check(suite, name, formula, worst, tol, samples=1) -> dict:
    worst = float(worst)
    ok = math.isfinite(worst) and worst <= tol
    return {"suite": suite, "name": name, "formula": formula, "worst_residual": worst, "tolerance": tol,
            "samples": samples, "status": "PASS" if ok else "FAIL", "details": {}}


# argument parsing ----------------------------------------------------------------


def _floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    return vals


def _parse_grid(text: str) -> tuple[int, int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 4:
        raise ConfigError(f"--grid must look like NxNxNxN, got {text!r}")
    try:
        counts = tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"--grid must look like NxNxNxN, got {text!r}") from None
    if min(counts) < 1:
        raise ConfigError("--grid counts must be positive")
    return counts  # type: ignore[return-value]


def _parse_orientation(text: str) -> int:
    if text in ("+1", "1"):
        return 1
    if text == "-1":
        return -1
    raise ConfigError(f"--orientation must be +1 or -1, got {text!r}")


def _resolve_metric(args):
    if bool(args.model) == bool(args.metric):
        raise ConfigError("give exactly one of --model or --metric")
    if args.model:
        params = _floats(args.params, "--params") if args.params else []
        return builtin_model(args.model, params)
    return load_metric_spec(args.metric)


def grid_points(metric, counts) -> tuple[np.ndarray, np.ndarray]:
    """Cell midpoints of the sampling box, with their grid indices in lexicographic order."""
    box = metric.box()
    axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for (lo, hi), n in zip(box, counts)]
    idx = np.stack(np.meshgrid(*[np.arange(n) for n in counts], indexing="ij"), axis=-1).reshape(-1, 4)
    pts = np.stack([axes[a][idx[:, a]] for a in range(4)], axis=1)
    return idx, pts


# analyze -------------------------------------------------------------------------


def _kahler_record(metric, c, orientation, budget, rng) -> tuple[dict, list]:
    k = kh.kahler_structure(metric, c, orientation)
    checks = []
    res = kh.structure_residuals(k, c.metric.g, rng)
    rec: dict = {"integrable": k.is_integrable_kahler, "structure_residuals": res}
    # the self-duality entry only applies when the chart orientation is the complex one
    selfdual = res["*omega - omega"] < STRUCTURE_TOL
    core = {key: v for key, v in res.items() if key != "*omega - omega"}
    checks.append(("kahler", "J structure residuals", "J^2 = -1, g(J., J.) = g, |omega| = sqrt(2)", max(core.values()), STRUCTURE_TOL))
    av = kh.sphere_average_H(c, k)
    rec["sphere_average"] = av
    s = float(c.scalar)
    if k.is_integrable_kahler:
        checks.append(("kahler", "H_av - s/6", "H_av = s/6", abs(av["H_av"] - av["berger_pred"]), AVERAGE_TOL * max(1.0, abs(s))))
    else:
        checks.append(("kahler", "H_av - (s + 3s*)/24", "H_av = (s + 3 s*)/24", abs(av["H_av"] - av["hall_murphy_pred"]),
                       AVERAGE_TOL * max(1.0, abs(s))))
    smp = kh.extremize_curvatures(c, k, budget)
    rec["extrema"] = smp.extrema
    if k.is_integrable_kahler and selfdual:
        spec = spectrum(forms.curvature_operator(c, k.frame))
        bi = kh.verify_biorthogonal_extremes(c, k, spec, smp)
        rec["biorthogonal"] = bi
        checks.append(("kahler", "Kperp extremes", "Kperp_max - s/12 = (lambda3+ + lambda3-)/2", max(bi.values()), EXTREMAL_TOL))
        bis = kh.verify_bisectional_extremes(c, k, spec, smp)
        rec["bisectional"] = bis
        checks.append(("kahler", "B extremes", "s/6 - lambda3- = 2 B_min", max(bis.values()), EXTREMAL_TOL))
        if metric.einstein:
            hol = kh.verify_holomorphic_extremes(c, k, spec, smp)
            rec["holomorphic"] = hol
            checks.append(("kahler", "H extremes", "H_max = s/6 + lambda3-/2", max(hol.values()), EXTREMAL_TOL))
        ids = kh.kahler_pointwise_identities(c, k, rng=rng)
        rec["pointwise_identities"] = ids
        checks.append(("kahler", "Kaehler curvature symmetries", "R_ij13 = R_ij24, Ric(X,X) = H + B", max(ids.values()),
                       STRUCTURE_TOL * max(1.0, abs(s))))
    return rec, checks


def _point_record(metric, c, index, suites, orientation, budget, seed) -> tuple[dict, list]:
    blocks = forms.curvature_operator(c, forms.orthonormal_frame(c.metric, orientation))
    spec = spectrum(blocks)
    s = spec.scalar
    rec: dict = {"index": list(index), "point": c.metric.point.tolist(), "scalar": s}
    checks: list = []
    scale = max(1.0, abs(s))
    if "spectra" in suites:
        rec["spectra"] = {
            "lambda_plus": list(spec.lambda_plus),
            "lambda_minus": list(spec.lambda_minus),
            "norm_sq_plus": spec.norm_sq_plus,
            "norm_sq_minus": spec.norm_sq_minus,
            "det_plus": spec.det_plus,
            "det_minus": spec.det_minus,
            "degenerate_plus": spec.degenerate_plus,
            "degenerate_minus": spec.degenerate_minus,
            "in_zero_set": spec.in_zero_set,
            "ric0_frobenius": float(np.linalg.norm(blocks.ric0_block)),
        }
        if metric.kahler and metric.complex_structure is not None:
            k = kh.kahler_structure(metric, c, orientation)
            side = spec.lambda_plus if np.abs(forms.star(k.omega) - k.omega).max() < STRUCTURE_TOL else spec.lambda_minus
            want = (-s / 12.0, -s / 12.0, s / 6.0)
            dev = max(abs(a - b) for a, b in zip(side, want))
            checks.append(("spectra", "Kaehler spectrum (-s/12, -s/12, s/6)", "W on Lambda^(omega) = diag(-s/12, -s/12, s/6)",
                           dev, SPECTRUM_TOL * scale))
        if metric.einstein:
            checks.append(("spectra", "ric0 block", "ric0 = 0", float(np.linalg.norm(blocks.ric0_block)), STRUCTURE_TOL * scale))
    if "pinch" in suites:
        rep = pinch_predicates(spec, s)
        rec["pinch"] = {
            "det_nonneg": rep.det_nonneg,
            "sum13_nonneg": rep.sum13_nonneg,
            "polombo_band": rep.polombo_band,
            "gursky_band": rep.gursky_band,
            "lambda2_sign": rep.lambda2_sign,
            "margins": rep.margins,
        }
        consistent = rep.det_nonneg == rep.sum13_nonneg == (rep.lambda2_sign <= 0) or math.sqrt(spec.norm_sq_plus) < 1e-6 * scale
        checks.append(("pinch", "det >= 0 iff lambda1 + lambda3 >= 0 iff lambda2 <= 0", "sign agreement", 0.0 if consistent else 1.0, 0.0))
    if "identities" in suites:
        t = spec.triple_plus
        gap = float(idl.weitzenboeck_gap(t, s))
        norm_res = abs(float(idl.norm_identity_residual(t)))
        rec["identities"] = {
            "weitzenboeck_gap": gap,
            "norm_identity_residual": norm_res,
            "ab_minus_c2": float(idl.ab_minus_c2(t)),
            "sign_value": float(idl.sign_lemma_nonpositive_s(t, s).value),
        }
        checks.append(("identities", "|W+|^2 identity", "|W|^2 = 2(lambda1^2 - lambda2 lambda3)", norm_res, 1e-10 * scale**2))
        checks.append(("identities", "AB - C^2", "AB - C^2 = 0", abs(rec["identities"]["ab_minus_c2"]), 1e-10 * scale**4))
        if metric.kahler and metric.einstein and spec.degenerate_plus:
            checks.append(("identities", "Weitzenboeck gap", "36 det W+ - s|W+|^2 = 0", abs(gap), 1e-7 * scale**3))
    if "kahler" in suites and (metric.complex_structure is not None or metric.kahler):
        krec, kchecks = _kahler_record(metric, c, orientation, budget, np.random.default_rng(seed))
        rec["kahler"] = krec
        checks.extend(kchecks)
    elif "kahler" in suites:
        k = kh.kahler_structure(metric, c, orientation, pointwise=True)
        av = kh.sphere_average_H(c, k)
        rec["kahler"] = {"integrable": False, "sphere_average": av}
        checks.append(("kahler", "H_av - (s + 3s*)/24", "H_av = (s + 3 s*)/24", abs(av["H_av"] - av["hall_murphy_pred"]), AVERAGE_TOL * scale))
    return rec, checks


def _integrate_record(metric, order, orientation) -> tuple[dict, list]:
    atlas = atlas_for(metric, order)
    rep = integrate_invariants(metric, atlas, orientation)
    gl = gursky_lebrun_comparison(metric, atlas, rep)
    rec = {
        "model": metric.name,
        "params": list(metric.params),
        "order": order,
        "orientation": orientation,
        "tau": rep.tau,
        "chi": rep.chi,
        "chi_minus_3tau": rep.chi_minus_3tau,
        "volume": rep.volume,
        "node_count": rep.node_count,
        "integrals": rep.integrals,
        "integrand_range": rep.integrand_stats,
        "exactness": atlas.exactness,
        "wplus_vs_s2": {"wplus_integral": gl.wplus_integral, "s2_integral": gl.s2_integral, "gap": gl.gap, "asserted": gl.asserted},
    }
    checks = []
    ref = metric.reference
    if "tau" in ref:
        checks.append(("invariants", f"{metric.name}: tau", "tau = (1/12 pi^2) int (|W+|^2 - |W-|^2)",
                       abs(rep.tau - orientation * ref["tau"]), INTEGER_TOL))
        checks.append(("invariants", f"{metric.name}: chi", "chi = chi - 3 tau + 3 tau", abs(rep.chi - ref["chi"]), INTEGER_TOL))
    if "volume" in ref:
        checks.append(("invariants", f"{metric.name}: volume", "int dV", abs(rep.volume - ref["volume"]) / ref["volume"], 1e-8))
    if metric.kahler and metric.einstein and gl.s2_integral > 0 and orientation == 1:
        checks.append(("invariants", f"{metric.name}: Kaehler equality", "int |W+|^2 = int s^2/24",
                       abs(gl.gap) / gl.s2_integral, 1e-6))
    if gl.asserted and orientation == 1:
        checks.append(("invariants", f"{metric.name}: int |W+|^2 >= int s^2/24", "Einstein, s > 0",
                       max(0.0, -gl.gap) / max(gl.s2_integral, 1e-300), 1e-6))
    return rec, checks


def run_analyze(config: dict) -> tuple[dict, int]:
    args = argparse.Namespace(**config)
    metric = _resolve_metric(args)
    suites = config["suites"]
    orientation = config["orientation"]
    seed = config_seed(config)
    if config.get("grid"):
        idx, pts = grid_points(metric, config["grid"])
    elif config.get("points"):
        pts = np.array(config["points"], dtype=float)
        idx = np.array([[k, 0, 0, 0] for k in range(len(pts))])
    else:
        pts = np.empty((0, 4))
        idx = np.empty((0, 4), dtype=int)
    records: list = []
    checks: list = []
    pointwise = [s for s in suites if s != "invariants"]
    if len(pts) and pointwise:
        metric.check_points(pts)
        mv = metric_at(metric, pts)
        curv = curvature_from_value(mv)

        def work(i):
            return _point_record(metric, curv[i], idx[i], pointwise, orientation, config["budget"], (seed, i))

        workers = min(thread_count(), len(pts))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(work, range(len(pts))))
        else:
            results = [work(i) for i in range(len(pts))]
        for i, (rec, chk) in enumerate(results):
            records.append(rec)
            for c in chk:
                checks.append(c)
        if "spectra" in suites and metric.einstein and metric.name in ("fubini_study_cp2", "round_s4", "product_s2xs2", "complex_hyperbolic_ch2"):
            # harmonic W+ on the first few points
            worst = max(float(weyl_plus_at(metric, x, orientation).divergence_norm) for x in pts[: min(len(pts), 4)])
            checks.append(("spectra", "|delta W+|", "delta W+ = 0", worst, 1e-5))
    global_records = []
    if "invariants" in suites:
        try:
            rec, chk = _integrate_record(metric, config["order"], orientation)
            global_records.append(rec)
            checks.extend(chk)
        except AtlasError as exc:
            global_records.append({"model": metric.name, "skipped": str(exc)})
    grouped = _group_checks(checks)
    doc = _document("analyze", config, records, global_records, grouped)
    return doc, EXIT_OK if doc["summary"]["passed"] else EXIT_FAIL


def _group_checks(checks) -> list[dict]:
    """Collapse per-point checks to one worst-case entry per (suite, name)."""
    out: dict = {}
    for suite, name, formula, worst, tol in checks:
        key = (suite, name)
        if key not in out:
            out[key] = _check(suite, name, formula, worst, tol, 0)
            out[key]["_ratio"] = -1.0
        entry = out[key]
        entry["samples"] += 1
        ratio = float(worst) / tol if tol > 0 else (0.0 if worst == 0 else math.inf)
        if not math.isfinite(float(worst)):
            ratio = math.inf
        if ratio > entry["_ratio"]:
            entry.update(worst_residual=float(worst), tolerance=tol, _ratio=ratio)
            entry["status"] = "PASS" if math.isfinite(float(worst)) and float(worst) <= tol else "FAIL"
    for entry in out.values():
        entry.pop("_ratio")
    return list(out.values())


# commands ----------------------------------------------------------------------


def _analyze_config(args) -> dict:
    suites = [s.strip() for s in args.suites.split(",") if s.strip()]
    bad = [s for s in suites if s not in ANALYZE_SUITES]
    if bad or not suites:
        raise ConfigError(f"unknown analyze suites {bad}; choose from {', '.join(ANALYZE_SUITES)}")
    if args.grid and args.point:
        raise ConfigError("give either --grid or --point, not both")
    points = [_floats(p, "--point") for p in args.point or []]
    if any(len(p) != 4 for p in points):
        raise ConfigError("--point takes exactly four coordinates")
    _check_budget(args.budget)
    _check_order(args.order)
    return {
        "model": args.model,
        "params": args.params,
        "metric": args.metric,
        "points": points,
        "grid": list(_parse_grid(args.grid)) if args.grid else None,
        "suites": [s for s in ANALYZE_SUITES if s in suites],
        "orientation": _parse_orientation(args.orientation),
        "order": args.order,
        "budget": args.budget,
    }


def _check_budget(budget):
    if budget is not None and budget < kh.MIN_SPHERE_SAMPLES:
        raise ConfigError(f"--budget must be at least {kh.MIN_SPHERE_SAMPLES}")


def _check_order(order):
    if order < 4:
        raise ConfigError("--order must be at least 4")


def cmd_analyze(args) -> int:
    config = _analyze_config(args)
    if config["budget"] is None:
        config["budget"] = kh.DEFAULT_SPHERE_SAMPLES
    doc, code = run_analyze(config)
    emit(doc, args.output, args.format)
    return code


def cmd_integrate(args) -> int:
    _check_order(args.order)
    orientation = _parse_orientation(args.orientation)
    metric = _resolve_metric(args)
    config = {"model": args.model, "params": args.params, "metric": args.metric, "order": args.order, "orientation": orientation}
    try:
        rec, chk = _integrate_record(metric, args.order, orientation)
    except AtlasError as exc:
        raise ConfigError(str(exc)) from None
    doc = _document("integrate", config, [], [rec], _group_checks(chk))
    emit(doc, args.output, args.format)
    return EXIT_OK if doc["summary"]["passed"] else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.budget is not None and args.budget < 1:
        raise ConfigError("--budget must be positive")
    _check_order(args.order)
    config = {"suite": args.suite, "budget": args.budget, "order": args.order, "points": args.points}
    ctx = VerifyContext(budget=args.budget, order=args.order, points=args.points, seed=config_seed(config))
    try:
        checks = run_suites(args.suite, ctx)
    except (ValueError, kh.KahlerError) as exc:
        if "unknown suite" in str(exc):
            raise ConfigError(str(exc)) from None
        raise
    for c in checks:
        print(f"[{c.suite}] {c.name}: max |residual| = {c.worst:.3e} (tol {c.tolerance:.0e}; {c.formula}): "
              f"{'PASS' if c.passed else 'FAIL'}")
    doc = _document("verify", config, [], [], checks)
    if args.output:
        emit(doc, args.output, args.format)
    return EXIT_OK if doc["summary"]["passed"] else EXIT_FAIL


def cmd_models(args) -> int:
    records = []
    for name in sorted(MODELS):
        defaults, _ = MODELS[name]
        m = builtin_model(name)
        ref = m.reference
        records.append({
            "name": name,
            "coords": list(m.coords),
            "default_params": list(defaults),
            "kahler": m.kahler,
            "einstein": m.einstein,
            "compact": ref.get("compact", True),
            "scalar": ref.get("scalar"),
            "tau": ref.get("tau"),
            "chi": ref.get("chi"),
            "volume": ref.get("volume"),
        })
    doc = _document("models", {}, records, [], [])
    if args.output or args.format != "text":
        emit(doc, args.output, "csv" if args.format == "csv" else "json")
    else:
        for r in records:
            flags = ", ".join(f for f, on in (("Kaehler", r["kahler"]), ("Einstein", r["einstein"]), ("compact", r["compact"])) if on)
            params = ",".join(repr(p) for p in r["default_params"]) or "-"
            print(f"{r['name']:<24} coords=({', '.join(r['coords'])}) params={params} s={r['scalar']!r} [{flags}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weylpinch", description="Curvature lab for oriented Riemannian 4-manifolds.")
    p.add_argument("--version", action="version", version=f"weylpinch {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--model", help="catalog model name (see `weylpinch models`)")
        sp.add_argument("--params", help="comma-separated model parameters, e.g. 1,2")
        sp.add_argument("--metric", help="path of a metric spec file")
        sp.add_argument("--orientation", default="+1", help="chart orientation, +1 or -1")

    def out(sp, formats=("json", "csv")):
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=formats, default=formats[0])

    a = sub.add_parser("analyze", help="pointwise curvature analysis on points or a grid")
    source(a)
    a.add_argument("--point", action="append", help="x1,x2,x3,x4 (repeatable)")
    a.add_argument("--grid", help="NxNxNxN cell-midpoint grid over the sampling box")
    a.add_argument("--suites", default="spectra,pinch", help=f"comma list from {','.join(ANALYZE_SUITES)}")
    a.add_argument("--order", type=int, default=16, help="quadrature nodes per axis for invariants")
    a.add_argument("--budget", type=int, default=None, help="sphere samples for curvature extremization")
    out(a)
    a.set_defaults(func=cmd_analyze)

    i = sub.add_parser("integrate", help="signature and Euler characteristic by quadrature")
    source(i)
    i.add_argument("--order", type=int, default=32)
    out(i)
    i.set_defaults(func=cmd_integrate)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("suite", nargs="?", default="all")
    v.add_argument("--budget", type=int, default=None, help="sample count (sweeps) or sphere samples")
    v.add_argument("--order", type=int, default=32)
    v.add_argument("--points", type=int, default=5, help="random points per model")
    out(v)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("models", help="list the model catalog")
    out(m, ("text", "json", "csv"))
    m.set_defaults(func=cmd_models)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, MetricError, ModelError, AtlasError, ExprSyntaxError, FrameError, EvaluationError, OSError) as exc:
        print(f"weylpinch: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        if "WEYLPINCH_THREADS" in str(exc):
            print(f"weylpinch: error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        raise


if __name__ == "__main__":
    sys.exit(main())
