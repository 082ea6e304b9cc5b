"""Command-line front end.

Exit status: 0 when every report passes, 1 when any report fails (a
counterexample record is written), 2 when reports are inconclusive, 64 on a
malformed job.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import json
import math
import os
import sys

import numpy as np

import gabriel_lab
from gabriel_lab import extremal, inequalities, reports, suites
from gabriel_lab.curves import DIAMETER, UNIT_CIRCLE, Circle, ConvexCurve, Ellipse, regular_polygon
from gabriel_lab.errors import DomainError, NumericalFailure
from gabriel_lab.harmonic import NAMED_FAMILIES, NAMED_FORMULAS, FunctionSpec, HarmonicSeries

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64

THEOREMS = {
    "gabriel": "analytic h, convex C: constant 2, p > 0",
    "main": "harmonic f, convex C: 4 for p >= 2, 2 sec^p(pi/2p) for 1 < p < 2",
    "riesz_fejer": "harmonic f, diameter: (1/2) sec^p(pi/2p), p > 1",
    "small_p": "harmonic f, convex C: A(p) (int_T |f|)^p, 0 < p < 1",
    "circle": "harmonic f, circle C: 1 for p >= 2, 1 + |center| for 1 <= p < 2",
    "frazer": "analytic h, circle C: constant 1, p > 0",
    "lemma_sum": "analytic parts h, g of f: (|h| + |g|)^p with constant 2, p > 1",
    "kalaj": "normalized f: (|h|^2 + |g|^2)^(p/2) on T, p > 1",
    "kolmogorov": "nonnegative real U: conjugate bound and Jensen, 0 < p < 1",
    "hilbert": "coefficient sequences a, b with angle --theta",
    "maximal": "int_0^1 max_{|z|=r} |f|^p dr <= int_T |f|^p, p >= 2",
}
ANALYTIC_THEOREMS = {"gabriel", "frazer"}
CIRCLE_THEOREMS = {"circle", "frazer"}
CURVE_FREE = {"riesz_fejer", "kalaj", "kolmogorov", "hilbert", "maximal"}

CURVE_SCHEMAS = {
    "circle": {"center": "[re, im]", "radius": "radius + |center| <= 1"},
    "segment": {"a": "[re, im]", "b": "[re, im]"},
    "polygon": {"vertices": "list of [re, im], convex"},
    "ellipse": {"center": "[re, im]", "semi_axes": "[alpha, beta]", "rotation": "radians"},
    "parametric": {"nodes": "list of [re, im] of a convex spline", "closed": "bool"},
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _as_list(value):
    if value is None:
        return []
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _numbers(value):
    out = []
    for v in _as_list(value):
        out += _floats(v) if isinstance(v, str) else [float(v)]
    return out


def _words(value):
    out = []
    for v in _as_list(value):
        out += [w.strip() for w in str(v).split(",") if w.strip()]
    return out


def parse_curve(text, seed=0):
    """Curves from a flag value: a keyword, ``kind:numbers`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return [ConvexCurve.from_dict(json.loads(text))]
    kind, _, args = text.partition(":")
    nums = _floats(args) if args else []
    if kind == "standard":
        return suites.standard_curves(seed)
    if kind == "diameter":
        return [DIAMETER]
    if kind == "unit-circle":
        return [UNIT_CIRCLE]
    if kind == "circle" and len(nums) == 3:
        return [Circle(complex(nums[0], nums[1]), nums[2])]
    if kind == "polygon" and len(nums) == 2:
        return [regular_polygon(int(nums[0]), nums[1])]
    if kind == "ellipse" and len(nums) in (4, 5):
        rot = nums[4] if len(nums) == 5 else 0.0
        return [Ellipse(complex(nums[0], nums[1]), nums[2], nums[3], rot)]
    raise UsageError(f"cannot parse curve {text!r}")


def parse_function(text):
    """``name:key=value,...`` for a named family, or a JSON FunctionSpec object."""
    text = text.strip()
    if text.startswith("{"):
        return FunctionSpec.from_dict(json.loads(text))
    name, _, args = text.partition(":")
    params = {}
    for item in filter(None, args.split(",")):
        key, _, value = item.partition("=")
        try:
            params[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            params[key.strip()] = value.strip()
    return FunctionSpec.named(name, **params)


def _load_list(path):
    data = reports.load_json(path)
    return data if isinstance(data, list) else [data]


# -- job assembly ---------------------------------------------------------

JOB_KEYS = ("theorem", "p", "p_grid", "curve", "curve_file", "function", "function_file",
            "functions", "curves", "random_polys", "degree", "seed", "tol", "jobs",
            "out", "format", "theta", "family", "curve_family", "restarts", "budget",
            "study", "rho", "inputs")


def merge_job(args):
    """Job-file values, overridden by any flag given on the command line."""
    job = {}
    if getattr(args, "job", None):
        try:
            data = reports.load_json(args.job)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read job file: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("job file must hold a JSON object")
        unknown = set(data) - set(JOB_KEYS) - {"command"}
        if unknown:
            raise UsageError(f"unknown job keys: {sorted(unknown)}")
        if data.get("command", args.command) != args.command:
            raise UsageError("job file command does not match the subcommand")
        job.update({k: v for k, v in data.items() if k != "command"})
    for key in JOB_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            job[key] = value
    return job


def _functions(job, theorem):
    funcs = []
    for text in _as_list(job.get("function")):
        funcs.append(parse_function(text))
    for item in _as_list(job.get("functions")):
        funcs.append(FunctionSpec.from_dict(item))
    for path in _as_list(job.get("function_file")):
        funcs += [FunctionSpec.from_dict(d) for d in _load_list(path)]
    count = job.get("random_polys")
    if count is not None:
        if job.get("seed") is None:
            raise UsageError("--random-polys needs --seed")
        seed, degree = int(job["seed"]), int(job.get("degree", 16))
        if theorem in ANALYTIC_THEOREMS:
            funcs += suites.random_analytic_suite(seed, int(count), degree)
        elif theorem == "kolmogorov":
            funcs += suites.nonnegative_real_suite(seed, int(count), degree)
        else:
            funcs += suites.generate_random_suite(seed, int(count), degree)
    return funcs


def _curves(job):
    seed = int(job.get("seed") or 0)
    curves = []
    for text in _as_list(job.get("curve")):
        curves += parse_curve(str(text), seed)
    for item in _as_list(job.get("curves")):
        curves.append(ConvexCurve.from_dict(item))
    for path in _as_list(job.get("curve_file")):
        curves += [ConvexCurve.from_dict(d) for d in _load_list(path)]
    return curves or suites.standard_curves(seed)


def build_items(job, p_values):
    """Ordered work items ``(theorem, function dict, curve dict, p, tol, theta)``."""
    theorems = _words(job.get("theorem"))
    if not theorems:
        raise UsageError("select at least one theorem with --theorem")
    unknown = [t for t in theorems if t not in THEOREMS]
    if unknown:
        raise UsageError(f"unknown theorem(s) {unknown}; see `catalog`")
    tol = job.get("tol")
    tol = float(tol) if tol is not None else None
    theta = float(job.get("theta", 0.0))
    curves = _curves(job)
    items = []
    for theorem in theorems:
        funcs = _functions(job, theorem)
        if not funcs:
            raise UsageError("no functions: use --function, --function-file or --random-polys")
        ps = [2.0] if theorem == "hilbert" else p_values
        if not ps:
            raise UsageError("give at least one exponent with --p")
        if theorem in CURVE_FREE:
            theorem_curves = [None]
        elif theorem in CIRCLE_THEOREMS:
            theorem_curves = [c for c in curves if isinstance(c, Circle)]
            if not theorem_curves:
                raise UsageError(f"{theorem} needs circle curves")
        else:
            theorem_curves = curves
        for fi, f in enumerate(funcs):
            fd = f.to_dict()
            for p in ps:
                for ci, c in enumerate(theorem_curves):
                    cd = None if c is None else c.to_dict()
                    items.append((theorem, fd, cd, float(p), tol, theta, fi, ci))
    return items


def run_item(item):
    theorem, fd, cd, p, tol, theta, _, _ = item
    f = FunctionSpec.from_dict(fd)
    curve = None if cd is None else ConvexCurve.from_dict(cd)
    try:
        return _verify(theorem, f, curve, p, tol, theta)
    except NumericalFailure as exc:
        return inequalities.InequalityReport(
            theorem_id=theorem, p=p, function=f, curve=curve, lhs=math.nan,
            constant=math.nan, rhs_integral=math.nan, rhs=math.nan, lhs_error=math.inf,
            rhs_error=math.inf, converged=False, notes=f"numerical failure: {exc}")


def _verify(theorem, f, curve, p, tol, theta):
    if theorem == "gabriel":
        return inequalities.verify_gabriel_analytic(f, p, curve, tol)
    if theorem == "main":
        return inequalities.verify_main_convex(f, p, curve, tol)
    if theorem == "riesz_fejer":
        return inequalities.verify_riesz_fejer(f, p, tol)
    if theorem == "small_p":
        return inequalities.verify_small_p(f, p, curve, tol)
    if theorem == "circle":
        return inequalities.verify_circle(f, p, curve, tol)
    if theorem == "frazer":
        return inequalities.verify_frazer(f, p, curve, tol)
    if theorem == "kalaj":
        return inequalities.verify_kalaj(f, p, tol)
    if theorem == "kolmogorov":
        return inequalities.verify_kolmogorov(f, p, tol)
    if theorem == "maximal":
        return inequalities.verify_maximal(f, p, tol)
    ser = _series(f)
    if theorem == "lemma_sum":
        h = FunctionSpec.from_series(HarmonicSeries(ser.a))
        g = FunctionSpec.from_series(HarmonicSeries(ser.b))
        return inequalities.verify_lemma_sum(h, g, p, curve, tol)
    return inequalities.verify_hilbert(np.abs(ser.a.real), np.abs(ser.a.imag), theta)


def _series(f):
    if f.as_series is None:
        raise DomainError(f"{f.label()} has no coefficient series")
    return f.as_series


def _map(func, items, jobs):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [func(item) for item in items]


def exit_status(verdicts):
    verdicts = list(verdicts)
    if "fail" in verdicts:
        return EXIT_FAIL
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        reports.write_atomic(out, text)


def _jobs(job):
    jobs = job.get("jobs")
    return int(jobs) if jobs is not None else (os.cpu_count() or 1)


def _summary(verdicts):
    return {v: verdicts.count(v) for v in ("pass", "fail", "inconclusive")}


def cmd_verify(job, p_values, default_format="json"):
    items = build_items(job, p_values)
    results = _map(run_item, items, _jobs(job))
    verdicts = [r.verdict for r in results]
    fmt = job.get("format") or default_format
    if fmt == "csv":
        text = reports.reports_csv(results)
    else:
        text = reports.to_json({"version": gabriel_lab.__version__,
                                "summary": _summary(verdicts),
                                "reports": [r.to_dict() for r in results]})
    _emit(text, job.get("out"))
    failures = [r.to_dict() for r in results if r.verdict == "fail"]
    if failures:
        record = reports.to_json({"version": gabriel_lab.__version__,
                                  "counterexamples": failures})
        out = job.get("out")
        if out in (None, "-"):
            sys.stderr.write(record)
        else:
            reports.write_atomic(out + ".counterexamples.json", record)
    print(json.dumps(_summary(verdicts)), file=sys.stderr)
    return exit_status(verdicts)


def cmd_sweep(job):
    grid = _numbers(job.get("p_grid")) or _numbers(job.get("p"))
    if not grid:
        raise UsageError("sweep needs --p-grid")
    if not job.get("theorem"):
        job = dict(job, theorem="main")
    return cmd_verify(job, grid, default_format="csv")


def cmd_blowup(job):
    grid = _numbers(job.get("p_grid")) or [0.5, 0.7, 0.9, 0.95, 0.99]
    tol = job.get("tol")
    rows = inequalities.blowup_study(grid, None if tol is None else float(tol))
    if (job.get("format") or "csv") == "csv":
        text = reports.to_csv(rows, inequalities.BLOWUP_COLUMNS)
    else:
        text = reports.to_json({"version": gabriel_lab.__version__, "rows": rows})
    _emit(text, job.get("out"))
    return EXIT_OK if all(r["converged"] for r in rows) else EXIT_INCONCLUSIVE


def cmd_extremal(job):
    study = job.get("study") or "search"
    tol = job.get("tol")
    tol = None if tol is None else float(tol)
    fmt = job.get("format") or ("json" if study == "search" else "csv")
    ps = _numbers(job.get("p")) or [2.0]
    if len(ps) != 1:
        raise UsageError("extremal takes a single --p")
    p = ps[0]
    if study in ("rf", "circle"):
        ladder = _numbers(job.get("rho")) or [0.9, 0.99, 0.999]
        if study == "rf":
            rows, cols = extremal.sharpness_study_rf(p, ladder, tol), extremal.RF_COLUMNS
        else:
            funcs = [parse_function(t) for t in _as_list(job.get("function"))]
            f = funcs[0] if funcs else None
            rows = extremal.sharpness_study_circle(p, ladder, f, tol)
            cols = extremal.CIRCLE_COLUMNS
        if fmt == "csv":
            text = reports.to_csv(rows, cols)
        else:
            text = reports.to_json({"version": gabriel_lab.__version__, "rows": rows})
        _emit(text, job.get("out"))
        return EXIT_OK if all(r["converged"] for r in rows) else EXIT_INCONCLUSIVE
    if study != "search":
        raise UsageError(f"unknown study {study!r}")
    theorems = _words(job.get("theorem")) or ["main"]
    if len(theorems) != 1:
        raise UsageError("extremal searches one theorem at a time")
    cfg = extremal.SearchConfig(
        theorem=theorems[0], p=p, family=job.get("family") or "harmonic",
        degree=int(job.get("degree", 8)), curves=job.get("curve_family") or "polygon",
        restarts=int(job.get("restarts", 8)), budget=int(job.get("budget", 2000)),
        seed=int(job.get("seed") or 0), tol=tol if tol is not None else 1e-8)
    result = extremal.maximize_ratio(cfg, jobs=_jobs(job))
    if fmt == "csv":
        text = reports.to_csv(result.trace, ("evaluation", "restart", "ratio_over_constant"))
    else:
        text = reports.to_json(result.to_dict())
    _emit(text, job.get("out"))
    return EXIT_FAIL if result.counterexample else EXIT_OK


def catalog():
    return {
        "version": gabriel_lab.__version__,
        "functions": {name: {"formula": NAMED_FORMULAS[name], "params": schema}
                      for name, schema in NAMED_FAMILIES.items()},
        "curves": CURVE_SCHEMAS,
        "theorems": THEOREMS,
    }


def cmd_catalog(job):
    data = catalog()
    if (job.get("format") or "text") == "json":
        text = reports.to_json(data)
    else:
        lines = ["functions:"]
        for name, info in data["functions"].items():
            params = ", ".join(f"{k}: {v}" for k, v in info["params"].items())
            lines.append(f"  {name:<13} {info['formula']}  [{params}]")
        lines.append("curves:")
        for name, schema in data["curves"].items():
            lines.append(f"  {name:<13} " + ", ".join(f"{k}: {v}" for k, v in schema.items()))
        lines.append("theorems:")
        for name, desc in data["theorems"].items():
            lines.append(f"  {name:<13} {desc}")
        text = "\n".join(lines) + "\n"
    _emit(text, job.get("out"))
    return EXIT_OK


def cmd_report(job):
    """Re-emit saved JSON reports as CSV or a summary, with the same exit rules."""
    paths = _as_list(job.get("inputs"))
    if not paths:
        raise UsageError("report needs at least one input file")
    rows, verdicts = [], []
    for path in paths:
        try:
            data = reports.load_json(path)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        for rep in data.get("reports", []):
            rows.append({"theorem_id": rep["theorem_id"], "p": rep["p"],
                         "curve": rep.get("curve_label", ""), "lhs": rep["lhs"],
                         "rhs": rep["rhs"], "ratio": rep["ratio"], "slack": rep["slack"],
                         "pass": rep["pass"]})
            verdicts.append(rep["verdict"])
    if (job.get("format") or "csv") == "csv":
        text = reports.to_csv(rows, inequalities.CSV_COLUMNS)
    else:
        worst = {}
        for row in rows:
            if isinstance(row["ratio"], float):
                worst[row["theorem_id"]] = max(worst.get(row["theorem_id"], 0.0), row["ratio"])
        text = reports.to_json({"summary": _summary(verdicts), "worst_ratio": worst})
    _emit(text, job.get("out"))
    return exit_status(verdicts)


def make_parser():
    parser = Parser(prog="gabriel-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=gabriel_lab.__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=Parser)

    common = Parser(add_help=False)
    common.add_argument("--job", help="JSON job file; flags win on conflict")
    common.add_argument("--tol", type=float)
    common.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv", "text"))
    common.add_argument("--seed", type=int)

    suite = Parser(add_help=False)
    suite.add_argument("--theorem", action="append", help="theorem id(s), comma separated")
    suite.add_argument("--p", action="append", help="exponent(s), comma separated")
    suite.add_argument("--curve", action="append",
                       help="standard | diameter | unit-circle | circle:x,y,r | "
                            "polygon:n,r | ellipse:x,y,a,b[,rot] | JSON object")
    suite.add_argument("--curve-file", action="append")
    suite.add_argument("--function", action="append", help="name:key=value,... or JSON")
    suite.add_argument("--function-file", action="append")
    suite.add_argument("--random-polys", type=int)
    suite.add_argument("--degree", type=int)
    suite.add_argument("--theta", type=float, help="angle for the hilbert theorem")

    sub.add_parser("verify", parents=[common, suite], help="run verifiers on a suite")
    sweep = sub.add_parser("sweep", parents=[common, suite], help="verify over a p grid")
    sweep.add_argument("--p-grid", action="append")

    ext = sub.add_parser("extremal", parents=[common], help="search or sharpness studies")
    ext.add_argument("--study", choices=("search", "rf", "circle"))
    ext.add_argument("--theorem", action="append")
    ext.add_argument("--p", action="append")
    ext.add_argument("--family", choices=("constant", "monomial", "analytic", "harmonic"))
    ext.add_argument("--degree", type=int)
    ext.add_argument("--curve-family", choices=("concentric", "circle", "polygon", "diameter"))
    ext.add_argument("--restarts", type=int)
    ext.add_argument("--budget", type=int)
    ext.add_argument("--rho", action="append", help="radius ladder, comma separated")
    ext.add_argument("--function", action="append")

    blow = sub.add_parser("blowup", parents=[common], help="Cayley-power blow-up table")
    blow.add_argument("--p-grid", action="append")

    sub.add_parser("catalog", parents=[common], help="list named functions, curves, theorems")

    rep = sub.add_parser("report", parents=[common], help="summarize saved JSON reports")
    rep.add_argument("inputs", nargs="*", default=None)
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and parse errors
        return exc.code
    try:
        job = merge_job(args)
        if args.command == "verify":
            return cmd_verify(job, _numbers(job.get("p")))
        if args.command == "sweep":
            return cmd_sweep(job)
        if args.command == "extremal":
            return cmd_extremal(job)
        if args.command == "blowup":
            return cmd_blowup(job)
        if args.command == "catalog":
            return cmd_catalog(job)
        return cmd_report(job)
    except (UsageError, DomainError, ValueError, KeyError, TypeError) as exc:
        print(f"gabriel-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
