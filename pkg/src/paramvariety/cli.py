"""Command-line front end.

Subcommands wire the pipeline end to end: ``ioeq`` derives the input-output
equation, ``pseudo`` generates jet datasets, ``variety`` estimates the
coefficient values and emits the constraint equations plus the extension
report, ``extend`` runs the extension check alone, and ``sample`` grids
points on a known variety. Artifacts embed the tool version, the seed, and
input hashes; identical configuration and seed produce byte-identical
files. Resource caps for the basis computation come from the environment
(PARAMVARIETY_GB_MAX_PAIRS, PARAMVARIETY_GB_MAX_BASIS).

Exit codes: 0 success, 2 usage/parse, 3 numeric failure, 4 algebra resource
cap, 5 internal invariant violation.
"""

import argparse
import hashlib
import json
import os
import random
import sys

import numpy as np

from . import __version__
from .datalab import make_dataset, read_dataset, write_dataset
from .errors import (
    EXIT_USAGE,
    IllConditioned,
    InsufficientData,
    NoParameterDependence,
    ParamVarietyError,
)
from .ioeq import derive_io_basis
from .model import load_model, prolong, _ExprParser, _Tokens
from .groebner import buchberger, reduce_basis
from .extension import run_extension_check
from .variety import (
    COND_THRESHOLD,
    build_linear_system,
    sample_variety,
    solve_coefficients,
    variety_constraints,
)


def _sha16(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()[:16]


def _metadata(args, **files):
    lines = [f"paramvariety {__version__}",
             f"seed: {getattr(args, 'seed', 0)}"]
    for label, path in files.items():
        if path:
            lines.append(f"{label}: {os.path.basename(path)} sha256:{_sha16(path)}")
    return lines


def _parse_assignments(text, what):
    out = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece:
            raise ParamVarietyError(f"bad {what} entry {piece!r}; expected name=value")
        name, value = piece.split("=", 1)
        out[name.strip()] = value.strip()
    return out


def _eval_param_expr(text, model, params):
    """Evaluate an expression in the parameters at the given numeric point
    (used for initial-condition entries like x2=(a7/a6)*4.1e6)."""
    n = model.nparams
    ring = model.ring0()
    from .algebra import ParamRat, Poly
    symbols = {p: (lambda i=i: Poly.const(ring, ParamRat.gen(n, i)))
               for i, p in enumerate(model.params)}
    value = _ExprParser(_Tokens(text, 1), symbols, ring, n, 1).parse()
    rat = value.terms.get((0,) * len(ring.vars))
    if value.support_vars() or (rat is None and not value.is_zero):
        raise ParamVarietyError(f"expression {text!r} must involve parameters only")
    if rat is None:
        return 0.0
    return rat.evaluate([params[p] for p in model.params])


def _collect_params(args, model):
    if not args.params:
        raise ParamVarietyError("missing --params name=value,...")
    raw = _parse_assignments(args.params, "--params")
    params = {}
    for name, value in raw.items():
        if name not in model.params:
            raise ParamVarietyError(f"unknown parameter {name!r}")
        params[name] = float(value)
    missing = [p for p in model.params if p not in params]
    if missing:
        raise ParamVarietyError(f"missing value for parameter {missing[0]!r}")
    return params


def _collect_x0(args, model, params):
    if not args.x0:
        raise ParamVarietyError("missing --x0 name=expr,... (expressions may "
                                "use the parameters)")
    raw = _parse_assignments(args.x0, "--x0")
    x0 = []
    for s in model.states:
        if s not in raw:
            raise ParamVarietyError(f"missing initial value for state {s!r}")
        x0.append(_eval_param_expr(raw[s], model, params))
    return x0


def _times_from_args(args, model, default_rows):
    if args.times:
        return sorted(float(t) for t in args.times.split(","))
    k = args.n_times or default_rows
    t0 = args.t0 if args.t0 is not None else model.horizon[0]
    rng = random.Random(args.seed)
    span = model.horizon[1] - t0
    return sorted(t0 + span * rng.random() for _ in range(k))


def _generate_dataset(args, model, order, default_rows):
    params = _collect_params(args, model)
    x0 = _collect_x0(args, model, params)
    times = _times_from_args(args, model, default_rows)
    t0 = args.t0 if args.t0 is not None else model.horizon[0]
    return make_dataset(model, params, x0, times, order=order, t0=t0,
                        method=args.method)


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_ioeq(args):
    model = load_model(args.model)
    meta = _metadata(args, model=args.model)
    try:
        basis = derive_io_basis(model)
    except NoParameterDependence as exc:
        _write_lines(os.path.join(args.out, "ioeq.txt"),
                     [f"# {m}" for m in meta] + [f"# note: {exc}"])
        print(f"note: {exc}")
        return 0
    lines = [f"# {m}" for m in meta]
    lines += [f"L = {basis.L}", f"coefficients = {basis.n_coeffs}", basis.render()]
    path = os.path.join(args.out, "ioeq.txt")
    _write_lines(path, lines)
    print(f"wrote {path} (L = {basis.L}, {basis.n_coeffs} coefficients)")
    return 0


def cmd_pseudo(args):
    model = load_model(args.model)
    basis = derive_io_basis(model)
    dataset = _generate_dataset(args, model, basis.L, basis.n_coeffs)
    path = os.path.join(args.out, "dataset.csv")
    write_dataset(path, dataset, header_comments=_metadata(args, model=args.model))
    print(f"wrote {path} ({len(dataset.times)} rows, jets to order {dataset.order})")
    return 0


def _solve_from_dataset(basis, dataset):
    matrix, rhs = build_linear_system(basis, dataset)
    return solve_coefficients(matrix, rhs)


def _branch_note(eq, names):
    """For a single-monomial constraint like a4*a5*a7 = 0, spell out the
    branch structure (each factor may vanish, leaving the others
    unconstrained by this equation)."""
    if len(eq.terms) != 1:
        return None
    exps = next(iter(eq.terms))
    factors = [names[i] for i, e in enumerate(exps) if e]
    if not factors:
        return None
    branches = " or ".join(f"{f} = 0" for f in factors)
    return (f"note: this constraint is a union of branches ({branches}); on "
            f"each branch the remaining factors are not constrained by it")


def cmd_variety(args):
    model = load_model(args.model)
    basis = derive_io_basis(model)
    meta_files = {"model": args.model}
    if args.data:
        dataset = read_dataset(args.data)
        meta_files["data"] = args.data
        if len(dataset.times) < basis.n_coeffs:
            raise InsufficientData(
                f"data must be measured for at least {basis.n_coeffs} time "
                f"points; {args.data} has {len(dataset.times)}")
        result = _solve_from_dataset(basis, dataset)
    else:
        params = _collect_params(args, model)
        x0 = _collect_x0(args, model, params)
        t0 = args.t0 if args.t0 is not None else model.horizon[0]
        if args.times:
            times = sorted(float(t) for t in args.times.split(","))
            dataset = make_dataset(model, params, x0, times, order=basis.L,
                                   t0=t0, method=args.method)
            result = _solve_from_dataset(basis, dataset)
        else:
            # random times, resampled while the system stays ill-conditioned
            rng = random.Random(args.seed)
            k = args.n_times or basis.n_coeffs
            last_exc = None
            for _ in range(10):
                span = model.horizon[1] - t0
                times = sorted(t0 + span * rng.random() for _ in range(k))
                try:
                    dataset = make_dataset(model, params, x0, times,
                                           order=basis.L, t0=t0,
                                           method=args.method)
                    result = _solve_from_dataset(basis, dataset)
                    break
                except IllConditioned as exc:
                    last_exc = exc
            else:
                raise IllConditioned(
                    f"no well-conditioned time sample found in 10 draws: "
                    f"{last_exc}")

    assumptions = list(model.assume_nonzero)
    # embed what we print: 10 significant digits, with solve noise below
    # the conditioning floor snapped to exact zero
    scale = max(1.0, max(abs(float(x)) for x in result.v))
    v_embed = [0.0 if abs(float(x)) <= 1e-10 * scale else float(f"{float(x):.10g}")
               for x in result.v]
    constraints = variety_constraints(basis, v_embed,
                                      assumptions=assumptions,
                                      residual=result.residual,
                                      cond=result.cond)
    psys = prolong(model, basis.L)
    rgb = reduce_basis(buchberger(psys.gens, psys.ring), psys.ring)
    report = run_extension_check(model, rgb)

    meta = _metadata(args, **meta_files)
    lines = [f"# {m}" for m in meta]
    lines.append(f"L = {basis.L}")
    lines.append(f"input-output equation: {basis.render()}")
    lines.append("coefficient values:")
    for i, v in enumerate(result.v, start=1):
        lines.append(f"  v{i} = {v:.10g}")
    lines.append(f"solve residual = {result.residual:.6g}, condition = {result.cond:.6g}")
    lines.append("variety constraints:")
    for eq in constraints.equations:
        lines.append(f"  {eq.render(model.params)} = 0")
        branch = _branch_note(eq, model.params)
        if branch:
            lines.append(f"  {branch}")
    unconstrained = [p for p in model.params
                     if p not in constraints.constraint_params()]
    if unconstrained:
        lines.append(f"parameters not constrained by the data: "
                     f"{', '.join(unconstrained)}")
    lines.append(report.render())
    path = os.path.join(args.out, "variety.txt")
    _write_lines(path, lines)

    doc = {
        "version": __version__,
        "seed": args.seed,
        "inputs": {k: _sha16(v) for k, v in meta_files.items()},
        "L": basis.L,
        "io_equation": basis.render(),
        "v": [float(x) for x in result.v],
        "residual": result.residual,
        "cond": result.cond,
        "equations": [eq.render(model.params) + " = 0"
                      for eq in constraints.equations],
        "assumptions": [a.render(model.params) + " != 0" for a in assumptions],
        "unconstrained": unconstrained,
        "extension": {
            "overall": report.overall,
            "entries": [
                {"j": e.index, "var": str(e.var),
                 "P": [p.render(model.params) for p in e.leading],
                 "verdict": e.verdict}
                for e in report.entries
            ],
        },
    }
    with open(os.path.join(args.out, "variety.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if args.samples:
        _emit_samples(args, model, constraints, meta)
    print(f"wrote {path} ({report.overall})")
    return 0


def _parse_ranges(text):
    ranges = {}
    for name, value in _parse_assignments(text, "--ranges").items():
        lo, _, hi = value.partition(":")
        ranges[name] = (float(lo), float(hi))
    return ranges


def _emit_samples(args, model, constraints, meta):
    if not args.ranges:
        raise ParamVarietyError("sampling needs --ranges name=lo:hi,...")
    ranges = _parse_ranges(args.ranges)
    free = [p.strip() for p in (args.free or "").split(",") if p.strip()]
    result = sample_variety(constraints, free, ranges, args.samples)
    cparams = constraints.constraint_params()
    path = os.path.join(args.out, "samples.csv")
    with open(path, "w", encoding="utf-8") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        fh.write(f"# skipped: {result.skipped}\n")
        fh.write(",".join(cparams) + "\n")
        for pt in result.points:
            fh.write(",".join(f"{pt[p]:.10g}" for p in cparams) + "\n")
    print(f"wrote {path} ({len(result.points)} points, {result.skipped} skipped)")
    for pair in (args.axes or "").split(","):
        pair = pair.strip()
        if not pair:
            continue
        px, _, py = pair.partition(":")
        if px not in cparams or py not in cparams:
            raise ParamVarietyError(f"--axes pair {pair!r} must name "
                                    f"constraint parameters {cparams}")
        svg_path = os.path.join(args.out, f"variety_{px}_{py}.svg")
        _write_svg(svg_path,
                   [pt[px] for pt in result.points],
                   [pt[py] for pt in result.points],
                   px, py, meta)
        print(f"wrote {svg_path}")


def cmd_extend(args):
    model = load_model(args.model)
    basis = derive_io_basis(model)
    psys = prolong(model, basis.L)
    rgb = reduce_basis(buchberger(psys.gens, psys.ring), psys.ring)
    report = run_extension_check(model, rgb)
    lines = [f"# {m}" for m in _metadata(args, model=args.model)]
    lines.append(report.render())
    path = os.path.join(args.out, "extension.txt")
    _write_lines(path, lines)
    print(f"wrote {path} ({report.overall})")
    return 0


def cmd_sample(args):
    model = load_model(args.model)
    basis = derive_io_basis(model)
    if args.data:
        dataset = read_dataset(args.data)
        result = _solve_from_dataset(basis, dataset)
        v = list(result.v)
    elif args.v:
        v = [x.strip() for x in args.v.split(",")]
        if len(v) != basis.n_coeffs:
            raise ParamVarietyError(
                f"--v needs {basis.n_coeffs} comma-separated values")
    else:
        raise ParamVarietyError("sample needs --data or --v")
    constraints = variety_constraints(basis, v,
                                      assumptions=model.assume_nonzero)
    meta = _metadata(args, model=args.model, data=args.data)
    _emit_samples(args, model, constraints, meta)
    return 0


# ---------------------------------------------------------------------------
# SVG scatter projections
# ---------------------------------------------------------------------------

def _write_svg(path, xs, ys, xlabel, ylabel, meta):
    w, h, m = 480, 360, 54
    if xs:
        xlo, xhi = min(xs), max(xs)
        ylo, yhi = min(ys), max(ys)
    else:
        xlo = ylo = 0.0
        xhi = yhi = 1.0
    if xhi - xlo < 1e-12:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi - ylo < 1e-12:
        ylo, yhi = ylo - 0.5, yhi + 0.5

    def sx(x):
        return m + (x - xlo) / (xhi - xlo) * (w - 2 * m)

    def sy(y):
        return h - m - (y - ylo) / (yhi - ylo) * (h - 2 * m)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             f'viewBox="0 0 {w} {h}">']
    for line in meta:
        parts.append(f"<!-- {line} -->")
    parts.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>')
    parts.append(f'<line x1="{m}" y1="{h - m}" x2="{w - m}" y2="{h - m}" '
                 'stroke="black"/>')
    parts.append(f'<line x1="{m}" y1="{m}" x2="{m}" y2="{h - m}" stroke="black"/>')
    parts.append(f'<text x="{w / 2:.6g}" y="{h - 14}" text-anchor="middle" '
                 f'font-size="13">{xlabel}</text>')
    parts.append(f'<text x="16" y="{h / 2:.6g}" text-anchor="middle" '
                 f'font-size="13" transform="rotate(-90 16 {h / 2:.6g})">'
                 f'{ylabel}</text>')
    parts.append(f'<text x="{m}" y="{h - m + 16}" font-size="11" '
                 f'text-anchor="middle">{xlo:.6g}</text>')
    parts.append(f'<text x="{w - m}" y="{h - m + 16}" font-size="11" '
                 f'text-anchor="middle">{xhi:.6g}</text>')
    parts.append(f'<text x="{m - 6}" y="{h - m + 4}" font-size="11" '
                 f'text-anchor="end">{ylo:.6g}</text>')
    parts.append(f'<text x="{m - 6}" y="{m + 4}" font-size="11" '
                 f'text-anchor="end">{yhi:.6g}</text>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.2" '
                     'fill="crimson"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="paramvariety",
        description="Input-output equations and parameter varieties of "
                    "polynomial state-space models.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, data=False, generation=False, sampling=False):
        p.add_argument("--model", required=True, help="model definition file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        if data:
            p.add_argument("--data", help="dataset CSV of measured jets")
        if generation:
            p.add_argument("--params", help="parameter values name=value,...")
            p.add_argument("--x0", help="initial state name=expr,... "
                                        "(expressions may use parameters)")
            p.add_argument("--times", help="comma-separated measurement times")
            p.add_argument("--n-times", type=int,
                           help="draw this many random times instead")
            p.add_argument("--t0", type=float,
                           help="initial time (default: horizon start)")
            p.add_argument("--method", default="symbolic",
                           choices=["symbolic", "exact-viral",
                                    "finite-difference"])
        if sampling:
            p.add_argument("--samples", type=int, default=0,
                           help="number of variety points to sample")
            p.add_argument("--free", help="free parameters, comma-separated")
            p.add_argument("--ranges", help="parameter ranges name=lo:hi,...")
            p.add_argument("--axes", help="SVG projections p:q,...")

    p = sub.add_parser("ioeq", help="derive the input-output equation")
    common(p)
    p.set_defaults(func=cmd_ioeq)

    p = sub.add_parser("pseudo", help="generate a pseudo-data CSV")
    common(p, generation=True)
    p.set_defaults(func=cmd_pseudo)

    p = sub.add_parser("variety", help="estimate the parameter variety")
    common(p, data=True, generation=True, sampling=True)
    p.set_defaults(func=cmd_variety)

    p = sub.add_parser("extend", help="run the extension check")
    common(p)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("sample", help="sample points on a known variety")
    common(p, data=True, sampling=True)
    p.add_argument("--v", help="coefficient values, comma-separated "
                               "(alternative to --data)")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        os.makedirs(args.out, exist_ok=True)
        return args.func(args)
    except ParamVarietyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotImplementedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
