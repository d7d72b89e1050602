"""Batch command line front-end.

Three subcommands, one JSON problem file each:

    asympint expand <file> [--order L] [--seed "x=...,y=..."]
    asympint verify <file> [--order L] [--tol t] [--csv out.csv]
    asympint genfun <file>

expand prints the per-point coefficient tables, verify compares partial
sums against the quadrature oracle over a lambda ladder and emits CSV
convergence data, genfun tabulates exact generating-function
coefficients against the saddle point prediction.

Exit codes: 0 success, 1 embedded expectations failed, 2 problem file or
expression error, 3 degenerate or unsupported stationary configuration,
4 no stationary point in the domain, 5 quadrature budget exhausted
(partial report emitted).

All floats are printed with 12 significant digits and all iteration
orders are fixed, so a given problem file produces byte-identical
output on every run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .errors import (
    BoundaryRegimeError,
    BudgetExceededError,
    DegenerateHessianError,
    DomainError,
    NoStationaryPointError,
    ParseError,
)
from .expansion import (
    Domain,
    Expansion,
    evaluate_partial_sum,
    expand_integral,
)
from .genfun import (
    GenFunProblem,
    boundary_limit,
    derivative_rates,
    exact_coefficients,
    face_scaling_u,
    saddle_prediction,
)
from .parser import compile_program, parse
from .quadrature import decay_slope, integrate

_VERIFY_MAX_N = 3


class _ProblemFileError(Exception):
    pass


def _g(x):
    return f"{float(x):.12g}"


def _c(z):
    z = complex(z)
    sign = "+" if z.imag >= 0 or z.imag != z.imag else "-"
    return f"{_g(z.real)} {sign} {_g(abs(z.imag))}i"


def _fail(message):
    raise _ProblemFileError(message)


def _need(problem, key, kind, what):
    if key not in problem:
        _fail(f"problem file is missing the '{key}' field")
    value = problem[key]
    if not isinstance(value, kind):
        _fail(f"'{key}' must be {what}")
    return value


def _load_problem(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail(f"{path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        _fail(f"{path} must hold a JSON object")
    return data


def _parse_seed_option(text, names):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    values = {}
    for part in parts:
        if "=" not in part:
            _fail(f"--seed entries must look like name=value, got '{part}'")
        name, _, raw = part.partition("=")
        name = name.strip()
        if name not in names:
            _fail(f"--seed names an unknown variable '{name}'")
        try:
            values[name] = float(raw)
        except ValueError:
            _fail(f"--seed value for '{name}' is not a number: '{raw}'")
    missing = [n for n in names if n not in values]
    if missing:
        _fail(f"--seed is missing values for: {', '.join(missing)}")
    return tuple(values[n] for n in names)


def _load_expansion_problem(problem, args):
    dim = _need(problem, "dimension", int, "an integer")
    if dim < 1:
        _fail("'dimension' must be at least 1")
    names = _need(problem, "variables", list, "a list of names")
    if len(names) != dim or not all(isinstance(n, str) for n in names):
        _fail("'variables' must list one name per dimension")
    phase_text = _need(problem, "phase", str, "an expression string")
    amp_text = problem.get("amplitude", "1")
    if not isinstance(amp_text, str):
        _fail("'amplitude' must be an expression string")
    dom_field = _need(problem, "domain", dict, "an object")
    kind = dom_field.get("kind", "box")
    bounds = dom_field.get("bounds")
    if not isinstance(bounds, list) or len(bounds) != dim:
        _fail("'domain.bounds' must list one [lo, hi] pair per dimension")
    try:
        dom = Domain(kind, tuple(tuple(b) for b in bounds))
    except (TypeError, ValueError) as exc:
        _fail(f"bad domain: {exc}")
    order = args.order if args.order is not None else problem.get("order", 4)
    if not isinstance(order, int) or order < 0:
        _fail("'order' must be a non-negative integer")
    seeds = []
    for s in problem.get("seeds", []):
        if not isinstance(s, list) or len(s) != dim:
            _fail("'seeds' entries must list one coordinate per dimension")
        seeds.append(tuple(float(v) for v in s))
    if getattr(args, "seed", None):
        for text in args.seed:
            seeds.append(_parse_seed_option(text, names))
    phi = parse(phase_text, dim, tuple(names))
    amp = parse(amp_text, dim, tuple(names))
    return {
        "dim": dim,
        "names": tuple(names),
        "phase_text": phase_text,
        "amp_text": amp_text,
        "phi": phi,
        "amp": amp,
        "dom": dom,
        "order": order,
        "seeds": seeds or None,
    }


def _describe_domain(dom):
    body = " x ".join(f"[{_g(lo)}, {_g(hi)}]" for lo, hi in dom.bounds)
    return f"{dom.kind} {body}"


def _point_location(names, location):
    coords = ", ".join(f"{n} = {_g(z.real)}" for n, z in zip(names, location))
    return coords


def _apply_overrides(expansion, overrides):
    per_point = [list(cl) for _, cl in expansion.per_point_breakdown]
    for o in overrides:
        idx = o.get("point", 0)
        l = o.get("l", 0)
        if not 0 <= idx < len(per_point) or not 0 <= l < len(per_point[idx]):
            _fail("'coefficient_overrides' entry out of range")
        per_point[idx][l] = complex(o.get("re", 0.0), o.get("im", 0.0))
    reports = [r for r, _ in expansion.per_point_breakdown]
    terms = tuple(
        (l, sum(cl[l] for cl in per_point))
        for l in range(len(per_point[0]))
    )
    return Expansion(
        d=expansion.d,
        terms=terms,
        per_point_breakdown=tuple(
            (r, tuple(cl)) for r, cl in zip(reports, per_point)
        ),
        phase_prefactors=expansion.phase_prefactors,
    )


def _expansion_report_lines(prepared, expansion):
    lines = []
    lines.append(f"phase: {prepared['phase_text']}")
    lines.append(f"amplitude: {prepared['amp_text']}")
    lines.append(f"domain: {_describe_domain(prepared['dom'])}")
    lines.append(f"order: {prepared['order']}")
    points = expansion.per_point_breakdown
    lines.append(f"stationary points: {len(points)}")
    d = expansion.d
    for i, (report, coeffs) in enumerate(points, start=1):
        where = "face" if report.boundary_half else "interior"
        lines.append("")
        lines.append(
            f"point {i} ({where}): {_point_location(prepared['names'], report.location)}"
        )
        lines.append(f"  phi at point: {_c(report.phi_value)}")
        lines.append(
            f"  gradient residual: {_g(report.gradient_residual)}"
        )
        if report.boundary_half:
            axis = prepared["names"][report.face_axis]
            side = "lower" if report.face_inward_sign > 0 else "upper"
            lines.append(f"  boundary: {side} {axis}-face (half-space factor 1/2)")
        for l, c in enumerate(coeffs):
            power = _g((d + l) / 2.0)
            lines.append(f"  c_{l} = {_c(c)}   * lambda^-{power}")
    return lines


def _check_expand_expectations(expect, expansion):
    failures = []
    if "points" in expect:
        have = len(expansion.per_point_breakdown)
        if have != expect["points"]:
            failures.append(
                f"expected {expect['points']} stationary points, found {have}"
            )
    for item in expect.get("coefficients", []):
        l = item.get("l", 0)
        want = complex(item.get("re", 0.0), item.get("im", 0.0))
        tol = float(item.get("tol", 1e-9))
        got = dict(expansion.terms).get(l)
        if got is None:
            failures.append(f"no coefficient with index {l}")
        elif abs(got - want) > tol:
            failures.append(
                f"c_{l} = {_c(got)} differs from expected {_c(want)} "
                f"by more than {_g(tol)}"
            )
    return failures


def cmd_expand(args):
    problem = _load_problem(args.file)
    prepared = _load_expansion_problem(problem, args)
    expansion = expand_integral(
        prepared["phi"], prepared["amp"], prepared["dom"], prepared["order"], seeds=prepared["seeds"]
    )
    lines = _expansion_report_lines(prepared, expansion)
    failures = _check_expand_expectations(
        problem.get("expectations", {}), expansion
    )
    lines.append("")
    if failures:
        for f in failures:
            lines.append(f"expectation FAILED: {f}")
    else:
        lines.append("expectations: ok" if problem.get("expectations")
                     else "expectations: none")
    print("\n".join(lines))
    return 1 if failures else 0


def cmd_verify(args):
    problem = _load_problem(args.file)
    prepared = _load_expansion_problem(problem, args)
    lams = problem.get("lambdas")
    if not isinstance(lams, list) or not lams:
        _fail("'lambdas' must be a non-empty list for verify")
    lams = [float(l) for l in lams]
    if any(l <= 0 for l in lams):
        _fail("'lambdas' must be positive")
    tol = args.tol if args.tol is not None else problem.get(
        "quadrature_tol", 1e-10
    )
    tol = float(tol)
    budget = int(problem.get("quadrature_budget", 10_000_000))

    expansion = expand_integral(
        prepared["phi"], prepared["amp"], prepared["dom"], prepared["order"], seeds=prepared["seeds"]
    )
    overrides = problem.get("coefficient_overrides", [])
    if overrides:
        expansion = _apply_overrides(expansion, overrides)

    d = prepared["dim"]
    phi_f = compile_program(prepared["phi"], d)
    amp_f = compile_program(prepared["amp"], d)
    quads = {}
    budget_hit = False
    for lam in lams:
        q = integrate(phi_f, amp_f, prepared["dom"], lam, tol=tol, budget=budget)
        quads[lam] = q
        budget_hit = budget_hit or q.budget_exceeded

    n_values = list(range(1, min(_VERIFY_MAX_N, prepared["order"] + 1) + 1))
    rows = []
    slopes = {}
    for n in n_values:
        above_floor = []
        for lam in lams:
            q = quads[lam]
            p = evaluate_partial_sum(expansion, lam, n)
            err = abs(q.value - p)
            rows.append((lam, n, q.value, p, err))
            if err > max(10.0 * q.abs_error_estimate, 1e-14):
                above_floor.append((lam, err))
        if len(above_floor) >= 3:
            slopes[n] = (decay_slope(above_floor), "fit")
        elif above_floor:
            # remainder collapses below the quadrature floor inside the
            # ladder: faster than any measurable power
            slopes[n] = (None, "collapsed")
        else:
            slopes[n] = (None, "floor")

    lines = []
    lines.append(f"phase: {prepared['phase_text']}")
    lines.append(f"amplitude: {prepared['amp_text']}")
    lines.append(f"domain: {_describe_domain(prepared['dom'])}")
    lines.append(f"order: {prepared['order']}")
    lines.append(f"lambda ladder: {', '.join(_g(l) for l in lams)}")
    lines.append("")
    for lam, n, qv, pv, err in rows:
        lines.append(
            f"lambda = {_g(lam)}  N = {n}  quadrature = {_c(qv)}  "
            f"partial sum = {_c(pv)}  |error| = {_g(err)}"
        )
    lines.append("")
    all_pass = True
    for n in n_values:
        slope, how = slopes[n]
        threshold = -(d + n) / 2.0 + 0.15
        if how == "floor":
            verdict = "PASS"
            detail = "error at quadrature floor"
        elif how == "collapsed":
            verdict = "PASS"
            detail = "error reaches the quadrature floor within the ladder"
        else:
            ok = slope <= threshold
            verdict = "PASS" if ok else "FAIL"
            detail = f"slope {_g(slope)} vs threshold {_g(threshold)}"
            all_pass = all_pass and ok
        lines.append(f"N = {n}: {verdict} ({detail})")
    if budget_hit:
        lines.append("")
        lines.append("warning: quadrature budget exhausted, report is partial")

    csv_path = args.csv or problem.get("csv")
    if csv_path:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "lambda", "N", "quadrature_re", "quadrature_im",
                "partial_sum_re", "partial_sum_im", "abs_error",
                "fitted_slope_per_N",
            ])
            for lam, n, qv, pv, err in rows:
                slope = slopes[n][0]
                slope_text = "" if slope is None else _g(slope)
                writer.writerow([
                    _g(lam), n, _g(qv.real), _g(qv.imag),
                    _g(pv.real), _g(pv.imag), _g(err), slope_text,
                ])
        lines.append("")
        lines.append(f"csv written: {csv_path}")

    expect = problem.get("expectations", {})
    failures = []
    if expect.get("slopes_pass") and not all_pass:
        failures.append("slope checks were expected to pass")
    if expect.get("slopes_fail") and all_pass:
        failures.append("slope checks were expected to fail")
    lines.append("")
    if failures:
        for f in failures:
            lines.append(f"expectation FAILED: {f}")
    else:
        lines.append("expectations: ok" if expect else "expectations: none")
    print("\n".join(lines))
    if budget_hit:
        return 5
    return 1 if failures else 0


def cmd_genfun(args):
    problem = _load_problem(args.file)
    v1_text = _need(problem, "v1", str, "an expression string")
    v2_text = _need(problem, "v2", str, "an expression string")
    varname = problem.get("variable", "z")
    kappas = problem.get("kappa")
    if isinstance(kappas, (int, float)):
        kappas = [kappas]
    if not isinstance(kappas, list) or not kappas:
        _fail("'kappa' must be a number or non-empty list")
    kappas = [float(k) for k in kappas]
    s_values = problem.get("s")
    if not isinstance(s_values, list) or not s_values:
        _fail("'s' must be a non-empty list of integers")
    s_values = [int(s) for s in s_values]
    if any(s <= 0 for s in s_values):
        _fail("'s' entries must be positive")

    try:
        v1 = parse(v1_text, 1, (varname,))
        v2 = parse(v2_text, 1, (varname,))
    except ParseError:
        raise
    base = GenFunProblem(v1, v2, max(kappas), series_order=0)
    d1, d2 = derivative_rates(base)
    if abs(d1 - d2) <= 1e-12 * max(1.0, abs(d1), abs(d2)):
        raise ValueError(
            "v1'(1) = v2'(1): coefficient direction interval is empty"
        )
    delta = abs(d1 - d2)

    s_max = max(s_values)
    r_max = max(round(k * s_max) for k in kappas) + 1
    table = exact_coefficients(base, r_max, s_max)

    lines = []
    lines.append(f"v1: {v1_text}")
    lines.append(f"v2: {v2_text}")
    lines.append(f"rates: v1'(1) = {_g(d1)}, v2'(1) = {_g(d2)}")
    lines.append(f"|v1'(1) - v2'(1)| = {_g(delta)}")
    for kappa in kappas:
        lines.append("")
        lines.append(f"kappa = {_g(kappa)}")
        p = GenFunProblem(v1, v2, kappa)
        try:
            pred = saddle_prediction(p)
            lines.append(
                f"  interior direction: prediction 1/|dv| = {_g(pred)}"
            )
            expected = pred * delta
        except BoundaryRegimeError:
            lines.append("  boundary direction: kappa is at or beyond a face "
                         "rate, interior formula does not apply")
            limit = boundary_limit(p, 0.0)
            lines.append(
                f"  Gaussian boundary limit at u = 0: {_g(limit)} "
                f"(ratio 0.5)"
            )
            face = 1 if abs(kappa - d1) <= abs(kappa - d2) else 2
            try:
                face_scaling_u(p, face, round(kappa * s_values[0]),
                               s_values[0])
                lines.append(
                    f"  face of v{face} is stochastic: ratios follow Phi(u)"
                )
                expected = 0.5
            except ValueError:
                lines.append(
                    f"  face of v{face} is deterministic (zero variance): "
                    "ratio limit is a lattice constant, not 1/2"
                )
                expected = None
        lines.append("  s      r      a_rs              ratio a_rs*|dv|")
        for s in s_values:
            r = round(kappa * s)
            a = table.a[r, s].real
            ratio = a * delta
            lines.append(
                f"  {s:<6d} {r:<6d} {_g(a):<17s} {_g(ratio)}"
            )
        if expected is not None:
            last = round(kappa * s_values[-1])
            ratio = table.a[last, s_values[-1]].real * delta
            lines.append(
                f"  deviation at s = {s_values[-1]}: "
                f"{_g(abs(ratio - expected))}"
            )

    expect = problem.get("expectations", {})
    failures = []
    for item in expect.get("predictions", []):
        kappa = float(item["kappa"])
        want = float(item["value"])
        tol = float(item.get("tol", 1e-9))
        got = saddle_prediction(GenFunProblem(v1, v2, kappa))
        if abs(got - want) > tol:
            failures.append(
                f"prediction at kappa = {_g(kappa)} is {_g(got)}, "
                f"expected {_g(want)}"
            )
    for item in expect.get("ratios", []):
        s = int(item["s"])
        r = int(item.get("r", round(float(item["kappa"]) * s)))
        want = float(item["value"])
        tol = float(item.get("tol", 1e-6))
        got = table.a[r, s].real * delta
        if abs(got - want) > tol:
            failures.append(
                f"ratio at (r, s) = ({r}, {s}) is {_g(got)}, "
                f"expected {_g(want)}"
            )
    lines.append("")
    if failures:
        for f in failures:
            lines.append(f"expectation FAILED: {f}")
    else:
        lines.append("expectations: ok" if expect else "expectations: none")
    print("\n".join(lines))
    return 1 if failures else 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="asympint",
        description="saddle point expansions of exponential integrals, "
                    "with quadrature verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_expand = sub.add_parser("expand", help="print expansion coefficients")
    p_expand.add_argument("file", help="JSON problem file")
    p_expand.add_argument("--order", type=int, default=None,
                          help="override the expansion order")
    p_expand.add_argument("--seed", action="append", default=None,
                          metavar="x=...,y=...",
                          help="extra Newton seed (repeatable)")
    p_expand.set_defaults(func=cmd_expand)

    p_verify = sub.add_parser(
        "verify", help="compare partial sums against quadrature"
    )
    p_verify.add_argument("file", help="JSON problem file")
    p_verify.add_argument("--order", type=int, default=None,
                          help="override the expansion order")
    p_verify.add_argument("--tol", type=float, default=None,
                          help="quadrature tolerance")
    p_verify.add_argument("--seed", action="append", default=None,
                          metavar="x=...,y=...",
                          help="extra Newton seed (repeatable)")
    p_verify.add_argument("--csv", default=None,
                          help="write convergence rows to this CSV file")
    p_verify.set_defaults(func=cmd_verify)

    p_genfun = sub.add_parser(
        "genfun", help="generating function coefficient asymptotics"
    )
    p_genfun.add_argument("file", help="JSON problem file")
    p_genfun.set_defaults(func=cmd_genfun)
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: expression does not parse: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateHessianError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NoStationaryPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    raise SystemExit(main())
