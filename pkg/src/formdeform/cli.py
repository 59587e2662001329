"""Command line front end: ``python -m formdeform <command> ...``.

Every command emits one report.  JSON reports carry a versioned ``schema`` key,
exact numbers as ``"p/q"`` strings and a fixed key order, so output is
byte-for-byte reproducible.  ``FORMDEFORM_FORMAT`` sets the default format.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from dataclasses import dataclass, fields, is_dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import applications as app
from . import deformation as dfm
from . import modtools as mt
from . import sampling as smp
from .exterior import HomogeneousField, HomogeneousForm, StructuralError, render_field, render_form
from .operators import BlackBoxOperator, DiffOperator, NotOrderOneError, bracket_order_test, decompose
from .parsing import ParseError, parse_field, parse_form, parse_operator, parse_vv, render_operator
from .scalar_poly import fmt_scalar
from .vvforms import VectorValuedForm, render_vv

SCHEMA_VERSION = 1
FORMATS = ("json", "text", "csv")
ENV_FORMAT = "FORMDEFORM_FORMAT"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    n: Optional[int] = None
    format: str = "json"
    seed: int = 0
    preset: Optional[str] = None
    teo1: Optional[Tuple[int, int, Fraction]] = None
    a: Optional[int] = None
    generation: bool = False
    thresholds: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.n is not None and self.n < 1:
            raise UsageError("--n must be positive")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}; choose from {', '.join(FORMATS)}")
        if self.preset not in (None, "dd", "dt"):
            raise UsageError(f"unknown preset {self.preset!r}; choose dd or dt")
        if self.preset == "dt" and self.a is None:
            raise UsageError("preset dt needs --a (the weight of the operator)")

    def coefficients(self, n: int) -> dfm.ActionCoefficients:
        if self.preset == "dd":
            A = dfm.dd_coefficients()
        elif self.preset == "dt":
            A = dfm.dt_coefficients(self.a)
        elif self.teo1 is not None:
            A = dfm.teo1_coefficients(*self.teo1)
        else:
            raise UsageError("select coefficients with --preset or --teo1")
        if self.thresholds is not None:
            if len(self.thresholds) != n + 1:
                raise UsageError(f"--thresholds needs {n + 1} values")
            return A.with_thresholds(self.thresholds)
        return A.with_thresholds(dfm.min_truncation(A, n, self.generation))


# --------------------------------------------------------------------------
# serialization


def jsonable(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fmt_scalar(obj)
    if isinstance(obj, HomogeneousForm):
        return render_form(obj)
    if isinstance(obj, HomogeneousField):
        return render_field(obj)
    if isinstance(obj, VectorValuedForm):
        return render_vv(obj)
    if isinstance(obj, DiffOperator):
        return render_operator(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in fields(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def form_record(tau: HomogeneousForm) -> dict:
    return {
        "n": tau.n, "r": tau.r, "b": tau.b, "text": render_form(tau),
        "terms": [{"coef": fmt_scalar(v), "exponents": list(g), "dx": [i + 1 for i in idx]}
                  for (g, idx), v in tau.items()],
    }


def operator_record(D: DiffOperator) -> dict:
    return {"n": D.n, "q": D.q, "a": D.a, "K": render_vv(D.K), "L": render_vv(D.L),
            "mu": render_form(D.mu), "text": render_operator(D)}


def _flatten(prefix: str, obj, out: List[Tuple[str, str]]):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append((prefix, "" if obj is None else str(obj).lower() if isinstance(obj, bool) else str(obj)))


def emit(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    rows = report.get("rows")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if isinstance(rows, list) and rows and all(isinstance(r, dict) for r in rows):
            cols = list(dict.fromkeys(k for r in rows for k in r))
            w.writerow(cols)
            for r in rows:
                w.writerow([_cell(r.get(c)) for c in cols])
        else:
            flat: List[Tuple[str, str]] = []
            _flatten("", report, flat)
            w.writerow(["key", "value"])
            w.writerows(flat)
        return buf.getvalue()
    flat = []
    _flatten("", {k: v for k, v in report.items() if k != "rows"}, flat)
    lines = [f"{k}: {v}" for k, v in flat]
    if isinstance(rows, list) and rows:
        cols = list(dict.fromkeys(k for r in rows for k in r))
        table = [cols] + [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
        lines += ["  ".join(cell.rjust(wd) for cell, wd in zip(row, widths)) for row in table]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


# --------------------------------------------------------------------------
# argument helpers


def read_arg(value: str) -> str:
    """``@path`` reads an expression from a file."""
    if value.startswith("@"):
        return Path(value[1:]).read_text().strip()
    return value


def parse_range(text: str) -> List[int]:
    """``3``, ``1..8`` (inclusive) or ``1,3,5``."""
    out: List[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad range {text!r}; use 3, 1..8 or 1,3,5") from None
    return out


def parse_teo1(text: str) -> Tuple[int, int, Fraction]:
    try:
        q, a, t = text.split(",")
        return int(q), int(a), Fraction(t.strip())
    except ValueError:
        raise UsageError(f"bad --teo1 {text!r}; use q,a,t such as 2,2,1/2") from None


def _operator(args, n: Optional[int]) -> DiffOperator:
    if getattr(args, "idop", None):
        return parse_operator(read_arg(args.idop), n)
    if getattr(args, "omega", None):
        return app.omega_triangle_operator(parse_form(read_arg(args.omega), n))
    if getattr(args, "op", None):
        return parse_operator(read_arg(args.op), n)
    raise UsageError("give the operator with --op, --idop or --omega")


def _need_n(args, cfg: RunConfig) -> int:
    if cfg.n is None:
        raise UsageError(f"{args.command} needs --n")
    return cfg.n


def _header(command: str, cfg: RunConfig, **extra) -> dict:
    out = {"schema": f"formdeform.{command}/{SCHEMA_VERSION}"}
    out.update(extra)
    return out


def _coeff_record(A: dfm.ActionCoefficients) -> dict:
    out = A.describe()
    out["thresholds"] = list(A.thresholds) if A.thresholds is not None else None
    return out


def _failure_record(cx) -> Optional[dict]:
    if cx is None:
        return None
    rec = {}
    for f in fields(cx):
        rec[f.name] = jsonable(getattr(cx, f.name))
    rec["residual"] = render_form(cx.residual)
    return rec


# --------------------------------------------------------------------------
# commands; each returns (exit status, report)

Report = Tuple[int, dict]


def cmd_parse(args, cfg: RunConfig) -> Report:
    text = read_arg(args.expr)
    kind = args.kind
    if kind == "form":
        tau = parse_form(text, cfg.n)
        return 0, _header("parse", cfg, kind="form", **form_record(tau))
    if kind == "field":
        X = parse_field(text, cfg.n)
        return 0, _header("parse", cfg, kind="field", n=X.n, weight=X.weight, text=render_field(X))
    if kind == "vv":
        L = parse_vv(text, cfg.n)
        return 0, _header("parse", cfg, kind="vv", n=L.n, degree=L.degree, weight=L.weight, text=render_vv(L))
    D = parse_operator(text, cfg.n)
    return 0, _header("parse", cfg, kind="operator", **operator_record(D))


def cmd_apply(args, cfg: RunConfig) -> Report:
    D = _operator(args, cfg.n)
    tau = parse_form(read_arg(args.form), D.n)
    out = D(tau)
    return 0, _header("apply", cfg, operator=render_operator(D), input=render_form(tau),
                      output=form_record(out))


def cmd_decompose(args, cfg: RunConfig) -> Report:
    D = _operator(args, cfg.n)
    r_max = D.n if args.max_r is None else args.max_r
    box = BlackBoxOperator.of(D, r_max, args.max_b)
    report = _header("decompose", cfg)
    try:
        rec = decompose(box)
    except NotOrderOneError as exc:
        report.update(order_one=False, error=str(exc))
        return 1, report
    report.update(order_one=True, operator=operator_record(rec), matches_input=rec == D)
    if args.order_test:
        res = bracket_order_test(box, min(args.order_weight, args.max_b), r_max)
        report["order_test"] = {"passed": res.passed, "witness": jsonable(res.witness)}
    return 0, report


def _bounds(args, n: int) -> dfm.Bounds:
    return dfm.Bounds(n if args.max_r is None else args.max_r, args.max_b, args.max_c)


def cmd_linearize(args, cfg: RunConfig) -> Report:
    D = _operator(args, cfg.n)
    if D.family is None:
        raise UsageError("linearize needs an operator of the Id family (--idop or --omega)")
    bounds = None
    if args.max_b is not None:
        bounds = dfm.Bounds(D.n if args.max_r is None else args.max_r, args.max_b, args.max_c)
    rep = dfm.classify(D, bounds)
    out = _header("linearize", cfg, operator=operator_record(D), linearizable=rep.linearizable,
                  q=rep.q, a=rep.a, t=jsonable(rep.t), t1=jsonable(rep.t1),
                  normal_form={"w1": render_form(rep.w1), "w2": render_form(rep.w2), "mu": render_form(rep.mu)},
                  residuals={"w1_exact": render_form(rep.w1_exact), "w2": render_form(rep.w2_residual),
                             "mu": render_form(rep.mu_residual)},
                  reasons=rep.reasons)
    if rep.coefficients is not None:
        A = rep.coefficients
        if not A.trivial:
            A = A.with_thresholds(dfm.min_truncation(A, D.n))
        out["coefficients"] = _coeff_record(A)
        if args.verify:
            b = bounds or dfm.default_bounds(A, D.n)
            res = dfm.verify_linearity(D, A, b)
            out["verification"] = {"passed": res.passed, "checked": res.checked,
                                   "counterexample": _failure_record(res.counterexample)}
    else:
        out["counterexample"] = _failure_record(rep.counterexample)
    return 0, out


def cmd_check_linearity(args, cfg: RunConfig) -> Report:
    if args.op or args.idop or args.omega:
        D = _operator(args, cfg.n)
        n = D.n
    else:
        n = _need_n(args, cfg)
        if cfg.preset != "dd":
            raise UsageError("without an operator only the dd preset has a default (d)")
        D = parse_operator("d", n)
    A = cfg.coefficients(n)
    res = dfm.verify_linearity(D, A, _bounds(args, n))
    return (0 if res.passed else 1), _header(
        "check-linearity", cfg, operator=render_operator(D), coefficients=_coeff_record(A),
        bounds={"r_max": _bounds(args, n).r_max, "b_max": args.max_b, "c_max": args.max_c},
        passed=res.passed, checked=res.checked, counterexample=_failure_record(res.counterexample))


def cmd_check_associativity(args, cfg: RunConfig) -> Report:
    n = _need_n(args, cfg)
    A = cfg.coefficients(n)
    b = _bounds(args, n)
    res = dfm.verify_associativity(A, n, b)
    return (0 if res.passed else 1), _header(
        "check-associativity", cfg, n=n, coefficients=_coeff_record(A),
        bounds={"r_max": b.r_max, "b_max": b.b_max, "c_max": b.c_max},
        passed=res.passed, checked=res.checked, counterexample=_failure_record(res.counterexample))


def _named_op(args, cfg: RunConfig) -> DiffOperator:
    n = cfg.n
    text = read_arg(args.op) if args.op else None
    if text in ("d", "deg") and n is None:
        raise UsageError(f"--op {text} needs --n")
    return _operator(args, n)


def cmd_hilbert(args, cfg: RunConfig) -> Report:
    D = _named_op(args, cfg)
    A = cfg.coefficients(D.n) if (cfg.preset or cfg.teo1) else None
    table = mt.kernel_dims(D, args.r, parse_range(args.weights), A)
    return 0, _header("hilbert", cfg, operator=render_operator(D), r=args.r,
                      coefficients=_coeff_record(A) if A else None, rows=table.to_json())


def cmd_generators(args, cfg: RunConfig) -> Report:
    D = _named_op(args, cfg)
    A = cfg.coefficients(D.n)
    V = {"kernel": mt.kernel_subspace(D, args.r), "image": mt.image_subspace(D, args.r),
         "full": mt.full_subspace(D.n, args.r)}[args.subspace]
    table = mt.generator_degrees(V, A, D.n, args.r, parse_range(args.weights))
    return 0, _header("generators", cfg, operator=render_operator(D), subspace=args.subspace, r=args.r,
                      coefficients=_coeff_record(A), rows=table.to_json())


def cmd_reduce(args, cfg: RunConfig) -> Report:
    tau = parse_form(read_arg(args.form), cfg.n)
    cfg.generation = True if cfg.thresholds is None else cfg.generation
    A = cfg.coefficients(tau.n)
    cert = mt.reduce_degree(tau, A)
    steps = [{"coef": fmt_scalar(c), "variable": f"x{k + 1}", "source": render_form(src)}
             for c, k, src in cert.steps]
    return (0 if cert.exact else 1), _header(
        "reduce", cfg, target=form_record(tau), coefficients=_coeff_record(A), steps=steps,
        residual=render_form(cert.residual), exact=cert.exact)


def cmd_generation(args, cfg: RunConfig) -> Report:
    n = _need_n(args, cfg)
    cfg.generation = True if cfg.thresholds is None else cfg.generation
    A = cfg.coefficients(n)
    rows = []
    status = 0
    for r in parse_range(args.r):
        res = mt.generation_check(r, A, n, args.depth)
        status |= 0 if res.passed else 1
        rows.append({"r": r, "passed": res.passed, "certificates": res.certificates,
                     "witness": jsonable(res.witness)})
    return status, _header("generation", cfg, n=n, coefficients=_coeff_record(A), depth=args.depth, rows=rows)


def _omega(args, cfg: RunConfig) -> app.IntegrableOneForm:
    return app.IntegrableOneForm(parse_form(read_arg(args.omega), cfg.n))


def cmd_complex(args, cfg: RunConfig) -> Report:
    w = _omega(args, cfg)
    cx = app.build_complex(w, parse_range(args.weights))
    labels = ["T" if p == "T" else f"Omega^{p}" for p in cx.positions()]
    rows = []
    for k in cx.weights:
        rows.append({"weight": k, "dims": cx.dims(k), "ranks": cx.ranks(k), "homology": cx.homology(k)})
    return 0, _header("complex", cfg, omega=render_form(w.omega), n=w.n, e=w.weight, positions=labels,
                      squares_vanish=True, rows=rows)


def cmd_phi(args, cfg: RunConfig) -> Report:
    w = _omega(args, cfg)
    verdict = parse_range(args.verdict) if args.verdict else None
    table = app.phi_omega(w, parse_range(args.weights), verdict)
    return 0, _header("phi", cfg, omega=render_form(w.omega), n=w.n, e=w.weight, rows=table.to_json())


def cmd_sample(args, cfg: RunConfig) -> Report:
    n = _need_n(args, cfg)
    rng = random.Random(cfg.seed)
    if args.kind == "form":
        items = [render_form(smp.random_form(rng, n, args.r, args.b)) for _ in range(args.count)]
    else:
        items = [render_operator(smp.random_operator(rng, n, args.b)) for _ in range(args.count)]
    return 0, _header("sample", cfg, n=n, seed=cfg.seed, kind=args.kind, items=items)


COMMANDS: Dict[str, Callable] = {
    "parse": cmd_parse, "apply": cmd_apply, "decompose": cmd_decompose, "linearize": cmd_linearize,
    "check-linearity": cmd_check_linearity, "check-associativity": cmd_check_associativity,
    "hilbert": cmd_hilbert, "generators": cmd_generators, "reduce": cmd_reduce,
    "generation": cmd_generation, "complex": cmd_complex, "phi": cmd_phi, "sample": cmd_sample,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of variables (inferred from the input if omitted)")
    common.add_argument("--format", choices=FORMATS, help=f"output format (default from ${ENV_FORMAT}, else json)")
    common.add_argument("--seed", type=int, default=0)
    coeff = argparse.ArgumentParser(add_help=False)
    coeff.add_argument("--preset", choices=("dd", "dt"))
    coeff.add_argument("--teo1", help="closed-form coefficients q,a,t")
    coeff.add_argument("--a", type=int, help="operator weight for the dt preset")
    coeff.add_argument("--thresholds", help="comma-separated n_0,...,n_n")
    coeff.add_argument("--generation", action="store_true", help="raise thresholds for generator reduction")
    opsel = argparse.ArgumentParser(add_help=False)
    opsel.add_argument("--op", help="operator expression or @file")
    opsel.add_argument("--idop", help="q=..,a=..,w1=..,w2=..,mu=.. or @file")
    opsel.add_argument("--omega", help="integrable 1-form; selects its triangle operator")
    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument("--max-r", type=int)
    bounds.add_argument("--max-b", type=int, default=4)
    bounds.add_argument("--max-c", type=int, default=1)

    p = _Parser(prog="formdeform", description="Exact computations with polynomial differential forms.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("parse", parents=[common])
    s.add_argument("expr")
    s.add_argument("--kind", choices=("form", "field", "vv", "op"), default="form")

    s = sub.add_parser("apply", parents=[common, opsel])
    s.add_argument("--form", required=True)

    s = sub.add_parser("decompose", parents=[common, opsel])
    s.add_argument("--max-r", type=int)
    s.add_argument("--max-b", type=int, default=3)
    s.add_argument("--order-test", action="store_true")
    s.add_argument("--order-weight", type=int, default=2)

    s = sub.add_parser("linearize", parents=[common, opsel])
    s.add_argument("--max-r", type=int)
    s.add_argument("--max-b", type=int)
    s.add_argument("--max-c", type=int, default=1)
    s.add_argument("--verify", action="store_true")

    sub.add_parser("check-linearity", parents=[common, coeff, opsel, bounds])
    sub.add_parser("check-associativity", parents=[common, coeff, bounds])

    for name in ("hilbert", "generators"):
        s = sub.add_parser(name, parents=[common, coeff, opsel])
        s.add_argument("--r", type=int, required=True)
        s.add_argument("--weights", required=True)
        if name == "generators":
            s.add_argument("--subspace", choices=("kernel", "image", "full"), default="kernel")

    s = sub.add_parser("reduce", parents=[common, coeff])
    s.add_argument("--form", required=True)

    s = sub.add_parser("generation", parents=[common, coeff])
    s.add_argument("--r", default="1")
    s.add_argument("--depth", type=int, default=3)

    for name in ("complex", "phi"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--omega", required=True)
        s.add_argument("--weights", default="1..6")
        if name == "phi":
            s.add_argument("--verdict", help="weights for which to state a regularity verdict")

    s = sub.add_parser("sample", parents=[common])
    s.add_argument("--kind", choices=("form", "op"), default="form")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--b", type=int, default=2, help="weight of a form, or the weight bound of an operator")
    s.add_argument("--count", type=int, default=5)
    return p


def _config(args, env) -> RunConfig:
    fmt = args.format or env.get(ENV_FORMAT) or "json"
    th = getattr(args, "thresholds", None)
    teo1 = getattr(args, "teo1", None)
    return RunConfig(
        n=args.n, format=fmt, seed=args.seed, preset=getattr(args, "preset", None),
        teo1=parse_teo1(teo1) if teo1 else None, a=getattr(args, "a", None),
        generation=getattr(args, "generation", False),
        thresholds=tuple(parse_range(th)) if th else None)


_EXPECTED = (ParseError, UsageError, StructuralError, mt.ReductionUnavailable, mt.NotASubmoduleError,
             app.InvariantViolation, dfm.TruncationError, dfm.CoefficientDomainError, OSError)


def _error_report(exc: Exception) -> dict:
    err = {"type": type(exc).__name__, "message": getattr(exc, "message", str(exc))}
    if isinstance(exc, ParseError) and exc.line:
        err.update(line=exc.line, column=exc.column)
    return {"schema": f"formdeform.error/{SCHEMA_VERSION}", "error": err}


def run_command(argv: Sequence[str], env: Optional[dict] = None) -> Tuple[int, str]:
    """Run one command and return ``(exit status, emitted text)``."""
    env = os.environ if env is None else env
    fmt = "json"
    try:
        args = build_parser().parse_args(list(argv))
        cfg = _config(args, env)
        fmt = cfg.format
        status, report = COMMANDS[args.command](args, cfg)
        return status, emit(jsonable(report), fmt)
    except _EXPECTED as exc:
        return 2, emit(_error_report(exc), "json" if fmt == "csv" else fmt)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        build_parser().parse_args(list(argv))
        return 0
    status, text = run_command(argv)
    sys.stdout.write(text)
    return status
