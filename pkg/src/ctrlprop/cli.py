"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (not equal, failed check),
2 parse or usage error, 3 dialect/type/arity error, 4 size cap or step
budget exceeded.
"""

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

from . import multicontrol as mc
from .diagram import Dialect, Phase, validate_dialect, wires
from .errors import (
    ArityMismatch,
    CapExceeded,
    DiagramTypeError,
    DialectError,
    DimMismatch,
    NonTermination,
    NotInFragment,
    ParseError,
)
from .euler import euler_params
from .rules import builtin_rules, derived_rules, soundness_check
from .semantics import DEFAULT_TOL, equiv, interpret, matrix_to_json
from .syntax import diagram_hash, parse, to_text
from .translate import completeness_pipeline, decode, encode, g_reduce

EXIT_OK, EXIT_FALSE, EXIT_PARSE, EXIT_TYPE, EXIT_CAP = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return parse(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _angle(text):
    """Accept a float or any angle the term grammar accepts (``pi/2``, ``-3*pi/4``)."""
    try:
        return float(text)
    except ValueError:
        pass
    neg = text.strip().startswith("-")
    d = parse(f"ph({text.strip().lstrip('-')})")
    if not isinstance(d, Phase):
        raise UsageError(f"not an angle: {text}")
    return -d.angle if neg else d.angle


def _emit(args, obj, pretty=None):
    if args.format == "json":
        print(json.dumps(obj, indent=2 if args.indent else None))
    else:
        print(pretty if pretty is not None else _pretty(obj))


def _pretty(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            f"{pad}-\n{_pretty(x, indent + 1)}" if isinstance(x, (dict, list)) else f"{pad}- {_scalar(x)}" for x in obj
        )
    return f"{pad}{_scalar(obj)}"


def _flat_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _format_matrix(m):
    rows = []
    for row in m:
        rows.append("  ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in row))
    return "\n".join(rows)


# ---------------------------------------------------------------- commands


def cmd_interp(args):
    d = _read(args.file)
    m = interpret(d, args.dialect)
    _emit(args, matrix_to_json(m), _format_matrix(m))
    return EXIT_OK


def cmd_equiv(args):
    a, b = _read(args.file_a), _read(args.file_b)
    res = equiv(a, b, args.dialect, args.tol)
    _emit(args, res.to_json())
    return EXIT_OK if res.equal else EXIT_FALSE


def _term_json(d, source):
    return {"file": source, "term": to_text(d), "wires": wires(d), "hash": diagram_hash(d)}


def _batch(args, fn):
    """Run ``fn`` on every input file, in parallel with ``--jobs``."""
    if args.jobs > 1 and len(args.files) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(lambda f: fn(_read(f)), args.files))
    else:
        results = [fn(_read(f)) for f in args.files]
    return results


def _write_trace(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)


def _emit_terms(args, terms):
    objs = [_term_json(t, f) for t, f in zip(terms, args.files)]
    if args.format == "json":
        _emit(args, objs[0] if len(objs) == 1 else objs)
    else:
        for t in terms:
            print(to_text(t))


def cmd_reduce(args):
    results = _batch(args, lambda d: g_reduce(d, budget=args.budget, with_trace=True))
    if args.trace:
        traces = [t.to_json() for _, t in results]
        _write_trace(args.trace, traces[0] if len(traces) == 1 else traces)
    _emit_terms(args, [r for r, _ in results])
    return EXIT_OK


def cmd_encode(args):
    def run(d):
        if args.reduce:
            d = g_reduce(d, budget=args.budget)
        return encode(d)

    _emit_terms(args, _batch(args, run))
    return EXIT_OK


def cmd_decode(args):
    def run(d):
        violations = validate_dialect(d, Dialect.QC)
        if violations:
            raise DialectError(violations)
        return decode(d)

    _emit_terms(args, _batch(args, run))
    return EXIT_OK


def cmd_pipeline(args):
    a, b = _read(args.file_a), _read(args.file_b)
    report = completeness_pipeline(a, b, args.tol, jobs=args.jobs)
    obj = report.to_json(trace_limit=args.trace_limit)
    if args.trace:
        _write_trace(args.trace, obj["traces"])
    if not args.trace_inline:
        obj["traces"] = {k: {"counts": v["counts"], "final_hash": v["final_hash"]} for k, v in obj["traces"].items()}
    _emit(args, obj)
    return EXIT_OK if report.equal else EXIT_FALSE


def cmd_euler(args):
    p = euler_params(_angle(args.alpha1), _angle(args.alpha2))
    _emit(args, p.to_json())
    return EXIT_OK


def cmd_variants(args):
    if args.check != "all":
        raise UsageError(f"unknown check {args.check!r}")
    table = mc.conformance(args.dim, samples=args.samples, seed=args.seed)
    _emit(args, table)
    return EXIT_OK


def cmd_rules(args):
    dialects = [Dialect.coerce(args.dialect)] if args.dialect else [Dialect.QC, Dialect.CQC]
    rules = {}
    for dl in dialects:
        for r in builtin_rules(dl):
            rules.setdefault(r.name, r)
    if args.derived:
        for r in derived_rules():
            rules.setdefault(r.name, r)
    if not args.soundness:
        _emit(args, [{"name": r.name, "kind": r.kind, "dialect": r.dialect.value if r.dialect else "both"} for r in rules.values()])
        return EXIT_OK
    reports = [soundness_check(r, samples=args.samples, tol=args.tol, seed=args.seed) for r in rules.values()]
    obj = {"passed": all(r.passed for r in reports), "rules": [r.to_json() for r in reports]}
    if args.format == "json":
        _emit(args, obj)
    else:
        for r in reports:
            print(f"{'ok  ' if r.passed else 'FAIL'} {r.rule:<22} max_diff={r.max_diff:.2e}")
    return EXIT_OK if obj["passed"] else EXIT_FALSE


# ------------------------------------------------------------------ parser


def build_parser():
    p = argparse.ArgumentParser(prog="ctrlprop", description="Controlled props for quantum circuits.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "pretty"), default="json")
    common.add_argument("--indent", action="store_true", help="indent JSON output")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("interp", parents=[common], help="print the unitary of a term")
    s.add_argument("file")
    s.add_argument("--dialect", choices=("qc", "cqc"))
    s.set_defaults(func=cmd_interp)

    s = sub.add_parser("equiv", parents=[common], help="compare two terms semantically")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("--dialect", choices=("qc", "cqc"))
    s.set_defaults(func=cmd_equiv)

    for name, fn, helptext in (
        ("reduce", cmd_reduce, "rewrite a cqc term into the G fragment"),
        ("encode", cmd_encode, "translate a G-fragment cqc term to qc"),
        ("decode", cmd_decode, "translate a qc term to cqc"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("files", nargs="+")
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--budget", type=int, default=10**6)
        if name == "reduce":
            s.add_argument("--trace", metavar="OUT.json")
        if name == "encode":
            s.add_argument("--reduce", action="store_true", help="reduce to the G fragment first")
        s.set_defaults(func=fn)

    s = sub.add_parser("pipeline", parents=[common], help="certify or refute equality of two cqc terms")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--trace", metavar="OUT.json")
    s.add_argument("--trace-limit", type=int, default=200)
    s.add_argument("--trace-inline", action="store_true", help="include trace steps in the report")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("euler", parents=[common], help="Euler decomposition angles")
    s.add_argument("--alpha1", required=True)
    s.add_argument("--alpha2", required=True)
    s.set_defaults(func=cmd_euler)

    s = sub.add_parser("variants", parents=[common], help="control functor conformance table")
    s.add_argument("--check", default="all")
    s.add_argument("--dim", type=int, choices=(2, 3), default=2)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_variants)

    s = sub.add_parser("rules", parents=[common], help="list rules or check their soundness")
    s.add_argument("--soundness", action="store_true")
    s.add_argument("--dialect", choices=("qc", "cqc"))
    s.add_argument("--derived", action="store_true", help="include derived rules")
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_rules)
    return p


def _glue_negative_values(argv):
    # argparse reads "-pi/2" as an option; bind it to the preceding flag
    out, it = [], iter(argv)
    for a in it:
        if a in ("--alpha1", "--alpha2"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        if not (0.0 < args.tol < 1e-3):
            raise UsageError(f"tolerance must lie in (0, 1e-3), got {args.tol}")
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DialectError, DiagramTypeError, ArityMismatch, NotInFragment, DimMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TYPE
    except (CapExceeded, NonTermination) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
