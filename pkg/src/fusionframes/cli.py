"""Command-line entry point.

Exit codes: 0 success, 1 a check failed or the system is inconsistent,
2 unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import convolution as conv
from . import fileio
from . import nonstandard as ns
from . import verify
from .errors import FusionFrameError, Inconsistent
from .frames import classify, frame_bounds
from .representation import mat_repr, mat_repr_otimes
from .systems import FORMS, LinearSystemForm, solve_operator_eq

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

GLOBAL_DEFAULTS = {"seed": 0, "tol": None, "json_out": None}


def _global_flags() -> argparse.ArgumentParser:
    # defaults are suppressed so flags given before and after the command both work
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="tolerance override")
    p.add_argument("--json-out", default=argparse.SUPPRESS, help="write the JSON report here")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="fusionframes", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the property suites")
    p.add_argument("--suite", action="append", choices=verify.SUITE_NAMES, help="run only this suite (repeatable)")
    p.add_argument("--count", type=int, help="instances per suite instead of the default")

    p = sub.add_parser("repr", parents=[common], help="block matrix of an operator")
    p.add_argument("--op", required=True, help="operator (CMatrix JSON or real CSV)")
    p.add_argument("--w", required=True, help="row fusion sequence JSON")
    p.add_argument("--v", help="column fusion sequence JSON (default: same as --w)")
    p.add_argument("--otimes", action="store_true", help="use the S^{-1/2}-scaled representation")
    p.add_argument("--out", help="block matrix JSON output")

    p = sub.add_parser("solve", parents=[common], help="solve O f = g through a fusion frame system")
    p.add_argument("--request", required=True, help="solve request JSON")
    p.add_argument("--form", help="override the form; 'all' solves with every form")
    p.add_argument("--out", help="response JSON output")

    p = sub.add_parser("conv", parents=[common], help="convolve a signal with a filter")
    p.add_argument("--method", choices=("direct", "oa", "os"), default="oa")
    p.add_argument("--block", type=int, default=256, help="block length B")
    p.add_argument("--filter", required=True, help="filter CSV")
    p.add_argument("--in", dest="input", required=True, help="signal CSV")
    p.add_argument("--out", required=True, help="output CSV")

    p = sub.add_parser("nonstandard", parents=[common], help="nonstandard form report")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--op", required=True, help="2^J x 2^J operator (CMatrix JSON or real CSV)")
    p.add_argument("--report", help="report JSON output")
    p.add_argument("--threshold", type=float, default=1e-8, help="sparsity threshold")
    p.add_argument("--base", type=int, default=0, help="finest level treated as scale 0")
    return parser


def _emit(args, doc, path=None):
    text = fileio.dumps(doc)
    for target in {path, args.json_out} - {None}:
        with open(target, "w") as fh:
            fh.write(text)
    return text


def cmd_verify(args) -> int:
    tol = args.tol
    results = []
    for name in args.suite or verify.SUITE_NAMES:
        res = verify.run_suite(name, seed=args.seed, count=args.count, tol=tol)
        print(res.line())
        for msg in res.failures:
            print(f"    {msg}")
        results.append(res)
    ok = all(r.passed for r in results)
    _emit(args, {"seed": args.seed, "passed": ok, "suites": [r.as_dict() for r in results]})
    return EXIT_OK if ok else EXIT_FAIL


def _frame_meta(w) -> dict:
    b = frame_bounds(w)
    return {"lower": b.lower, "upper": b.upper, "classification": classify(w).as_dict()}


def cmd_repr(args) -> int:
    o = fileio.load_matrix(args.op)
    w = fileio.fusion_sequence_from_json(fileio.read_json(args.w))
    v = w if args.v is None else fileio.fusion_sequence_from_json(fileio.read_json(args.v))
    m = (mat_repr_otimes if args.otimes else mat_repr)(w, v, o)
    doc = fileio.block_matrix_to_json(m)
    doc["meta"] = {
        "representation": "otimes" if args.otimes else "plain",
        "norm": m.norm(),
        "W": _frame_meta(w),
        "V": _frame_meta(v),
    }
    _emit(args, doc, args.out)
    print(f"{m.grid_shape[0]} x {m.grid_shape[1]} blocks, spectral norm {m.norm():.6g}")
    return EXIT_OK


def cmd_solve(args) -> int:
    req = fileio.solve_request_from_json(fileio.read_json(args.request))
    tag = args.form or req["form"]
    forms = FORMS if tag == "all" else (LinearSystemForm.parse(tag),)
    tol = 1e-8 if args.tol is None else args.tol
    status = EXIT_OK
    responses = {}
    for form in forms:
        try:
            f = solve_operator_eq(form, req["system"], req["operator"], req["rhs"], tol=tol)
            residual = float(np.linalg.norm(req["operator"] @ f - req["rhs"]))
            print(f"{form.value}: residual {residual:.3e}")
        except Inconsistent as exc:
            f, residual = exc.f, exc.residual
            status = EXIT_FAIL
            print(f"{form.value}: inconsistent system, least-squares residual {residual:.3e}", file=sys.stderr)
        responses[form.value] = fileio.solve_response_to_json(f, residual)
    doc = responses[forms[0].value] if len(forms) == 1 else {"forms": responses}
    _emit(args, doc, args.out)
    return status


def cmd_conv(args) -> int:
    f = fileio.read_signal_csv(args.input)
    h = fileio.read_signal_csv(args.filter)
    if h.size == 0:
        raise fileio.FormatError("filter is empty")
    if args.block < 1:
        raise fileio.FormatError("block length must be positive")
    if args.method == "direct":
        y = conv.direct_conv(f, h)
    elif args.method == "oa":
        y = conv.overlap_add(f, h, args.block)
    else:
        y = conv.overlap_save(f, h, args.block)
    real = bool(np.all(f.imag == 0) and np.all(h.imag == 0))
    samples = y.samples.real if real else y.samples
    fileio.write_signal_csv(args.out, samples, real_only=real)
    _emit(args, {"method": args.method, "block": args.block, "input_len": int(f.size), "filter_len": int(h.size), "output_len": len(y)})
    return EXIT_OK


def cmd_nonstandard(args) -> int:
    t = fileio.load_matrix(args.op)
    size = t.shape[0]
    big_j = size.bit_length() - 1
    if t.shape != (size, size) or size != 2**big_j:
        raise fileio.FormatError(f"operator must be 2^J x 2^J, got {t.shape}")
    mra = ns.haar_mra(big_j, args.levels, base=args.base)
    report = ns.nonstandard_report(t, mra, threshold=args.threshold)
    _emit(args, report, args.report)
    for lv in report["per_level"]:
        parts = ", ".join(f"{k} norm {lv[k]['norm']:.3e} nnz {lv[k]['nonzeros']}/{lv[k]['entries']}" for k in ("A", "B", "Gamma"))
        print(f"level {lv['level']}: {parts}")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "repr": cmd_repr,
    "solve": cmd_solve,
    "conv": cmd_conv,
    "nonstandard": cmd_nonstandard,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    for key, value in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        return COMMANDS[args.command](args)
    except (OSError, FusionFrameError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
