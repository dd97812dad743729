"""Command-line entry point.

Exit codes: 0 success, 1 a check failed (or descent and oracle disagree),
2 malformed input.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .bicomplex import COLUMN, ROW, page, validate_double_complex
from .descent import (
    DescentTower,
    betti_of_image,
    descent_inequality,
    direct_betti,
    e2_degeneration_report,
    validate_pullbacks,
    verify_mv_exactness,
)
from .documents import (
    InputError,
    bundle_from_doc,
    bundle_to_doc,
    dumps,
    load_json,
    parse_polynomials,
    parse_problem,
)
from .scaffold import BundleError, ScaffoldError, assemble_from_provider, emit_system, generate_fibered_systems, mock_bundle

CHECKS = ("exactness", "pages", "inequality", "structure")


class _Output:
    """Collects text lines and a machine-readable report for one command."""

    def __init__(self, command: str, args: argparse.Namespace):
        self.lines: list[str] = []
        self.report = {"command": command, "version": __version__,
                       "arguments": {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)},
                       "results": {}}
        self.start = time.perf_counter()
        self.args = args

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self) -> None:
        if not self.args.no_timing:
            elapsed = round(time.perf_counter() - self.start, 6)
            self.report["timing"] = {"seconds": elapsed}
            self.lines.append(f"time: {elapsed:.3f}s")
        if self.args.json:
            sys.stdout.write(dumps(self.report))
        else:
            sys.stdout.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _table(title: str, tbl: list[list[int]]) -> list[str]:
    out = [title]
    top = len(tbl) - 1
    for k, row in enumerate(tbl):
        out.append(f"  j={top - k:<2d} | " + " ".join(f"{v:4d}" for v in row))
    if tbl:
        out.append("        +" + "-" * (5 * len(tbl[0])))
        out.append("         " + " ".join(f"i={i:<2d}" for i in range(len(tbl[0]))))
    return out


def cmd_betti_image(args) -> int:
    prob = parse_problem(load_json(args.path), args.q)
    out = _Output("betti-image", args)
    b = betti_of_image(prob)
    out.line(str(b))
    res = out.report["results"]
    res["betti"] = list(b)
    status = 0
    if args.direct:
        d = direct_betti(prob)
        res["direct"] = list(d)
        res["agree"] = d == b
        out.line(f"direct: {d}")
        if d != b:
            out.line("MISMATCH between descent and direct computation")
            status = 1
    if args.unnormalized:
        u = betti_of_image(prob, normalized=False)
        res["unnormalized"] = list(u)
        out.line(f"unnormalized: {u}")
        if u != b:
            out.line("MISMATCH between normalized and unnormalized models")
            status = 1
    if args.pages:
        _add_pages(out, prob)
    out.emit()
    return status


def _add_pages(out: _Output, prob) -> None:
    from .descent import build_descent_double_complex

    D = build_descent_double_complex(prob)
    size = prob.q + 1
    pages = {}
    for filt in (ROW, COLUMN):
        for r in (1, 2):
            P = page(D, filt, r, check=False)
            tbl = P.table(size, size)
            pages[f"{filt}_E{r}"] = tbl
            out.lines.extend(_table(f"{filt} filtration E_{r}:", tbl))
    out.report["results"]["pages"] = pages


def cmd_check(args) -> int:
    prob = parse_problem(load_json(args.path), args.q)
    which = CHECKS if args.which == "all" else (args.which,)
    out = _Output("check", args)
    res = out.report["results"]
    failed = False
    for name in which:
        if name == "exactness":
            rep = verify_mv_exactness(prob)
            res["exactness"] = {
                "pass": rep.ok,
                "entries": [{"degree": e.degree, "position": e.position, "dim_ker": e.dim_ker,
                             "dim_im": e.dim_im, "composite_zero": e.composite_zero, "pass": e.ok}
                            for e in rep.entries],
            }
            out.line(f"exactness: {'PASS' if rep.ok else 'FAIL'} ({len(rep.entries)} positions)")
            for e in rep.failures():
                where = "augmentation" if e.position < 0 else f"C^{e.degree}(W^{e.position})"
                out.line(f"  fails at degree {e.degree}, {where}: dim ker {e.dim_ker} != dim im {e.dim_im}")
            ok = rep.ok
        elif name == "pages":
            rep = e2_degeneration_report(prob)
            res["pages"] = {"pass": rep.ok, "expected_column0": list(rep.expected),
                            "E1": {f"{i},{j}": n for (i, j), n in sorted(rep.e1.dims.items())},
                            "E2": {f"{i},{j}": n for (i, j), n in sorted(rep.e2.dims.items())},
                            "failures": rep.failures}
            out.line(f"pages: {'PASS' if rep.ok else 'FAIL'} (E_2 column 0 = {[rep.e2.dim(0, j) for j in range(prob.q + 1)]})")
            for msg in rep.failures:
                out.line(f"  {msg}")
            if args.pages:
                size = prob.q + 1
                out.lines.extend(_table("row filtration E_1:", rep.e1.table(size, size)))
                out.lines.extend(_table("row filtration E_2:", rep.e2.table(size, size)))
            ok = rep.ok
        elif name == "inequality":
            pairs = [descent_inequality(prob, n) for n in range(prob.q + 1)]
            ok = all(lhs <= rhs for lhs, rhs in pairs)
            res["inequality"] = {"pass": ok, "pairs": [list(p) for p in pairs]}
            out.line(f"inequality: {'PASS' if ok else 'FAIL'} "
                     + " ".join(f"n={n}:{l}<={r}" for n, (l, r) in enumerate(pairs)))
        else:
            msgs = []
            if not prob.is_empty:
                tower = DescentTower(prob)
                r1 = validate_double_complex(tower.double_complex())
                r2 = validate_pullbacks(prob, tower=tower)
                msgs = r1.failures + r2.failures
            ok = not msgs
            res["structure"] = {"pass": ok, "failures": msgs}
            out.line(f"structure: {'PASS' if ok else 'FAIL'}")
            for msg in msgs:
                out.line(f"  {msg}")
        failed |= not ok
    out.emit()
    return 1 if failed else 0


def cmd_scaffold(args) -> int:
    polys, k, m = parse_polynomials(load_json(args.path))
    try:
        fs = generate_fibered_systems(polys, args.q, k, m)
    except ScaffoldError as exc:
        raise InputError(str(exc)) from None
    sys.stdout.write(emit_system(fs))
    return 0


def cmd_assemble(args) -> int:
    bundle = bundle_from_doc(load_json(args.path))
    out = _Output("assemble", args)
    try:
        b = assemble_from_provider(bundle, args.q)
    except BundleError as exc:
        raise InputError(f"bundle rejected: {exc}") from None
    out.report["results"]["betti"] = list(b)
    out.line(" ".join(map(str, b)))
    out.emit()
    return 0


def cmd_mock_bundle(args) -> int:
    prob = parse_problem(load_json(args.path), args.q)
    sys.stdout.write(dumps(bundle_to_doc(mock_bundle(prob))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohodescent",
                                     description="Betti numbers of images of simplicial maps by cohomological descent.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, q_required=False):
        p.add_argument("--q", type=int, default=None, required=q_required,
                       help="Betti range (overrides the document's q)")
        p.add_argument("--no-timing", action="store_true", help="omit timing from the output")
        p.add_argument("--json", action="store_true", help="print a JSON report")

    p = sub.add_parser("betti-image", help="Betti numbers of the image of a vertex map")
    p.add_argument("path")
    common(p)
    p.add_argument("--direct", action="store_true", help="also compute the image cohomology directly")
    p.add_argument("--unnormalized", action="store_true", help="also run the descent on unnormalized cochains")
    p.add_argument("--pages", action="store_true", help="print E_1/E_2 tables of both filtrations")
    p.set_defaults(func=cmd_betti_image)

    p = sub.add_parser("check", help="run the structural verifiers on a problem")
    p.add_argument("path")
    p.add_argument("which", nargs="?", default="all", choices=CHECKS + ("all",))
    common(p)
    p.add_argument("--pages", action="store_true", help="print E_1/E_2 tables")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scaffold", help="emit the fibered quadratic systems for a polynomial file")
    p.add_argument("path")
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_scaffold)

    p = sub.add_parser("assemble", help="Betti numbers from a provider bundle")
    p.add_argument("path")
    common(p, q_required=True)
    p.set_defaults(func=cmd_assemble)

    p = sub.add_parser("mock-bundle", help="write the provider bundle induced by a simplicial problem")
    p.add_argument("path")
    p.add_argument("--q", type=int, default=None)
    p.set_defaults(func=cmd_mock_bundle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "q", None) is not None and args.q < 0:
        print(f"error: --q must be non-negative, got {args.q}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
