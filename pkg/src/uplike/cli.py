"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 spec/parse/IO error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import SchemeSpec, load_spec, parse_mask_ref
from .dyadic import format_rational
from .errors import AssumptionSViolation, CapExceeded, MissingFullFactor, NotContractiveWithin, SpecError
from .export import write_pgm
from .lattice import DEFAULT_CAP
from .geometry import (
    closed_form_support,
    check_assumption_s,
    empirical_support,
    esupp,
    hausdorff_distance,
    predicted_support,
)
from .masks import dumps, is_nonnegative, satisfies_eq5, submask_sums
from .operators import contractivity, operator_norm
from .runner import CascadeResult, cascade, cauchy_gap, phi_k
from .smoothness import BasisSequence, classify, sequence_smoothness_report

EXIT_OK, EXIT_FAIL, EXIT_SPEC, EXIT_CAP = 0, 1, 2, 3


class Context:
    def __init__(self, args):
        self.args = args
        self.spec: SchemeSpec | None = load_spec(args.spec) if args.spec else None
        out = args.out or (self.spec.out if self.spec and self.spec.out else ".")
        self.out = Path(out)
        self.cap = args.cap or (self.spec.cap if self.spec and self.spec.cap else DEFAULT_CAP)
        self.threads = args.threads or 1

    def need_spec(self) -> SchemeSpec:
        if self.spec is None:
            raise SpecError("this command needs --spec FILE")
        return self.spec

    def levels(self, dim: int) -> int:
        if self.args.levels:
            return self.args.levels
        if self.spec and self.spec.levels:
            return self.spec.levels
        return 12 if dim == 1 else 5

    def write(self, name: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        return path


def cmd_run(ctx: Context) -> int:
    spec = ctx.need_spec()
    seq = spec.sequence()
    K = ctx.levels(seq.dim)
    result = cascade(seq, K, exact=spec.exact, cap=ctx.cap)
    paths = [ctx.write("samples.csv", result.to_csv())]
    if seq.dim == 2:
        ctx.out.mkdir(parents=True, exist_ok=True)
        write_pgm(ctx.out / "heightmap.pgm", result.final)
        paths.append(ctx.out / "heightmap.pgm")
    if spec.inner:
        phi = phi_k(seq, K, spec.inner, exact=spec.exact, cap=ctx.cap)
        paths.append(ctx.write("phi.csv", CascadeResult([phi.samples], seq, result.initial).to_csv()))
    final = result.final
    print(f"{seq.description}: {K} levels, {final.values.size} grid points, total {float(final.total()):.17g}")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_support(ctx: Context) -> int:
    spec = ctx.need_spec()
    seq = spec.sequence()
    pred = predicted_support(seq)
    K = ctx.levels(seq.dim)
    result = cascade(seq, K, exact=spec.exact, cap=ctx.cap)
    emp = empirical_support(result, spec.threshold)
    lines = [
        f"sequence = {seq.description}",
        f"predicted scale = {format_rational(pred.factor)}",
        f"predicted exact = {str(pred.exact).lower()}",
        f"levels = {K}",
        f"hausdorff(empirical, predicted) = {hausdorff_distance(emp, pred.polytope):.17g}",
        f"empirical inside predicted = {str(pred.polytope.contains(emp)).lower()}",
    ]
    ctx.write("predicted.csv", pred.polytope.to_csv())
    ctx.write("empirical.csv", emp.to_csv())
    if seq.kind in ("univariate_up", "bivariate_up"):
        closed = closed_form_support(seq.kind, seq.r)
        ctx.write("closed_form.csv", closed.to_csv())
        lines.append(f"hausdorff(closed form, predicted) = {hausdorff_distance(closed, pred.polytope):.17g}")
    text = "\n".join(lines) + "\n"
    ctx.write("support.txt", text)
    print(text, end="")
    return EXIT_OK


def _classify_all(masks, V, pool, threads: int):
    if threads > 1 and len(masks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(classify, masks, [V] * len(masks), [pool] * len(masks)))
    return [classify(m, V, pool) for m in masks]


def cmd_verify(ctx: Context) -> int:
    spec = ctx.need_spec()
    seq = spec.sequence()
    M = spec.horizon
    V = BasisSequence.constant(seq.basis)
    pool = spec.directions or None
    masks = seq.masks(M)
    lines, failures = [], 0

    def check(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        failures += not ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))

    for k, a in enumerate(masks):
        check(f"nonnegative a_{k}", is_nonnegative(a))
        sums = submask_sums(a)
        check(f"eq5 a_{k}", satisfies_eq5(a), " ".join(str(s) for s in sums.values()))

    reports = _classify_all(masks, V, pool, ctx.threads)
    for k, rep in enumerate(reports):
        if rep.j < 1 or not rep.in_class:
            lines.append(f"SKIP contractivity a_{k}: no full smoothing factor (j = {rep.j})")
            continue
        try:
            c = contractivity(rep.factorization, max_L=spec.max_L)
            check(f"contractivity a_{k}", True, f"L = {c.L}, rho = {c.rho}")
        except (NotContractiveWithin, MissingFullFactor) as exc:
            check(f"contractivity a_{k}", False, str(exc))

    if seq.class_law is not None:
        js = [r.j for r in reports]
        law = [seq.class_law(k) for k in range(M)]
        ok = js == law if seq.class_law_exact else all(j >= l for j, l in zip(js, law))
        rel = "=" if seq.class_law_exact else ">="
        check(f"class law j_k {rel} floor(k/r)", ok, f"j = {js}")
    else:
        lines.append(f"INFO class indices j = {[r.j for r in reports]}")

    try:
        lams = check_assumption_s(seq, M)
        check("assumption S", True, "lambda = " + " ".join(format_rational(x) for x in lams))
    except AssumptionSViolation as exc:
        check("assumption S", False, str(exc))

    T, ks = (16, range(1, 7)) if seq.dim == 1 else (7, range(1, 4))
    gaps = [cauchy_gap(seq, k, 1, levels=T, cap=ctx.cap) for k in ks]
    # repeated masks make phi_{k+1} = phi_k, so only the nonzero gaps must shrink
    live = [g for g in gaps if g > 1e-12]
    ok = all(b < a for a, b in zip(live, live[1:]))
    check(f"nonzero cauchy gaps decreasing (T = {T})", ok, " ".join(f"{g:.6g}" for g in gaps))

    text = "\n".join(lines) + f"\n{failures} failure(s)\n"
    ctx.write("verify.txt", text)
    print(text, end="")
    return EXIT_FAIL if failures else EXIT_OK


def cmd_classify(ctx: Context) -> int:
    spec = ctx.need_spec()
    seq = spec.sequence()
    V = BasisSequence.constant(seq.basis)
    report = sequence_smoothness_report(seq, V, spec.horizon, spec.window, spec.directions or None)
    parts = [report.to_text()]
    for k, rep in enumerate(report.reports):
        parts.append(f"\n[a_{k}]\n" + rep.to_text())
    text = "".join(parts)
    ctx.write("classification.txt", text)
    print(report.to_text(), end="")
    return EXIT_OK


def cmd_mask_info(ctx: Context) -> int:
    args = ctx.args
    if args.mask:
        a = parse_mask_ref(args.mask)
        label = args.mask
    else:
        seq = ctx.need_spec().sequence()
        a = seq.mask(args.index)
        label = f"{seq.description} a_{args.index}"
    rep = classify(a)
    lines = [
        f"mask = {label}",
        f"dim = {a.dim}",
        f"support points = {len(a)}",
        f"total = {a.total()}",
        "submask sums = " + " ".join(f"{eps}:{s}" for eps, s in submask_sums(a).items()),
        f"nonnegative = {str(is_nonnegative(a)).lower()}",
        f"operator norm = {operator_norm(a)}",
    ]
    if a.dim <= 2 and not a.is_zero():
        P = esupp(a)
        lines.append("esupp = " + " ".join("(" + ",".join(format_rational(x) for x in v) + ")" for v in P.vertices))
    text = "\n".join(lines) + "\n" + rep.to_text() + "\n" + dumps(a)
    ctx.write("mask-info.txt", text)
    print(text, end="")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "support": cmd_support,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "mask-info": cmd_mask_info,
}


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = {"default": argparse.SUPPRESS} if suppress else {"default": None}
    p.add_argument("--spec", metavar="FILE", help="scheme description file", **d)
    p.add_argument("--out", metavar="DIR", help="output directory (default: spec 'out' or .)", **d)
    p.add_argument("--levels", type=_positive, metavar="K", help="cascade levels", **d)
    p.add_argument("--threads", type=_positive, metavar="N", help="worker processes for per-mask work", **d)
    p.add_argument("--cap", type=_positive, metavar="N", help="maximum grid points per level", **d)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uplike", description="Non-stationary subdivision with growing masks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "run": "run the cascade; write samples.csv (and heightmap.pgm for d = 2)",
        "support": "predicted, closed-form and empirical supports",
        "verify": "check positivity, sub-mask sums, contractivity, class law, gaps",
        "classify": "smoothing-factor classes of the sequence masks",
        "mask-info": "summary of a single mask",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        _add_globals(p, suppress=True)
        if name == "mask-info":
            p.add_argument("--index", type=int, default=0, help="level of the sequence mask (default 0)")
            p.add_argument("--mask", help="mask reference instead of a spec: bspline(m), box3(m), @file or literal")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ctx = Context(args)
        return COMMANDS[args.command](ctx)
    except CapExceeded as exc:
        print(f"uplike: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SpecError, AssumptionSViolation, OSError, ValueError) as exc:
        print(f"uplike: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
