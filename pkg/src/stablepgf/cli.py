"""Command line front end.

Exit codes: 0 success or affirmative verdict, 1 negative verdict, 2 input or
format error, 3 numerical failure.  Coordinates and block specifications on
the command line are 1-based.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import clt, corpus, io, pgf as pgfmod, plot, stability, stablearith, structure
from .errors import (ConclusionFailure, DegenerateLawError, HypothesisError, InvalidPGFError,
                     RootFindingError, StructuralError)
from .poly import DEFAULT_TOL

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- argument helpers -----------------------------------------------------------

def int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def fraction_list(s: str) -> list[Fraction]:
    try:
        return [Fraction(x.strip()) for x in s.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {s!r}")


def fraction_arg(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational such as 2/3, got {s!r}")


def parse_blocks(s: str) -> list[list[int]]:
    """'1;2,3' -> [[0], [1, 2]] (1-based on the command line)."""
    try:
        blocks = [[int(x) - 1 for x in part.split(",") if x.strip()] for part in s.split(";")]
    except ValueError:
        raise UsageError(f"bad block specification {s!r}; use e.g. '1;2,3'") from None
    if any(not b or min(b) < 0 for b in blocks):
        raise UsageError(f"bad block specification {s!r}; indices start at 1")
    return blocks


def blocks_to_grouping(blocks: list[list[int]], dim: int) -> list[int]:
    grouping = [-1] * dim
    for k, b in enumerate(blocks):
        for i in b:
            if i >= dim or grouping[i] != -1:
                raise UsageError(f"blocks must partition 1..{dim}")
            grouping[i] = k
    if -1 in grouping:
        raise UsageError(f"blocks must partition 1..{dim}")
    return grouping


# -- output ---------------------------------------------------------------------------

def envelope(args, command: str, result: dict) -> dict:
    meta = {"tool": "stablepgf", "version": __version__, "command": command,
            "seed": args.seed, "tol": args.tol}
    out = dict(result)
    out["meta"] = meta
    return out


def emit(args, command: str, result: dict) -> None:
    text = io.dumps(envelope(args, command, result))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def emit_plot(args, svg: str) -> None:
    if args.plot:
        plot.write_svg(args.plot, svg)


def verdict_dict(v: stability.StabilityVerdict) -> dict:
    d = {"status": v.status, "trials": v.trials, "skipped": v.skipped}
    if v.witness is not None:
        d["witness"] = {"base": list(v.witness.base), "direction": list(v.witness.direction),
                        "root": v.witness.root}
    if v.decomposition is not None:
        d["bernoulli_p"] = list(v.decomposition.p)
    return d


def root_report_dict(r: stablearith.RealRootReport) -> dict:
    return {"real_rooted": r.real_rooted, "proven": r.proven,
            "roots": [{"root": z, "multiplicity": m, "error": e}
                      for z, m, e in zip(r.roots, r.multiplicities, r.errors)]}


# -- commands -------------------------------------------------------------------------

def cmd_stability_check(args) -> int:
    f = io.read_pgf(args.pgf)
    v = stability.test_stability(f, args.dirs, args.seed, args.tol)
    emit(args, "stability check", verdict_dict(v))
    return EXIT_OK if v.stable else EXIT_NEGATIVE


def cmd_pgf_project(args) -> int:
    f = io.read_pgf(args.pgf)
    a = args.direction or [1] * f.dim
    p = pgfmod.project(f, a)
    emit(args, "pgf project", {**io.pgf_to_dict(pgfmod.JointPGF.from_polynomial(p)),
                               "direction": a})
    return EXIT_OK


def cmd_pgf_polarize(args) -> int:
    f = io.read_pgf(args.pgf)
    g = pgfmod.polarize(f, args.bounds)
    emit(args, "pgf polarize", io.pgf_to_dict(g))
    return EXIT_OK


def cmd_pgf_aggregate(args) -> int:
    f = io.read_pgf(args.pgf)
    grouping = blocks_to_grouping(parse_blocks(args.blocks), f.dim)
    emit(args, "pgf aggregate", io.pgf_to_dict(pgfmod.aggregate(f, grouping)))
    return EXIT_OK


def cmd_pgf_smear(args) -> int:
    f = io.read_pgf(args.pgf)
    p = pgfmod.smear(f, args.weights)
    res = io.pgf_to_dict(pgfmod.JointPGF.from_polynomial(p))
    res["weights"] = args.weights
    emit(args, "pgf smear", res)
    return EXIT_OK


def cmd_clt_report(args) -> int:
    f = io.read_pgf(args.pgf)
    A = io.read_matrix(args.limit_cov) if args.limit_cov else None
    if f.dim == 1 or args.direction:
        a = args.direction or [1] * f.dim
        law = clt.LatticeLaw.from_polynomial(pgfmod.project(f, a))
        rep = clt.report(law, args.tol, direction=a if f.dim > 1 else None)
        if A is not None and f.dim > 1:
            M = np.array([[float(x) for x in row] for row in A])
            rep.V_limit = float(np.array(a) @ M @ np.array(a)) / sum(x * x for x in a)
            rep.degenerate = rep.V_limit <= args.tol
        emit(args, "clt report", {"reports": [rep.to_dict()]})
        if law.variance > 0:
            emit_plot(args, plot.cdf_overlay_svg(law))
        return EXIT_OK
    reps = clt.cramer_wold_battery(f, A, args.scale, args.max_den, args.tol)
    emit(args, "clt report", {"reports": [r.to_dict() for r in reps], "max_den": args.max_den,
                              "scale": args.scale})
    if args.plot:
        first = next((r for r in reps if r.kolmogorov is not None), None)
        if first is not None:
            law = clt.LatticeLaw.from_polynomial(pgfmod.project(f, first.direction))
            emit_plot(args, plot.cdf_overlay_svg(law))
    return EXIT_OK


def read_manifest(path):
    m = io.read_json(path)
    base = Path(path).parent
    try:
        members = m["members"]
        files = [base / e["pgf"] for e in members]
        scales = [float(e["scale"]) for e in members]
    except (KeyError, TypeError):
        raise StructuralError(
            "manifest needs {\"members\": [{\"pgf\": file, \"scale\": s}, ...]}") from None
    if not members:
        raise StructuralError("manifest lists no members")
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise StructuralError("manifest scales must be strictly increasing")
    return m, files, scales


def cmd_clt_family(args) -> int:
    m, files, scales = read_manifest(args.manifest)
    family = [io.read_pgf(f) for f in files]
    direction = args.direction or m.get("direction")
    study = clt.rate_study(family, scales, direction, args.tol)
    res = study.to_dict()
    res["direction"] = direction
    emit(args, "clt family", res)
    emit_plot(args, plot.rate_trace_svg(study))
    return EXIT_OK


def cmd_cov_partition(args) -> int:
    M = io.read_matrix(args.matrix)
    chk = structure.check_hypotheses(M, args.tol)
    if not chk:
        emit(args, "cov partition", {"hypotheses": False, "violations": list(chk.violations)})
        return EXIT_NEGATIVE
    part = structure.partition(M, args.tol)
    # 1-based indices in the file-level output
    res = {"T": [i + 1 for i in part.T], "S": [[i + 1 for i in S] for S in part.S_list],
           "null_basis": [v.tolist() for v in part.null_basis], "hypotheses": True,
           "warnings": list(part.warnings)}
    emit(args, "cov partition", res)
    return EXIT_OK


def _law(args) -> clt.LatticeLaw:
    f = io.read_pgf(args.pgf)
    if f.dim != 1:
        raise StructuralError("division commands need a univariate pgf")
    return clt.LatticeLaw.from_pgf(f)


def _division_out(args, command: str, res: stablearith.DivisionResult, extra: dict) -> int:
    out = io.pgf_to_dict(pgfmod.JointPGF.from_polynomial(res.pgf))
    out.update(extra)
    out["stability"] = root_report_dict(res.report)
    out["exploratory"] = res.exploratory
    emit(args, command, out)
    return EXIT_OK if res.report.real_rooted else EXIT_NEGATIVE


def cmd_divide(args) -> int:
    q = _law(args)
    if args.mode == "half":
        return _division_out(args, "divide half", stablearith.half_divide(q, args.tol), {})
    if args.k is None:
        raise UsageError("divide floor needs -k")
    res = stablearith.floor_divide(q, args.k, args.tol)
    return _division_out(args, "divide floor", res, {"k": args.k})


def cmd_probe_scale(args) -> int:
    q = _law(args)
    res = stablearith.floor_scale_probe(q, args.ratio, args.tol)
    return _division_out(args, "probe scale", res, {"ratio": args.ratio})


def cmd_decompose(args) -> int:
    f = io.read_polynomial(args.poly)
    dec = stablearith.decompose(f, args.k)
    out = {"k": args.k, "source_degree": dec.source_degree,
           "parts": [io.poly_to_dict(g) for g in dec.parts]}
    code = EXIT_OK
    if args.certify:
        try:
            cert = stablearith.verify_interlace(f, args.k, args.tol)
            out["interlace"] = {"certified": True, "merged": list(cert.merged),
                                "owner": list(cert.owner)}
        except HypothesisError as exc:
            out["interlace"] = {"certified": False, "hypothesis": str(exc)}
            code = EXIT_NEGATIVE
    emit(args, "decompose", out)
    return code


def cmd_corpus_dpp(args) -> int:
    K = io.read_kernel(args.kernel)
    blocks = parse_blocks(args.blocks) if args.blocks else None
    f = corpus.dpp_pgf(corpus.DPPKernel(K, blocks))
    emit(args, "corpus dpp", io.pgf_to_dict(f))
    return EXIT_OK


def cmd_corpus_affine(args) -> int:
    try:
        rows = [[Fraction(c) for c in r.split(",")] for r in args.rows.split(";")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rows {args.rows!r}; use e.g. '1,1,0;1,0,1'") from None
    f = corpus.affine_product(rows, len(rows[0]) - 1)
    if args.power > 1:
        f = f**args.power
    emit(args, "corpus affine", io.pgf_to_dict(f))
    return EXIT_OK


def cmd_corpus_nr(args) -> int:
    roots = corpus.random_nr_roots(args.n, args.seed)
    law = corpus.nr_law(roots)
    out = io.pgf_to_dict(pgfmod.JointPGF.from_polynomial(law.pgf))
    out["roots"] = roots
    emit(args, "corpus nr", out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance")
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--plot", help="also write an SVG plot here")

    parser = argparse.ArgumentParser(prog="stablepgf", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stablepgf {__version__}")
    sub = parser.add_subparsers(dest="group", required=True)

    def leaf(group_sub, name, func, **kw):
        p = group_sub.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    st = sub.add_parser("stability").add_subparsers(dest="action", required=True)
    p = leaf(st, "check", cmd_stability_check, help="randomized real-stability test")
    p.add_argument("pgf")
    p.add_argument("--dirs", type=int, default=stability.DEFAULT_DIRECTIONS)

    pg = sub.add_parser("pgf").add_subparsers(dest="action", required=True)
    p = leaf(pg, "project", cmd_pgf_project)
    p.add_argument("pgf")
    p.add_argument("--direction", type=int_list)
    p = leaf(pg, "polarize", cmd_pgf_polarize)
    p.add_argument("pgf")
    p.add_argument("--bounds", type=int_list)
    p = leaf(pg, "aggregate", cmd_pgf_aggregate)
    p.add_argument("pgf")
    p.add_argument("--blocks", required=True, help="e.g. '1;2,3'")
    p = leaf(pg, "smear", cmd_pgf_smear)
    p.add_argument("pgf")
    p.add_argument("--weights", type=fraction_list, required=True, help="e.g. 1/2,1/3")

    c = sub.add_parser("clt").add_subparsers(dest="action", required=True)
    p = leaf(c, "report", cmd_clt_report)
    p.add_argument("pgf")
    p.add_argument("--direction", type=int_list)
    p.add_argument("--limit-cov", dest="limit_cov")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--max-den", dest="max_den", type=int, default=clt.DEFAULT_MAX_DEN)
    p = leaf(c, "family", cmd_clt_family)
    p.add_argument("manifest")
    p.add_argument("--direction", type=int_list)

    cv = sub.add_parser("cov").add_subparsers(dest="action", required=True)
    p = leaf(cv, "partition", cmd_cov_partition)
    p.add_argument("matrix")

    p = leaf(sub, "divide", cmd_divide)
    p.add_argument("mode", choices=["floor", "half"])
    p.add_argument("pgf")
    p.add_argument("-k", type=int)

    p = leaf(sub, "decompose", cmd_decompose)
    p.add_argument("poly")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--certify", action="store_true", help="also run the interlacing check")

    pr = sub.add_parser("probe").add_subparsers(dest="action", required=True)
    p = leaf(pr, "scale", cmd_probe_scale)
    p.add_argument("pgf")
    p.add_argument("--ratio", type=fraction_arg, required=True)

    co = sub.add_parser("corpus").add_subparsers(dest="action", required=True)
    p = leaf(co, "dpp", cmd_corpus_dpp)
    p.add_argument("--kernel", required=True)
    p.add_argument("--blocks")
    p = leaf(co, "affine", cmd_corpus_affine)
    p.add_argument("--rows", required=True, help="e.g. '1,1,0;1,0,1'")
    p.add_argument("--power", type=int, default=1)
    p = leaf(co, "nr", cmd_corpus_nr)
    p.add_argument("-n", type=int, required=True)
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, InvalidPGFError, StructuralError, HypothesisError,
            DegenerateLawError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RootFindingError, ConclusionFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
