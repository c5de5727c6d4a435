"""Command-line driver: generate, verify and transform serialized algebras.

Object-producing commands (gen, dual, cross) write an algebra file to
stdout; analysis commands write a report file to stdout and echo the
human-readable rendering to stderr.  Exit code 0 means every hard check
passed; 1 names the first failed check; 2 signals unusable input.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import serialize as sz
from . import tower as tw
from .algebra import FiniteStarAlgebra, verify_star_algebra
from .config import ParseError, ToleranceConfig, WkaError
from .crossed import (ActionSpec, CrossedProduct, crossed_product,
                      dual_action, duality_isomorphism, kac_subalgebra_input,
                      module_expectation, trivial_action,
                      two_sided_crossed_product, validate_action)
from .markov import markov_analysis
from .report import Report
from .weak_kac import (WeakKacAlgebra, analyze, counital_maps, dual,
                       from_dual_group, from_group, from_pair_groupoid,
                       cyclic_group_table, haar_data, verify_wka)

_GEN_KINDS = ("group", "dualgroup", "pairgroupoid", "twosided-example")


def _config(args: argparse.Namespace) -> ToleranceConfig:
    tol = args.tol
    if tol is None:
        env = os.environ.get("WKA_TOL", "")
        tol = float(env) if env else 1e-9
    return ToleranceConfig(abs_tol=tol, rel_tol=tol, rng_seed=args.seed)


def _expect(obj, kind, what: str):
    if not isinstance(obj, kind):
        raise ParseError(f"{what}: expected {kind.__name__}, "
                         f"got {type(obj).__name__}")
    return obj


def _emit_object(obj, rep: Report, args: argparse.Namespace) -> int:
    sz.serialize(obj, args.out)
    if args.report:
        sz.serialize(rep, args.report)
    return _exit_code(rep)


def _emit_report(rep: Report, args: argparse.Namespace) -> int:
    sz.serialize(rep, args.out)
    sys.stderr.write(rep.render() + "\n")
    return _exit_code(rep)


def _exit_code(rep: Report) -> int:
    bad = rep.failures()
    if bad:
        first = bad[0]
        sys.stderr.write(f"first failed check: {first.name} "
                         f"(residual {first.residual:.3e})\n")
        return 1
    return 0


def cmd_gen(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    what = args.what
    if what in ("group", "dualgroup"):
        if args.cyclic is None:
            raise ParseError(f"gen {what} needs --cyclic N")
        table = cyclic_group_table(args.cyclic)
        name = args.name or f"Z{args.cyclic}"
        maker = from_group if what == "group" else from_dual_group
        wka = maker(table, name=name if what == "group" else name + "*")
    elif what == "pairgroupoid":
        if args.size is None:
            raise ParseError("gen pairgroupoid needs a point count")
        wka = from_pair_groupoid(args.size,
                                 name=args.name or f"pair{args.size}")
    else:
        if args.order is None:
            raise ParseError("gen twosided-example needs --order N")
        hopf = from_group(cyclic_group_table(args.order),
                          name=f"Z{args.order}")
        inp = kac_subalgebra_input(hopf, np.eye(args.order), cfg,
                                   name=args.name or
                                   f"twosided{args.order}")
        wka, rep = two_sided_crossed_product(inp, cfg)
        return _emit_object(wka, rep, args)
    rep = verify_wka(wka, cfg)
    return _emit_object(wka, rep, args)


def cmd_verify(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    obj = sz.parse(args.file)
    if isinstance(obj, WeakKacAlgebra):
        rep = verify_wka(obj, cfg)
    elif isinstance(obj, FiniteStarAlgebra):
        rep = verify_star_algebra(obj, cfg)
    elif isinstance(obj, ActionSpec):
        rep = validate_action(obj, cfg)
    elif isinstance(obj, CrossedProduct):
        rebuilt = crossed_product(obj.action, cfg, samples=args.samples)
        rep = rebuilt.report
        drift = max(float(np.abs(rebuilt.projection - obj.projection).max()),
                    float(np.abs(rebuilt.section - obj.section).max()),
                    float(np.abs(rebuilt.algebra.mult
                                 - obj.algebra.mult).max()))
        rep.add("stored_quotient_matches_rebuild", drift, 100 * cfg.abs_tol)
    elif isinstance(obj, Report):
        rep = obj
    else:
        raise ParseError("verify: unsupported object")
    return _emit_report(rep, args)


def cmd_dual(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    wka = _expect(sz.parse(args.file), WeakKacAlgebra, "dual")
    out = dual(wka, cfg)
    return _emit_object(out, verify_wka(out, cfg), args)


def cmd_haar(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    wka = _expect(sz.parse(args.file), WeakKacAlgebra, "haar")
    counital = counital_maps(wka, cfg)
    ha = haar_data(wka, counital, cfg)
    rep = Report(title=f"haar ({wka.name or 'K'})")
    rep.extend(ha.report)
    rep.values["projection"] = ha.projection
    rep.values["trace"] = ha.trace
    return _emit_report(rep, args)


def cmd_markov(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    wka = _expect(sz.parse(args.file), WeakKacAlgebra, "markov")
    md = markov_analysis(wka, cfg)
    return _emit_report(md.report, args)


def cmd_cross(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    wka = _expect(sz.parse(args.file), WeakKacAlgebra, "cross")
    if args.action:
        act = _expect(sz.parse(args.action), ActionSpec, "cross --action")
        if act.wka.dim != wka.dim or \
                not np.allclose(act.wka.comult, wka.comult, atol=cfg.abs_tol):
            raise ParseError("cross: action file acts for a different "
                             "algebra than FILE")
    else:
        # default: the dual acts on the algebra itself from the left
        act = dual_action(wka, dual(wka, cfg), side="left")
    cp = crossed_product(act, cfg, samples=args.samples)
    return _emit_object(cp, cp.report, args)


def cmd_duality(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    wka = _expect(sz.parse(args.file), WeakKacAlgebra, "duality")
    ctx = tw.tower_context(wka, cfg)
    if args.algebra:
        act = _expect(sz.parse(args.algebra), ActionSpec, "duality --algebra")
        if act.wka.dim != wka.dim:
            raise ParseError("duality: action acting factor does not match")
    else:
        act = trivial_action(wka, ctx.data.cartan.target, cfg, side="left")
    cp = crossed_product(act, cfg, samples=args.samples)
    exp, erep = module_expectation(cp, ctx.data.expectations, cfg)
    dd = duality_isomorphism(cp, exp, ctx.data.dual_wka,
                             ctx.dual_expectations, ctx.dual_integral,
                             ctx.markov.target_basis.rows, ctx.markov.lam,
                             cfg, samples=args.samples)
    rep = Report(title=f"duality ({wka.name or 'K'})")
    rep.extend(cp.report, prefix="base.")
    rep.extend(erep, prefix="expectation.")
    rep.extend(dd.report)
    return _emit_report(rep, args)


def cmd_tower(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    wka = _expect(sz.parse(args.file), WeakKacAlgebra, "tower")
    t = tw.build_tower(wka, args.depth, cfg, cap=args.cap,
                       samples=args.samples)
    return _emit_report(t.report, args)


def cmd_report(args: argparse.Namespace, cfg: ToleranceConfig) -> int:
    obj = sz.parse(args.file)
    if isinstance(obj, Report):
        return _emit_report(obj, args)
    wka = _expect(obj, WeakKacAlgebra, "report")
    data = analyze(wka, cfg)
    rep = Report(title=f"full report ({wka.name or 'K'})")
    rep.extend(data.report)
    md = markov_analysis(wka, cfg, counital=data.counital, cartan=data.cartan,
                         haar=data.haar, expectations=data.expectations)
    rep.extend(md.report, prefix="markov.")
    if md.index is not None:
        ar = tw.arithmetic_report(wka, cfg, md=md,
                                  cartan_sub=data.cartan.source.sub)
        rep.extend(ar.report, prefix="arithmetic.")
    return _emit_report(rep, args)


COMMANDS = {
    "gen": cmd_gen,
    "verify": cmd_verify,
    "dual": cmd_dual,
    "haar": cmd_haar,
    "markov": cmd_markov,
    "cross": cmd_cross,
    "duality": cmd_duality,
    "tower": cmd_tower,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wka",
        description="verification toolkit for finite weak Kac algebras")
    parser.add_argument("--tol", type=float, default=None,
                        help="absolute tolerance (default 1e-9 or $WKA_TOL)")
    parser.add_argument("--seed", type=int, default=74,
                        help="seed for sampled checks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, has_file=True):
        if has_file:
            p.add_argument("file", nargs="?", default="-",
                           help="input file, '-' or omitted for stdin")
        p.add_argument("--out", default="-", help="output path ('-' stdout)")
        p.add_argument("--report", default=None,
                       help="also write the check report to this path")
        p.add_argument("--samples", type=int, default=50,
                       help="random samples for sampled checks")

    g = sub.add_parser("gen", help="generate a built-in example")
    g.add_argument("what", choices=_GEN_KINDS)
    g.add_argument("size", nargs="?", type=int, default=None,
                   help="point count for pairgroupoid")
    g.add_argument("--cyclic", type=int, default=None,
                   help="cyclic group order for group / dualgroup")
    g.add_argument("--order", type=int, default=None,
                   help="group order for the twosided-example")
    g.add_argument("--name", default=None)
    common(g, has_file=False)

    for name, help_text in (
            ("verify", "check all axioms of a serialized object"),
            ("dual", "emit the dual weak Kac algebra"),
            ("haar", "Haar projection and trace with checks"),
            ("markov", "Markov scalar, index and basis checks"),
            ("report", "full analysis, or re-render a report file")):
        p = sub.add_parser(name, help=help_text)
        common(p)

    p = sub.add_parser("cross", help="build a crossed product")
    p.add_argument("--action", default=None,
                   help="action file; default is the dual left action")
    common(p)

    p = sub.add_parser("duality", help="double crossed product matrix model")
    p.add_argument("--algebra", default=None,
                   help="action file for the module; default trivial action "
                        "on the target Cartan subalgebra")
    common(p)

    p = sub.add_parser("tower", help="iterated crossed product tower")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--cap", type=int, default=4096,
                   help="stop before any floor would exceed this dimension")
    common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (ParseError, WkaError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
