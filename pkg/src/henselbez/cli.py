"""Command-line front end.

Subcommands: borderbasis, multiplicity, split, lift, verify, count, oracle.
All machine output is canonical JSON on stdout (indented with --pretty);
exit code 0 for success/PASS verdicts, 1 for FAIL verdicts, 2 for usage or
parse errors.  Seeds are always echoed into reports so stochastic runs can
be replayed.
"""

from __future__ import annotations

import argparse
import sys

from .borderbasis import from_groebner
from .continuity import PerturbationExperiment, cluster_charpoly_bound, local_bezout_count
from .errors import HenselbezError, ParseError
from .groebner import buchberger, local_multiplicity_truncation, quotient_staircase
from .hensel import (
    char_poly_diagnostics,
    lift_border_basis,
    localize_residual,
    verify_lift,
)
from .localzero import multiplicity_at_origin, split_idempotent
from .polynomials import Polynomial
from .scalars import AtLeast, ComplexField
from .sysio import (
    dump_json,
    format_monomial,
    format_polynomial,
    parse_system,
    polynomial_to_json,
    scalar_to_json,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="henselbez",
        description="Border bases, series lifting, and local root-count conservation.",
    )
    parser.add_argument("--pretty", action="store_true", help="indented JSON output")
    parser.add_argument("--json", action="store_true", help="compact JSON (default)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("borderbasis", help="border basis of a zero-dimensional system")
    p.add_argument("system")
    p.add_argument("--order", default="grevlex", choices=["grevlex", "grlex", "lex"])

    p = sub.add_parser("multiplicity", help="multiplicity of the origin")
    p.add_argument("system")

    p = sub.add_parser("split", help="idempotent splitting of the local factor")
    p.add_argument("system")

    p = sub.add_parser("lift", help="lift the residual border basis along the deformation")
    p.add_argument("--input", required=True)
    p.add_argument("--precision", type=int, default=None)
    p.add_argument("--out", default=None, help="also write the report to a file")

    p = sub.add_parser("verify", help="run the lift and report its certificates")
    p.add_argument("--input", required=True)
    p.add_argument("--precision", type=int, default=None)

    p = sub.add_parser("count", help="local root-count conservation experiment")
    p.add_argument("--system", required=True)
    p.add_argument("--point", default=None, help="comma-separated coordinates (default: origin)")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap", type=float, default=1e-6, help="relative cluster gap")
    p.add_argument("--tolerance", type=float, default=1e-9, help="float zero tolerance")
    p.add_argument("--expected", type=int, default=None,
                   help="expected count (default: measured from the unperturbed system)")

    p = sub.add_parser("oracle", help="exact Groebner-side computations")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    for name in ("groebner", "staircase", "multiplicity"):
        op = osub.add_parser(name)
        op.add_argument("system")
        op.add_argument("--order", default="grevlex", choices=["grevlex", "grlex", "lex"])
        if name == "multiplicity":
            op.add_argument("--nmax", type=int, default=12)
    return parser


def _require_exact(parsed, what):
    if parsed.deformed is not None or parsed.kind == "CC":
        raise ParseError(f"{what} needs an exact undeformed system")
    return parsed.polynomials


def _cmd_borderbasis(args):
    polys = _require_exact(parse_system(args.system), "borderbasis")
    bb = from_groebner(buchberger(polys, args.order))
    report = bb.to_json_dict()
    report["certified"] = bb.certified
    report["dimension"] = bb.dimension
    return report, 0


def _cmd_multiplicity(args):
    polys = _require_exact(parse_system(args.system), "multiplicity")
    return {"r": multiplicity_at_origin(polys)}, 0


def _cmd_split(args):
    polys = _require_exact(parse_system(args.system), "split")
    rep = split_idempotent(polys)
    dom = rep.domain
    return {
        "r": rep.r,
        "nilIndex": rep.nil_index,
        "idempotent": {
            format_monomial(m): scalar_to_json(dom, c)
            for m, c in zip(rep.order_ideal.monomials, rep.idempotent_coords)
        },
        "localBasisRows": [
            [scalar_to_json(dom, c) for c in row] for row in rep.local_basis_rows
        ],
        "quotientDimension": len(rep.order_ideal),
    }, 0


def _lift_report(args):
    parsed = parse_system(args.input)
    if parsed.deformed is None:
        raise ParseError("lift needs a deformed system (kind QQ[[v]])")
    system = parsed.deformed
    if args.precision is not None:
        system = system.truncated(args.precision)
    bb0, loc = localize_residual(system.residual())
    lift = lift_border_basis(system, bb0, loc)
    verification = verify_lift(lift, system)
    ring = lift.base.domain
    diag = char_poly_diagnostics(lift)
    report = {
        "orderIdeal": [list(m) for m in lift.base.order_ideal.monomials],
        "rules": {
            format_monomial(beta): [scalar_to_json(ring, c) for c in row]
            for beta, row in sorted(
                lift.base.rules.items(), key=lambda kv: (sum(kv[0]), kv[0])
            )
        },
        "residualRules": {
            format_monomial(beta): [
                scalar_to_json(lift.residual.domain, c) for c in row
            ]
            for beta, row in sorted(
                lift.residual.rules.items(), key=lambda kv: (sum(kv[0]), kv[0])
            )
        },
        "detS": polynomial_to_json(lift.det_s),
        "verification": verification.to_json_dict(),
        "charPoly": [
            {
                "variable": d.variable + 1,
                "coefficients": [scalar_to_json(ring, mu) for mu in d.coefficients],
                "residualIsPurePower": d.residual_is_pure_power,
                "valuations": [
                    f">={v.bound}" if isinstance(v, AtLeast) else v
                    for v in d.valuations
                ],
                "valuationAtLeastOne": d.valuation_at_least_one,
                "valuationAtLeastJ": d.valuation_at_least_j,
            }
            for d in diag
        ],
        "precision": lift.precision,
        "localMultiplicity": loc.r,
        "identityLocalization": loc.is_identity,
    }
    return report, verification


def _cmd_lift(args):
    report, verification = _lift_report(args)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump_json(report, pretty=True) + "\n")
    return report, 0 if verification.passed else 1


def _cmd_verify(args):
    report, verification = _lift_report(args)
    out = dict(report["verification"])
    out["verdict"] = "PASS" if verification.passed else "FAIL"
    return out, 0 if verification.passed else 1


def _parse_point(text, nvars):
    if text is None:
        return (0j,) * nvars
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != nvars:
        raise ParseError(f"point needs {nvars} coordinates")
    try:
        return tuple(complex(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad point coordinate in {text!r}") from None


def _cmd_count(args):
    parsed = parse_system(args.system)
    if parsed.deformed is not None:
        raise ParseError("count needs an undeformed system")
    domain = ComplexField(args.tolerance)
    system = [
        p.map_coefficients(lambda c: complex(domain.from_fraction(c))
                           if not isinstance(c, complex) else c, domain)
        for p in parsed.polynomials
    ]
    point = _parse_point(args.point, parsed.nvars)
    expected = args.expected
    if expected is None:
        # measure the unperturbed local count once; the experiment then
        # checks that perturbations conserve it
        probe = PerturbationExperiment(
            base_system=system, base_point=point, r=0, epsilon=args.eps,
            delta=0.0, trials=1, seed=args.seed, cluster_gap=args.gap,
        )
        probe_report = local_bezout_count(probe)
        expected = probe_report.trials[0].sum_inside
    exp = PerturbationExperiment(
        base_system=system,
        base_point=point,
        r=expected,
        epsilon=args.eps,
        delta=args.delta,
        trials=args.trials,
        seed=args.seed,
        cluster_gap=args.gap,
    )
    report = local_bezout_count(exp)
    out = report.to_json_dict()
    out["clusterBoundPerVariable"] = [
        cluster_charpoly_bound(report, i) for i in range(parsed.nvars)
    ]
    return out, 0 if report.verdict else 1


def _cmd_oracle(args):
    polys = _require_exact(parse_system(args.system), "oracle")
    if args.oracle_command == "groebner":
        gb = buchberger(polys, args.order)
        return {
            "order": gb.order,
            "generators": [format_polynomial(g) for g in gb.generators],
            "cofactors": [
                [format_polynomial(c) for c in row] for row in gb.cofactors
            ],
            "cofactorsValid": gb.verify_cofactors(),
        }, 0
    if args.oracle_command == "staircase":
        staircase = quotient_staircase(buchberger(polys, args.order))
        return {
            "monomials": [list(m) for m in staircase.order_ideal.monomials],
            "dimension": staircase.dimension,
        }, 0
    est = local_multiplicity_truncation(polys, nmax=args.nmax, order=args.order)
    if est is None:
        return {"stable": False, "nmax": args.nmax}, 1
    return {"stable": True, "r": est.r, "stabilizedAt": est.stabilized_at}, 0


_COMMANDS = {
    "borderbasis": _cmd_borderbasis,
    "multiplicity": _cmd_multiplicity,
    "split": _cmd_split,
    "lift": _cmd_lift,
    "verify": _cmd_verify,
    "count": _cmd_count,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HenselbezError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(dump_json(report, pretty=args.pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
