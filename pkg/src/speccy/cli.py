"""Batch command line interface.

Subcommands: disc, theta, eisenstein, degrees, chowla, verify.  Exit code
0 on success, 1 on input or precondition errors, 2 when `verify` finds an
identity mismatch.  Output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .cm import degree_bruteforce, degree_formula
from .eisenstein import EisensteinPackage, eisenstein_qexp
from .imq import ImQField, L_derivative_data, completed_lambda
from .lattice import discriminant_group
from .pullback import EmbeddingContext, verify_ledger
from .qseries import theta_series
from .serialize import (
    coset_label,
    frac_str,
    load_lattice,
    load_sublattice_basis,
    loglinear_json,
    parse_frac,
    parse_principal_part,
    qexp_json,
)


class InputError(Exception):
    pass


def default_precision():
    return int(os.environ.get("SPECCY_PRECISION", "30"))


def _emit(args, payload, csv_rows=None, csv_header=None):
    if args.format == "json":
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(csv_header)
        for row in csv_rows:
            writer.writerow(row)
        sys.stdout.write(out.getvalue())


def cmd_disc(args):
    lat = load_lattice(args.lattice)
    group = discriminant_group(lat)
    cosets = list(group.elements())
    payload = {
        "lattice": args.lattice,
        "rank": lat.rank,
        "det": lat.det,
        "signature": list(lat.signature),
        "level": lat.level(),
        "elementary_divisors": list(group.elementary_divisors),
        "cosets": [
            {"index": i, "coords": list(c.visible_coords()),
             "q": frac_str(group.q_map(c)), "order": c.order()}
            for i, c in enumerate(cosets)
        ],
    }
    rows = [[i, coset_label(c), frac_str(group.q_map(c)), c.order()]
            for i, c in enumerate(cosets)]
    _emit(args, payload, rows, ["index", "coords", "q", "order"])
    return 0


def cmd_theta(args):
    lat = load_lattice(args.lattice)
    th = theta_series(lat, parse_frac(args.cutoff))
    payload = {"lattice": args.lattice, "theta": qexp_json(th)}
    rows = [[frac_str(m)] + [str(v) for v in vec] for m, vec in sorted(th.coeffs.items())]
    header = ["exponent"] + [coset_label(c) or "0" for c in th.group.elements()]
    _emit(args, payload, rows, header)
    return 0


def cmd_eisenstein(args):
    lat = load_lattice(args.lattice)
    pkg = EisensteinPackage.from_lattice(lat)
    table = eisenstein_qexp(pkg, parse_frac(args.cutoff))
    K = pkg.K
    dps = args.precision
    entries = []
    for (m, coords), val in sorted(table.values.items()):
        mu = next(c for c in pkg.disc0.elements() if c.coords == coords)
        entries.append({
            "exponent": frac_str(m),
            "coset": list(mu.visible_coords()),
            "value": loglinear_json(val, K, dps),
        })
    payload = {"lattice": args.lattice, "field": {"d": K.d, "h": K.h, "w": K.w},
               "cutoff": frac_str(table.cutoff), "coefficients": entries}
    rows = [[e["exponent"], ",".join(map(str, e["coset"])),
             json.dumps(e["value"]["logs"]), e["value"]["value"]] for e in entries]
    _emit(args, payload, rows, ["exponent", "coset", "logs", "value"])
    return 0


def cmd_degrees(args):
    lat = load_lattice(args.lattice)
    pkg = EisensteinPackage.from_lattice(lat)
    m = parse_frac(args.m)
    mu = pkg.disc0.coset_by_index(args.mu)
    res = degree_formula(pkg, m, mu)
    K = pkg.K
    dps = args.precision
    payload = {
        "lattice": args.lattice,
        "m": frac_str(m),
        "mu": list(mu.visible_coords()),
        "formula": {
            "prime": res.prime,
            "weighted_count": frac_str(res.weighted_count),
            "degree": loglinear_json(res.degree, K, dps),
        },
    }
    rows_entry = [frac_str(m), args.mu, frac_str(res.weighted_count),
                  json.dumps(res.degree.to_json()["logs"])]
    header = ["m", "mu", "weighted_count", "degree_logs"]
    if args.oracle:
        oracle = degree_bruteforce(pkg, m, mu)
        payload["oracle"] = {
            "weighted_count": frac_str(oracle.weighted_count),
            "degree": loglinear_json(oracle.degree, K, dps),
            "agrees": (oracle.degree - res.degree).is_zero(),
        }
        rows_entry.append(json.dumps(oracle.degree.to_json()["logs"]))
        header.append("oracle_degree_logs")
    _emit(args, payload, [rows_entry], header)
    return 0


def cmd_chowla(args):
    if args.lattice:
        lat = load_lattice(args.lattice)
        pkg = EisensteinPackage.from_lattice(lat)
        K = pkg.K
    elif args.disc is not None:
        K = ImQField.from_discriminant(args.disc)
    else:
        raise InputError("chowla requires --lattice or --disc")
    dps = args.precision
    data = L_derivative_data(K, dps=dps)
    payload = {
        "field": {"d": K.d, "h": K.h, "w": K.w},
        "L_at_0": frac_str(data["L_at_0"]),
        "L_at_0_equals_2h_over_w": data["L_at_0"] == Fraction(2 * K.h, K.w),
        "Lprime_at_0": str(data["Lprime_at_0"]),
        "Lprime_over_L": str(data["Lprime_over_L"]),
        "functional_equation_defect": [
            str(abs(completed_lambda(K, s, dps=dps) - completed_lambda(K, 1 - s, dps=dps)))
            for s in (0.25, 0.7, 1.3)
        ],
    }
    rows = [[K.d, K.h, K.w, payload["L_at_0"], payload["Lprime_over_L"]]]
    _emit(args, payload, rows, ["d", "h", "w", "L_at_0", "Lprime_over_L"])
    return 0


def cmd_verify(args):
    lat = load_lattice(args.lattice)
    sub = load_sublattice_basis(args.sub)
    pp_text = args.pp
    if pp_text.startswith("@"):
        with open(pp_text[1:]) as fh:
            pp_text = fh.read()
    probe = json.loads(pp_text)
    max_m = max([parse_frac(k.split(",")[0]) for k in probe if k != "const"]
                or [Fraction(1)])
    ctx = EmbeddingContext.build(lat, sub, max_m + 1)
    group = discriminant_group(lat)
    pp = parse_principal_part(probe, group)
    fault = None
    if args.fault_inject:
        m_str, idx_str = args.fault_inject.split(",")
        fault = (parse_frac(m_str), int(idx_str))
    report = verify_ledger(ctx, pp, fault_negate=fault)
    payload = report.to_json()
    payload["field"] = {"d": ctx.pkg.K.d, "h": ctx.pkg.K.h, "w": ctx.pkg.K.w}
    rows = [[r["identity"], "|".join(r["key"]), r["match"]] for r in payload["rows"]]
    _emit(args, payload, rows, ["identity", "key", "match"])
    return 0 if report.all_match else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="speccy",
        description="Exact verification of CM special-divisor degree identities")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--precision", type=int, default=default_precision(),
                        help="working decimal digits (default: SPECCY_PRECISION or 30)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"),
                        default=argparse.SUPPRESS)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS)
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=lambda **kw: argparse.ArgumentParser(
                                     parents=[common], **kw))

    p = subs.add_parser("disc", help="discriminant group report")
    p.add_argument("--lattice", required=True)
    p.set_defaults(func=cmd_disc)

    p = subs.add_parser("theta", help="representation number table")
    p.add_argument("--lattice", required=True)
    p.add_argument("--cutoff", default="10")
    p.set_defaults(func=cmd_theta)

    p = subs.add_parser("eisenstein", help="a+ coefficient table")
    p.add_argument("--lattice", required=True)
    p.add_argument("--cutoff", default="2")
    p.set_defaults(func=cmd_eisenstein)

    p = subs.add_parser("degrees", help="CM divisor degree (formula and oracle)")
    p.add_argument("--lattice", required=True)
    p.add_argument("--m", required=True)
    p.add_argument("--mu", type=int, default=0)
    p.add_argument("--oracle", action="store_true")
    p.set_defaults(func=cmd_degrees)

    p = subs.add_parser("chowla", help="L-value and derivative report")
    p.add_argument("--lattice")
    p.add_argument("--disc", type=int)
    p.set_defaults(func=cmd_chowla)

    p = subs.add_parser("verify", help="finite-part identity ledger")
    p.add_argument("--lattice", required=True)
    p.add_argument("--sub", required=True)
    p.add_argument("--pp", required=True,
                   help='principal part as {"m,cosetindex": coeff}, "@file" to load')
    p.add_argument("--fault-inject", default=None,
                   help="negate one a+ coefficient: 'm,cosetindex'")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
