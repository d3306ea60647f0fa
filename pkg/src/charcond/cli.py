"""Command-line frontend.

Subcommands: ``sample``, ``cond``, ``kostlan``, ``bounds``, ``experiment``,
``second-moment``.  Every report has a ``--json`` mirror that validates
against ``cli_report.schema.json`` shipped next to this module.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 statistical
verification failure (``kostlan`` and ``experiment --verify`` only).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds as bounds_mod
from . import condition as cond_mod
from .experiments import (
    ALL_FLAVORS,
    ExperimentConfig,
    InvariantViolation,
    emit_table,
    normalized_curves,
    run_cond_experiment,
    run_second_moment_check,
    verify_theorem_bounds,
)
from .linalg import EigensolverError, eigenvalues, polynomial_roots, sample_ginibre
from .polynomial import Polynomial, char_poly_from_spectrum
from .randtheory import verify_kostlan

__all__ = ["main", "entry_point"]

_FLAVOR_ALIASES = {
    "e": "euclidean",
    "w": "weyl",
    "c": "componentwise",
    "p": "projective",
}

# reserved exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse flavor that exits 1 (not 2) on bad usage."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_seed() -> int:
    env = os.environ.get("CHARCOND_SEED")
    if env is None:
        return 1
    try:
        return int(env)
    except ValueError:
        raise _UsageError(f"CHARCOND_SEED must be an integer, got {env!r}")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}j"


def _json_num(x: float):
    return float(x) if math.isfinite(x) else None


def _json_complex(z: complex):
    return [_json_num(z.real), _json_num(z.imag)]


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise _UsageError(f"cannot parse complex number {text!r}")


def _parse_matrix(spec: str) -> np.ndarray:
    """diag:a,b,... | ginibre:n:seed | file:path (CSV of re,im pairs)."""
    if spec.startswith("diag:"):
        entries = [_parse_complex(s) for s in spec[len("diag:") :].split(",") if s]
        if not entries:
            raise _UsageError("diag: needs at least one entry")
        return np.diag(np.array(entries, dtype=np.complex128))
    if spec.startswith("ginibre:"):
        parts = spec[len("ginibre:") :].split(":")
        if len(parts) != 2:
            raise _UsageError("ginibre spec is ginibre:<n>:<seed>")
        try:
            n, seed = int(parts[0]), int(parts[1])
        except ValueError:
            raise _UsageError("ginibre spec needs integer n and seed")
        if n < 1:
            raise _UsageError("ginibre dimension must be >= 1")
        return sample_ginibre(n, seed)
    if spec.startswith("file:"):
        path = spec[len("file:") :]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                rows = [line.strip() for line in fh if line.strip()]
        except OSError as exc:
            raise _UsageError(f"cannot read matrix file: {exc}")
        mat = []
        for line in rows:
            try:
                vals = [float(v) for v in line.split(",")]
            except ValueError:
                raise _UsageError(f"matrix file has a non-numeric entry: {line!r}")
            if len(vals) % 2 != 0:
                raise _UsageError("matrix file rows need re,im pairs")
            mat.append([complex(vals[2 * j], vals[2 * j + 1]) for j in range(len(vals) // 2)])
        arr = np.array(mat, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise _UsageError("matrix file must be square")
        return arr
    raise _UsageError(f"unknown matrix spec {spec!r} (use diag:, ginibre:, file:)")


def _matrix_rows_text(a: np.ndarray) -> list[str]:
    return [
        ",".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row)
        for row in a
    ]


def _cmd_sample(args) -> int:
    mats = [sample_ginibre(args.n, args.seed + k) for k in range(args.count)]
    if args.json:
        payload = {
            "command": "sample",
            "n": args.n,
            "seed": args.seed,
            "count": args.count,
            "matrices": [
                [[_json_complex(z) for z in row] for row in m] for m in mats
            ],
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    out = []
    for k, m in enumerate(mats):
        if k:
            out.append("")
        out.extend(_matrix_rows_text(m))
    print("\n".join(out))
    return EXIT_OK


def _records_for_poly(p: Polynomial):
    roots = polynomial_roots(p)
    moduli = np.abs(roots)
    records = []
    for i, z in enumerate(roots):
        try:
            rec = {
                "lambda": complex(z),
                "ln_cond": cond_mod.ln_cond(p, z),
                "ln_cond_weyl": cond_mod.ln_cond_weyl(p, z),
                "ln_cw": cond_mod.ln_cond_componentwise(p, z),
                "ln_mu": cond_mod.ln_mu_projective(p, z),
                "ln_pair_bound": cond_mod.ln_pair_product_bound(moduli, i),
                "multiple": False,
            }
        except ValueError:
            rec = {
                "lambda": complex(z),
                "ln_cond": float("nan"),
                "ln_cond_weyl": float("nan"),
                "ln_cw": float("nan"),
                "ln_mu": float("nan"),
                "ln_pair_bound": cond_mod.ln_pair_product_bound(moduli, i),
                "multiple": True,
            }
        records.append(rec)
    return records


def _cmd_cond(args) -> int:
    if args.matrix is not None:
        a = _parse_matrix(args.matrix)
        spec = eigenvalues(a)
        p = char_poly_from_spectrum(spec.eigenvalues)
        prof = cond_mod.cond_profile(p, spec)
        records = [
            {
                "lambda": r.lam,
                "ln_cond": r.ln_cond,
                "ln_cond_weyl": r.ln_cond_weyl,
                "ln_cw": r.ln_cw,
                "ln_mu": r.ln_mu,
                "ln_pair_bound": r.ln_pair_bound,
                "multiple": r.multiple,
            }
            for r in prof.records
        ]
        extremes = {
            "ln_cond_min": prof.ln_cond_min,
            "ln_cond_max": prof.ln_cond_max,
            "ln_cw_max": prof.ln_cw_max,
        }
        flagged = prof.n_flagged
        source = args.matrix
    else:
        coeffs = [_parse_complex(s) for s in args.poly.split(",") if s]
        p = Polynomial(coeffs)
        if p.degree < 1:
            raise _UsageError("polynomial must have degree >= 1")
        records = _records_for_poly(p)
        good = [r for r in records if not r["multiple"]]
        if not good:
            raise EigensolverError("every root is numerically multiple", np.empty(0))
        extremes = {
            "ln_cond_min": min(r["ln_cond"] for r in good),
            "ln_cond_max": max(r["ln_cond"] for r in good),
            "ln_cw_max": max(r["ln_cw"] for r in good),
        }
        flagged = len(records) - len(good)
        source = args.poly

    if args.json:
        payload = {
            "command": "cond",
            "input": source,
            "records": [
                {
                    "lambda": _json_complex(r["lambda"]),
                    "ln_cond": _json_num(r["ln_cond"]),
                    "ln_cond_weyl": _json_num(r["ln_cond_weyl"]),
                    "ln_cw": _json_num(r["ln_cw"]),
                    "ln_mu": _json_num(r["ln_mu"]),
                    "ln_pair_bound": _json_num(r["ln_pair_bound"]),
                    "multiple": r["multiple"],
                }
                for r in records
            ],
            "extremes": {k: _json_num(v) for k, v in extremes.items()},
            "flagged": flagged,
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    for r in records:
        tag = "  [multiple]" if r["multiple"] else ""
        print(
            f"lambda={_fmt_complex(r['lambda'])}  "
            f"ln_cond={_fmt(r['ln_cond'])}  "
            f"ln_cond_weyl={_fmt(r['ln_cond_weyl'])}  "
            f"ln_cw={_fmt(r['ln_cw'])}  "
            f"ln_mu={_fmt(r['ln_mu'])}  "
            f"ln_pair_bound={_fmt(r['ln_pair_bound'])}{tag}"
        )
    print(
        f"extremes: ln_cond_min={_fmt(extremes['ln_cond_min'])}  "
        f"ln_cond_max={_fmt(extremes['ln_cond_max'])}  "
        f"ln_cw_max={_fmt(extremes['ln_cw_max'])}  flagged={flagged}"
    )
    return EXIT_OK


def _cmd_kostlan(args) -> int:
    rep = verify_kostlan(args.n, args.trials, args.seed)
    if args.json:
        payload = {
            "command": "kostlan",
            "n": rep.n,
            "trials": rep.trials,
            "trials_used": rep.trials_used,
            "dropped": rep.dropped,
            "seed": args.seed,
            "order_stats": [
                {"k": k, "statistic": _json_num(s), "p_value": _json_num(p)}
                for k, s, p in rep.order_stats
            ],
            "ln_det_sq": {
                "mean": _json_num(rep.ln_det_sq_mean),
                "se": _json_num(rep.ln_det_sq_se),
                "theory": _json_num(rep.ln_det_sq_theory),
            },
            "ks_passed": rep.ks_passed,
            "det_passed": rep.det_passed,
            "passed": rep.passed,
        }
        print(json.dumps(payload, indent=2))
        return EXIT_OK if rep.passed else EXIT_VERIFY
    print(f"kostlan n={rep.n} trials={rep.trials} used={rep.trials_used} dropped={rep.dropped}")
    for k, s, p in rep.order_stats:
        print(f"  order stat k={k}: KS={_fmt(s)} p={_fmt(p)}")
    print(
        f"  ln|det|^2: mean={_fmt(rep.ln_det_sq_mean)} "
        f"theory={_fmt(rep.ln_det_sq_theory)} se={_fmt(rep.ln_det_sq_se)}"
    )
    print(f"  result: {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_VERIFY


def _cmd_bounds(args) -> int:
    try:
        value = bounds_mod.evaluate_bound(args.kind, args.n, i=args.i, offset=args.offset)
    except ValueError as exc:
        raise _UsageError(str(exc))
    if args.json:
        payload = {
            "command": "bounds",
            "kind": args.kind,
            "n": args.n,
            "i": args.i,
            "offset": args.offset,
            "value": _json_num(value),
        }
        print(json.dumps(payload, indent=2))
    else:
        print(_fmt(value))
    return EXIT_OK


def _parse_flavors(text: str) -> frozenset:
    names = set()
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        part = _FLAVOR_ALIASES.get(part, part)
        if part not in ALL_FLAVORS:
            raise _UsageError(f"unknown flavor {part!r}")
        names.add(part)
    if not names:
        raise _UsageError("need at least one flavor")
    return frozenset(names)


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        n_min=args.n_min,
        n_max=args.n_max,
        trials_per_n=args.trials,
        master_seed=args.seed,
        flavors=_parse_flavors(args.flavors),
        workers=args.workers,
        entry_variance=args.entry_variance,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise _UsageError(str(exc))
    table = run_cond_experiment(cfg)
    if args.csv:
        table.write_csv(args.csv)
    curves = None
    if args.table_out is not None:
        curves = normalized_curves(table)
        emit_table(curves.cond_min_over_n, args.table_out + "fmin.table")
        if curves.cond_max_normalized:
            emit_table(curves.cond_max_normalized, args.table_out + "fmaxloglog.table")
        emit_table(curves.cw_max_over_ln_n, args.table_out + "fmaxcomploghalf.table")
    report = verify_theorem_bounds(table) if args.verify else None

    if args.json:
        payload = {
            "command": "experiment",
            "config": {
                "n_min": cfg.n_min,
                "n_max": cfg.n_max,
                "trials_per_n": cfg.trials_per_n,
                "master_seed": cfg.master_seed,
                "flavors": sorted(cfg.flavors),
                "workers": cfg.workers,
                "entry_variance": cfg.entry_variance,
            },
            "rows": [
                {
                    "n": r.n,
                    "trials_used": r.trials_used,
                    "dropped": r.dropped,
                    "avg_ln_cond_min": _json_num(r.avg_ln_cond_min),
                    "se_min": _json_num(r.se_min),
                    "avg_ln_cond_max": _json_num(r.avg_ln_cond_max),
                    "se_max": _json_num(r.se_max),
                    "avg_ln_cw_max": _json_num(r.avg_ln_cw_max),
                    "se_cw": _json_num(r.se_cw),
                    "avg_ln_cond_mean_i": _json_num(r.avg_ln_cond_mean_i),
                    "se_mean_i": _json_num(r.se_mean_i),
                }
                for r in table.rows
            ],
            "verify": None
            if report is None
            else {
                "passed": report.passed,
                "rows": [
                    {
                        "n": c.n,
                        "average_bound": _json_num(c.average_bound),
                        "average_bound_passed": c.average_bound_passed,
                        "floor": _json_num(c.floor),
                        "floor_passed": c.floor_passed,
                    }
                    for c in report.rows
                ],
            },
        }
        print(json.dumps(payload, indent=2))
    else:
        print(
            "n trials avg_ln_cond_min avg_ln_cond_max avg_ln_cw_max "
            "avg_ln_cond_mean_i dropped"
        )
        for r in table.rows:
            print(
                f"{r.n} {r.trials_used} {_fmt(r.avg_ln_cond_min)} "
                f"{_fmt(r.avg_ln_cond_max)} {_fmt(r.avg_ln_cw_max)} "
                f"{_fmt(r.avg_ln_cond_mean_i)} {r.dropped}"
            )
        if report is not None:
            for c in report.rows:
                print(
                    f"verify n={c.n}: average-bound "
                    f"{'PASS' if c.average_bound_passed else 'FAIL'} "
                    f"({_fmt(c.avg_ln_cond_mean_i)} vs {_fmt(c.average_bound)}), "
                    f"floor {'PASS' if c.floor_passed else 'FAIL'} "
                    f"({_fmt(c.avg_ln_cond_min)} vs {_fmt(c.floor)})"
                )
            print(f"verify result: {'PASS' if report.passed else 'FAIL'}")
    if report is not None and not report.passed:
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_second_moment(args) -> int:
    rep = run_second_moment_check(args.n, args.trials, args.seed)
    if args.json:
        payload = {
            "command": "second-moment",
            "n": rep.n,
            "trials": rep.trials,
            "trials_used": rep.trials_used,
            "dropped": rep.dropped,
            "seed": args.seed,
            "ln_mean_cond_sq": _json_num(rep.ln_mean_cond_sq),
            "ln_lower_bound": _json_num(rep.ln_lower_bound),
            "passed": rep.passed,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(
            f"second moment n={rep.n} trials={rep.trials} used={rep.trials_used} "
            f"dropped={rep.dropped}"
        )
        print(
            f"  ln(mean cond^2)={_fmt(rep.ln_mean_cond_sq)} "
            f"ln(bound)={_fmt(rep.ln_lower_bound)} "
            f"{'PASS' if rep.passed else 'FAIL'}"
        )
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="charcond", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_seed(p):
        p.add_argument(
            "--seed",
            type=int,
            default=None,
            help="master seed (default: CHARCOND_SEED env var, else 1)",
        )

    p = sub.add_parser("sample", help="sample complex Ginibre matrices")
    p.add_argument("--n", type=int, required=True)
    add_seed(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("cond", help="condition profile of a matrix or polynomial")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="diag:a,b | ginibre:n:seed | file:path")
    g.add_argument("--poly", help="ascending coefficients, comma separated")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("kostlan", help="verify the chi-square law of squared moduli")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    add_seed(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p.add_argument("--kind", required=True, choices=bounds_mod.BOUND_KINDS)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--offset", type=float, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("experiment", help="Monte Carlo condition statistics")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    add_seed(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument(
        "--entry-variance",
        type=float,
        default=2.0,
        help="E|z|^2 of matrix entries (2 = standard normal real and "
        "imaginary parts; 1 reproduces the reference growth curves)",
    )
    p.add_argument("--flavors", default="euclidean,weyl,componentwise,projective")
    p.add_argument("--csv", default=None, help="write the per-n table as CSV")
    p.add_argument(
        "--table-out",
        default=None,
        help="path prefix for the two-column curve files",
    )
    p.add_argument("--verify", action="store_true", help="check theorem bounds")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("second-moment", help="sample second moment of cond")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    add_seed(p)
    p.add_argument("--json", action="store_true")

    return parser


_HANDLERS = {
    "sample": _cmd_sample,
    "cond": _cmd_cond,
    "kostlan": _cmd_kostlan,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
    "second-moment": _cmd_second_moment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        return _HANDLERS[args.cmd](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except _UsageError as exc:
        print(f"charcond: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EigensolverError, InvariantViolation, OverflowError) as exc:
        print(f"charcond: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"charcond: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry_point() -> None:
    sys.exit(main())
