"""Command-line interface: ``autoconv <subcommand> [options]``.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
invalid input. Machine-readable output (json, csv) is a deterministic
function of the arguments.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bound, discrete, extremal, lemmas
from .kernels import Params

OK, FAILED, INVALID = 0, 1, 2
FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    tol: float = 1e-12
    seed: int = 0
    grid: int = 10**6
    output_format: str = "json"
    output_path: Path | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("--tol must be positive")
        if self.grid < 2:
            raise ValueError("--grid must be >= 2")
        if self.output_format not in FORMATS:
            raise ValueError(f"--format must be one of {FORMATS}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-12, help="quadrature tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", type=int, default=None,
                        help="grid size for the Selberg minimum (default 1e6; 1e5 for sweep)")
    common.add_argument("--format", dest="output_format", choices=FORMATS, default="json")
    common.add_argument("--output", dest="output_path", type=Path, default=None,
                        help="output file (default: stdout, or $AUTOCONV_OUTPUT_DIR/<cmd>.<fmt>)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="autoconv", description="Lower bounds for the sup-norm of autoconvolutions.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    s = sub.add_parser("bound", parents=[common], help="compute the lower bound")
    s.add_argument("--delta", type=float, default=0.13)
    s.add_argument("--n", type=int, default=22)
    s.add_argument("--simple", action="store_true", help="drop all nonzero frequencies")

    s = sub.add_parser("sweep", parents=[common], help="bound over a (delta, n) grid, as CSV")
    s.add_argument("--delta-min", type=float, default=0.05)
    s.add_argument("--delta-max", type=float, default=0.24)
    s.add_argument("--delta-step", type=float, default=0.005)
    s.add_argument("--n-min", type=int, default=5)
    s.add_argument("--n-max", type=int, default=40)
    s.add_argument("--workers", type=int, default=1)

    s = sub.add_parser("verify", parents=[common], help="lemma chain on random step pdfs")
    s.add_argument("--count", type=int, default=100)

    s = sub.add_parser("poly", parents=[common], help="ratio R(p) of a nonnegative polynomial")
    s.add_argument("--coeffs", required=True, help="'1,1,0,1' or '1101', constant term first")

    s = sub.add_parser("bset", parents=[common], help="B*[g] corollary checks")
    s.add_argument("--set", dest="elements", required=True, help="comma-separated integers")
    s.add_argument("--n", type=int, required=True)

    s = sub.add_parser("sym", parents=[common], help="largest symmetric subset of a union of intervals")
    s.add_argument("--intervals", required=True, help="'a:b,c:d' with 0 <= a < b <= 1")

    s = sub.add_parser("extremal", parents=[common], help="probes on discretizations of h")
    s.add_argument("--probe", type=int, choices=(1, 2), default=2)
    s.add_argument("--levels", default="4-10", help="'4-10' or '4,6,8'")
    return p


# ------------------------------------------------------------------ helpers


def _add_err_siblings(d: dict) -> dict:
    """Give every float field without one an ``<name>_err`` sibling of 0.0."""
    out = {}
    for k, v in d.items():
        out[k] = v
        if isinstance(v, float) and not k.endswith(("_err", "error_budget")) and f"{k}_err" not in d:
            out[f"{k}_err"] = 0.0
    return out


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValueError(f"cannot parse integer list {text!r}") from None


def _parse_intervals(text: str) -> discrete.IntervalSet:
    pairs = []
    for item in text.split(","):
        try:
            a, b = item.split(":")
            pairs.append((float(a), float(b)))
        except ValueError:
            raise ValueError(f"cannot parse interval {item!r}; expected a:b") from None
    return discrete.IntervalSet(tuple(pairs))


def _parse_levels(text: str) -> list[int]:
    if "-" in text:
        lo, hi = (int(t) for t in text.split("-", 1))
        levels = list(range(lo, hi + 1))
    else:
        levels = _parse_ints(text)
    if not levels or min(levels) < 0 or max(levels) > 16:
        raise ValueError("levels must lie in 0..16")
    return levels


@dataclass
class Result:
    payload: dict
    ok: bool
    table: list[dict] | None = None
    text: list[str] | None = None


# --------------------------------------------------------------- subcommands


def _cmd_bound(args, cfg: RunConfig) -> Result:
    if args.simple:
        rep = bound.simple_bound(args.delta)
    else:
        rep = bound.full_bound(Params(args.delta, args.n), cfg.grid)
    d = rep.to_dict()
    d["bound_err"] = d["error_budget"]
    payload = _add_err_siblings(d)
    text = [
        f"delta      = {rep.delta!r}",
        f"u          = {rep.u!r}",
        f"n          = {rep.n}",
        f"||K||_2^2  = {rep.kss_l2sq!r}  (+/- {rep.kss_l2sq_err:.3g})",
        f"min G      = {rep.min_g!r}" + ("" if rep.min_g_err is None else f"  (grid gap {rep.min_g_err:.3g})"),
        f"L          = {rep.L!r}",
        f"R          = {rep.R!r}",
        f"bound      = {rep.bound!r}  (rounding cost {rep.error_budget:.3g})",
    ]
    return Result(payload, rep.bound > 1.0, [payload], text)


def _cmd_sweep(args, cfg: RunConfig) -> Result:
    deltas = bound.delta_grid(args.delta_min, args.delta_max, args.delta_step)
    ns = range(args.n_min, args.n_max + 1)
    res = bound.sweep(deltas, ns, grid=cfg.grid, workers=args.workers)
    rows = [dict(zip(bound.CSV_COLUMNS, r.csv_row())) for r in res.reports]
    best = res.best
    payload = {
        "points": len(rows),
        "skipped": len(res.skipped),
        "best": None if best is None else _add_err_siblings(best.to_dict()),
        "reports": [_add_err_siblings(r.to_dict()) for r in res.reports],
    }
    text = [f"{len(rows)} points, {len(res.skipped)} skipped"]
    if best is not None:
        text.append(f"best: delta={best.delta!r} n={best.n} bound={best.bound!r}")
    return Result(payload, True, rows, text)


def _cmd_verify(args, cfg: RunConfig) -> Result:
    if args.count < 1:
        raise ValueError("--count must be >= 1")
    summary = lemmas.run_lemma_suite(args.count, cfg.seed, grid=cfg.grid,
                                     bound=lemmas.THEOREM_CONSTANT)
    payload = _add_err_siblings(summary.to_dict())
    text = [f"{summary.passed}/{summary.count} passed (seed {summary.seed})",
            f"min ||f*f||_inf = {summary.min_sup!r}"]
    text += [f"  instance {i}: failed {', '.join(c)}" for i, c in summary.failures]
    row = {k: v for k, v in payload.items() if k != "failures"}
    return Result(payload, summary.passed == summary.count, [row], text)


def _cmd_poly(args, cfg: RunConfig) -> Result:
    p = discrete.parse_coeffs(args.coeffs)
    r = discrete.ratio_R(p)
    payload = _add_err_siblings({
        "coefficients": list(p.coefficients),
        "degree": p.degree,
        "p_at_1": p.at_one(),
        "height_p2": discrete.square_height(p),
        "ratio_R": r,
        "constant": discrete.CONSTANT,
        "holds": r > discrete.CONSTANT,
    })
    text = [f"deg p = {p.degree}, p(1) = {p.at_one()}, H(p^2) = {payload['height_p2']}",
            f"R(p) = {r!r} > {discrete.CONSTANT}: {payload['holds']}"]
    row = {k: v for k, v in payload.items() if k != "coefficients"}
    return Result(payload, payload["holds"], [row], text)


def _cmd_bset(args, cfg: RunConfig) -> Result:
    A = discrete.IntSet(tuple(_parse_ints(args.elements)), args.n)
    c3 = discrete.check_corollary3(A)
    c4 = discrete.check_corollary4(A)
    R, chain = discrete.ratio_lower_chain(A)
    payload = _add_err_siblings({
        "size": len(A), "n": A.universe_n, "g": c3.g,
        "sigma": discrete.SIGMA,
        "sigma_sqrt_gn": c3.rhs, "corollary3": c3.holds,
        "multiplicity_rhs": c4.rhs, "corollary4": c4.holds,
        "ratio_R": R, "gn_over_size2": chain,
    })
    text = [f"|A| = {len(A)}, n = {A.universe_n}, g = {c3.g}",
            f"|A| < sigma sqrt(gn) = {c3.rhs!r}: {c3.holds}",
            f"g > 0.631 eps^2 n = {c4.rhs!r}: {c4.holds}",
            f"R(p) = {R!r} <= gn/|A|^2 = {chain!r}"]
    return Result(payload, c3.holds and c4.holds, [payload], text)


def _cmd_sym(args, cfg: RunConfig) -> Result:
    B = _parse_intervals(args.intervals)
    m = discrete.symmetric_subset_measure(B)
    oracle = discrete.symmetric_subset_oracle(B)
    lower = discrete.CONSTANT * B.measure**2
    payload = {
        "measure": B.measure, "measure_err": 0.0,
        "symmetric_measure": m, "symmetric_measure_err": abs(m - oracle),
        "lower": lower, "lower_err": 0.0,
        "holds": m > lower,
    }
    text = [f"mu(B) = {B.measure!r}",
            f"largest symmetric subset = {m!r} (oracle {oracle!r})",
            f"> 0.631 mu(B)^2 = {lower!r}: {m > lower}"]
    return Result(payload, m > lower, [payload], text)


def _cmd_extremal(args, cfg: RunConfig) -> Result:
    levels = _parse_levels(args.levels)
    stats = extremal.h_stats(tol=max(cfg.tol, 1e-14))
    reports = extremal.probe_levels(args.probe, levels)
    rows = [_add_err_siblings(r.to_dict()) for r in reports]
    payload = {"h_stats": stats.to_dict(), "probe": args.probe, "reports": rows}
    if args.probe == 2:
        ref = bound.full_bound(Params(0.13, 22), cfg.grid)
        payload["implied_constant"] = extremal.implied_constant(ref.L, ref.R)
        payload["implied_constant_err"] = 1e-12
    text = [f"h*h: L1 = {stats.l1!r}, sup = {stats.sup!r}, L2^2 = {stats.l2sq!r}"]
    text += [f"level {r.level:2d}: ratio {r.ratio!r}" + ("  FLAGGED" if r.flagged else "")
             for r in reports]
    # a flagged probe is a report about an open conjecture, not a failed check
    ok = stats.l1_err < 1e-6 and stats.l2sq_err < 1e-6
    return Result(payload, ok, rows, text)


COMMANDS = {
    "bound": _cmd_bound, "sweep": _cmd_sweep, "verify": _cmd_verify, "poly": _cmd_poly,
    "bset": _cmd_bset, "sym": _cmd_sym, "extremal": _cmd_extremal,
}


def _render(result: Result, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.payload, indent=2, sort_keys=True, allow_nan=False) + "\n"
    if fmt == "text":
        return "\n".join(result.text or []) + "\n"
    buf = io.StringIO()
    rows = result.table or []
    fields = list(rows[0]) if rows else []
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _destination(cfg: RunConfig) -> Path | None:
    if cfg.output_path is not None:
        return cfg.output_path
    outdir = os.environ.get("AUTOCONV_OUTPUT_DIR")
    if outdir:
        return Path(outdir) / f"{cfg.subcommand}.{cfg.output_format}"
    return None


def run(config: RunConfig, args: argparse.Namespace) -> int:
    result = COMMANDS[config.subcommand](args, config)
    text = _render(result, config.output_format)
    dest = _destination(config)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    return OK if result.ok else FAILED


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    grid = args.grid if args.grid is not None else (10**5 if args.subcommand == "sweep" else 10**6)
    try:
        config = RunConfig(args.subcommand, args.tol, args.seed, grid,
                           args.output_format, args.output_path)
        return run(config, args)
    except ValueError as exc:
        print(f"autoconv: error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
