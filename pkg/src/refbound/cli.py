"""Command-line entry point.

Exit status: 0 on success, 1 when a run that should exclude a degree comes
back Inconclusive, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import bounds as B
from . import engine as E
from . import oracle as O
from . import reference as R
from .census import ConfigError, count_real_quadratic, count_totally_real_cubic

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2


def parse_volume(text: str) -> float:
    """Plain real, or a multiple of pi^2 written with the suffix `pi2` (e.g. 108pi2)."""
    s = text.strip().lower().replace(" ", "")
    scale = 1.0
    if s.endswith("pi2"):
        s, scale = s[:-3], B.PI2
        s = s.rstrip("*") or "1"
    try:
        val = float(Fraction(s)) * scale
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a volume: {text!r}")
    if not val > 0 or math.isinf(val):
        raise argparse.ArgumentTypeError(f"volume must be positive and finite: {text!r}")
    return val


def parse_positive(text: str) -> float:
    try:
        val = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not val > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return val


def parse_shards(text: str):
    """Either a shard count or comma-separated closed ranges lo-hi."""
    text = text.strip()
    if text.isdigit():
        return int(text)
    out = []
    try:
        for part in text.split(","):
            lo, hi = part.split("-")
            out.append((int(lo), int(hi)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad shard spec {text!r}")
    return out


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print("\n".join(lines))


def cmd_volume_cap(args) -> int:
    v = B.agol_volume_cap(args.lambda1)
    payload = {"lambda1": args.lambda1, "volume_cap": v, "volume_cap_pi2": v / B.PI2,
               "rounded_up_pi2": math.ceil(v / B.PI2)}
    _emit(args, payload, [f"volume cap = {v / B.PI2:.6f} pi^2 = {v:.6f} (rounded up: {math.ceil(v / B.PI2)} pi^2)"])
    return EXIT_OK


def _trace_lines(state) -> list[str]:
    out = []
    for t in state.trace:
        vals = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in t.values.items())
        out.append(f"  {t.name}: {vals}")
    return out


def cmd_exclude(args) -> int:
    v = E.exclude_degree(args.degree, args.volume_cap)
    lines = [f"degree {args.degree}: {v.outcome}"]
    if v.witness:
        lines.append(f"  upper {v.witness[0]:.6f} < lower {v.witness[1]:.6f}")
    lines += _trace_lines(v.final_state)
    _emit(args, v.as_dict(), lines)
    return EXIT_OK if v.excluded else EXIT_INCONCLUSIVE


def cmd_max_degree(args) -> int:
    res = E.max_degree(args.volume_cap)
    lines = [f"max degree: {res.degree}", f"totally real degree: {res.totally_real_degree}"]
    for n, v in res.verdicts.items():
        lines.append(f"  degree {n}: {v.outcome}")
    g = res.generic
    lines.append(f"  degrees >= {g['degree']}: upper {g['delta_upper']:.4f} vs lower {g['delta_lower']:.4f}"
                 f" ({'holds' if g['holds'] else 'fails'})")
    lines += [f"warning: {w}" for w in res.warnings]
    for w in res.warnings:
        print(f"warning: {w}", file=sys.stderr)
    payload = {"max_degree": res.degree, "totally_real_degree": res.totally_real_degree,
               "verdicts": {n: v.outcome for n, v in res.verdicts.items()}, "generic": g,
               "warnings": res.warnings}
    _emit(args, payload, lines)
    return EXIT_OK if not res.warnings else EXIT_INCONCLUSIVE


def cmd_disc_table(args) -> int:
    rows = []
    lines = [f"mode {args.mode}", "degree  computed   rounded  reference"]
    ref_table = R.DISC_TABLE_UNCONDITIONAL if args.mode == "unconditional" else R.DISC_TABLE_RANK12
    for n in sorted(ref_table):
        row = E.disc_table_row(n, args.mode)
        ref = ref_table[n]
        strict = "<" if args.mode == "unconditional" and n in R.DISC_TABLE_STRICT else " "
        lines.append(f"{n:6d}  {row.delta_upper:9.3f}  {row.rounded:7d}  {strict}{ref}")
        rows.append({"degree": n, "computed": row.delta_upper, "rounded": row.rounded, "reference": ref})
    payload = {"mode": args.mode, "rows": rows}
    if args.mode == "rank12":
        top = E.rank12_max_degree()
        payload["max_degree"] = top
        lines.append(f"largest surviving degree: {top}")
    _emit(args, payload, lines)
    return EXIT_OK


def _limit(delta: float, degree: int, strict: bool) -> int:
    val = Fraction(delta) ** degree
    lim = math.floor(val)
    if strict and lim == val:
        lim -= 1
    return int(lim)


def cmd_count(args) -> int:
    kind = "quadratic" if args.quadratic else "cubic"
    degree = 2 if args.quadratic else 3
    limit = _limit(args.delta_max, degree, args.strict)
    fn = count_real_quadratic if args.quadratic else count_totally_real_cubic
    shards = args.shards if args.shards is not None else (8 if args.quadratic else None)
    res = fn(limit, shards=shards, threads=args.threads, checkpoint=args.checkpoint, emit_dir=args.emit_fields)
    payload = res.as_dict()
    lines = [f"{kind} fields with discriminant <= {limit}: {res.count}"]
    if args.verbose:
        lines += [f"  shard [{lo}, {hi}]: {c}" for lo, hi, c in res.shards]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_tower_window(args) -> int:
    win = O.tower_window(args.degree, args.grh)
    flag = "GRH" if args.grh else "unconditional"
    if win is None:
        _emit(args, {"degree": args.degree, "conditional": flag, "empty": True}, [f"degree {args.degree}: empty"])
    else:
        _emit(args, {"degree": args.degree, "conditional": flag, "lower": win[0], "upper": win[1]},
              [f"degree {args.degree} ({flag}): [{win[0]:.4f}, {win[1]:.4f}]"])
    return EXIT_OK


def cmd_report(args) -> int:
    from .report import write_report

    formats = [f for f in ("json", "csv", "markdown") if getattr(args, f)] or ["json", "csv", "markdown"]
    paths = write_report(args.out, formats, threads=args.threads, census=not args.no_census)
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_table_asset(args) -> int:
    table = O.build_table(args.max_degree)
    Path(args.out).write_text(table.dump())
    print(f"wrote {len(table.rows)} rows to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="refbound", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"refbound {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("volume-cap", cmd_volume_cap, "covolume cap from a spectral gap")
    p.add_argument("--lambda1", type=parse_positive, default=B.LRS_LAMBDA1)

    p = add("exclude", cmd_exclude, "run the exclusion loop for one degree")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--volume-cap", type=parse_volume, default=B.REFERENCE_VOLUME_CAP)

    p = add("max-degree", cmd_max_degree, "largest degree that survives")
    p.add_argument("--volume-cap", type=parse_volume, default=B.REFERENCE_VOLUME_CAP)

    p = add("disc-table", cmd_disc_table, "root-discriminant upper bounds for degrees 4..18")
    p.add_argument("--mode", choices=("unconditional", "rank12"), default="unconditional")

    p = add("count", cmd_count, "count totally real quadratic or cubic fields")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--quadratic", action="store_true")
    g.add_argument("--cubic", action="store_true")
    p.add_argument("--delta-max", type=parse_positive, required=True, help="root-discriminant bound")
    p.add_argument("--strict", action="store_true", help="require root discriminant < delta-max")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--shards", type=parse_shards, default=None, help="count, or ranges like 0-99,100-199")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--emit-fields", nargs="?", const="fields", default=None, metavar="DIR")
    p.add_argument("-v", "--verbose", action="store_true")

    p = add("tower-window", cmd_tower_window, "root-discriminant window under an infinite 2-class tower")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--grh", action="store_true")

    p = sub.add_parser("report", help="regenerate every table and count")
    p.set_defaults(func=cmd_report)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--markdown", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-census", action="store_true", help="skip the field counts")

    p = sub.add_parser("table-asset", help="regenerate the discriminant table asset")
    p.set_defaults(func=cmd_table_asset)
    p.add_argument("--out", required=True)
    p.add_argument("--max-degree", type=int, default=100)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        ap.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (ConfigError, B.DomainError) as exc:
        print(f"refbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
