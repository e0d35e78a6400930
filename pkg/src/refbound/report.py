"""Assembling every regenerated number into one bundle, plus its writers.

The bundle itself is deterministic; wall-clock timings are collected
separately so that two runs produce byte-identical report files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from pathlib import Path

from . import __version__
from . import bounds as B
from . import engine as E
from . import oracle as O
from . import reference as R
from .census import count_real_quadratic, count_totally_real_cubic

SCHEMA = 1


def _r(x, nd=6):
    if x is None or isinstance(x, (int, str)):
        return x
    if math.isinf(x):
        return "inf"
    return round(float(x), nd)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float):
        return _r(obj)
    return obj


def constants_section() -> dict:
    cap = B.agol_volume_cap(B.LRS_LAMBDA1)
    cap1 = B.agol_volume_cap(1.0)
    return {
        "volume_cap_pi2": {"computed": cap / B.PI2, "reference": R.VOLUME_CAP_PI2},
        "volume_cap_lambda1_pi2": {"computed": cap1 / B.PI2, "reference": R.GRC_VOLUME_CAP_PI2},
        "h_cap_degree20": {
            "raw": B.h_cap_raw(20, B.REFERENCE_VOLUME_CAP),
            "computed": B.h_cap_from_volume(20, B.REFERENCE_VOLUME_CAP),
            "reference": B.REFERENCE_H_CAP,
        },
        "generic_upper": [
            {"degree": n, "computed": B.generic_delta_upper(n),
             "reference": B.REFERENCE_GENERIC_COEFF * B.REFERENCE_GENERIC_BASE ** (1.0 / n)}
            for n in (20, 24, 30, 38)
        ],
    }


def exclusion_section(volume_cap=B.REFERENCE_VOLUME_CAP) -> dict:
    res = E.max_degree(volume_cap)
    return {
        "max_degree": res.degree,
        "max_totally_real_degree": res.totally_real_degree,
        "reference": {"degree": R.MAX_DEGREE, "totally_real": R.MAX_TOTALLY_REAL_DEGREE},
        "generic": res.generic,
        "warnings": res.warnings,
        "verdicts": {n: v.as_dict() for n, v in res.verdicts.items()},
    }


def table_section() -> dict:
    uncond = []
    for n in E.DISC_TABLE_DEGREES:
        row = E.disc_table_row(n, "unconditional")
        ref = R.DISC_TABLE_UNCONDITIONAL[n]
        uncond.append({
            "degree": n, "computed": row.delta_upper, "rounded": row.rounded, "reference": ref,
            "reference_strict": n in R.DISC_TABLE_STRICT, "relative_deviation": row.delta_upper / ref - 1,
            "iterations": row.iterations,
        })
    rank12 = []
    for n in E.DISC_TABLE_DEGREES:
        v = E.rank12_verdict(n)
        ref = R.DISC_TABLE_RANK12.get(n)
        rank12.append({
            "degree": n, "computed": v.final_state.delta_upper, "reference": ref,
            "relative_deviation": None if ref is None else v.final_state.delta_upper / ref - 1,
            "outcome": v.outcome, "witness": v.witness,
        })
    return {
        "unconditional": uncond,
        "rank12": rank12,
        "rank12_max_degree": E.rank12_max_degree(),
        "rank12_max_degree_reference": R.RANK12_MAX_DEGREE,
    }


def tower_section() -> list:
    out = []
    for n in E.DISC_TABLE_DEGREES:
        win = O.tower_window(n)
        out.append({
            "degree": n,
            "lower": win[0] if win else None,
            "upper": win[1] if win else None,
            "empty": win is None,
            "lower_grh": O.asymptotic_tower_bound(n, grh=True).delta_min,
        })
    return out


def census_section(threads: int = 1) -> dict:
    q = count_real_quadratic(R.QUADRATIC_LIMIT, shards=8, threads=threads)
    q_alt = count_real_quadratic(R.QUADRATIC_LIMIT + 1, shards=8, threads=threads)
    c = count_totally_real_cubic(R.CUBIC_LIMIT, threads=threads)
    c_alt = count_totally_real_cubic(650**3, threads=threads)
    return {
        "quadratic": {
            "limit": q.disc_limit, "convention": "d <= 668^2 - 1", "count": q.count,
            "reference": R.QUADRATIC_COUNT,
            "alternative": {"limit": q_alt.disc_limit, "convention": "d <= 668^2", "count": q_alt.count},
        },
        "cubic": {
            "limit": c.disc_limit, "convention": "d <= 649^3", "count": c.count,
            "density": c.count / c.disc_limit, "reference": R.CUBIC_COUNT,
            "alternative": {"limit": c_alt.disc_limit, "convention": "d <= 650^3", "count": c_alt.count},
        },
    }, {"quadratic": q.seconds + q_alt.seconds, "cubic": c.seconds + c_alt.seconds}


def build_report(threads: int = 1, census: bool = True) -> tuple[dict, dict]:
    """Return (bundle, timings)."""
    timings = {}
    bundle = {"schema": SCHEMA}

    def timed(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timings[name] = time.perf_counter() - t0
        return out

    bundle["constants"] = timed("constants", constants_section)
    bundle["exclusion"] = timed("exclusion", exclusion_section)
    bundle["tables"] = timed("tables", table_section)
    bundle["tower_windows"] = timed("tower_windows", tower_section)
    bundle["combined_dimension_bound"] = timed("combined", E.combined_dimension_bound)
    if census:
        counts, ctimes = census_section(threads)
        bundle["counts"] = counts
        timings.update({f"census_{k}": v for k, v in ctimes.items()})
    bundle["metadata"] = {
        "tool_version": __version__,
        "discriminant_table_version": O.default_table().version,
        "schema": SCHEMA,
    }
    return _clean(bundle), _clean(timings)


def to_json(bundle: dict) -> str:
    return json.dumps(bundle, indent=2, sort_keys=True) + "\n"


def _csv_rows(bundle: dict):
    yield ("section", "key", "computed", "reference")
    c = bundle["constants"]
    yield ("constants", "volume_cap_pi2", c["volume_cap_pi2"]["computed"], c["volume_cap_pi2"]["reference"])
    yield ("constants", "volume_cap_lambda1_pi2", c["volume_cap_lambda1_pi2"]["computed"],
           c["volume_cap_lambda1_pi2"]["reference"])
    yield ("constants", "h_cap_degree20", c["h_cap_degree20"]["computed"], c["h_cap_degree20"]["reference"])
    for g in c["generic_upper"]:
        yield ("generic_upper", g["degree"], g["computed"], g["reference"])
    ex = bundle["exclusion"]
    yield ("exclusion", "max_degree", ex["max_degree"], ex["reference"]["degree"])
    yield ("exclusion", "max_totally_real_degree", ex["max_totally_real_degree"], ex["reference"]["totally_real"])
    for n, v in ex["verdicts"].items():
        yield ("exclusion", f"degree_{n}", v["outcome"], "Excluded")
    for row in bundle["tables"]["unconditional"]:
        yield ("disc_table_unconditional", row["degree"], row["computed"], row["reference"])
    for row in bundle["tables"]["rank12"]:
        yield ("disc_table_rank12", row["degree"], row["computed"], row["reference"])
    yield ("disc_table_rank12", "max_degree", bundle["tables"]["rank12_max_degree"],
           bundle["tables"]["rank12_max_degree_reference"])
    for w in bundle["tower_windows"]:
        yield ("tower_window", w["degree"], f"[{w['lower']}, {w['upper']}]", "")
    cb = bundle["combined_dimension_bound"]
    yield ("combined_dimension_bound", "bound", cb["bound"], R.TRANSITION_DIMENSION_BOUND)
    if "counts" in bundle:
        for kind in ("quadratic", "cubic"):
            k = bundle["counts"][kind]
            yield ("count", f"{kind}_{k['limit']}", k["count"], k["reference"])
            alt = k["alternative"]
            yield ("count", f"{kind}_{alt['limit']}", alt["count"], "")


def to_csv(bundle: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in _csv_rows(bundle):
        w.writerow(row)
    return buf.getvalue()


def to_markdown(bundle: dict) -> str:
    out = ["# refbound report", ""]
    c = bundle["constants"]
    out += ["## Constants", "", "| quantity | computed | reference |", "|---|---|---|"]
    out.append(f"| volume cap (pi^2) | {c['volume_cap_pi2']['computed']} | {c['volume_cap_pi2']['reference']} |")
    out.append(f"| volume cap, lambda1 = 1 (pi^2) | {c['volume_cap_lambda1_pi2']['computed']} | "
               f"{c['volume_cap_lambda1_pi2']['reference']} |")
    out.append(f"| h(K,2,B) cap, degree 20 | {c['h_cap_degree20']['computed']} "
               f"(raw {c['h_cap_degree20']['raw']}) | {c['h_cap_degree20']['reference']} |")
    ex = bundle["exclusion"]
    out += ["", "## Degree exclusion", "",
            f"Maximal degree: {ex['max_degree']} (totally real {ex['max_totally_real_degree']}).", "",
            "| degree | outcome | upper | lower |", "|---|---|---|---|"]
    for n, v in ex["verdicts"].items():
        w = v["witness"] or ["", ""]
        out.append(f"| {n} | {v['outcome']} | {w[0]} | {w[1]} |")
    g = ex["generic"]
    out.append(f"| >= {g['degree']} | {'Excluded' if g['holds'] else 'Inconclusive'} | "
               f"{g['delta_upper']} | {g['delta_lower']} |")
    out += ["", "## Root-discriminant upper bounds", "",
            "| degree | computed | rounded up | reference | deviation |", "|---|---|---|---|---|"]
    for row in bundle["tables"]["unconditional"]:
        ref = ("< " if row["reference_strict"] else "") + str(row["reference"])
        out.append(f"| {row['degree']} | {row['computed']} | {row['rounded']} | {ref} | "
                   f"{row['relative_deviation']:+.4f} |")
    out += ["", "## Upper bounds with class-group 2-rank <= 12", "",
            "| degree | computed | reference | outcome |", "|---|---|---|---|"]
    for row in bundle["tables"]["rank12"]:
        out.append(f"| {row['degree']} | {row['computed']} | {row['reference'] or ''} | {row['outcome']} |")
    out.append("")
    out.append(f"Largest surviving degree: {bundle['tables']['rank12_max_degree']}.")
    out += ["", "## Infinite 2-class field tower windows", "",
            "| degree | lower | upper | lower (GRH) |", "|---|---|---|---|"]
    for w in bundle["tower_windows"]:
        out.append(f"| {w['degree']} | {w['lower']} | {w['upper']} | {w['lower_grh']} |")
    cb = bundle["combined_dimension_bound"]
    out += ["", "## All-dimension bound", "", f"{cb['bound']} from inputs {cb['inputs']}."]
    if "counts" in bundle:
        out += ["", "## Field counts", "", "| kind | limit | count | reference |", "|---|---|---|---|"]
        for kind in ("quadratic", "cubic"):
            k = bundle["counts"][kind]
            out.append(f"| {kind} | {k['limit']} | {k['count']} | {k['reference']} |")
            alt = k["alternative"]
            out.append(f"| {kind} | {alt['limit']} | {alt['count']} | |")
    out += ["", f"tool {bundle['metadata']['tool_version']}, schema {bundle['schema']}", ""]
    return "\n".join(out)


WRITERS = {"json": ("report.json", to_json), "csv": ("report.csv", to_csv), "markdown": ("report.md", to_markdown)}


def write_report(out_dir, formats=("json", "csv", "markdown"), threads: int = 1, census: bool = True) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle, timings = build_report(threads, census)
    paths = []
    for fmt in formats:
        name, fn = WRITERS[fmt]
        p = out_dir / name
        p.write_text(fn(bundle))
        paths.append(p)
    (out_dir / "timing.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
    return paths
