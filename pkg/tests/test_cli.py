import json
import subprocess
import sys

import pytest

from refbound import bounds as B
from refbound.cli import main, parse_shards, parse_volume
from refbound.report import build_report, to_csv, to_json, to_markdown


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_parse_volume_forms():
    assert parse_volume("108pi2") == pytest.approx(108 * B.PI2)
    assert parse_volume("108*pi2") == pytest.approx(108 * B.PI2)
    assert parse_volume("pi2") == pytest.approx(B.PI2)
    assert parse_volume("21/2") == 10.5
    for bad in ("abc", "-3", "0", "inf"):
        with pytest.raises(Exception):
            parse_volume(bad)


def test_parse_shards_forms():
    assert parse_shards("8") == 8
    assert parse_shards("2-10,11-20") == [(2, 10), (11, 20)]
    with pytest.raises(Exception):
        parse_shards("2:10")


def test_volume_cap(capsys):
    code, data = run_json(capsys, "volume-cap")
    assert code == 0
    assert data["rounded_up_pi2"] == 108
    code, data = run_json(capsys, "volume-cap", "--lambda1", "1")
    assert data["volume_cap_pi2"] == pytest.approx(16 * 3**1.5, rel=1e-12)


def test_exclude_excluded(capsys):
    code, out, _ = run(capsys, "exclude", "--degree", "20")
    assert code == 0
    assert "Excluded" in out and "armitage-frohlich" in out


def test_exclude_inconclusive_exit_code(capsys):
    code, data = run_json(capsys, "exclude", "--degree", "20", "--volume-cap", "1e9pi2")
    assert code == 1
    assert data["outcome"] == "Inconclusive"


@pytest.mark.parametrize("degree", ["21", "18"])
def test_exclude_bad_degree_exit_code(capsys, degree):
    code, _, err = run(capsys, "exclude", "--degree", degree)
    assert code == 2
    assert "error" in err


def test_bad_volume_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["exclude", "--degree", "20", "--volume-cap", "abc"])
    assert exc.value.code == 2


def test_max_degree(capsys):
    code, data = run_json(capsys, "max-degree")
    assert code == 0
    assert data["max_degree"] == 18 and data["totally_real_degree"] == 9
    assert set(data["verdicts"].values()) == {"Excluded"}


def test_max_degree_warns_when_generic_argument_fails(capsys):
    code, out, err = run(capsys, "max-degree", "--volume-cap", "1e6pi2")
    assert code == 1
    assert "warning" in err


def test_disc_table_text(capsys):
    code, out, _ = run(capsys, "disc-table")
    assert code == 0
    assert "<668" in out
    code, data = run_json(capsys, "disc-table", "--mode", "rank12")
    assert data["max_degree"] == 12
    assert [r["degree"] for r in data["rows"]] == [4, 6, 8, 10, 12]


def test_count_quadratic(capsys):
    code, data = run_json(capsys, "count", "--quadratic", "--delta-max", "100")
    assert code == 0
    assert data["disc_limit"] == 10_000
    assert data["count"] == 3043


def test_count_strict_boundary(capsys):
    _, loose = run_json(capsys, "count", "--quadratic", "--delta-max", "5")
    _, strict = run_json(capsys, "count", "--quadratic", "--delta-max", "5", "--strict")
    assert loose["disc_limit"] == 25 and strict["disc_limit"] == 24
    # fundamental discriminants are never squares, so the count is unchanged
    assert loose["count"] == strict["count"] == 7


def test_count_cubic_with_shards_and_checkpoint(capsys, tmp_path):
    ck = tmp_path / "c.ck"
    code, out, _ = run(capsys, "count", "--cubic", "--delta-max", "100", "--shards", "4",
                       "--checkpoint", str(ck), "-v")
    assert code == 0
    assert "1000000: 54600" in out
    assert out.count("shard [") == 4
    code, out, _ = run(capsys, "count", "--cubic", "--delta-max", "100", "--shards", "4", "--checkpoint", str(ck))
    assert "54600" in out


def test_count_overlapping_shards_exit_code(capsys):
    code, _, err = run(capsys, "count", "--quadratic", "--delta-max", "10", "--shards", "2-50,40-100")
    assert code == 2
    assert "overlap" in err


def test_count_emit_fields(capsys, tmp_path):
    code, _, _ = run(capsys, "count", "--cubic", "--delta-max", "10", "--emit-fields", str(tmp_path))
    assert code == 0
    lines = [l for f in tmp_path.glob("cubic_*.csv") for l in f.read_text().splitlines()]
    assert sorted(int(l.split(",")[0]) for l in lines)[:3] == [49, 81, 148]


def test_tower_window(capsys):
    code, data = run_json(capsys, "tower-window", "--degree", "18", "--grh")
    assert code == 0
    assert data["lower"] == pytest.approx(180.8468, abs=1e-3)
    code, _, _ = run(capsys, "tower-window", "--degree", "20")
    assert code == 2


def test_threads_must_be_positive(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--quadratic", "--delta-max", "10", "--threads", "0"])
    assert exc.value.code == 2


def test_report_without_census_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["report", "--out", str(a), "--no-census"]) == 0
    assert main(["report", "--out", str(b), "--no-census"]) == 0
    capsys.readouterr()
    for name in ("report.json", "report.csv", "report.md"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert (a / "timing.json").exists()
    data = json.loads((a / "report.json").read_text())
    assert data["exclusion"]["max_degree"] == 18
    assert data["combined_dimension_bound"]["bound"] == 25
    assert data["metadata"]["discriminant_table_version"] == 1


def test_report_single_format(tmp_path, capsys):
    assert main(["report", "--out", str(tmp_path), "--no-census", "--csv"]) == 0
    capsys.readouterr()
    assert (tmp_path / "report.csv").exists()
    assert not (tmp_path / "report.json").exists()


def test_report_renderers_share_bundle():
    bundle, timings = build_report(census=False)
    assert "counts" not in bundle
    assert to_csv(bundle).splitlines()[0] == "section,key,computed,reference"
    assert "| 18 |" in to_markdown(bundle)
    assert json.loads(to_json(bundle)) == bundle
    assert set(timings) >= {"exclusion", "tables"}


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "refbound.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.startswith("refbound ")
