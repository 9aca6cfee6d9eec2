import csv
import statistics

import pytest

from vanetsim.cli import main
from vanetsim.config import ScenarioConfig, preset
from vanetsim.experiments import (CSV_COLUMNS, PLOT_METRICS, SweepError, SweepSpec, aggregate,
                                  format_rows, read_rows, rebuild_from_ledgers, row_report,
                                  run_one, run_sweep)


def small(protocol="AODV", **kw):
    base = dict(protocol=protocol, nodes=30, connections=5, sim_time=20.0, pause=2.0,
                speed_min=10.0, speed_max=10.0)
    base.update(kw)
    return ScenarioConfig(**base)


def test_run_one_row_roundtrip(tmp_path):
    res = run_one(small(), tmp_path)
    text = format_rows([res.row])
    (tmp_path / "r.csv").write_text(text)
    (row,) = read_rows(tmp_path / "r.csv")
    assert list(row) == list(CSV_COLUMNS)
    rep = row_report(row)
    assert rep.sent == res.report.sent and rep.received == res.report.received
    assert rep.pdr == pytest.approx(res.report.pdr, abs=1e-6)
    assert res.ledger_path.exists()
    assert res.trace_path is None
    assert not list(tmp_path.glob("trace_*"))


def test_run_one_deterministic_rows_and_traces(tmp_path):
    a = run_one(small("GPSR", trace=True), tmp_path / "a")
    b = run_one(small("GPSR", trace=True), tmp_path / "b")
    assert format_rows([a.row]) == format_rows([b.row])
    assert a.trace_path.read_bytes() == b.trace_path.read_bytes()
    assert a.ledger_path.read_bytes() == b.ledger_path.read_bytes()
    c = run_one(small("GPSR", seed=2))
    assert format_rows([c.row]) != format_rows([a.row])


def test_na_cells_when_nothing_sent(tmp_path):
    cfg = small(sim_time=20.0)
    row = run_one(cfg).row
    row.update(pdr=None, avg_e2e_delay=None)
    text = format_rows([row])
    assert ",NA,NA," in text


def test_sweep_counts_plot_files_and_recomputation(tmp_path):
    spec = SweepSpec(small(), "pause", [1.0, 5.0], seeds=3, protocols=("AODV", "GPSR"))
    res = run_sweep(spec, tmp_path)
    assert len(res.rows) == 2 * 2 * 3
    rows = read_rows(tmp_path / "runs.csv")
    assert len(rows) == 12
    for metric in PLOT_METRICS:
        with open(tmp_path / f"plot_{metric}.csv") as fh:
            table = list(csv.reader(fh))
        assert table[0] == ["value", "AODV_median", "AODV_q1", "AODV_q3",
                            "GPSR_median", "GPSR_q1", "GPSR_q3"]
        assert [r[0] for r in table[1:]] == ["1.000000", "5.000000"]
        # medians recomputed independently from the per-run CSV cells
        for line in table[1:]:
            value = float(line[0])
            for j, proto in enumerate(("AODV", "GPSR")):
                xs = [r[metric] for r in rows if r["protocol"] == proto and r["value"] == value]
                assert line[1 + 3 * j] == f"{statistics.median(xs):.6f}"
    before = {p.name: p.read_bytes() for p in tmp_path.glob("*.csv")}
    rebuild_from_ledgers(tmp_path, tmp_path / "again")
    after = {p.name: p.read_bytes() for p in (tmp_path / "again").glob("*.csv")}
    assert before == after


def test_sweep_row_count_contract():
    spec = SweepSpec.from_preset("scenario2", seeds=10)
    assert len(list(spec.points())) == 5 * 3 * 10


def test_sweep_failure_names_point(monkeypatch):
    import vanetsim.experiments as ex

    def boom(cfg, *a, **k):
        if cfg.seed == 2:
            raise RuntimeError("kaput")
        return real(cfg, *a, **k)

    real = ex.run_one
    monkeypatch.setattr(ex, "run_one", boom)
    spec = SweepSpec(small(sim_time=5.0), "pause", [3.0], seeds=2, protocols=("DSR",))
    with pytest.raises(SweepError, match=r"pause=3\.000000 protocol=DSR seed=2"):
        run_sweep(spec)


def test_aggregate_iqr():
    rows = [{"protocol": "AODV", "value": 1, "pdr": x} for x in (1.0, 2.0, 3.0, 4.0, 5.0)]
    rows.append({"protocol": "AODV", "value": 1, "pdr": None})
    assert aggregate(rows, "pdr", ["AODV"])[1]["AODV"] == (3.0, 2.0, 4.0)


def test_cli_run_sweep_report(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--preset", "scenario2", "--protocol", "gpsr", "--seed", "7",
                 "--sim-time", "5", "--trace", "--out", str(out)]) == 0
    assert list(out.glob("trace_gpsr_*_s7.txt"))
    assert list(out.glob("run_gpsr_s7.csv"))
    printed = capsys.readouterr().out
    assert printed.splitlines()[0] == ",".join(CSV_COLUMNS)

    sw = tmp_path / "sweep"
    assert main(["sweep", "--preset", "scenario3", "--seeds", "2", "--values", "10", "30",
                 "--protocols", "aodv", "--sim-time", "5", "--out", str(sw), "--quiet"]) == 0
    assert len(read_rows(sw / "runs.csv")) == 4
    before = (sw / "plot_pdr.csv").read_bytes()
    assert main(["report", "--from", str(sw)]) == 0
    assert (sw / "plot_pdr.csv").read_bytes() == before


def test_cli_errors(tmp_path, capsys):
    assert main(["report", "--from", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.cfg"
    bad.write_text("range = -5\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "range" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["run", "--protocol", "olsr"])


def test_cli_sweep_alternate_parameter(tmp_path):
    out = tmp_path / "nodes"
    assert main(["sweep", "--preset", "scenario1", "--param", "nodes", "--values", "30", "40",
                 "--seeds", "1", "--sim-time", "3", "--protocols", "aodv", "--out", str(out),
                 "--quiet"]) == 0
    rows = read_rows(out / "runs.csv")
    assert [(r["param"], r["value"], r["nodes"]) for r in rows] == [("nodes", 30, 30),
                                                                    ("nodes", 40, 40)]
    assert main(["sweep", "--preset", "scenario1", "--param", "bogus", "--seeds", "1",
                 "--out", str(tmp_path / "x")]) == 2
