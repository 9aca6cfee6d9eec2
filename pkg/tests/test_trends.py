from vanetsim.config import preset
from vanetsim.trends import CHECKS, DESK_SIM_TIME, TrendCheck, evaluate, sweep_spec


def rows_for(metric, table):
    """table: {value: {protocol: [per-seed values]}}."""
    return [{"value": v, "protocol": p, metric: x}
            for v, per in table.items() for p, xs in per.items() for x in xs]


LOSS = TrendCheck("loss", "scenario2", None, ("AODV", "GPSR"), "packet_loss_count", "GPSR",
                  ("AODV",), True, 2)
PDR = TrendCheck("pdr", "scenario1", (150, 300), ("AODV", "DSR", "GPSR"), "pdr", "AODV",
                 ("DSR", "GPSR"), False, 2)


def test_lower_is_better_uses_medians():
    # GPSR has one huge outlier at 50 but a smaller median
    rows = rows_for("packet_loss_count", {
        50.0: {"AODV": [10, 11, 12], "GPSR": [5, 6, 900]},
        100.0: {"AODV": [10, 10, 10], "GPSR": [10, 10, 10]},   # tie fails
        150.0: {"AODV": [3, 4, 5], "GPSR": [1, 2, 3]},
    })
    out = evaluate(LOSS, rows)
    assert [p.ok for p in out.points] == [True, False, True]
    assert out.points[0].medians == {"AODV": 11, "GPSR": 6}
    assert out.held == 2 and out.passed


def test_winner_must_beat_every_loser():
    rows = rows_for("pdr", {
        150: {"AODV": [90, 91], "DSR": [80, 81], "GPSR": [70, 71]},
        300: {"AODV": [90, 91], "DSR": [95, 96], "GPSR": [70, 71]},
    })
    out = evaluate(PDR, rows)
    assert [p.ok for p in out.points] == [True, False]
    assert not out.passed
    assert "1/2 points hold (need 2)" in out.summary()


def test_missing_values_never_hold():
    rows = rows_for("pdr", {150: {"AODV": [None, None], "DSR": [1.0], "GPSR": [1.0]}})
    assert [p.ok for p in evaluate(PDR, rows).points] == [False]


def test_specs_follow_presets():
    for check in CHECKS:
        spec = sweep_spec(check, seeds=3)
        assert spec.base.sim_time == DESK_SIM_TIME[check.preset]
        assert spec.protocols == check.protocols
        assert spec.values == list(check.values or preset(check.preset).values)
    assert len(list(sweep_spec(CHECKS[0], seeds=10).points())) == 5 * 2 * 10
