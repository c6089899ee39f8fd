from fractions import Fraction

import pytest
from conftest import random_points

from weylbounds import covering
from weylbounds.completion import CompletionMode, completed_sum
from weylbounds.core.phase import PhasePoint
from weylbounds.core.sweep import GridSpec
from weylbounds.covering import (
    BoxCriterion,
    StabilityReport,
    box_side_lengths,
    count_superlevel_boxes,
    covering_sweep,
    dyadic_schedule,
    exponent_identity_residual,
    exponent_identity_symbolic,
    fit_count_exponent,
    random_bases,
    stability_check,
    stability_half_lengths,
    stability_sweep,
    theoretical_box_bound,
)
from weylbounds.errors import InvalidParameterError, ResourceCapError

SYMMETRIZED = CompletionMode.SYMMETRIZED


def test_side_lengths_follow_exact_ceilings():
    spec = box_side_lengths(2, 16, 0.5, 0)
    assert spec.reciprocals == (64, 1024)
    assert spec.zetas == (Fraction(1, 64), Fraction(1, 1024))
    assert spec.U == 65536
    assert box_side_lengths(2, 4, 0.7, 0.05).reciprocals == (7, 26)


@pytest.mark.parametrize("alpha,eps,N", [(0, 0.1, 16), (1, 0.1, 16), (0.5, -0.1, 16), (0.5, 0.1, 1)])
def test_side_length_validation(alpha, eps, N):
    with pytest.raises(InvalidParameterError):
        box_side_lengths(2, N, alpha, eps)


def test_dyadic_schedule():
    assert dyadic_schedule(4, 8) == [16, 32, 64, 128, 256]
    with pytest.raises(InvalidParameterError):
        dyadic_schedule(5, 4)


@pytest.mark.parametrize("mode", list(CompletionMode))
def test_box_counts_match_center_by_center_evaluation(mode):
    N, alpha, eps = 4, 0.7, 0.05
    grid = count_superlevel_boxes(2, N, alpha, eps, mode)
    spec = GridSpec(2, grid.spec.reciprocals, centered=True)
    values = [
        completed_sum(spec.point((i, j)), N, mode).value
        for i in range(spec.resolution[0])
        for j in range(spec.resolution[1])
    ]
    threshold = N ** alpha
    assert grid.U == 7 * 26
    assert grid.counted_lower == sum(v >= threshold for v in values)
    assert grid.counted_upper == sum(v >= threshold / 2 for v in values)
    assert grid.counted_lower <= grid.counted_upper <= grid.U


def test_criterion_selects_bracket():
    lower = count_superlevel_boxes(2, 8, 0.7, 0.05, criterion=BoxCriterion.CENTER_GE_ALPHA)
    upper = count_superlevel_boxes(2, 8, 0.7, 0.05, criterion=BoxCriterion.CENTER_GE_HALF_ALPHA)
    assert lower.counted == lower.counted_lower
    assert upper.counted == upper.counted_upper
    assert upper.to_dict()["criterion"] == "center_ge_half_alpha"


def test_box_counts_do_not_depend_on_threads():
    single = count_superlevel_boxes(2, 16, 0.7, 0.05, workers=1)
    pooled = count_superlevel_boxes(2, 16, 0.7, 0.05, workers=4)
    assert (single.counted_lower, single.counted_upper) == (pooled.counted_lower, pooled.counted_upper)


def test_box_grid_cap():
    with pytest.raises(ResourceCapError):
        count_superlevel_boxes(2, 16, 0.7, 0.05, cap=1000)


def test_theoretical_bound_exponent():
    bound = theoretical_box_bound(2, 64, 0.7, 0.05)
    assert bound.exponent == pytest.approx(2.5, abs=1e-12)
    assert bound.count_exponent == pytest.approx(bound.exponent, abs=1e-12)
    assert bound.has_o1


@pytest.mark.parametrize("d", range(2, 13))
@pytest.mark.parametrize("alpha,eps", [(0.55, 0.01), (0.7, 0.05), (0.95, 0.2)])
def test_exponent_identity(d, alpha, eps):
    assert abs(exponent_identity_residual(d, alpha, eps)) < 1e-12


def test_exponent_identity_symbolic():
    assert exponent_identity_symbolic() == 0


def test_covering_sweep_rows():
    rows = covering_sweep(2, 0.7, 0.05, 2, 4)
    assert [r["N"] for r in rows] == [4, 8, 16]
    assert [r["U"] for r in rows] == sorted(r["U"] for r in rows)
    for row in rows:
        assert 0 < row["counted_lower"] <= row["counted_upper"] <= row["U"]
    fit = fit_count_exponent(rows)
    assert fit["bound_exponent"] == pytest.approx(2.5)
    assert fit["exceeds_bound"] == (fit["slope"] > 2.5)
    assert fit["log_U_slope"] > 0


@pytest.mark.slow
def test_covering_exponent_at_scale():
    rows = covering_sweep(2, 0.7, 0.05, 4, 7, workers=8)
    assert all(r["counted_upper"] <= r["U"] for r in rows)
    fit = fit_count_exponent(rows)
    # the hidden polylog factor keeps the slope near log U at these sizes
    assert fit["slope"] <= fit["log_U_slope"] + 0.5


def test_stability_half_lengths():
    assert stability_half_lengths(2, 16, 0.5, 0) == pytest.approx((16 ** -1.5, 16 ** -2.5))


def test_stability_at_origin():
    report = stability_check(PhasePoint.zero(2), 64, 0.8, 0.1, probes=200, seed=3, mode=SYMMETRIZED)
    assert not report.vacuous
    assert report.probes == 200
    assert report.violations == 0
    assert report.min_probe_value >= report.threshold / 2


def test_stability_includes_corners():
    report = stability_check(PhasePoint.zero(3), 32, 0.8, 0.1, probes=1, seed=3, mode=SYMMETRIZED)
    assert report.probes == 8


def test_vacuous_base():
    x = PhasePoint.parse("0.3,0.17")
    N, alpha = 1024, 0.99
    assert completed_sum(x, N, CompletionMode.LITERAL).value < N ** alpha
    report = stability_check(x, N, alpha, 0.1, probes=10, seed=1, mode=CompletionMode.LITERAL)
    assert report.vacuous
    assert report.violations == 0
    assert report.min_probe_value is None


def test_random_bases_meet_precondition():
    bases = random_bases(2, 64, 0.8, 5, seed=7, mode=SYMMETRIZED)
    assert len(bases) == 5
    for x in bases:
        assert completed_sum(x, 64, SYMMETRIZED).value >= 64 ** 0.8
    assert bases == random_bases(2, 64, 0.8, 5, seed=7, mode=SYMMETRIZED)


def test_stability_sweep_reports_every_pair():
    bases = random_points(1, 2, 2) + [PhasePoint.zero(2)]
    sweep = stability_sweep(bases, 0.8, 0.1, 5, 7, probes=20, seed=1, mode=SYMMETRIZED)
    assert [r.N for r in sweep.reports] == [32] * 3 + [64] * 3 + [128] * 3
    violated = {r.N for r in sweep.reports if r.violations}
    tested = {r.N for r in sweep.reports if not r.vacuous}
    if sweep.smallest_clean_N is not None:
        assert all(N < sweep.smallest_clean_N for N in violated)
        assert {N for N in (32, 64, 128) if N >= sweep.smallest_clean_N} <= tested
    else:
        assert 128 in violated or 128 not in tested


def test_all_vacuous_sweep_is_never_clean():
    sweep = stability_sweep(
        [PhasePoint.parse("0.3,0.17")], 0.99, 0.1, 5, 7, probes=10, seed=1, mode=CompletionMode.LITERAL
    )
    assert [r.vacuous for r in sweep.reports] == [True, True, True]
    assert sweep.smallest_clean_N is None
    assert sweep.to_dict()["smallest_clean_N"] is None


@pytest.mark.parametrize(
    "outcomes,expected",
    [
        ({32: "clean", 64: "clean", 128: "vacuous"}, None),
        ({32: "vacuous", 64: "clean", 128: "clean"}, 64),
        ({32: "clean", 64: "vacuous", 128: "clean"}, 128),
        ({32: "clean", 64: "violated", 128: "clean"}, 128),
    ],
)
def test_clean_run_needs_evidence_at_every_N(monkeypatch, outcomes, expected):
    def fake_check(x, N, alpha, eps, probes, seed, mode, stream=0):
        outcome = outcomes[N]
        return StabilityReport(
            base=str(x), d=x.d, N=N, alpha=alpha, eps=eps, mode=mode, half_lengths=(0.0, 0.0),
            base_value=float(N), threshold=1.0, probes=0 if outcome == "vacuous" else probes,
            violations=int(outcome == "violated"), vacuous=outcome == "vacuous",
        )

    monkeypatch.setattr(covering, "stability_check", fake_check)
    sweep = stability_sweep([PhasePoint.zero(2)], 0.8, 0.1, 5, 7, probes=4, seed=1, mode=SYMMETRIZED)
    assert sweep.smallest_clean_N == expected


@pytest.mark.slow
def test_stability_at_scale():
    N = 2 ** 10
    bases = random_bases(2, N, 0.8, 50, seed=2024, mode=SYMMETRIZED)
    assert len(bases) == 50
    for b, x in enumerate(bases):
        report = stability_check(x, N, 0.8, 0.1, probes=1000, seed=2024, mode=SYMMETRIZED, stream=b)
        assert report.violations == 0
