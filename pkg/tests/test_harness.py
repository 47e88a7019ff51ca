"""Studies, weak-null diagnostics, perturbation search, and report emission."""

from __future__ import annotations

import json
from fractions import Fraction

import pytest

from minmodlab.constructions import (
    c0_family,
    deflation_operator,
    minimizing_vector,
)
from minmodlab.exactnum import basis_vector, vector
from minmodlab.harness import (
    HarnessConfig,
    Report,
    WeakNullStatus,
    convergence_study,
    emit_report,
    non_attainment_profile,
    rank_one_search,
    weak_null_test,
)
from minmodlab.linops import add, op_norm_sup
from minmodlab.minmod import min_modulus_sup


# --- convergence -----------------------------------------------------------


def test_convergence_frozen_rows():
    report = convergence_study(2, 6)
    assert not report.partial
    assert [r.n for r in report.rows] == [2, 3, 4, 5, 6]
    values = {r.n: r.value for r in report.rows}
    assert values == {
        2: Fraction(2, 3),
        3: Fraction(4, 7),
        4: Fraction(8, 15),
        5: Fraction(16, 31),
        6: Fraction(32, 63),
    }
    gaps = {r.n: r.gap for r in report.rows}
    assert gaps[5] == Fraction(1, 62)
    for r in report.rows:
        assert r.value == r.closed_form
        assert r.gap == r.value - Fraction(1, 2)
        assert Fraction(1, 2) < r.witness_min_tail <= r.witness_max_tail < 1


def test_convergence_respects_the_dimension_budget():
    tight = HarnessConfig(lp_dimension_budget=4)
    report = convergence_study(2, 9, config=tight)
    assert report.partial
    assert [r.n for r in report.rows] == [2, 3, 4]
    assert report.n_max == 9


def test_convergence_range_validation():
    with pytest.raises(ValueError):
        convergence_study(1, 5)
    with pytest.raises(ValueError):
        convergence_study(4, 3)


# --- non-attainment profile --------------------------------------------------


def test_profile_shape():
    report = non_attainment_profile([2, 3, 5])
    assert [r.n for r in report.rows] == [2, 3, 5]
    for r in report.rows:
        assert r.first_modulus == 1
        assert Fraction(1, 2) < r.tail_min <= r.tail_max < 1
        assert r.tail_clearance == r.tail_min - Fraction(1, 2)
    by_n = {r.n: r for r in report.rows}
    assert by_n[3].tail_clearance == Fraction(1, 14)


def test_profile_validation():
    with pytest.raises(ValueError):
        non_attainment_profile([1])
    with pytest.raises(ValueError):
        non_attainment_profile([70])


# --- weak-null diagnostics ---------------------------------------------------


def test_flat_vectors_are_not_weakly_null():
    family = [minimizing_vector(n).embed(8) for n in range(2, 9)]
    verdict = weak_null_test(family)
    assert verdict.status is WeakNullStatus.NOT_WEAKLY_NULL
    assert verdict.coordinate == 1
    assert verdict.bound == 1


def test_minimizers_of_the_deflation_are_not_weakly_null():
    family = [
        min_modulus_sup(deflation_operator(n)).witness.embed(7) for n in range(2, 8)
    ]
    verdict = weak_null_test(family)
    assert verdict.status is WeakNullStatus.NOT_WEAKLY_NULL
    assert verdict.coordinate == 1
    assert verdict.bound == 1


def test_moving_basis_vectors_are_weakly_null():
    family = [basis_vector(n, 8) for n in range(1, 9)]
    verdict = weak_null_test(family)
    assert verdict.status is WeakNullStatus.WEAKLY_NULL
    assert verdict.coordinate is None


def test_returning_spike_is_inconclusive():
    family = [basis_vector(1, 3), basis_vector(2, 3), basis_vector(1, 3)]
    verdict = weak_null_test(family)
    assert verdict.status is WeakNullStatus.INCONCLUSIVE


def test_threshold_can_silence_small_persistent_coordinates():
    family = [vector(["1/8", 1]), vector(["1/8", "-1"])]
    assert weak_null_test(family).status is WeakNullStatus.NOT_WEAKLY_NULL
    quiet = weak_null_test(family, threshold=Fraction(1, 2))
    # above the threshold only coordinate 2 persists
    assert quiet.status is WeakNullStatus.NOT_WEAKLY_NULL
    assert quiet.coordinate == 2
    assert weak_null_test([vector(["1/8", 0]), vector(["1/8", 0])], threshold="1/4").status is (
        WeakNullStatus.WEAKLY_NULL
    )


def test_weak_null_handles_mixed_lengths_and_validates():
    verdict = weak_null_test([vector([1]), vector([0, 1])])
    assert verdict.ambient_dim == 2
    assert verdict.family_size == 2
    with pytest.raises(ValueError):
        weak_null_test([])
    with pytest.raises(ValueError):
        weak_null_test([vector([1])], threshold=Fraction(-1, 2))


# --- rank-one search ---------------------------------------------------------


def test_search_is_deterministic():
    t = deflation_operator(3)
    first = rank_one_search(t, Fraction(1, 2), seed=11, iterations=30)
    second = rank_one_search(t, Fraction(1, 2), seed=11, iterations=30)
    assert first == second
    assert first.norm <= Fraction(1, 2)
    assert first.perturbed_value == first.base_value + first.gain
    assert first.gain >= 0


def test_search_zero_budget_returns_the_zero_perturbation():
    t = deflation_operator(3)
    outcome = rank_one_search(t, 0, seed=5)
    assert outcome.gain == 0
    assert outcome.evaluations == 0
    assert op_norm_sup(outcome.perturbation) == 0
    same = rank_one_search(t, 1, seed=5, iterations=0)
    assert same.evaluations == 0


def test_search_respects_the_norm_cap():
    t = deflation_operator(2)
    for seed in (0, 1, 2):
        outcome = rank_one_search(t, Fraction(3, 4), seed=seed, iterations=40)
        assert op_norm_sup(outcome.perturbation) <= Fraction(3, 4)
        # recomputing through the public route must agree
        assert outcome.perturbed_value == min_modulus_sup(add(t, outcome.perturbation)).value


def test_search_finds_a_strict_lift_on_the_deflation():
    t = deflation_operator(2)
    outcome = rank_one_search(t, 1, seed=7, iterations=60)
    assert outcome.gain > 0
    assert outcome.base_value == Fraction(2, 3)


def test_search_validation():
    t = deflation_operator(2)
    with pytest.raises(ValueError):
        rank_one_search(t, Fraction(-1, 2), seed=0)
    with pytest.raises(ValueError):
        rank_one_search(t, 1, seed=0, iterations=-1)


# --- report emission ---------------------------------------------------------


def test_csv_emission_is_byte_identical():
    report = convergence_study(2, 4)
    first = emit_report(report)
    second = emit_report(report)
    assert first == second
    assert first.startswith("# schema_version=1\n# kind=convergence\n")
    assert "generated_at" not in first
    lines = first.strip().splitlines()
    assert "N,m_N,closed_form,witness_min_tail,witness_max_tail,gap" in lines
    assert lines[-1].startswith("4,8/15,8/15,")


def test_timestamp_is_opt_in():
    report = convergence_study(2, 3)
    stamped = emit_report(report, timestamp=True)
    assert "generated_at" in stamped


def test_approx_columns_are_labeled_and_extra():
    report = convergence_study(2, 3)
    plain = emit_report(report)
    approx = emit_report(report, approx=True)
    assert "_approx12" not in plain
    assert "m_N_approx12" in approx
    assert "0.666666666667" in approx


def test_json_emission_schema():
    report = convergence_study(2, 3)
    payload = json.loads(emit_report(report, fmt="json"))
    assert payload["schema_version"] == 1
    assert payload["kind"] == "convergence"
    assert payload["columns"][0] == "N"
    assert payload["rows"][0][1] == "2/3"
    approx = json.loads(emit_report(report, fmt="json", approx=True))
    assert approx["approx12"]["m_N"][0] == "0.666666666667"


def test_emission_to_a_path(tmp_path):
    report = non_attainment_profile([2, 3])
    out = tmp_path / "profile.csv"
    text = emit_report(report, destination=out)
    assert out.read_text(encoding="utf-8") == text


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        emit_report(convergence_study(2, 3), fmt="xml")


def test_plain_report_passes_through():
    r = Report(kind="demo", header=(("k", "v"),), columns=("a",), rows=((Fraction(1, 2),),))
    text = emit_report(r)
    assert "# k=v" in text
    assert text.strip().endswith("1/2")


def test_weak_null_report_header_carries_the_certificate():
    family = [minimizing_vector(n).embed(5) for n in range(2, 6)]
    text = emit_report(weak_null_test(family))
    assert "# status=not-weakly-null" in text
    assert "# coordinate=1" in text
    assert "# bound=1" in text
