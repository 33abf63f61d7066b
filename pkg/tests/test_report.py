import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from irateplc.engine import resolve_session
from irateplc.errors import UnknownFormatError
from irateplc.report import DegreeCell, load_satisfaction, render, render_trace, score
from tests.generators import scenarios


@pytest.fixture(scope="module")
def outcome(webportal, scenario):
    return resolve_session(webportal, scenario)


@pytest.fixture(scope="module")
def report(scenario, outcome):
    return score(scenario, outcome.final)


def test_weighted_satisfaction(report):
    assert report.weighted_global == Fraction(55, 76)
    assert round(float(report.weighted_global) * 100) == 72


def test_stakeholder_extremes(report):
    assert report.per_stakeholder["Stk5"].overall_rate == 1
    assert report.per_stakeholder["Stk2"].overall_rate == 0
    assert list(report.per_stakeholder) == ["Stk1", "Stk2", "Stk3", "Stk4", "Stk5"]


def test_global_degree_cells(report):
    cells = report.totals.per_degree
    assert cells[5] == DegreeCell(5, 4)
    assert cells[4] == DegreeCell(7, 5)
    assert cells[3] == DegreeCell(5, 3)
    assert cells[2] == DegreeCell(3, 3)
    assert cells[1] == DegreeCell(2, 0)
    assert report.totals.overall_rate == Fraction(15, 22)


def test_stakeholder_weights(report):
    weights = {sid: (s.chosen_weight, s.retained_weight) for sid, s in report.per_stakeholder.items()}
    assert weights == {"Stk1": (14, 11), "Stk2": (16, 0), "Stk3": (12, 11), "Stk4": (18, 17), "Stk5": (16, 16)}


def test_undefined_rate(report):
    assert report.per_stakeholder["Stk1"].per_degree[1].rate is None


def test_empty_final(scenario):
    empty = score(scenario, [])
    assert all(cell.retained == 0 for cell in empty.totals.per_degree.values())
    assert empty.weighted_global == 0


def test_no_choices():
    assert score([], []).weighted_global == 0


def test_json_document(report, outcome):
    document = json.loads(render(report, outcome, "json"))
    assert list(document)[:4] == ["final", "valid", "iterations", "remained_conflicts"]
    assert document["valid"] is True
    assert len(document["iterations"]) == 2
    assert document["satisfaction"]["weighted_global"]["num"] == 55
    assert document["satisfaction"]["weighted_global"]["den"] == 76
    assert document["satisfaction"]["per_stakeholder"]["Stk1"]["per_degree"]["1"]["s"] is None
    assert "¬ms" in document["final"]


def test_json_round_trip(report, outcome):
    assert load_satisfaction(render(report, outcome, "json")) == report
    assert load_satisfaction(render(report, None, "json")) == report


def test_json_is_deterministic(report, outcome, webportal, scenario):
    again = resolve_session(webportal, scenario)
    assert render(score(scenario, again.final), again, "json") == render(report, outcome, "json")


def test_table(report, outcome):
    text = render(report, outcome, "table")
    lines = text.splitlines()
    assert "Iteration 1" in lines and "Iteration 2" in lines
    assert sum(line.strip().startswith("explicit:") for line in lines) == 4
    assert sum(line.strip().startswith("xor:") for line in lines) == 1

    header = next(line for line in lines if line.startswith("Degree"))
    assert [cell.strip() for cell in header.split("|")] == ["Degree", "Stk1", "Stk2", "Stk3", "Stk4", "Stk5", "Final"]
    rows = [line for line in lines if line[:1] in "12345" and "|" in line]
    assert [row.split("|")[0].strip() for row in rows] == ["5", "4", "3", "2", "1"]
    assert "d=5 r=4 s=80%" in rows[0]
    assert "d=0 r=0 s=-" in rows[4]
    assert "Weighted global satisfaction: 72%" in lines


def test_trace_lines(outcome):
    lines = render_trace(outcome).splitlines()
    assert len(lines) == 2
    first, second = map(json.loads, lines)
    assert first["iteration"] == 1
    assert len(first["explicit"]) == 3 and len(first["xor"]) == 1
    assert [r["degree"] for r in first["propagation"]] == [4, 4, 5, 5, 4]
    assert second["explicit"][0]["removed"] == "ms"


def test_unknown_format(report):
    with pytest.raises(UnknownFormatError):
        render(report, None, "xml")


@given(scenarios(), st.randoms(use_true_random=False))
def test_aggregation_properties(drawn, rng):
    _, configs = drawn
    literals = sorted({c.literal for config in configs for c in config.choices}, key=lambda l: l.sort_key())
    final = [l for l in literals if rng.random() < 0.5]
    result = score(configs, final)

    for degree, cell in result.totals.per_degree.items():
        assert cell.chosen == sum(s.per_degree[degree].chosen for s in result.per_stakeholder.values())
        assert 0 <= cell.retained <= cell.chosen

    shuffled = list(configs)
    rng.shuffle(shuffled)
    assert score(shuffled, final).weighted_global == result.weighted_global

    if len(final) < len(literals):
        extra = next(l for l in literals if l not in final)
        more = score(configs, final + [extra])
        for sid, summary in result.per_stakeholder.items():
            for degree, cell in summary.per_degree.items():
                assert more.per_stakeholder[sid].per_degree[degree].retained >= cell.retained
