import json

import pytest
from hypothesis import given, settings, strategies as st

from irateplc.errors import ChoiceError
from irateplc.stakeholder import (
    Literal,
    MergedConfiguration,
    Polarity,
    RatedChoice,
    StakeholderConfig,
    config_to_json,
    ensure_unique_stakeholders,
    ledger_insert,
    merge_configs,
    parse_literal_set,
    parse_stakeholder_config,
    parse_stakeholder_json,
)
from tests.generators import scenarios

P, N = Literal.pos, Literal.neg


def test_parse_stk1(webportal):
    text = "stakeholder: Stk1\nKeyWordSupport:+:2, DB:+:4, Active:-:3, https:+:5\n"
    config = parse_stakeholder_config(text, webportal)
    assert config.stakeholder == "Stk1"
    assert config.choices == (
        RatedChoice(P("KeyWordSupport"), 2),
        RatedChoice(P("DB"), 4),
        RatedChoice(N("Active"), 3),
        RatedChoice(P("https"), 5),
    )


def test_parse_empty_choice_list(webportal):
    config = parse_stakeholder_config("stakeholder: Nobody\n", webportal)
    assert config == StakeholderConfig("Nobody", ())


def test_default_stakeholder_id(webportal):
    config = parse_stakeholder_config("DB:+:4\n", webportal, stakeholder="stk9")
    assert config.stakeholder == "stk9"


def test_missing_header(webportal):
    with pytest.raises(ChoiceError):
        parse_stakeholder_config("DB:+:4\n", webportal)


@pytest.mark.parametrize("text, line, fragment", [
    ("stakeholder: S\nDB:+:4\nDB:-:2\n", 3, "duplicate feature 'DB'"),
    ("stakeholder: S\nGhost:+:4\n", 2, "unknown feature 'Ghost'"),
    ("stakeholder: S\nDB:+:6\n", 2, "outside 1-5"),
    ("stakeholder: S\nDB:+:0\n", 2, "outside 1-5"),
    ("stakeholder: S\nDB:*:3\n", 2, "malformed polarity"),
    ("stakeholder: S\nDB:+:high\n", 2, "not an integer"),
    ("stakeholder: S\nDB+4\n", 2, "malformed record"),
    ("DB:+:4\nstakeholder: S\n", 2, "header"),
])
def test_choice_errors(webportal, text, line, fragment):
    with pytest.raises(ChoiceError) as excinfo:
        parse_stakeholder_config(text, webportal)
    assert excinfo.value.line == line
    assert fragment in str(excinfo.value)


def test_rated_choice_degree_range():
    with pytest.raises(ChoiceError):
        RatedChoice(P("A"), 7)
    with pytest.raises(ChoiceError):
        RatedChoice(P("A"), True)


def test_literal_parse_and_render():
    assert Literal.parse("¬Sec") == N("Sec")
    assert Literal.parse("-Sec") == N("Sec")
    assert Literal.parse("+Sec") == P("Sec")
    assert str(N("Sec")) == "¬Sec"
    assert P("ms").negate() == N("ms")
    with pytest.raises(ChoiceError):
        Literal.parse("¬")


def test_merge_matches_table(scenario):
    merged = merge_configs(scenario)
    assert merged.literals == (
        P("KeyWordSupport"), P("DB"), N("Active"), P("https"), P("XML"), N("Text"), P("ms"),
        P("Active"), P("Php"), P("DataTransfer"), P("Text"), P("Dynamic"), N("https"), N("Sec"),
        P("Database"),
    )
    assert dict(merged.ledger) == {
        P("Active"): (5, 4),
        N("Active"): (5, 3),
        P("Text"): (4, 2),
        N("Text"): (4,),
        P("XML"): (4, 1),
        P("DB"): (4, 3),
        P("DataTransfer"): (4, 3),
        P("KeyWordSupport"): (4, 2),
        P("https"): (5,),
        N("https"): (1,),
        P("ms"): (3,),
        N("Sec"): (3,),
        P("Php"): (2,),
        P("Dynamic"): (5,),
        P("Database"): (5,),
    }


def test_merge_single_choice():
    merged = merge_configs([StakeholderConfig("S", (RatedChoice(P("F"), 3),))])
    assert merged.literals == (P("F"),)
    assert merged.degrees(P("F")) == (3,)


def test_merge_same_literal_twice():
    configs = [StakeholderConfig(s, (RatedChoice(P("F"), 2),)) for s in ("A", "B")]
    merged = merge_configs(configs)
    assert merged.literals == (P("F"),)
    assert merged.degrees(P("F")) == (2, 2)


def test_ledger_insert():
    merged = MergedConfiguration([P("Text")], {P("Text"): (4,)})
    assert ledger_insert(merged, P("Text"), 2).degrees(P("Text")) == (4, 2)

    added = ledger_insert(merged, P("F"), 5)
    assert added.literals == (P("Text"), P("F"))
    assert added.degrees(P("F")) == (5,)
    assert merged.literals == (P("Text"),)

    ranked = MergedConfiguration([P("A")], {P("A"): (5, 3)})
    assert ledger_insert(ranked, P("A"), 4).degrees(P("A")) == (5, 4, 3)


def test_ledger_insert_rejects_bad_degree():
    with pytest.raises(ChoiceError):
        ledger_insert(MergedConfiguration(), P("A"), 9)


def test_without_keeps_ledger():
    merged = MergedConfiguration([P("A"), N("A")], {P("A"): (3,), N("A"): (2,)})
    smaller = merged.without([N("A")])
    assert smaller.literals == (P("A"),)
    assert smaller.degrees(N("A")) == (2,)


def test_json_form_matches_file_form(fixtures_dir, webportal, scenario):
    text = (fixtures_dir / "scenario.json").read_text(encoding="utf-8")
    assert parse_stakeholder_json(text, webportal) == scenario
    assert parse_stakeholder_json(json.dumps(config_to_json(scenario)), webportal) == scenario


def test_json_errors(webportal):
    with pytest.raises(ChoiceError):
        parse_stakeholder_json("{}", webportal)
    with pytest.raises(ChoiceError):
        parse_stakeholder_json('[{"stakeholder": "S", "choices": [{"feature": "DB"}]}]', webportal)
    with pytest.raises(ChoiceError):
        parse_stakeholder_json('[{"stakeholder": "S", "choices": '
                               '[{"feature": "DB", "polarity": "+", "degree": 8}]}]', webportal)


def test_duplicate_stakeholder_ids(webportal, scenario):
    with pytest.raises(ChoiceError) as excinfo:
        parse_stakeholder_json('[{"stakeholder": "S", "choices": []}, {"stakeholder": "S", "choices": []}]', webportal)
    assert "'S'" in str(excinfo.value)
    assert ensure_unique_stakeholders(scenario) is scenario


def test_parse_literal_set(webportal):
    literals = parse_literal_set("DB, ¬ms\n# comment\nhttps -Sec\n", webportal)
    assert literals == (P("DB"), N("ms"), P("https"), N("Sec"))


def test_parse_literal_set_unknown_feature(webportal):
    with pytest.raises(ChoiceError) as excinfo:
        parse_literal_set("DB\nGhost\n", webportal)
    assert excinfo.value.line == 2


@settings(max_examples=1000)
@given(scenarios(), st.randoms(use_true_random=False))
def test_merge_is_order_invariant(drawn, rng):
    _, configs = drawn
    shuffled = list(configs)
    rng.shuffle(shuffled)
    first, second = merge_configs(configs), merge_configs(shuffled)
    assert set(first.literals) == set(second.literals)
    assert dict(first.ledger) == dict(second.ledger)


@given(scenarios())
def test_ledger_lists_are_descending(drawn):
    _, configs = drawn
    merged = merge_configs(configs)
    for literal in merged:
        degrees = merged.degrees(literal)
        assert list(degrees) == sorted(degrees, reverse=True)
    assert sum(len(d) for d in merged.ledger.values()) == sum(len(c.choices) for c in configs)


def test_polarity_values():
    assert Polarity("+") is Polarity.POSITIVE
    assert Polarity("-") is Polarity.NEGATIVE
