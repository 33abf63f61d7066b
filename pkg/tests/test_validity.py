import pytest
from hypothesis import given, settings

from irateplc.engine import resolve_session
from irateplc.errors import CompletionError, ModelTooLargeError, UnknownFeatureError
from irateplc.model import parse_model
from irateplc.stakeholder import Literal
from irateplc.validity import (
    CompleteConfiguration,
    ViolationKind,
    check_validity,
    complete,
    enumerate_bitmask,
    enumerate_valid,
    extend,
    is_subsumed,
    satisfies,
)
from tests.generators import models, scenarios

P, N = Literal.pos, Literal.neg

FINAL = [
    P("KeyWordSupport"), P("DB"), P("https"), N("ms"), P("Php"), P("Text"),
    P("Dynamic"), N("Sec"), P("Database"), P("Active"), P("DataTransfer"),
]


def test_final_configuration_is_valid(webportal):
    assert check_validity(FINAL, webportal).valid


def test_complementary(webportal):
    report = check_validity([P("ms"), N("ms")], webportal)
    assert not report.valid
    assert ViolationKind.COMPLEMENTARY in report.kinds()


def test_xor_multiple(webportal):
    report = check_validity([P("XML"), P("Database")], webportal)
    assert report.kinds() == {ViolationKind.XOR_MULTIPLE}


def test_require_unsatisfied(webportal):
    report = check_validity([P("DataTransfer"), N("https")], webportal)
    assert ViolationKind.REQUIRE_UNSATISFIED in report.kinds()
    assert [v.constraint_id for v in report.violations if v.kind is ViolationKind.REQUIRE_UNSATISFIED] == [4]


def test_exclude_violated(webportal):
    report = check_validity([P("https"), P("ms")], webportal)
    assert report.kinds() == {ViolationKind.EXCLUDE_VIOLATED}


def test_tree_broken_by_negated_ancestor(webportal):
    report = check_validity([P("Text"), N("SiteSearch")], webportal)
    assert ViolationKind.TREE_BROKEN in report.kinds()


def test_tree_broken_by_negated_mandatory_child(webportal):
    report = check_validity([P("SiteSearch"), N("HTML")], webportal)
    assert ViolationKind.TREE_BROKEN in report.kinds()


def test_no_extension_is_reported(webportal):
    # Persistence needs a member of both of its alternatives.
    report = check_validity([P("Persistence"), N("DB"), N("File")], webportal)
    assert [v.kind for v in report.violations] == [ViolationKind.TREE_BROKEN]


def test_requires_target_left_to_completion(webportal):
    # File requires ftp: an absent target still counts as satisfiable,
    # only an excluded one is a violation.
    assert check_validity([P("File")], webportal).valid
    assert not check_validity([P("File"), N("ftp")], webportal).valid


def test_requires_chain_checked_by_extension():
    model = parse_model("Root!\n  A?\n  B?\n  C?\n---\nrequires A B\nrequires B C\n")
    assert check_validity([P("A"), P("B")], model).valid
    report = check_validity([P("A"), P("B"), N("C")], model)
    assert ViolationKind.REQUIRE_UNSATISFIED in report.kinds()


def test_unknown_feature(webportal):
    with pytest.raises(UnknownFeatureError):
        check_validity([P("Ghost")], webportal)


def test_complete_adds_ancestors(webportal):
    assert {"WebPortal", "Persistence", "XML"} <= complete([P("XML")], webportal).selected


def test_complete_empty(webportal):
    assert complete([], webportal).selected == {"WebPortal", "WebServer", "Content", "Static"}


def test_complete_adds_mandatory_children(webportal):
    assert {"AdditionalServices", "SiteSearch", "Text", "HTML"} <= complete([P("Text")], webportal).selected


def test_complete_contradiction(webportal):
    with pytest.raises(CompletionError) as excinfo:
        complete([P("Text"), N("HTML")], webportal)
    assert excinfo.value.features == {"HTML"}


def test_extend_respects_literals(webportal):
    witness = extend(FINAL, webportal)
    assert witness is not None
    assert is_subsumed(FINAL, witness)
    assert satisfies(webportal, witness.selected)


def test_is_subsumed(webportal):
    final = complete(FINAL, webportal)
    assert is_subsumed(FINAL, final)
    assert not is_subsumed([N("ms")], CompleteConfiguration(frozenset({"WebPortal", "ms"})))


def test_enumerate_root_only():
    assert enumerate_valid(parse_model("Root!\n")) == [CompleteConfiguration(frozenset({"Root"}))]


def test_enumerate_xor_pair():
    found = enumerate_valid(parse_model("Root!\n  <xor>\n    A\n    B\n"))
    assert sorted(sorted(c.selected) for c in found) == [["A", "Root"], ["B", "Root"]]


def test_enumerate_or_pair():
    found = enumerate_valid(parse_model("Root!\n  <or>\n    A\n    B\n"))
    assert len(found) == 3


def test_enumerate_respects_constraints():
    model = parse_model("Root!\n  A?\n  B?\n---\nexcludes A B\n")
    assert len(enumerate_valid(model)) == 3


def test_webportal_final_is_enumerated(webportal, scenario):
    outcome = resolve_session(webportal, scenario)
    found = enumerate_valid(webportal)
    assert complete(outcome.final, webportal) in found
    assert all(satisfies(webportal, c.selected) for c in found)
    assert len({c.selected for c in found}) == len(found)


def test_enumeration_guards():
    wide = parse_model("Root!\n" + "".join(f"  F{i}?\n" for i in range(30)))
    with pytest.raises(ModelTooLargeError):
        enumerate_valid(wide)
    with pytest.raises(ModelTooLargeError):
        enumerate_bitmask(wide)


@settings(max_examples=50)
@given(models(max_features=12))
def test_bitmask_agrees_with_tree_walk(model):
    tree = {c.selected for c in enumerate_valid(model)}
    bitmask = {c.selected for c in enumerate_bitmask(model)}
    assert tree == bitmask


@settings(max_examples=200)
@given(scenarios(max_features=10))
def test_validity_matches_enumeration(drawn):
    model, configs = drawn
    found = enumerate_valid(model)
    for config in configs:
        literals = config.literals()
        expected = any(is_subsumed(literals, c) for c in found)
        assert check_validity(literals, model).valid == expected


@settings(max_examples=200)
@given(scenarios(max_features=18, stakeholders=5, max_xor=4, max_constraints=6))
def test_valid_outcomes_are_subsumed(drawn):
    model, configs = drawn
    outcome = resolve_session(model, configs)
    if not outcome.valid:
        return
    assert any(is_subsumed(outcome.final, c) for c in enumerate_valid(model))
