"""
Resolution engine
--------------------------
Importance comparison, explicit and XOR conflict resolution, requires/excludes
propagation with MAX-degree assignment, the iterate-until-valid loop, and the
product manager's fallback rules.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from irateplc.errors import IterationCapExceeded, UnknownRuleError
from irateplc.model import ConstraintKind, FeatureModel
from irateplc.stakeholder import (
    Literal,
    MergedConfiguration,
    StakeholderConfig,
    ensure_unique_stakeholders,
    ledger_insert,
    merge_configs,
)
from irateplc.validity import ValidityReport, check_validity
from utils.utils import validate_rule

logger = logging.getLogger(__name__)

History = FrozenSet[Tuple[int, Literal]]


class ComparisonResult(Enum):
    FIRST = 1
    SECOND = 2
    TIE = 0


class ConflictKind(str, Enum):
    EXPLICIT = "explicit"
    XOR = "xor"


class Resolution(str, Enum):
    IMPORTANCE = "importance"
    MANAGER_RULE = "manager-rule"


class RuleKind(str, Enum):
    MOST_COMPLETE = "most-complete"
    SIMPLEST = "simplest"
    PRIORITY = "priority"


@dataclass(frozen=True)
class Conflict:
    kind: ConflictKind
    literals: Tuple[Literal, Literal]
    resolved_by: Optional[Resolution] = None
    loser: Optional[Literal] = None

    @property
    def key(self) -> Tuple[ConflictKind, FrozenSet[Literal]]:
        return (self.kind, frozenset(self.literals))

    def __str__(self) -> str:
        return f"({self.literals[0]}, {self.literals[1]})"


@dataclass(frozen=True)
class PropagationRecord:
    constraint_id: int
    trigger: Literal
    added: Literal
    degree: int


@dataclass(frozen=True)
class IterationTrace:
    index: int
    explicit: Tuple[Conflict, ...]
    xor: Tuple[Conflict, ...]
    propagation: Tuple[PropagationRecord, ...]
    snapshot: Tuple[Literal, ...]


@dataclass(frozen=True)
class ManagerRule:
    kind: RuleKind
    stakeholder: Optional[str] = None

    @property
    def name(self) -> str:
        if self.kind is RuleKind.PRIORITY:
            return f"{self.kind.value}:{self.stakeholder}"
        return self.kind.value


@dataclass(frozen=True)
class ResolutionOutcome:
    final: Tuple[Literal, ...]
    valid: bool
    trace: Tuple[IterationTrace, ...]
    remained: Tuple[Conflict, ...]
    manager_rule_applied: Optional[str] = None
    configuration: MergedConfiguration = field(default_factory=MergedConfiguration, compare=False)
    validity: ValidityReport = field(default_factory=ValidityReport, compare=False)


class ConflictResolution(NamedTuple):
    to_remove: List[Literal]
    remained: List[Conflict]
    conflicts: List[Conflict]


class Propagation(NamedTuple):
    records: List[PropagationRecord]
    history: History


def parse_manager_rule(text: str) -> ManagerRule:
    """Accepts `most-complete`, `simplest` and `priority:<stakeholder>`."""
    if not validate_rule(text):
        raise UnknownRuleError(f"unknown manager rule {text!r}")
    if text.startswith(RuleKind.PRIORITY.value + ":"):
        return ManagerRule(RuleKind.PRIORITY, text.split(":", 1)[1])
    return ManagerRule(RuleKind(text))


def compare_importance(a: Sequence[int], b: Sequence[int]) -> ComparisonResult:
    """
    Compare two descending degree lists.

    The first differing position decides; when one list is a prefix of the
    other the longer one wins; identical lists tie.
    """
    if not a or not b:
        raise ValueError("importance lists must not be empty")
    for x, y in zip(a, b):
        if x > y:
            return ComparisonResult.FIRST
        if x < y:
            return ComparisonResult.SECOND
    if len(a) > len(b):
        return ComparisonResult.FIRST
    if len(a) < len(b):
        return ComparisonResult.SECOND
    return ComparisonResult.TIE


def _settle(kind: ConflictKind, first: Literal, second: Literal, config: MergedConfiguration) -> Conflict:
    verdict = compare_importance(config.degrees(first), config.degrees(second))
    if verdict is ComparisonResult.FIRST:
        return Conflict(kind, (first, second), Resolution.IMPORTANCE, second)
    if verdict is ComparisonResult.SECOND:
        return Conflict(kind, (first, second), Resolution.IMPORTANCE, first)
    return Conflict(kind, (first, second))


def resolve_explicit_conflicts(config: MergedConfiguration) -> ConflictResolution:
    """Settle every {F, ¬F} pair in `config`, scanning from the negative literals."""
    result = ConflictResolution([], [], [])
    for literal in config:
        if literal.positive or literal.negate() not in config:
            continue
        conflict = _settle(ConflictKind.EXPLICIT, literal.negate(), literal, config)
        result.conflicts.append(conflict)
        if conflict.loser is None:
            result.remained.append(conflict)
        else:
            result.to_remove.append(conflict.loser)
    return result


def resolve_xor_conflicts(config: MergedConfiguration, model: FeatureModel) -> ConflictResolution:
    """
    Settle pairs of desired alternatives of every XOR group.

    Pairs are visited in member order; a member already slated for removal in
    this pass takes no further part.
    """
    result = ConflictResolution([], [], [])
    removed: Set[Literal] = set()
    for group in model.xor_groups:
        present = [Literal.pos(m) for m in group.members if Literal.pos(m) in config]
        for j, first in enumerate(present):
            for second in present[j + 1:]:
                if first in removed or second in removed:
                    continue
                conflict = _settle(ConflictKind.XOR, first, second, config)
                result.conflicts.append(conflict)
                if conflict.loser is None:
                    result.remained.append(conflict)
                else:
                    removed.add(conflict.loser)
                    result.to_remove.append(conflict.loser)
    return result


def propagate_constraints(
    config: MergedConfiguration,
    model: FeatureModel,
    history: Iterable[Tuple[int, Literal]] = frozenset(),
) -> Propagation:
    """
    Walk the requires/excludes table once against `config`.

    Each added literal carries the highest degree of its trigger. A
    (constraint, trigger) pair fires at most once per session. When both
    sides of an exclusion are desired, only the more important side excludes
    the other (the written direction on a tie).
    """
    fired = set(history)
    records: List[PropagationRecord] = []

    def fire(constraint_id: int, trigger: Literal, added: Literal) -> None:
        if (constraint_id, trigger) in fired:
            return
        fired.add((constraint_id, trigger))
        records.append(PropagationRecord(constraint_id, trigger, added, config.max_degree(trigger)))

    for constraint in model.constraints:
        lhs, rhs = Literal.pos(constraint.lhs), Literal.pos(constraint.rhs)
        if constraint.kind is ConstraintKind.REQUIRES:
            if lhs in config:
                fire(constraint.id, lhs, rhs)
            continue
        if lhs in config and rhs in config:
            verdict = compare_importance(config.degrees(lhs), config.degrees(rhs))
            if verdict is ComparisonResult.SECOND:
                fire(constraint.id, rhs, lhs.negate())
            else:
                fire(constraint.id, lhs, rhs.negate())
        elif lhs in config:
            fire(constraint.id, lhs, rhs.negate())
        elif rhs in config:
            fire(constraint.id, rhs, lhs.negate())
    return Propagation(records, frozenset(fired))


def apply_additions(config: MergedConfiguration, records: Iterable[PropagationRecord]) -> MergedConfiguration:
    """Append each added literal when absent and record its degree in the ledger."""
    for record in records:
        config = ledger_insert(config, record.added, record.degree)
    return config


def check_remained_conflicts(config: MergedConfiguration, remained: Iterable[Conflict]) -> List[Conflict]:
    """Keep the unresolved conflicts whose two literals are still both present."""
    return [c for c in remained if c.literals[0] in config and c.literals[1] in config]


def _chosen_by(configs: Iterable[StakeholderConfig], stakeholder: str) -> Optional[Set[Literal]]:
    for config in configs:
        if config.stakeholder == stakeholder:
            return set(config.literals())
    return None


def _most_complete_loser(conflict: Conflict, config: MergedConfiguration) -> Literal:
    first, second = conflict.literals
    if conflict.kind is ConflictKind.EXPLICIT:
        return first if not first.positive else second
    len_first, len_second = len(config.degrees(first)), len(config.degrees(second))
    if len_first != len_second:
        return first if len_first < len_second else second
    return max(first, second, key=Literal.sort_key)


def _simplest_loser(conflict: Conflict) -> Literal:
    first, second = conflict.literals
    if conflict.kind is ConflictKind.EXPLICIT:
        return first if first.positive else second
    return max(first, second, key=Literal.sort_key)


def apply_manager_rule(
    config: MergedConfiguration,
    remained: Iterable[Conflict],
    rule: ManagerRule,
    configs: Iterable[StakeholderConfig] = (),
) -> List[Literal]:
    """
    Decide the conflicts importance degrees could not.

    Args:
        config (MergedConfiguration): Current configuration (ledger included).
        remained (Iterable[Conflict]): Unresolved conflicts, all literals present.
        rule (ManagerRule): The product manager's rule.
        configs (Iterable[StakeholderConfig]): Needed by `priority:<id>`.

    Returns:
        List[Literal]: Literals to remove, one per settled conflict.
    """
    preferred: Optional[Set[Literal]] = None
    if rule.kind is RuleKind.PRIORITY:
        preferred = _chosen_by(configs, rule.stakeholder)
        if preferred is None:
            raise UnknownRuleError(f"manager rule {rule.name!r} names an unknown stakeholder")

    to_remove: List[Literal] = []
    for conflict in remained:
        first, second = conflict.literals
        if first in to_remove or second in to_remove:
            continue
        if rule.kind is RuleKind.SIMPLEST:
            loser = _simplest_loser(conflict)
        elif preferred is not None and (first in preferred) != (second in preferred):
            loser = second if first in preferred else first
        else:
            loser = _most_complete_loser(conflict, config)
        to_remove.append(loser)
    return to_remove


def _merge_remained(known: List[Conflict], new: Iterable[Conflict]) -> List[Conflict]:
    keys = {c.key for c in known}
    for conflict in new:
        if conflict.key not in keys:
            keys.add(conflict.key)
            known.append(conflict)
    return known


def _propagate_to_exhaustion(
    config: MergedConfiguration,
    model: FeatureModel,
    history: History,
) -> Tuple[MergedConfiguration, History]:
    # Ends because each pass fires only pairs missing from the history.
    records, history = propagate_constraints(config, model, history)
    while records:
        config = apply_additions(config, records)
        records, history = propagate_constraints(config, model, history)
    return config, history


def resolve_session(
    model: FeatureModel,
    configs: Sequence[StakeholderConfig],
    rule: ManagerRule = ManagerRule(RuleKind.MOST_COMPLETE),
    max_iterations: Optional[int] = None,
) -> ResolutionOutcome:
    """
    Run the whole resolution process.

    Merge once, then repeat explicit resolution, XOR resolution and
    propagation until the configuration is valid or stops changing. The loop
    also goes on while another propagation pass would still fire, so the
    result is closed under propagation and chained constraints are followed
    to the end. An invalid fixed point is handed to the manager rule,
    followed by propagation to exhaustion and one more validity check.

    Raises:
        IterationCapExceeded: the loop did not settle within the cap.
        ChoiceError: two configurations share a stakeholder id.
        UnknownRuleError: a priority rule names an unknown stakeholder.
    """
    ensure_unique_stakeholders(configs)
    if rule.kind is RuleKind.PRIORITY and _chosen_by(configs, rule.stakeholder) is None:
        raise UnknownRuleError(f"manager rule {rule.name!r} names an unknown stakeholder")
    cap = max_iterations if max_iterations is not None else 2 * len(model) + 2

    current = merge_configs(configs)
    logger.info(f"Resolving {len(current)} merged choices from {len(configs)} stakeholders")
    history: History = frozenset()
    trace: List[IterationTrace] = []
    remained: List[Conflict] = []
    valid, different, pending = False, True, False
    report = ValidityReport()

    while (not valid and different) or pending:
        if len(trace) >= cap:
            raise IterationCapExceeded(f"resolution did not settle within {cap} iterations")
        previous = current.literal_set()

        explicit = resolve_explicit_conflicts(current)
        current = current.without(explicit.to_remove)
        _merge_remained(remained, explicit.remained)

        xor = resolve_xor_conflicts(current, model)
        current = current.without(xor.to_remove)
        _merge_remained(remained, xor.remained)

        records, history = propagate_constraints(current, model, history)
        current = apply_additions(current, records)
        pending = bool(propagate_constraints(current, model, history).records)

        different = current.literal_set() != previous
        report = check_validity(current, model)
        valid = report.valid
        trace.append(IterationTrace(
            len(trace) + 1,
            tuple(explicit.conflicts),
            tuple(xor.conflicts),
            tuple(records),
            current.literals,
        ))
        logger.debug(
            f"Iteration {len(trace)}: removed {len(explicit.to_remove) + len(xor.to_remove)}, "
            f"propagated {len(records)}, valid={valid}"
        )

    rule_applied = None
    remained = [] if valid else check_remained_conflicts(current, remained)
    if remained:
        losers = apply_manager_rule(current, remained, rule, configs)
        settled = []
        for conflict in remained:
            loser = next((l for l in losers if l in conflict.literals), None)
            settled.append(replace(conflict, resolved_by=Resolution.MANAGER_RULE, loser=loser))
        remained = settled
        current = current.without(losers)
        current, history = _propagate_to_exhaustion(current, model, history)
        report = check_validity(current, model)
        valid = report.valid
        rule_applied = rule.name
        logger.info(f"Manager rule {rule.name} settled {len(losers)} conflicts, valid={valid}")

    logger.info(f"Resolution finished after {len(trace)} iterations, valid={valid}")
    return ResolutionOutcome(
        final=current.literals,
        valid=valid,
        trace=tuple(trace),
        remained=tuple(remained),
        manager_rule_applied=rule_applied,
        configuration=current,
        validity=report,
    )
