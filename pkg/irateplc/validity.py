"""
Configuration validity
--------------------------
Validity of partial (literal-set) configurations, their completion, and two
independent enumerators of the complete valid configurations of small models:
a tree-walking one and a naive bitmask filter.
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import FrozenSet, Iterable, List, Optional, Set, Tuple

from irateplc.errors import CompletionError, ModelTooLargeError, UnknownFeatureError
from irateplc.model import ConstraintKind, FeatureGroup, FeatureKind, FeatureModel, GroupKind
from irateplc.stakeholder import Literal

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 30
BITMASK_LIMIT = 20


class ViolationKind(str, Enum):
    COMPLEMENTARY = "complementary"
    XOR_MULTIPLE = "xor-multiple"
    REQUIRE_UNSATISFIED = "require-unsatisfied"
    EXCLUDE_VIOLATED = "exclude-violated"
    TREE_BROKEN = "tree-broken"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    literals: Tuple[Literal, ...] = ()
    constraint_id: Optional[int] = None


@dataclass(frozen=True)
class ValidityReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> Set[ViolationKind]:
        return {v.kind for v in self.violations}


@dataclass(frozen=True)
class CompleteConfiguration:
    selected: FrozenSet[str]

    def __contains__(self, feature: object) -> bool:
        return feature in self.selected

    def ordered(self, model: FeatureModel) -> List[str]:
        """Selected features in model order."""
        return [name for name in model if name in self.selected]


def _split(config: Iterable[Literal], model: FeatureModel) -> Tuple[List[str], Set[str]]:
    positives: List[str] = []
    negatives: Set[str] = set()
    for literal in config:
        if literal.feature not in model:
            raise UnknownFeatureError(literal.feature)
        if literal.positive:
            positives.append(literal.feature)
        else:
            negatives.add(literal.feature)
    return positives, negatives


def _closure(model: FeatureModel, seeds: Iterable[str]) -> Set[str]:
    """Ancestors plus mandatory-child closure of `seeds`."""
    selected: Set[str] = set()
    stack = list(seeds)
    while stack:
        name = stack.pop()
        if name in selected:
            continue
        selected.add(name)
        parent = model.parent(name)
        if parent is not None:
            stack.append(parent)
        stack.extend(model.mandatory_children(name))
    return selected


def check_validity(config: Iterable[Literal], model: FeatureModel) -> ValidityReport:
    """
    Check a literal set against the model.

    Rules are evaluated on the completion of the positive literals. When none
    of them fires, a witness search still has to find a complete
    configuration extending the literals; otherwise the configuration is
    reported as `tree-broken`. A `requires` target that is merely absent is
    left to that search; only an undesired target is a direct violation.
    """
    config = tuple(config)
    positives, negatives = _split(config, model)
    positive_set = set(positives)
    violations: List[Violation] = []

    for name in dict.fromkeys(positives):
        if name in negatives:
            violations.append(Violation(
                ViolationKind.COMPLEMENTARY,
                f"{name} is both desired and undesired",
                (Literal.pos(name), Literal.neg(name)),
            ))

    selection = _closure(model, positives)
    for name in model:
        if name in selection and name in negatives and name not in positive_set:
            violations.append(Violation(
                ViolationKind.TREE_BROKEN,
                f"completion selects {name} but it is undesired",
                (Literal.neg(name),),
            ))

    for group in model.xor_groups:
        chosen = [m for m in group.members if m in selection]
        if len(chosen) > 1:
            violations.append(Violation(
                ViolationKind.XOR_MULTIPLE,
                f"alternatives of {group.parent} selected together: {', '.join(chosen)}",
                tuple(Literal.pos(m) for m in chosen),
            ))

    for constraint in model.constraints:
        if constraint.kind is ConstraintKind.REQUIRES:
            if constraint.lhs in selection and constraint.rhs in negatives:
                violations.append(Violation(
                    ViolationKind.REQUIRE_UNSATISFIED,
                    f"{constraint} but {constraint.rhs} is undesired",
                    (Literal.pos(constraint.lhs), Literal.neg(constraint.rhs)),
                    constraint.id,
                ))
        elif constraint.lhs in selection and constraint.rhs in selection:
            violations.append(Violation(
                ViolationKind.EXCLUDE_VIOLATED,
                f"{constraint} but both are selected",
                (Literal.pos(constraint.lhs), Literal.pos(constraint.rhs)),
                constraint.id,
            ))

    if not violations and extend(config, model) is None:
        violations.append(Violation(
            ViolationKind.TREE_BROKEN,
            "no complete configuration extends the configuration",
        ))
    return ValidityReport(tuple(violations))


def complete(config: Iterable[Literal], model: FeatureModel) -> CompleteConfiguration:
    """Positive literals, their ancestors and the mandatory closure of all of them."""
    positives, negatives = _split(config, model)
    selection = _closure(model, [model.root, *positives])
    contradicted = selection & negatives
    if contradicted:
        raise CompletionError(contradicted)
    return CompleteConfiguration(frozenset(selection))


class _Assignment:
    """Partial assignment of features with unit propagation over the model rules."""

    def __init__(self, model: FeatureModel, selected: Iterable[str] = (), deselected: Iterable[str] = ()):
        self.model = model
        self.selected: Set[str] = set(selected)
        self.deselected: Set[str] = set(deselected)

    def copy(self) -> "_Assignment":
        return _Assignment(self.model, self.selected, self.deselected)

    def assume(self, feature: str, value: bool) -> bool:
        """Assign and propagate; False on contradiction."""
        queue = deque([(feature, value)])
        while queue:
            name, value = queue.popleft()
            if value:
                if name in self.selected:
                    continue
                if name in self.deselected:
                    return False
                self.selected.add(name)
                implied = self._on_select(name)
            else:
                if name in self.deselected:
                    continue
                if name in self.selected:
                    return False
                self.deselected.add(name)
                implied = self._on_deselect(name)
            if implied is None:
                return False
            queue.extend(implied)
        return True

    def _on_select(self, name: str) -> Optional[List[Tuple[str, bool]]]:
        model = self.model
        implied = []
        parent = model.parent(name)
        if parent is not None:
            implied.append((parent, True))
        implied.extend((child, True) for child in model.mandatory_children(name))
        group = model.group_of(name)
        if group is not None and group.kind is GroupKind.XOR:
            implied.extend((m, False) for m in group.members if m != name)
        implied.extend((other, True) for other in model.requires(name))
        implied.extend((other, False) for other in model.excludes(name))
        for owned in model.groups_of_parent(name):
            forced = self._group_demand(owned)
            if forced is None:
                return None
            implied.extend(forced)
        return implied

    def _on_deselect(self, name: str) -> Optional[List[Tuple[str, bool]]]:
        model = self.model
        feature = model.feature(name)
        implied = [(child, False) for child in model.children(name)]
        if feature.kind is FeatureKind.MANDATORY and feature.parent is not None:
            implied.append((feature.parent, False))
        implied.extend((other, False) for other in model.required_by(name))
        group = model.group_of(name)
        if group is not None and group.parent in self.selected:
            forced = self._group_demand(group)
            if forced is None:
                return None
            implied.extend(forced)
        return implied

    def _group_demand(self, group: FeatureGroup) -> Optional[List[Tuple[str, bool]]]:
        """A selected group parent needs one member that is not deselected."""
        if any(m in self.selected for m in group.members):
            return []
        open_members = [m for m in group.members if m not in self.deselected]
        if not open_members:
            return None
        if len(open_members) == 1:
            return [(open_members[0], True)]
        return []


def _search(state: _Assignment) -> Optional[_Assignment]:
    for group in state.model.groups:
        if group.parent not in state.selected or any(m in state.selected for m in group.members):
            continue
        for member in group.members:
            if member in state.deselected:
                continue
            branch = state.copy()
            if branch.assume(member, True):
                found = _search(branch)
                if found is not None:
                    return found
        return None
    return state


def extend(config: Iterable[Literal], model: FeatureModel) -> Optional[CompleteConfiguration]:
    """
    Find a complete valid configuration subsuming `config`.

    Returns:
        CompleteConfiguration or None when no extension exists.
    """
    positives, negatives = _split(config, model)
    state = _Assignment(model)
    if not state.assume(model.root, True):
        return None
    for name in positives:
        if not state.assume(name, True):
            return None
    for name in sorted(negatives):
        if not state.assume(name, False):
            return None
    found = _search(state)
    if found is None:
        return None
    return CompleteConfiguration(frozenset(found.selected))


def is_subsumed(config: Iterable[Literal], complete_config: CompleteConfiguration) -> bool:
    """True iff every positive literal is selected and every negative one is not."""
    return all((literal.feature in complete_config.selected) == literal.positive for literal in config)


def satisfies(model: FeatureModel, selected: Iterable[str]) -> bool:
    """Whether `selected` is a complete valid configuration of `model`."""
    selected = frozenset(selected)
    if model.root not in selected or not all(name in model for name in selected):
        return False
    for feature in model.features.values():
        if feature.parent is None:
            continue
        if feature.name in selected and feature.parent not in selected:
            return False
        if feature.kind is FeatureKind.MANDATORY and feature.parent in selected and feature.name not in selected:
            return False
    for group in model.groups:
        if group.parent not in selected:
            continue
        count = sum(1 for m in group.members if m in selected)
        if count == 0 or (group.kind is GroupKind.XOR and count > 1):
            return False
    return _cross_tree_holds(model, selected)


def _cross_tree_holds(model: FeatureModel, selected: FrozenSet[str]) -> bool:
    for constraint in model.constraints:
        if constraint.kind is ConstraintKind.REQUIRES:
            if constraint.lhs in selected and constraint.rhs not in selected:
                return False
        elif constraint.lhs in selected and constraint.rhs in selected:
            return False
    return True


def _subtree_selections(model: FeatureModel, name: str) -> List[FrozenSet[str]]:
    """Every tree-valid selection inside the subtree of `name`, given `name` selected."""
    slots: List[List[FrozenSet[str]]] = []
    for child in model.children(name):
        group = model.group_of(child)
        if group is None:
            below = _subtree_selections(model, child)
            if model.features[child].kind is FeatureKind.MANDATORY:
                slots.append(below)
            else:
                slots.append([frozenset()] + below)
        elif child == group.members[0]:
            per_member = [_subtree_selections(model, m) for m in group.members]
            if group.kind is GroupKind.XOR:
                slots.append([s for options in per_member for s in options])
            else:
                options = []
                for mask in range(1, 1 << len(per_member)):
                    chosen = [per_member[i] for i in range(len(per_member)) if mask >> i & 1]
                    options.extend(frozenset().union(*combo) for combo in product(*chosen))
                slots.append(options)
    own = frozenset((name,))
    return [own.union(*combo) for combo in product(*slots)]


def enumerate_valid(model: FeatureModel) -> List[CompleteConfiguration]:
    """All complete valid configurations, walking the tree (≤ 30 features)."""
    if len(model) > ENUMERATION_LIMIT:
        raise ModelTooLargeError(f"model has {len(model)} features; enumeration is limited to {ENUMERATION_LIMIT}")
    found = [
        CompleteConfiguration(selection)
        for selection in _subtree_selections(model, model.root)
        if _cross_tree_holds(model, selection)
    ]
    logger.debug(f"Enumerated {len(found)} valid configurations")
    return found


def enumerate_bitmask(model: FeatureModel) -> List[CompleteConfiguration]:
    """All complete valid configurations by filtering every subset (≤ 20 features)."""
    if len(model) > BITMASK_LIMIT:
        raise ModelTooLargeError(f"model has {len(model)} features; bitmask filter is limited to {BITMASK_LIMIT}")
    names = list(model)
    found = []
    for mask in range(1 << len(names)):
        selection = frozenset(names[i] for i in range(len(names)) if mask >> i & 1)
        if satisfies(model, selection):
            found.append(CompleteConfiguration(selection))
    return found
