"""
Feature Model
--------------------------
The product-line feature tree (mandatory and optional children, XOR and OR
groups) together with its requires/excludes constraint table, and the
line-oriented DSL used to write it down.

Example document::

    WebPortal!
      Persistence?
        <xor>
          XML
          Database
        <xor>
          DB
          File
    ---
    requires DB Database
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Set, Tuple

from irateplc.errors import ModelError, ModelSyntaxError, UnknownFeatureError
from utils.utils import validate_identifier

logger = logging.getLogger(__name__)

INDENT = "  "
SEPARATOR = "---"


class FeatureKind(str, Enum):
    MANDATORY = "mandatory"
    OPTIONAL = "optional"
    GROUP_MEMBER = "group-member"


class GroupKind(str, Enum):
    XOR = "xor"
    OR = "or"


class ConstraintKind(str, Enum):
    REQUIRES = "requires"
    EXCLUDES = "excludes"


MARKERS = {"!": FeatureKind.MANDATORY, "?": FeatureKind.OPTIONAL}
GROUP_HEADERS = {f"<{kind.value}>": kind for kind in GroupKind}


@dataclass(frozen=True)
class Feature:
    name: str
    parent: Optional[str]
    kind: FeatureKind


@dataclass(frozen=True)
class FeatureGroup:
    kind: GroupKind
    parent: str
    members: Tuple[str, ...]


@dataclass(frozen=True)
class CrossTreeConstraint:
    id: int
    kind: ConstraintKind
    lhs: str
    rhs: str

    def __str__(self) -> str:
        return f"{self.kind.value} {self.lhs} {self.rhs}"


class FeatureModel:
    """
    Immutable feature model.

    Children are kept in a canonical order where the members of a group are
    contiguous and sit at the position of the group's first member, so two
    models describing the same tree compare equal whatever order they were
    built in.
    """

    def __init__(
        self,
        features: Iterable[Feature],
        groups: Iterable[FeatureGroup] = (),
        constraints: Iterable[CrossTreeConstraint] = (),
    ):
        features = list(features)
        groups = list(groups)
        constraints = list(constraints)

        index: Dict[str, Feature] = {}
        for feature in features:
            if not validate_identifier(feature.name):
                raise ModelError(f"invalid feature name {feature.name!r}")
            if feature.name in index:
                if index[feature.name].parent != feature.parent:
                    raise ModelError(f"feature '{feature.name}' declared with multiple parents")
                raise ModelError(f"duplicate feature '{feature.name}'")
            index[feature.name] = feature

        roots = [f for f in features if f.parent is None]
        if len(roots) != 1:
            raise ModelError(f"expected exactly one root feature, found {len(roots)}")
        root = roots[0]
        if root.kind is not FeatureKind.MANDATORY:
            raise ModelError(f"root feature '{root.name}' must be mandatory")

        children: Dict[str, List[str]] = {name: [] for name in index}
        for feature in features:
            if feature.parent is None:
                continue
            if feature.parent not in index:
                raise UnknownFeatureError(feature.parent)
            children[feature.parent].append(feature.name)

        group_of: Dict[str, FeatureGroup] = {}
        for group in groups:
            if group.parent not in index:
                raise UnknownFeatureError(group.parent)
            if len(group.members) < 2:
                raise ModelError(f"{group.kind.value} group under '{group.parent}' needs at least two members")
            if len(set(group.members)) != len(group.members):
                raise ModelError(f"{group.kind.value} group under '{group.parent}' lists a member twice")
            for member in group.members:
                if member not in index:
                    raise UnknownFeatureError(member)
                if member in group_of:
                    raise ModelError(f"feature '{member}' belongs to two groups")
                if index[member].parent != group.parent:
                    raise ModelError(f"group member '{member}' is not a child of '{group.parent}'")
                if index[member].kind is not FeatureKind.GROUP_MEMBER:
                    raise ModelError(f"feature '{member}' is in a group but not marked as a group member")
                group_of[member] = group
        for feature in features:
            if feature.kind is FeatureKind.GROUP_MEMBER and feature.name not in group_of:
                raise ModelError(f"feature '{feature.name}' is a group member outside any group")

        order = _canonical_order(root.name, children, group_of)
        if len(order) != len(index):
            stray = sorted(set(index) - set(order))
            raise ModelError(f"parent graph is not a tree rooted at '{root.name}': {', '.join(stray)}")
        position = {name: i for i, name in enumerate(order)}

        for i, constraint in enumerate(constraints):
            if constraint.id != i:
                raise ModelError(f"constraint '{constraint}' has id {constraint.id}, expected {i}")
            for name in (constraint.lhs, constraint.rhs):
                if name not in index:
                    raise UnknownFeatureError(name)
            if constraint.lhs == constraint.rhs:
                raise ModelError(f"constraint '{constraint}' relates a feature to itself")

        self._root = root.name
        self._features = {name: index[name] for name in order}
        self._children = {
            name: tuple(sorted(kids, key=position.__getitem__)) for name, kids in children.items()
        }
        self._groups = tuple(sorted(groups, key=lambda g: position[g.members[0]]))
        self._group_of = group_of
        self._groups_by_parent: Dict[str, Tuple[FeatureGroup, ...]] = {}
        for group in self._groups:
            self._groups_by_parent[group.parent] = self._groups_by_parent.get(group.parent, ()) + (group,)
        self._constraints = tuple(constraints)

        self._requires: Dict[str, List[str]] = {name: [] for name in index}
        self._required_by: Dict[str, List[str]] = {name: [] for name in index}
        self._excludes: Dict[str, List[str]] = {name: [] for name in index}
        for constraint in self._constraints:
            if constraint.kind is ConstraintKind.REQUIRES:
                self._requires[constraint.lhs].append(constraint.rhs)
                self._required_by[constraint.rhs].append(constraint.lhs)
            else:
                self._excludes[constraint.lhs].append(constraint.rhs)
                self._excludes[constraint.rhs].append(constraint.lhs)

    @property
    def root(self) -> str:
        return self._root

    @property
    def features(self) -> Mapping[str, Feature]:
        return MappingProxyType(self._features)

    @property
    def groups(self) -> Tuple[FeatureGroup, ...]:
        return self._groups

    @property
    def xor_groups(self) -> Tuple[FeatureGroup, ...]:
        return tuple(g for g in self._groups if g.kind is GroupKind.XOR)

    @property
    def or_groups(self) -> Tuple[FeatureGroup, ...]:
        return tuple(g for g in self._groups if g.kind is GroupKind.OR)

    @property
    def constraints(self) -> Tuple[CrossTreeConstraint, ...]:
        return self._constraints

    def __contains__(self, name: object) -> bool:
        return name in self._features

    def __len__(self) -> int:
        return len(self._features)

    def __iter__(self) -> Iterator[str]:
        return iter(self._features)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureModel):
            return NotImplemented
        return (
            tuple(self._features.values()) == tuple(other._features.values())
            and self._groups == other._groups
            and self._constraints == other._constraints
        )

    def __hash__(self) -> int:
        return hash((tuple(self._features.values()), self._groups, self._constraints))

    def __repr__(self) -> str:
        return (
            f"FeatureModel(root={self._root!r}, features={len(self._features)}, "
            f"groups={len(self._groups)}, constraints={len(self._constraints)})"
        )

    def feature(self, name: str) -> Feature:
        try:
            return self._features[name]
        except KeyError:
            raise UnknownFeatureError(name) from None

    def parent(self, name: str) -> Optional[str]:
        return self.feature(name).parent

    def children(self, name: str) -> Tuple[str, ...]:
        self.feature(name)
        return self._children[name]

    def mandatory_children(self, name: str) -> Tuple[str, ...]:
        return tuple(c for c in self.children(name) if self._features[c].kind is FeatureKind.MANDATORY)

    def ancestors(self, name: str) -> List[str]:
        """Parent first, root last."""
        chain = []
        current = self.feature(name).parent
        while current is not None:
            chain.append(current)
            current = self._features[current].parent
        return chain

    def descendants(self, name: str) -> Set[str]:
        self.feature(name)
        found: Set[str] = set()
        queue = deque(self._children[name])
        while queue:
            child = queue.popleft()
            found.add(child)
            queue.extend(self._children[child])
        return found

    def group_of(self, name: str) -> Optional[FeatureGroup]:
        self.feature(name)
        return self._group_of.get(name)

    def groups_of_parent(self, name: str) -> Tuple[FeatureGroup, ...]:
        self.feature(name)
        return self._groups_by_parent.get(name, ())

    def requires(self, name: str) -> Tuple[str, ...]:
        """Features `name` requires."""
        return tuple(self._requires[name])

    def required_by(self, name: str) -> Tuple[str, ...]:
        return tuple(self._required_by[name])

    def excludes(self, name: str) -> Tuple[str, ...]:
        """Features mutually exclusive with `name`, in either written direction."""
        return tuple(self._excludes[name])


def _canonical_order(root: str, children: Dict[str, List[str]], group_of: Dict[str, FeatureGroup]) -> List[str]:
    order: List[str] = []
    seen: Set[str] = set()

    def visit(name: str) -> None:
        if name in seen:
            return
        seen.add(name)
        order.append(name)
        for child in children[name]:
            group = group_of.get(child)
            if group is None:
                visit(child)
            else:
                for member in group.members:
                    visit(member)

    visit(root)
    return order


def descendants(model: FeatureModel, feature: str) -> Set[str]:
    """Transitive children of `feature`, excluding the feature itself."""
    return model.descendants(feature)


def _strip_comment(line: str) -> str:
    hash_at = line.find("#")
    return (line if hash_at < 0 else line[:hash_at]).rstrip()


def _parse_constraint(
    body: str, lineno: int, column: int, constraint_id: int, declared: Mapping[str, int]
) -> CrossTreeConstraint:
    tokens = body.split()
    kinds = {kind.value: kind for kind in ConstraintKind}
    if len(tokens) != 3 or tokens[0] not in kinds:
        raise ModelSyntaxError("expected 'requires <A> <B>' or 'excludes <A> <B>'", lineno, column)
    kind, lhs, rhs = kinds[tokens[0]], tokens[1], tokens[2]
    for name in (lhs, rhs):
        if name not in declared:
            raise UnknownFeatureError(name, line=lineno)
    if lhs == rhs:
        raise ModelError(f"constraint '{body.strip()}' relates a feature to itself", line=lineno)
    return CrossTreeConstraint(constraint_id, kind, lhs, rhs)


def parse_model(text: str) -> FeatureModel:
    """
    Parse a model DSL document.

    Args:
        text (str): The document (2-space indentation, `---` before constraints).

    Returns:
        FeatureModel: The validated model.
    """
    features: List[Feature] = []
    groups: List[Tuple[GroupKind, str, List[str], int]] = []
    constraints: List[CrossTreeConstraint] = []
    declared: Dict[str, int] = {}
    # (depth, is_group, feature name or group index)
    stack: List[Tuple[int, bool, object]] = []
    in_constraints = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        body = line.lstrip(" ")
        if not body:
            continue
        indent = len(line) - len(body)

        if in_constraints:
            constraints.append(_parse_constraint(body, lineno, indent + 1, len(constraints), declared))
            continue
        if body == SEPARATOR:
            in_constraints = True
            continue

        if body[0] == "\t":
            raise ModelSyntaxError("tabs are not allowed for indentation", lineno, indent + 1)
        if indent % len(INDENT):
            raise ModelSyntaxError("indentation must be a multiple of 2 spaces", lineno, indent + 1)
        for offset, char in enumerate(body):
            if char.isspace():
                raise ModelSyntaxError("unexpected whitespace in feature line", lineno, indent + offset + 1)
        depth = indent // len(INDENT)

        if not stack and depth:
            raise ModelSyntaxError("the root feature must not be indented", lineno, 1)
        if stack and depth > stack[-1][0] + 1:
            raise ModelSyntaxError("indentation jumps more than one level", lineno, indent + 1)
        while stack and stack[-1][0] >= depth:
            stack.pop()
        if features and not stack:
            raise ModelSyntaxError("a model has exactly one root feature", lineno, indent + 1)
        parent = stack[-1] if stack else None

        if body in GROUP_HEADERS:
            if parent is None or parent[1]:
                raise ModelSyntaxError(f"{body} must be nested under a feature", lineno, indent + 1)
            groups.append((GROUP_HEADERS[body], str(parent[2]), [], lineno))
            stack.append((depth, True, len(groups) - 1))
            continue

        marker = MARKERS.get(body[-1])
        name = body[:-1] if marker else body
        if not validate_identifier(name):
            raise ModelSyntaxError(f"invalid feature name {name!r}", lineno, indent + 1)

        if parent is None:
            if marker is FeatureKind.OPTIONAL:
                raise ModelSyntaxError("the root feature cannot be optional", lineno, indent + len(body))
            parent_name, kind = None, FeatureKind.MANDATORY
        elif parent[1]:
            if marker is not None:
                raise ModelSyntaxError("group members take no '!' or '?' marker", lineno, indent + len(body))
            group = groups[parent[2]]
            group[2].append(name)
            parent_name, kind = group[1], FeatureKind.GROUP_MEMBER
        else:
            parent_name, kind = str(parent[2]), marker or FeatureKind.OPTIONAL

        if name in declared:
            raise ModelError(f"duplicate feature '{name}' (first declared on line {declared[name]})", line=lineno)
        declared[name] = lineno
        features.append(Feature(name, parent_name, kind))
        stack.append((depth, False, name))

    if not features:
        raise ModelSyntaxError("empty model: no root feature", 1)
    for kind, parent_name, members, lineno in groups:
        if len(members) < 2:
            raise ModelError(f"<{kind.value}> group under '{parent_name}' needs at least two members", line=lineno)

    model = FeatureModel(
        features,
        [FeatureGroup(kind, parent_name, tuple(members)) for kind, parent_name, members, _ in groups],
        constraints,
    )
    logger.debug(f"Parsed {model!r}")
    return model


def serialize_model(model: FeatureModel) -> str:
    """Render `model` as a canonical DSL document."""
    lines: List[str] = []
    suffix = {FeatureKind.MANDATORY: "!", FeatureKind.OPTIONAL: "?", FeatureKind.GROUP_MEMBER: ""}

    def emit(name: str, depth: int) -> None:
        lines.append(f"{INDENT * depth}{name}{suffix[model.features[name].kind]}")
        for child in model.children(name):
            group = model.group_of(child)
            if group is None:
                emit(child, depth + 1)
            elif child == group.members[0]:
                lines.append(f"{INDENT * (depth + 1)}<{group.kind.value}>")
                for member in group.members:
                    emit(member, depth + 2)

    emit(model.root, 0)
    if model.constraints:
        lines.append(SEPARATOR)
        lines.extend(str(c) for c in model.constraints)
    return "\n".join(lines) + "\n"
