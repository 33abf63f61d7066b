"""
Stakeholder choices
--------------------------
Literals, rated choices, per-stakeholder configurations and their merge into
one configuration with a descending degree ledger per literal.
"""

import bisect
import json
import logging
import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from irateplc.errors import ChoiceError
from irateplc.model import FeatureModel
from utils.utils import validate_identifier

logger = logging.getLogger(__name__)

MIN_DEGREE = 1
MAX_DEGREE = 5
NEGATION_SIGN = "¬"

HEADER_REGEX = re.compile(r'^stakeholder\s*:\s*(\S+)\s*$')
RECORD_SEPARATORS = re.compile(r'[,\s]+')


class Polarity(str, Enum):
    POSITIVE = "+"
    NEGATIVE = "-"


@dataclass(frozen=True)
class Literal:
    feature: str
    polarity: Polarity = Polarity.POSITIVE

    @property
    def positive(self) -> bool:
        return self.polarity is Polarity.POSITIVE

    def negate(self) -> "Literal":
        flipped = Polarity.NEGATIVE if self.positive else Polarity.POSITIVE
        return Literal(self.feature, flipped)

    def __str__(self) -> str:
        return self.feature if self.positive else f"{NEGATION_SIGN}{self.feature}"

    def sort_key(self) -> Tuple[str, str]:
        return (self.feature, self.polarity.value)

    @classmethod
    def parse(cls, token: str) -> "Literal":
        """Accepts `F`, `+F`, `-F` and `¬F`."""
        token = token.strip()
        polarity = Polarity.POSITIVE
        if token[:1] in (NEGATION_SIGN, "-"):
            polarity, token = Polarity.NEGATIVE, token[1:]
        elif token[:1] == "+":
            token = token[1:]
        if not validate_identifier(token):
            raise ChoiceError(f"malformed literal {token!r}")
        return cls(token, polarity)

    @classmethod
    def pos(cls, feature: str) -> "Literal":
        return cls(feature, Polarity.POSITIVE)

    @classmethod
    def neg(cls, feature: str) -> "Literal":
        return cls(feature, Polarity.NEGATIVE)


@dataclass(frozen=True)
class RatedChoice:
    literal: Literal
    degree: int

    def __post_init__(self):
        check_degree(self.degree, self.literal)


def check_degree(degree: int, literal: Literal) -> None:
    if isinstance(degree, bool) or not isinstance(degree, int):
        raise ChoiceError(f"degree for {literal} must be an integer")
    if not MIN_DEGREE <= degree <= MAX_DEGREE:
        raise ChoiceError(f"degree {degree} for {literal} is outside {MIN_DEGREE}-{MAX_DEGREE}")


@dataclass(frozen=True)
class StakeholderConfig:
    stakeholder: str
    choices: Tuple[RatedChoice, ...] = ()

    def literals(self) -> Tuple[Literal, ...]:
        return tuple(choice.literal for choice in self.choices)

    def validate(self, model: FeatureModel) -> "StakeholderConfig":
        """Check the configuration against `model`; returns self."""
        if not validate_identifier(self.stakeholder):
            raise ChoiceError(f"invalid stakeholder id {self.stakeholder!r}")
        seen: Dict[str, Literal] = {}
        for choice in self.choices:
            feature = choice.literal.feature
            if feature not in model:
                raise ChoiceError(f"unknown feature '{feature}' chosen by {self.stakeholder}")
            if feature in seen:
                raise ChoiceError(
                    f"duplicate feature '{feature}' chosen by {self.stakeholder} "
                    f"({seen[feature]} and {choice.literal})"
                )
            seen[feature] = choice.literal
        return self


class MergedConfiguration:
    """
    The merged configuration: literals in insertion order plus the degree
    ledger (literal -> degrees, descending). Ledger entries outlive the
    removal of their literal. Instances are immutable; every update returns
    a new value.
    """

    def __init__(
        self,
        literals: Iterable[Literal] = (),
        ledger: Optional[Mapping[Literal, Iterable[int]]] = None,
    ):
        self._literals: Tuple[Literal, ...] = tuple(dict.fromkeys(literals))
        self._members = frozenset(self._literals)
        self._ledger: Dict[Literal, Tuple[int, ...]] = {
            literal: tuple(sorted(degrees, reverse=True)) for literal, degrees in (ledger or {}).items()
        }

    @property
    def literals(self) -> Tuple[Literal, ...]:
        return self._literals

    @property
    def ledger(self) -> Mapping[Literal, Tuple[int, ...]]:
        return MappingProxyType(self._ledger)

    def degrees(self, literal: Literal) -> Tuple[int, ...]:
        return self._ledger.get(literal, ())

    def max_degree(self, literal: Literal) -> int:
        degrees = self._ledger.get(literal)
        if not degrees:
            raise ChoiceError(f"no importance degree recorded for {literal}")
        return degrees[0]

    def literal_set(self) -> frozenset:
        return self._members

    def without(self, removed: Iterable[Literal]) -> "MergedConfiguration":
        removed = set(removed)
        if not removed & self._members:
            return self
        return MergedConfiguration((l for l in self._literals if l not in removed), self._ledger)

    def __contains__(self, literal: object) -> bool:
        return literal in self._members

    def __iter__(self) -> Iterator[Literal]:
        return iter(self._literals)

    def __len__(self) -> int:
        return len(self._literals)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MergedConfiguration):
            return NotImplemented
        return self._literals == other._literals and self._ledger == other._ledger

    def __repr__(self) -> str:
        return f"MergedConfiguration({', '.join(map(str, self._literals))})"


def ledger_insert(merged: MergedConfiguration, literal: Literal, degree: int) -> MergedConfiguration:
    """
    Insert `degree` into the ledger list of `literal`, keeping it descending.
    The literal is appended to the configuration when absent.
    """
    check_degree(degree, literal)
    degrees = list(merged.degrees(literal))
    bisect.insort(degrees, degree, key=lambda d: -d)
    ledger = dict(merged.ledger)
    ledger[literal] = tuple(degrees)
    literals = merged.literals if literal in merged else merged.literals + (literal,)
    return MergedConfiguration(literals, ledger)


def merge_configs(configs: Iterable[StakeholderConfig]) -> MergedConfiguration:
    """
    Merge stakeholders' explicit choices.

    Literals keep first-seen order (stakeholder order, then choice order);
    the ledger collects every degree given to each literal.
    """
    literals: Dict[Literal, None] = {}
    ledger: Dict[Literal, List[int]] = {}
    for config in configs:
        for choice in config.choices:
            literals.setdefault(choice.literal)
            bisect.insort(ledger.setdefault(choice.literal, []), choice.degree, key=lambda d: -d)
    return MergedConfiguration(literals, ledger)


def ensure_unique_stakeholders(configs: Sequence[StakeholderConfig]) -> Sequence[StakeholderConfig]:
    """Reject two configurations under one stakeholder id; returns `configs`."""
    seen: Set[str] = set()
    for config in configs:
        if config.stakeholder in seen:
            raise ChoiceError(f"duplicate stakeholder id '{config.stakeholder}'")
        seen.add(config.stakeholder)
    return configs


def _parse_record(record: str, lineno: int) -> RatedChoice:
    parts = record.split(":")
    if len(parts) != 3:
        raise ChoiceError(f"malformed record {record!r}, expected <feature>:<+|->:<degree>", line=lineno)
    feature, sign, raw_degree = (p.strip() for p in parts)
    if not validate_identifier(feature):
        raise ChoiceError(f"malformed feature name {feature!r}", line=lineno)
    try:
        polarity = Polarity(sign)
    except ValueError:
        raise ChoiceError(f"malformed polarity {sign!r} for '{feature}', expected '+' or '-'", line=lineno) from None
    try:
        degree = int(raw_degree)
    except ValueError:
        raise ChoiceError(f"degree {raw_degree!r} for '{feature}' is not an integer", line=lineno) from None
    try:
        return RatedChoice(Literal(feature, polarity), degree)
    except ChoiceError as e:
        e.line = lineno
        raise


def parse_stakeholder_config(
    text: str,
    model: FeatureModel,
    stakeholder: Optional[str] = None,
) -> StakeholderConfig:
    """
    Parse a choice file.

    Args:
        text (str): `stakeholder: <id>` header, then `<feature>:<+|->:<degree>`
            records, one per line or comma-separated on one line.
        model (FeatureModel): Model the choices must reference.
        stakeholder (str, optional): Id used when the file has no header.

    Returns:
        StakeholderConfig: The validated configuration.
    """
    choices: List[RatedChoice] = []
    lines: Dict[str, int] = {}
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = HEADER_REGEX.match(line)
        if header:
            if header_seen or choices:
                raise ChoiceError("the stakeholder header must be the first line, and appear once", line=lineno)
            stakeholder = header.group(1)
            header_seen = True
            continue
        for record in filter(None, (r.strip() for r in line.split(","))):
            choice = _parse_record(record, lineno)
            feature = choice.literal.feature
            if feature not in model:
                raise ChoiceError(f"unknown feature '{feature}'", line=lineno)
            if feature in lines:
                raise ChoiceError(f"duplicate feature '{feature}' (first chosen on line {lines[feature]})", line=lineno)
            lines[feature] = lineno
            choices.append(choice)

    if stakeholder is None:
        raise ChoiceError("missing 'stakeholder: <id>' header", line=1)
    return StakeholderConfig(stakeholder, tuple(choices)).validate(model)


def parse_stakeholder_json(text: str, model: FeatureModel) -> List[StakeholderConfig]:
    """
    Parse the JSON array form:
    `[{"stakeholder": .., "choices": [{"feature": .., "polarity": "+", "degree": ..}]}]`
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChoiceError(f"invalid JSON: {e.msg}", line=e.lineno) from None
    if not isinstance(data, list):
        raise ChoiceError("expected a JSON array of stakeholder configurations")

    configs = []
    for entry in data:
        if not isinstance(entry, dict) or "stakeholder" not in entry:
            raise ChoiceError("each entry needs a 'stakeholder' key")
        choices = []
        for item in entry.get("choices", []):
            try:
                feature, sign, degree = item["feature"], item["polarity"], item["degree"]
            except (KeyError, TypeError):
                raise ChoiceError(f"malformed choice {item!r} for {entry['stakeholder']}") from None
            try:
                polarity = Polarity(sign)
            except ValueError:
                raise ChoiceError(f"malformed polarity {sign!r} for '{feature}'") from None
            choices.append(RatedChoice(Literal(str(feature), polarity), degree))
        configs.append(StakeholderConfig(str(entry["stakeholder"]), tuple(choices)).validate(model))
    ensure_unique_stakeholders(configs)
    return configs


def parse_literal_set(text: str, model: FeatureModel) -> Tuple[Literal, ...]:
    """Parse a literal-set file (`F`, `¬F` or `-F`, separated by commas or whitespace)."""
    literals: Dict[Literal, None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        for token in filter(None, RECORD_SEPARATORS.split(line)):
            try:
                literal = Literal.parse(token)
            except ChoiceError as e:
                e.line = lineno
                raise
            if literal.feature not in model:
                raise ChoiceError(f"unknown feature '{literal.feature}'", line=lineno)
            literals.setdefault(literal)
    return tuple(literals)


def config_to_json(configs: Iterable[StakeholderConfig]) -> List[dict]:
    return [
        {
            "stakeholder": config.stakeholder,
            "choices": [
                {"feature": c.literal.feature, "polarity": c.literal.polarity.value, "degree": c.degree}
                for c in config.choices
            ],
        }
        for config in configs
    ]
