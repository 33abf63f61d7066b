"""
Satisfaction report
--------------------------
Scores a final configuration against the stakeholders' explicit choices and
renders the resolution outcome as JSON, as a plain-text table, or as a
line-delimited iteration trace.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from irateplc.engine import Conflict, IterationTrace, PropagationRecord, ResolutionOutcome
from irateplc.errors import UnknownFormatError
from irateplc.stakeholder import (
    MAX_DEGREE,
    MIN_DEGREE,
    Literal,
    RatedChoice,
    StakeholderConfig,
    ensure_unique_stakeholders,
)

logger = logging.getLogger(__name__)

DEGREES = tuple(range(MAX_DEGREE, MIN_DEGREE - 1, -1))
FORMATS = ("json", "table")
FINAL_COLUMN = "Final"
UNDEFINED = "-"


@dataclass(frozen=True)
class DegreeCell:
    chosen: int = 0
    retained: int = 0

    @property
    def rate(self) -> Optional[Fraction]:
        """retained/chosen, or None when nothing was chosen at this degree."""
        if not self.chosen:
            return None
        return Fraction(self.retained, self.chosen)


@dataclass(frozen=True)
class SatisfactionSummary:
    per_degree: Dict[int, DegreeCell] = field(default_factory=lambda: {d: DegreeCell() for d in DEGREES})
    chosen_weight: int = 0
    retained_weight: int = 0

    @property
    def chosen(self) -> int:
        return sum(cell.chosen for cell in self.per_degree.values())

    @property
    def retained(self) -> int:
        return sum(cell.retained for cell in self.per_degree.values())

    @property
    def overall_rate(self) -> Optional[Fraction]:
        return DegreeCell(self.chosen, self.retained).rate

    @property
    def weighted_rate(self) -> Optional[Fraction]:
        if not self.chosen_weight:
            return None
        return Fraction(self.retained_weight, self.chosen_weight)


@dataclass(frozen=True)
class SatisfactionReport:
    per_stakeholder: Dict[str, SatisfactionSummary]
    totals: SatisfactionSummary

    @property
    def weighted_global(self) -> Fraction:
        """Retained degrees over all degrees; 0 when nobody chose anything."""
        return self.totals.weighted_rate or Fraction(0)


def _summarize(choices: Iterable[RatedChoice], final: frozenset) -> SatisfactionSummary:
    chosen = {d: 0 for d in DEGREES}
    retained = {d: 0 for d in DEGREES}
    chosen_weight = retained_weight = 0
    for choice in choices:
        chosen[choice.degree] += 1
        chosen_weight += choice.degree
        if choice.literal in final:
            retained[choice.degree] += 1
            retained_weight += choice.degree
    return SatisfactionSummary(
        {d: DegreeCell(chosen[d], retained[d]) for d in DEGREES},
        chosen_weight,
        retained_weight,
    )


def score(configs: Sequence[StakeholderConfig], final: Iterable[Literal]) -> SatisfactionReport:
    """
    Score `final` against every stakeholder's choices.

    A choice is retained when its exact literal (feature and polarity) is in
    `final`. Stakeholders keep their input order.
    """
    ensure_unique_stakeholders(configs)
    final = frozenset(final)
    per_stakeholder = {config.stakeholder: _summarize(config.choices, final) for config in configs}
    totals = _summarize((choice for config in configs for choice in config.choices), final)
    report = SatisfactionReport(per_stakeholder, totals)
    logger.debug(f"Weighted satisfaction {report.weighted_global} over {len(per_stakeholder)} stakeholders")
    return report


# JSON

def _rational(value: Optional[Fraction]) -> Optional[Dict[str, Any]]:
    if value is None:
        return None
    return {"num": value.numerator, "den": value.denominator, "value": float(value)}


def _summary_to_json(summary: SatisfactionSummary) -> Dict[str, Any]:
    return {
        "per_degree": {
            str(d): {"d": cell.chosen, "r": cell.retained, "s": _rational(cell.rate)}
            for d, cell in summary.per_degree.items()
        },
        "overall_rate": _rational(summary.overall_rate),
        "weighted_rate": _rational(summary.weighted_rate),
        "chosen_weight": summary.chosen_weight,
        "retained_weight": summary.retained_weight,
    }


def satisfaction_to_json(report: SatisfactionReport) -> Dict[str, Any]:
    return {
        "per_stakeholder": {sid: _summary_to_json(s) for sid, s in report.per_stakeholder.items()},
        "global": _summary_to_json(report.totals),
        "weighted_global": _rational(report.weighted_global),
    }


def _conflict_to_json(conflict: Conflict) -> Dict[str, Any]:
    return {
        "kind": conflict.kind.value,
        "literals": [str(l) for l in conflict.literals],
        "resolved_by": conflict.resolved_by.value if conflict.resolved_by else None,
        "removed": str(conflict.loser) if conflict.loser else None,
    }


def _record_to_json(record: PropagationRecord) -> Dict[str, Any]:
    return {
        "constraint": record.constraint_id,
        "trigger": str(record.trigger),
        "added": str(record.added),
        "degree": record.degree,
    }


def iteration_to_json(iteration: IterationTrace) -> Dict[str, Any]:
    return {
        "iteration": iteration.index,
        "explicit": [_conflict_to_json(c) for c in iteration.explicit],
        "xor": [_conflict_to_json(c) for c in iteration.xor],
        "propagation": [_record_to_json(r) for r in iteration.propagation],
        "configuration": [str(l) for l in iteration.snapshot],
    }


def report_to_json(report: SatisfactionReport, outcome: Optional[ResolutionOutcome] = None) -> Dict[str, Any]:
    if outcome is None:
        return {"satisfaction": satisfaction_to_json(report)}
    return {
        "final": [str(l) for l in outcome.final],
        "valid": outcome.valid,
        "iterations": [iteration_to_json(t) for t in outcome.trace],
        "remained_conflicts": [_conflict_to_json(c) for c in outcome.remained],
        "manager_rule": outcome.manager_rule_applied,
        "violations": [v.detail for v in outcome.validity.violations],
        "satisfaction": satisfaction_to_json(report),
    }


def _cell_from_json(raw: Mapping[str, Any]) -> DegreeCell:
    return DegreeCell(int(raw["d"]), int(raw["r"]))


def _summary_from_json(raw: Mapping[str, Any]) -> SatisfactionSummary:
    return SatisfactionSummary(
        {int(d): _cell_from_json(cell) for d, cell in raw["per_degree"].items()},
        int(raw["chosen_weight"]),
        int(raw["retained_weight"]),
    )


def load_satisfaction(document: Union[str, Mapping[str, Any]]) -> SatisfactionReport:
    """
    Read a SatisfactionReport back from a rendered JSON document (the whole
    report or only its `satisfaction` section).
    """
    data = json.loads(document) if isinstance(document, str) else document
    data = data.get("satisfaction", data)
    return SatisfactionReport(
        {sid: _summary_from_json(raw) for sid, raw in data["per_stakeholder"].items()},
        _summary_from_json(data["global"]),
    )


# Table

def _percent(value: Optional[Fraction]) -> str:
    if value is None:
        return UNDEFINED
    return f"{float(value) * 100:.0f}%"


def _literals(literals: Iterable[Literal]) -> str:
    return "{" + ", ".join(str(l) for l in literals) + "}"


def _conflict_line(conflict: Conflict) -> str:
    if conflict.loser is None:
        return f"{conflict} -> unresolved"
    return f"{conflict} -> removed {conflict.loser} ({conflict.resolved_by.value})"


def _trace_lines(outcome: ResolutionOutcome) -> List[str]:
    lines = []
    for iteration in outcome.trace:
        lines.append(f"Iteration {iteration.index}")
        for label, conflicts in (("explicit", iteration.explicit), ("xor", iteration.xor)):
            for conflict in conflicts:
                lines.append(f"  {label}: {_conflict_line(conflict)}")
        for record in iteration.propagation:
            lines.append(
                f"  propagation: #{record.constraint_id} {record.trigger} => {record.added} ({record.degree})"
            )
        lines.append(f"  configuration: {_literals(iteration.snapshot)}")
    for conflict in outcome.remained:
        lines.append(f"Remained: {_conflict_line(conflict)}")
    if outcome.manager_rule_applied:
        lines.append(f"Manager rule: {outcome.manager_rule_applied}")
    status = "valid" if outcome.valid else "invalid"
    lines.append(f"Final configuration ({status}): {_literals(outcome.final)}")
    return lines


def _satisfaction_lines(report: SatisfactionReport) -> List[str]:
    columns = list(report.per_stakeholder.items()) + [(FINAL_COLUMN, report.totals)]
    rows = [["Degree"] + [name for name, _ in columns]]
    for degree in DEGREES:
        row = [str(degree)]
        for _, summary in columns:
            cell = summary.per_degree[degree]
            row.append(f"d={cell.chosen} r={cell.retained} s={_percent(cell.rate)}")
        rows.append(row)
    rows.append(["Overall"] + [
        f"d={s.chosen} r={s.retained} s={_percent(s.overall_rate)}" for _, s in columns
    ])
    rows.append(["Weighted"] + [_percent(s.weighted_rate) for _, s in columns])

    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = [" | ".join(text.ljust(w) for text, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "-+-".join("-" * w for w in widths))
    lines.append(f"Weighted global satisfaction: {_percent(report.weighted_global)}")
    return lines


def render(report: SatisfactionReport, outcome: Optional[ResolutionOutcome] = None, fmt: str = "json") -> str:
    """
    Render a satisfaction report (and the outcome it scores, when given).

    Args:
        report (SatisfactionReport): Scores to render.
        outcome (ResolutionOutcome, optional): Resolution to render with them.
        fmt (str): "json" or "table".

    Returns:
        str: The rendered document, newline-terminated.
    """
    if fmt == "json":
        return json.dumps(report_to_json(report, outcome), indent=2, ensure_ascii=False) + "\n"
    if fmt == "table":
        lines = _trace_lines(outcome) + [""] if outcome is not None else []
        return "\n".join(lines + _satisfaction_lines(report)) + "\n"
    raise UnknownFormatError(f"unknown format {fmt!r}, expected one of {', '.join(FORMATS)}")


def render_trace(outcome: ResolutionOutcome) -> str:
    """One JSON object per iteration, one per line."""
    return "".join(json.dumps(iteration_to_json(t), ensure_ascii=False) + "\n" for t in outcome.trace)
