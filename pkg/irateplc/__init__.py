"""
IRatePLC: multi-stakeholder configuration of software product lines.

Stakeholders rate desired and undesired features from 1 to 5; the engine
resolves explicit and alternative-group conflicts by importance, propagates
requires/excludes constraints, and falls back to a product manager's rule for
ties.
"""

from irateplc.engine import ManagerRule, ResolutionOutcome, parse_manager_rule, resolve_session
from irateplc.errors import IRatePLCError
from irateplc.model import FeatureModel, parse_model, serialize_model
from irateplc.report import SatisfactionReport, render, score
from irateplc.stakeholder import Literal, StakeholderConfig, parse_stakeholder_config
from irateplc.validity import check_validity, enumerate_valid

__version__ = "0.1.0"

__all__ = [
    "FeatureModel",
    "IRatePLCError",
    "Literal",
    "ManagerRule",
    "ResolutionOutcome",
    "SatisfactionReport",
    "StakeholderConfig",
    "check_validity",
    "enumerate_valid",
    "parse_manager_rule",
    "parse_model",
    "parse_stakeholder_config",
    "render",
    "resolve_session",
    "score",
    "serialize_model",
]
