import json

from irateplc.engine import parse_manager_rule, resolve_session
from irateplc.errors import IRatePLCError
from irateplc.report import report_to_json, satisfaction_to_json, score
from irateplc.stakeholder import parse_literal_set
from tools.common import error_response, load_configs, load_model
from utils.settings import Settings


async def get_resolution(model: str, configs: str, rule: str = "") -> str:
    """
    Resolve the stakeholders' choices on a feature model.

    Args:
        model (str): Feature model DSL text or URL
        configs (str): JSON array of stakeholder configurations, or URL
        rule (str): Manager rule (default: IRATEPLC_DEFAULT_RULE)

    Returns:
        str: JSON report with final configuration, trace and satisfaction
    """
    settings = Settings()
    try:
        feature_model = await load_model(model)
        stakeholders = await load_configs(configs, feature_model)
        manager_rule = parse_manager_rule(rule or settings.default_rule)
        outcome = resolve_session(feature_model, stakeholders, manager_rule, settings.max_iterations)
    except IRatePLCError as e:
        return error_response(e)

    document = {"status": "ok"}
    document.update(report_to_json(score(stakeholders, outcome.final), outcome))
    return json.dumps(document, indent=2, ensure_ascii=False)


async def get_satisfaction(model: str, configs: str, final: str) -> str:
    """
    Score a final configuration against the stakeholders' choices.

    Args:
        model (str): Feature model DSL text or URL
        configs (str): JSON array of stakeholder configurations, or URL
        final (str): Final literals, e.g. "DB, https, ¬ms"

    Returns:
        str: JSON satisfaction report
    """
    try:
        feature_model = await load_model(model)
        stakeholders = await load_configs(configs, feature_model)
        literals = parse_literal_set(final, feature_model)
    except IRatePLCError as e:
        return error_response(e)

    report = score(stakeholders, literals)
    return json.dumps({"status": "ok", "satisfaction": satisfaction_to_json(report)}, indent=2, ensure_ascii=False)
