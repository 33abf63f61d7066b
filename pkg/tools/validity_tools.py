import json

from irateplc.errors import IRatePLCError
from irateplc.stakeholder import parse_literal_set
from irateplc.validity import check_validity, enumerate_valid, extend
from tools.common import error_response, load_model


async def get_validity(model: str, literals: str) -> str:
    """
    Check a literal set against a feature model.

    Args:
        model (str): Feature model DSL text or URL
        literals (str): Literals, e.g. "Php, ¬Sec, -ms"

    Returns:
        str: JSON with validity, violations and a witness configuration
    """
    try:
        feature_model = await load_model(model)
        config = parse_literal_set(literals, feature_model)
        report = check_validity(config, feature_model)
    except IRatePLCError as e:
        return error_response(e)

    witness = extend(config, feature_model) if report.valid else None
    return json.dumps({
        "status": "ok",
        "valid": report.valid,
        "violations": [{"kind": v.kind.value, "detail": v.detail} for v in report.violations],
        "witness": witness.ordered(feature_model) if witness is not None else None,
    }, indent=2, ensure_ascii=False)


async def get_configurations(model: str, limit: int = 50) -> str:
    """
    Enumerate the complete valid configurations of a small model.

    Args:
        model (str): Feature model DSL text or URL
        limit (int): Maximum number of configurations listed (default: 50)

    Returns:
        str: JSON with the total count and up to `limit` configurations
    """
    try:
        feature_model = await load_model(model)
        found = enumerate_valid(feature_model)
    except IRatePLCError as e:
        return error_response(e)

    return json.dumps({
        "status": "ok",
        "count": len(found),
        "configurations": [c.ordered(feature_model) for c in found[:limit]],
    }, indent=2)
