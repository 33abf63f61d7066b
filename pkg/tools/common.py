import json
import logging
from typing import List

from irateplc.errors import IRatePLCError
from irateplc.model import FeatureModel, parse_model
from irateplc.stakeholder import StakeholderConfig, parse_stakeholder_json
from utils.network import resolve_document

logger = logging.getLogger(__name__)


def error_response(error: IRatePLCError) -> str:
    logger.error(f"Request failed: {error}")
    return json.dumps({"status": "error", "message": str(error)}, indent=2)


async def load_model(model: str) -> FeatureModel:
    """Parse a model given as DSL text or URL."""
    text = await resolve_document(model)
    try:
        return parse_model(text)
    except IRatePLCError as e:
        raise e.located("model") if e.source is None else e


async def load_configs(configs: str, model: FeatureModel) -> List[StakeholderConfig]:
    """Parse the JSON array of stakeholder configurations (text or URL)."""
    text = await resolve_document(configs)
    try:
        return parse_stakeholder_json(text, model)
    except IRatePLCError as e:
        raise e.located("configs") if e.source is None else e
