"""
IRatePLC MCP Server
--------------------------
This MCP Server exposes multi-stakeholder feature model configuration.
It resolves stakeholders' rated choices into one valid configuration,
checks literal sets against a model, enumerates the valid configurations
of small models and scores a final configuration.
"""

import re
import sys
import argparse
import logging

from mcp.server.fastmcp import FastMCP
from tools.resolution_tools import get_resolution, get_satisfaction
from tools.validity_tools import get_configurations, get_validity
from utils.settings import Settings
from utils.utils import RULE_REGEX


# Configure logging
logging.basicConfig(
    level=getattr(logging, Settings().log_level, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[logging.StreamHandler()]
)
logger = logging.getLogger("irateplc-mcp-server")

# Initialize FastMCP server
mcp = FastMCP("irateplc-mcp-server")

MAX_LIMIT = 1000


@mcp.tool()
async def resolve_configuration(model: str, configs: str, rule: str = "") -> str:
    """
    Resolve stakeholders' rated choices into one configuration.

    Args:
        model (str): Feature model in the indented DSL, or an http(s) URL.
        configs (str): JSON array `[{"stakeholder": .., "choices": [{"feature": .., "polarity": "+"|"-", "degree": 1-5}]}]`, or a URL.
        rule (str, optional): Manager rule: most-complete, simplest or priority:<stakeholder>.

    Returns:
        str: JSON report or error message.
    """
    if not isinstance(model, str) or not model.strip():
        return "Invalid model."
    if not isinstance(configs, str) or not configs.strip():
        return "Invalid configs."
    if rule and (not isinstance(rule, str) or not re.match(RULE_REGEX, rule)):
        return "Invalid rule format. Use most-complete, simplest or priority:<stakeholder>."
    try:
        return await get_resolution(model, configs, rule)
    except Exception as e:
        logger.error(f"Error resolving configuration: {e}")
        return "Error resolving configuration"


@mcp.tool()
async def validate_configuration(model: str, literals: str) -> str:
    """
    Check a literal set (e.g. "Php, ¬Sec") against a feature model.

    Args:
        model (str): Feature model in the indented DSL, or an http(s) URL.
        literals (str): Comma- or whitespace-separated literals; negate with ¬ or -.

    Returns:
        str: JSON validity report or error message.
    """
    if not isinstance(model, str) or not model.strip():
        return "Invalid model."
    if not isinstance(literals, str):
        return "Invalid literals."
    try:
        return await get_validity(model, literals)
    except Exception as e:
        logger.error(f"Error validating configuration: {e}")
        return "Error validating configuration"


@mcp.tool()
async def enumerate_configurations(model: str, limit: int = 50) -> str:
    """
    Enumerate every complete valid configuration of a small feature model.

    Args:
        model (str): Feature model in the indented DSL, or an http(s) URL.
        limit (int): Maximum number of configurations listed (default: 50)

    Returns:
        str: JSON with count and configurations, or error message.
    """
    if not isinstance(model, str) or not model.strip():
        return "Invalid model."
    if not isinstance(limit, int) or not 1 <= limit <= MAX_LIMIT:
        return f"Invalid limit. Use 1-{MAX_LIMIT}."
    try:
        return await get_configurations(model, limit)
    except Exception as e:
        logger.error(f"Error enumerating configurations: {e}")
        return "Error enumerating configurations"


@mcp.tool()
async def score_configuration(model: str, configs: str, final: str) -> str:
    """
    Compute stakeholder satisfaction for a final configuration.

    Args:
        model (str): Feature model in the indented DSL, or an http(s) URL.
        configs (str): JSON array of stakeholder configurations, or a URL.
        final (str): Final literals, comma- or whitespace-separated.

    Returns:
        str: JSON satisfaction report or error message.
    """
    if not isinstance(model, str) or not model.strip():
        return "Invalid model."
    if not isinstance(configs, str) or not configs.strip():
        return "Invalid configs."
    if not isinstance(final, str):
        return "Invalid final configuration."
    try:
        return await get_satisfaction(model, configs, final)
    except Exception as e:
        logger.error(f"Error scoring configuration: {e}")
        return "Error scoring configuration"


def parse_arguments() -> argparse.Namespace:
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description='A Model Context Protocol (MCP) server for multi-stakeholder product line configuration'
    )
    parser.add_argument('--sse', action='store_true', help='Use SSE transport')
    parser.add_argument('--port', type=int, default=8888, help='Port to run the server on')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')

    return parser.parse_args()


# Define main function for running the server
def main():
    """Run the MCP server."""
    args = parse_arguments()

    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.debug("Debug logging enabled")

    mcp.settings.port = args.port

    try:
        if args.sse:
            mcp.run(transport='sse')
        else:
            mcp.run()
    except Exception as e:
        logger.critical(f"Failed to start server: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
