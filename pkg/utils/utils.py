import re

IDENTIFIER_REGEX = r'^[A-Za-z_][A-Za-z0-9_.\-]*$'
RULE_REGEX = r'^(most-complete|simplest|priority:[A-Za-z0-9_.\-]+)$'


def validate_identifier(name):
    """Feature and stakeholder names: non-empty, no whitespace, no DSL sigils."""
    return bool(name) and re.match(IDENTIFIER_REGEX, name) is not None


def validate_rule(rule):
    return bool(rule) and re.match(RULE_REGEX, rule) is not None


def is_url(location):
    return location.startswith(("http://", "https://"))
