import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_RULE = "most-complete"
DEFAULT_HTTP_TIMEOUT = 30.0


# Create a Singleton class to hold environment configuration
class Settings:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Settings, cls).__new__(cls)
            cls._instance.reload()
        return cls._instance

    def reload(self):
        """Re-read the environment (and a .env file, if present)."""
        load_dotenv()
        self.max_iterations = _positive_int(os.getenv('IRATEPLC_MAX_ITERS'), 'IRATEPLC_MAX_ITERS')
        self.default_rule = os.getenv('IRATEPLC_DEFAULT_RULE') or DEFAULT_RULE
        self.log_level = (os.getenv('IRATEPLC_LOG_LEVEL') or 'INFO').upper()
        self.http_timeout = _positive_float(
            os.getenv('IRATEPLC_HTTP_TIMEOUT'), 'IRATEPLC_HTTP_TIMEOUT', DEFAULT_HTTP_TIMEOUT
        )
        return self


def _positive_int(raw, name):
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not an integer")
        return None
    if value <= 0:
        logger.warning(f"Ignoring {name}={raw!r}: must be positive")
        return None
    return value


def _positive_float(raw, name, default):
    if raw is None or raw == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not a number")
        return default
    return value if value > 0 else default
