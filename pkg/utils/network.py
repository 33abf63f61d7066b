import logging
from pathlib import Path

import httpx

from irateplc.errors import DocumentLoadError
from utils.settings import Settings
from utils.utils import is_url

logger = logging.getLogger(__name__)

DEFAULT_HEADERS = {"Accept": "text/plain, application/json"}


"""
Fetch a model or choice document from a remote location.

Args:
    url (str): http(s) URL of the document.

Returns:
    str: The document body decoded as UTF-8.
"""
async def fetch_document(url: str) -> str:

    settings = Settings()
    async with httpx.AsyncClient(timeout=settings.http_timeout, follow_redirects=True) as client:
        try:
            response = await client.get(url, headers=DEFAULT_HEADERS)
            response.raise_for_status()
            logger.info(f"Fetched {url} with status {response.status_code}")
            return response.text
        except httpx.TimeoutException:
            logger.error(f"Request timeout fetching {url}")
            raise DocumentLoadError("request timed out", source=url)
        except httpx.HTTPStatusError as e:
            logger.error(f"HTTP error: {e.response.status_code} fetching {url}")
            raise DocumentLoadError(f"HTTP {e.response.status_code}", source=url)
        except httpx.HTTPError as e:
            logger.error(f"Request error fetching {url}: {e}")
            raise DocumentLoadError(str(e), source=url)


"""
Read a document from a local path or an http(s) URL.

Args:
    location (str): File path or URL.

Returns:
    str: The document text.
"""
def read_document(location: str) -> str:

    if is_url(location):
        settings = Settings()
        try:
            with httpx.Client(timeout=settings.http_timeout, follow_redirects=True) as client:
                response = client.get(location, headers=DEFAULT_HEADERS)
                response.raise_for_status()
                return response.text
        except httpx.HTTPStatusError as e:
            logger.error(f"HTTP error: {e.response.status_code} fetching {location}")
            raise DocumentLoadError(f"HTTP {e.response.status_code}", source=location)
        except httpx.HTTPError as e:
            logger.error(f"Request error fetching {location}: {e}")
            raise DocumentLoadError(str(e), source=location)

    path = Path(location)
    if not path.is_file():
        raise DocumentLoadError("no such file", source=location)
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise DocumentLoadError(str(e), source=location)


"""
Accept a document given inline or by URL, as the MCP tools do.

Args:
    source (str): Document text, or an http(s) URL to fetch it from.

Returns:
    str: The document text.
"""
async def resolve_document(source: str) -> str:

    if is_url(source.strip()):
        return await fetch_document(source.strip())
    return source
