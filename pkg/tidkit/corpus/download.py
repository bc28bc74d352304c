"""Fetch raw dataset files over HTTP."""

from __future__ import annotations

import logging
from pathlib import Path
from urllib.parse import urlparse

import requests

from tidkit.errors import IngestionError

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1 << 20


def is_remote(location: str) -> bool:
    return urlparse(location).scheme in ("http", "https")


def download_raw(url: str, dest_dir: Path | str, timeout: float = 60.0) -> Path:
    """Stream ``url`` into ``dest_dir``; an existing file of the same name is reused."""
    dest_dir = Path(dest_dir)
    dest_dir.mkdir(parents=True, exist_ok=True)
    name = Path(urlparse(url).path).name or "download"
    target = dest_dir / name
    if target.exists():
        logger.info("Using cached %s", target)
        return target

    partial = target.with_suffix(target.suffix + ".part")
    try:
        with requests.get(url, stream=True, timeout=timeout) as response:
            response.raise_for_status()
            with open(partial, "wb") as f:
                for chunk in response.iter_content(chunk_size=CHUNK_SIZE):
                    f.write(chunk)
    except requests.RequestException as exc:
        partial.unlink(missing_ok=True)
        raise IngestionError(f"Download failed for {url}: {exc}") from exc
    partial.rename(target)
    logger.info("Downloaded %s -> %s", url, target)
    return target


def resolve_location(location: str, dest_dir: Path | str) -> Path:
    """Local path as-is; http(s) URLs are downloaded first."""
    if is_remote(location):
        return download_raw(location, dest_dir)
    return Path(location)
