"""
Archive downloader for published knowledge files and scripts
"""
import asyncio
import hashlib
import logging
import zipfile
from pathlib import Path
from typing import List, Optional, Union
from urllib.parse import urlparse

import aiohttp

from core.exceptions import BackendError, ToolkitError


CHUNK_SIZE = 64 * 1024


class DownloadError(BackendError):
    """Network failure while fetching"""


class ChecksumMismatch(ToolkitError):
    """Downloaded bytes do not match the expected SHA-256"""


class Downloader:
    """
    Streaming HTTP downloader

    Features:
    - SHA-256 computed while streaming; mismatching files are deleted
    - Writes to a ``.part`` file and renames on success
    - Optional zip extraction that refuses paths escaping the destination
    """

    def __init__(self, timeout: float = 300.0):
        self.timeout = timeout
        self.logger = logging.getLogger(self.__class__.__name__)

    @staticmethod
    def target_path(url: str, dest: Union[str, Path]) -> Path:
        """``dest`` itself, or ``dest/<url file name>`` when ``dest`` is a directory"""
        dest = Path(dest)
        if dest.is_dir() or str(dest).endswith(("/", "\\")):
            name = Path(urlparse(url).path).name or "download"
            return dest / name
        return dest

    async def fetch(self, url: str, dest: Union[str, Path], sha256: Optional[str] = None) -> Path:
        target = self.target_path(url, dest)
        target.parent.mkdir(parents=True, exist_ok=True)
        partial = target.with_name(target.name + ".part")
        digest = hashlib.sha256()

        self.logger.info(f"Fetching {url} -> {target}")
        try:
            timeout = aiohttp.ClientTimeout(total=self.timeout)
            async with aiohttp.ClientSession(timeout=timeout) as session:
                async with session.get(url) as response:
                    if response.status != 200:
                        raise DownloadError(f"GET {url} returned HTTP {response.status}")
                    with open(partial, "wb") as f:
                        async for chunk in response.content.iter_chunked(CHUNK_SIZE):
                            digest.update(chunk)
                            f.write(chunk)
        except (aiohttp.ClientError, asyncio.TimeoutError) as e:
            partial.unlink(missing_ok=True)
            raise DownloadError(f"GET {url} failed: {str(e) or type(e).__name__}")
        except DownloadError:
            partial.unlink(missing_ok=True)
            raise

        actual = digest.hexdigest()
        if sha256 and actual.lower() != sha256.strip().lower():
            partial.unlink(missing_ok=True)
            raise ChecksumMismatch(
                f"SHA-256 of {url} is {actual}, expected {sha256.strip().lower()}; file discarded"
            )

        partial.replace(target)
        self.logger.info(f"Saved {target} (sha256 {actual})")
        return target

    def extract(self, archive: Union[str, Path], dest: Union[str, Path]) -> List[Path]:
        archive, dest = Path(archive), Path(dest)
        root = dest.resolve()
        extracted = []
        try:
            with zipfile.ZipFile(archive) as zf:
                for member in zf.infolist():
                    target = (dest / member.filename).resolve()
                    if root != target and root not in target.parents:
                        raise ToolkitError(f"Archive member escapes destination: {member.filename}")
                    if member.is_dir():
                        continue
                    zf.extract(member, dest)
                    extracted.append(target)
        except zipfile.BadZipFile as e:
            raise ToolkitError(f"Not a zip archive: {archive} ({e})")
        self.logger.info(f"Extracted {len(extracted)} file(s) into {dest}")
        return extracted
