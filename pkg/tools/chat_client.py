"""
Chat Completion Client

Backend abstraction for the prompt chain and an aiohttp client for
chat-completion compatible HTTP endpoints, with retry and exponential backoff.
"""
import asyncio
import hashlib
import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, Optional

import aiohttp

from core.config_manager import BackendConfig
from core.exceptions import BackendError, ConfigurationError


RETRYABLE_STATUSES = {408, 429, 500, 502, 503, 504}


class FinishReason(Enum):
    COMPLETE = "complete"
    LENGTH_CAPPED = "length_capped"
    BACKEND_ERROR = "backend_error"


_WIRE_FINISH_REASONS = {
    "stop": FinishReason.COMPLETE,
    "length": FinishReason.LENGTH_CAPPED,
    "max_tokens": FinishReason.LENGTH_CAPPED,
}


@dataclass(frozen=True)
class CompletionRequest:
    system: str
    prompt: str
    temperature: float
    max_tokens: int

    def to_wire(self, model: str) -> Dict[str, Any]:
        """JSON body of a chat-completion POST"""
        return {
            "model": model,
            "messages": [
                {"role": "system", "content": self.system},
                {"role": "user", "content": self.prompt},
            ],
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    finish_reason: FinishReason = FinishReason.COMPLETE

    def __post_init__(self):
        if self.finish_reason is FinishReason.COMPLETE and not self.text.strip():
            raise ValueError("A complete response must carry text")

    def to_dict(self) -> Dict[str, str]:
        return {"text": self.text, "finish_reason": self.finish_reason.value}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CompletionResponse":
        return cls(text=data["text"], finish_reason=FinishReason(data["finish_reason"]))


def request_key(body: Dict[str, Any]) -> str:
    """Stable SHA-256 of a wire request body, used to name replay fixtures"""
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ChatBackend(ABC):
    """A chat-completion backend; one instance serves one chain at a time"""

    name = "backend"

    def __init__(self, model: str):
        self.model = model
        self.call_count = 0
        self.logger = logging.getLogger(self.__class__.__name__)

    async def __aenter__(self):
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        await self.close()

    @abstractmethod
    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        """Send one request; raises BackendError on failure"""

    async def close(self) -> None:
        """Release resources"""

    def timestamp(self) -> str:
        """Timestamp recorded in the chain log for the latest exchange"""
        return datetime.now(timezone.utc).isoformat(timespec="seconds")


class HttpChatBackend(ChatBackend):
    """
    Chat-completion HTTP client

    Features:
    - Bearer-token authentication from an environment variable
    - Retry on 408/429/5xx and connection errors with exponential backoff
    - Hard cap on the number of completions per backend instance
    """

    name = "http"

    def __init__(self, endpoint: str, model: str, api_key: Optional[str],
                 timeout: float = 120.0, max_retries: int = 3, retry_delay: float = 1.0,
                 max_calls: int = 64):
        super().__init__(model)
        if not api_key:
            raise ConfigurationError("No API key available for the chat-completion backend")
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout
        self.max_retries = max_retries
        self.retry_delay = retry_delay
        self.max_calls = max_calls
        self.session: Optional[aiohttp.ClientSession] = None

    @classmethod
    def from_config(cls, config: BackendConfig) -> "HttpChatBackend":
        api_key = config.api_key()
        if not api_key:
            raise ConfigurationError(
                f"Environment variable {config.api_key_env} is not set; "
                "it must hold the backend API key (or select --backend mock)"
            )
        return cls(
            endpoint=config.endpoint,
            model=config.model,
            api_key=api_key,
            timeout=config.timeout,
            max_retries=config.max_retries,
            retry_delay=config.retry_delay,
            max_calls=config.max_calls,
        )

    async def _ensure_session(self):
        """Ensure HTTP session is available"""
        if self.session is None or self.session.closed:
            timeout = aiohttp.ClientTimeout(total=self.timeout)
            self.session = aiohttp.ClientSession(timeout=timeout)

    async def close(self):
        """Close HTTP session"""
        if self.session and not self.session.closed:
            await self.session.close()
            self.session = None

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        if self.call_count >= self.max_calls:
            raise BackendError(f"Backend call cap of {self.max_calls} reached")
        self.call_count += 1

        await self._ensure_session()
        body = request.to_wire(self.model)
        headers = {
            "Authorization": f"Bearer {self.api_key}",
            "Content-Type": "application/json",
        }

        last_error: Optional[BackendError] = None
        for attempt in range(self.max_retries + 1):
            try:
                async with self.session.post(self.endpoint, json=body, headers=headers) as response:
                    if response.status == 200:
                        data = await response.json(content_type=None)
                        return self._parse_response(data)

                    error_text = await response.text()
                    last_error = BackendError(
                        f"Backend returned HTTP {response.status}: {error_text[:200]}"
                    )
                    if response.status not in RETRYABLE_STATUSES:
                        raise last_error

            except (aiohttp.ClientError, asyncio.TimeoutError) as e:
                last_error = BackendError(f"Backend request failed: {str(e) or type(e).__name__}")
            except json.JSONDecodeError as e:
                raise BackendError(f"Backend returned malformed JSON: {e.msg}")

            if attempt < self.max_retries:
                delay = self.retry_delay * (2 ** attempt)
                self.logger.warning(
                    f"Attempt {attempt + 1}/{self.max_retries + 1} failed ({last_error}); "
                    f"retrying in {delay:.1f}s"
                )
                await asyncio.sleep(delay)

        self.logger.error(f"Backend failed after {self.max_retries + 1} attempt(s): {last_error}")
        raise last_error

    @staticmethod
    def _parse_response(data: Any) -> CompletionResponse:
        try:
            choice = data["choices"][0]
            text = choice["message"]["content"] or ""
            wire_reason = choice.get("finish_reason") or "stop"
        except (KeyError, IndexError, TypeError):
            raise BackendError("Backend reply has no choices[0].message.content")

        finish_reason = _WIRE_FINISH_REASONS.get(wire_reason, FinishReason.BACKEND_ERROR)
        if finish_reason is FinishReason.BACKEND_ERROR:
            raise BackendError(f"Backend stopped with finish_reason {wire_reason!r}")
        if finish_reason is FinishReason.COMPLETE and not text.strip():
            raise BackendError("Backend returned an empty completion")
        return CompletionResponse(text=text, finish_reason=finish_reason)
