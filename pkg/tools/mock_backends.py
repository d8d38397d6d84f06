"""
Offline chat backends

MockChatBackend answers outline and section prompts with deterministic canned
dialogue, so the whole chain runs without network access. ReplayBackend serves
recorded exchanges keyed by the SHA-256 of the request body; RecordingBackend
wraps a live backend and writes those fixtures.
"""
import json
import re
from collections import deque
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Deque, List, Optional, Sequence, Union

from core.exceptions import BackendError
from utils.schemas import SchemaViolation, validate_document

from .chat_client import ChatBackend, CompletionRequest, CompletionResponse, request_key


MOCK_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

_TASK_RE = re.compile(r"^Task: (outline|section)\s*$", re.MULTILINE)
_SCENARIO_RE = re.compile(r"^Scenario: (.+)$", re.MULTILINE)
_SECTION_RE = re.compile(r"^Section (\d+) of (\d+): (.+)$", re.MULTILINE)
_TARGET_RE = re.compile(r"^Target turns: (\d+)\s*$", re.MULTILINE)

DEFAULT_OUTLINE = (
    ("Greeting", "welcome the stakeholder and build rapport", 4),
    ("Opening", "agree on the purpose and scope of the interview", 4),
    ("As-Is", "understand how the work is done today", 6),
    ("To-Be", "explore what the new system should do", 6),
    ("Closing", "summarize the requirements and ask for confirmation", 4),
)

_INTERVIEWER_LINES = (
    "Could you walk me through how {topic} works for you today?",
    "What is the most frustrating part of that for you?",
    "How often does that happen in a typical week?",
    "Who else is involved when that happens, and should we talk to them as well?",
    "What would a good outcome look like for you?",
    "Is there anything about {topic} we have not talked about yet?",
)
_STAKEHOLDER_LINES = (
    "Right now most of it happens over email and a shared spreadsheet, so things get lost.",
    "Honestly, chasing people for answers takes up a lot of my time.",
    "Pretty much every day, and more around the end of the month.",
    "My manager signs off on it, and the support team handles the complaints.",
    "I would like to see everything in one place and get a reminder when something is due.",
    "I think we covered the main points, but will I be able to see the draft later?",
)


def _reply_for_outline() -> str:
    return "\n".join(
        f"{n}. {title} - {goal} (turns: {turns})"
        for n, (title, goal, turns) in enumerate(DEFAULT_OUTLINE, start=1)
    )


def _reply_for_section(scenario: str, number: int, total: int, title: str,
                       target_turns: int) -> str:
    topic = scenario or "the new system"
    lines: List[str] = []
    for i in range(max(target_turns, 2)):
        pick = (number + i // 2) % len(_INTERVIEWER_LINES)
        if i % 2 == 0:
            text = _INTERVIEWER_LINES[pick].format(topic=topic)
            if number == 1 and i == 0:
                text = f"Hello, thank you for taking the time to talk about {topic}. {text}"
            lines.append(f"Interviewer: {text}")
        else:
            lines.append(f"Stakeholder: {_STAKEHOLDER_LINES[pick]}")

    if number == total:
        lines[-2 if len(lines) % 2 == 0 else -1] = (
            f"Interviewer: To summarize, you need one place to manage {topic} "
            "with reminders and a clear sign-off step. Does that sound correct?"
        )
        if len(lines) % 2 == 0:
            lines[-1] = "Stakeholder: Yes, that sounds right. Thank you."
    return "\n".join(lines)


class MockChatBackend(ChatBackend):
    """
    Deterministic offline backend

    Features:
    - Queued replies (text, CompletionResponse or exception) are served first
    - Afterwards replies are synthesized from the prompt: outline, section or repair
    - Every request is kept in ``requests`` for inspection
    - Logical clock: one second per call from 2024-01-01T00:00:00+00:00
    """

    name = "mock"

    def __init__(self, replies: Optional[Sequence[Union[str, CompletionResponse, Exception]]] = None,
                 model: str = "mock"):
        super().__init__(model)
        self.replies: Deque[Union[str, CompletionResponse, Exception]] = deque(replies or ())
        self.requests: List[CompletionRequest] = []

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        self.call_count += 1
        self.requests.append(request)

        if self.replies:
            reply = self.replies.popleft()
            if isinstance(reply, Exception):
                raise reply
            if isinstance(reply, CompletionResponse):
                return reply
            return CompletionResponse(text=reply)

        return CompletionResponse(text=self.synthesize(request.prompt))

    def synthesize(self, prompt: str) -> str:
        task = _TASK_RE.search(prompt)
        if task is None:
            raise BackendError("Mock backend cannot tell which task the prompt asks for")
        if task.group(1) == "outline":
            return _reply_for_outline()

        scenario = _SCENARIO_RE.search(prompt)
        section = _SECTION_RE.search(prompt)
        target = _TARGET_RE.search(prompt)
        if section is None:
            raise BackendError("Mock backend found no section header in a section prompt")
        return _reply_for_section(
            scenario=scenario.group(1).strip() if scenario else "",
            number=int(section.group(1)),
            total=int(section.group(2)),
            title=section.group(3).strip(),
            target_turns=int(target.group(1)) if target else 6,
        )

    def timestamp(self) -> str:
        return (MOCK_EPOCH + timedelta(seconds=self.call_count)).isoformat()


def _fixture_path(fixtures_dir: Path, key: str) -> Path:
    return fixtures_dir / f"{key}.json"


class ReplayBackend(ChatBackend):
    """Serves recorded exchanges; an unrecorded request is a backend error"""

    name = "replay"

    def __init__(self, fixtures_dir: Union[str, Path], model: str):
        super().__init__(model)
        self.fixtures_dir = Path(fixtures_dir)
        self._last_timestamp: Optional[str] = None
        if not self.fixtures_dir.is_dir():
            raise BackendError(f"Replay fixtures directory not found: {self.fixtures_dir}")

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        self.call_count += 1
        key = request_key(request.to_wire(self.model))
        path = _fixture_path(self.fixtures_dir, key)
        if not path.exists():
            raise BackendError(f"No recorded exchange for request {key[:12]} in {self.fixtures_dir}")

        try:
            with open(path, "r", encoding="utf-8") as f:
                fixture = json.load(f)
            validate_document("replay_fixture", fixture)
        except (OSError, json.JSONDecodeError, SchemaViolation) as e:
            raise BackendError(f"Unusable replay fixture {path.name}: {e}")

        self._last_timestamp = fixture["timestamp"]
        self.logger.debug(f"Replayed {key[:12]}")
        return CompletionResponse.from_dict(fixture["response"])

    def timestamp(self) -> str:
        return self._last_timestamp or super().timestamp()


class RecordingBackend(ChatBackend):
    """Passes requests to ``inner`` and stores each exchange as a replay fixture"""

    name = "recording"

    def __init__(self, inner: ChatBackend, fixtures_dir: Union[str, Path]):
        super().__init__(inner.model)
        self.inner = inner
        self.fixtures_dir = Path(fixtures_dir)
        self.fixtures_dir.mkdir(parents=True, exist_ok=True)

    async def complete(self, request: CompletionRequest) -> CompletionResponse:
        self.call_count += 1
        body = request.to_wire(self.model)
        response = await self.inner.complete(request)

        key = request_key(body)
        fixture = {
            "key": key,
            "request": body,
            "response": response.to_dict(),
            "timestamp": self.inner.timestamp(),
        }
        validate_document("replay_fixture", fixture)
        with open(_fixture_path(self.fixtures_dir, key), "w", encoding="utf-8") as f:
            json.dump(fixture, f, indent=2, ensure_ascii=False)
        self.logger.debug(f"Recorded {key[:12]}")
        return response

    def timestamp(self) -> str:
        return self.inner.timestamp()

    async def close(self) -> None:
        await self.inner.close()
