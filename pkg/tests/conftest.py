"""
Shared fixtures for the interview script toolkit tests
"""
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT))

from core.transcript import Script, Speaker, parse_script  # noqa: E402
from tools.mock_backends import MockChatBackend  # noqa: E402


KNOWLEDGE_DIR = REPO_ROOT / "knowledge"

DEFECT_SCRIPT = """\
# id: defects
Interviewer: Hello, thanks for meeting with me about the food delivery app.
Stakeholder: Sure, glad to help.
Interviewer: How do customers order food today?
Stakeholder: Mostly by phone, and orders often get mixed up.
Interviewer: In the next section we will talk about the new app. What should it do first?
Stakeholder: Show the menu and let people pay online. Can you also add tracking?
Interviewer: Yes, we can look at tracking. What else matters to you?
Stakeholder: Fast delivery and correct orders.
Interviewer: To summarize, you want online ordering, payment and tracking. Does that sound correct?
Stakeholder: Yes, that is right.
"""

CLEAN_SCRIPT = """\
# id: clean
Interviewer: Good morning, thank you for your time today.
Stakeholder: Good morning, happy to help.
Interviewer: Who else uses the scheduling process besides you?
Stakeholder: My assistant and the team leads. Will they get access too?
Interviewer: Yes, they will. How do you schedule meetings now?
Stakeholder: By email, which takes many messages back and forth.
Interviewer: Let me go over what I heard: you need shared calendars and quick invites. Is that correct?
Stakeholder: Yes, exactly.
"""


@pytest.fixture
def knowledge_dir() -> Path:
    return KNOWLEDGE_DIR


@pytest.fixture
def defect_script() -> Script:
    return parse_script(DEFECT_SCRIPT)


@pytest.fixture
def clean_script() -> Script:
    return parse_script(CLEAN_SCRIPT)


@pytest.fixture
def small_script() -> Script:
    return Script.from_utterances(
        "small",
        [
            (Speaker.INTERVIEWER, "Hello, how do you book rooms today?"),
            (Speaker.STAKEHOLDER, "We use a paper calendar at the front desk."),
            (Speaker.INTERVIEWER, "What goes wrong with it?"),
            (Speaker.STAKEHOLDER, "Double bookings. Students cannot see free rooms."),
        ],
        title="Room booking",
        domain_label="library",
    )


@pytest.fixture
def mock_backend() -> MockChatBackend:
    return MockChatBackend()
