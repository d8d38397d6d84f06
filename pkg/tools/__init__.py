"""
Tools package for chat-completion backends and downloads
"""
from .chat_client import ChatBackend, CompletionRequest, CompletionResponse, HttpChatBackend
from .mock_backends import MockChatBackend, RecordingBackend, ReplayBackend
from .downloader import Downloader

__all__ = [
    "ChatBackend",
    "CompletionRequest",
    "CompletionResponse",
    "HttpChatBackend",
    "MockChatBackend",
    "RecordingBackend",
    "ReplayBackend",
    "Downloader",
]
