"""
Base action class for the generation pipeline
"""
import logging
import time
from abc import ABC, abstractmethod
from typing import Callable, Generic, Protocol, TypeVar


T = TypeVar("T")


class ReplySource(Protocol):
    """Sends a prompt pair and parses the reply, repairing unusable replies"""

    async def complete_and_parse(self, kind: str, step: str, system: str, prompt: str,
                                 parse: Callable[[str], T]) -> T:
        ...


class BaseAction(ABC, Generic[T]):
    """
    One step of a prompt chain

    A step builds its system and user prompts, exchanges them through a
    ReplySource and parses the reply. ``step`` labels its records in the chain
    log ("outline", "section-3"); repair exchanges get ``/repair-N`` appended.
    ``kind`` picks the repair template.
    """

    kind: str = ""

    def __init__(self, source: ReplySource, step: str):
        self.source = source
        self.step = step
        self.logger = logging.getLogger(self.__class__.__name__)

    async def run(self) -> T:
        self.logger.info(f"Executing step: {self.step}")
        start_time = time.monotonic()
        try:
            result = await self.source.complete_and_parse(
                self.kind, self.step, self.system_prompt(), self.user_prompt(), self.parse
            )
        except Exception as e:
            self.logger.error(f"Step {self.step} failed: {e}")
            raise
        self.logger.info(f"Step {self.step} completed in {time.monotonic() - start_time:.2f}s: "
                         f"{self.describe(result)}")
        return result

    @abstractmethod
    def system_prompt(self) -> str:
        """System message: instructions plus retrieved knowledge"""

    @abstractmethod
    def user_prompt(self) -> str:
        """Task prompt of the first attempt"""

    @abstractmethod
    def parse(self, text: str) -> T:
        """Turn a reply into the step result, raising ChainError when unusable"""

    def describe(self, result: T) -> str:
        return type(result).__name__
