"""
Utilities package for the interview script toolkit
"""
from .logger import setup_logger
from .schemas import SchemaViolation, validate_document

__all__ = ["setup_logger", "SchemaViolation", "validate_document"]
