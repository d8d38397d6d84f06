"""
Agents package - LLM-backed generators
"""
