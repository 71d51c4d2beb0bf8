"""Releveling harness: corpus handling, prompting, LLM transport, and scoring."""

__version__ = "0.1.0"
