"""Utility modules."""

__all__: list[str] = []
