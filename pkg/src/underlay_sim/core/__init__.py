"""Core components: settings, models and the experiment harness."""

__all__: list[str] = []
