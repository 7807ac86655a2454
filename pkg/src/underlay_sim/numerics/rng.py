"""Counter-based random substreams.

Every Monte Carlo chunk draws from its own Philox stream keyed by
``(seed, stream_id)``, so chunk ``i`` is addressable without generating
chunks ``0..i-1`` and results never depend on scheduling order.
"""

import numpy as np

from ..exceptions import DomainError

_UINT64 = 2**64

# Stream families; chunk i of family f uses stream_id f * STREAM_STRIDE + i
STREAM_STRIDE = 2**32


def substream(seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for one ``(seed, stream_id)`` pair.

    Args:
        seed: 64-bit experiment seed
        stream_id: 64-bit stream identifier

    Returns:
        Philox-backed generator; identical inputs give identical sequences

    Raises:
        DomainError: If either value is outside [0, 2**64)
    """
    for name, value in (("seed", seed), ("stream_id", stream_id)):
        if not 0 <= value < _UINT64:
            raise DomainError(f"{name} must lie in [0, 2**64), got {value}")
    key = np.array([seed, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def family_base(family: int) -> int:
    """First stream id of a stream family."""
    if family < 0:
        raise DomainError(f"stream family must be >= 0, got {family}")
    return family * STREAM_STRIDE
