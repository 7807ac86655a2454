"""Type definitions, aliases, and protocols."""

from typing import Protocol, TypeVar, runtime_checkable

import numpy as np
import numpy.typing as npt

# Type aliases for clarity
FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
RandomStream = np.random.Generator

T_co = TypeVar("T_co", covariant=True)


@runtime_checkable
class Density(Protocol):
    """Protocol for probability density handles used by quadrature."""

    def __call__(self, x: float) -> float:
        """Evaluate the density.

        Args:
            x: Point of evaluation

        Returns:
            Density value at x
        """
        ...


class ChunkTask(Protocol[T_co]):
    """Protocol for one Monte Carlo chunk of work."""

    def __call__(self, size: int, rng: RandomStream) -> T_co:
        """Run the chunk.

        Args:
            size: Number of Monte Carlo runs in this chunk
            rng: Substream dedicated to this chunk

        Returns:
            Partial result for the chunk
        """
        ...
