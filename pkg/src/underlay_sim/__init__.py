"""Underlay cognitive radio capacity simulator.

Interference-constrained power allocation over Rician/Rayleigh channels,
random aerial beamforming with ESPAR basis patterns, and multiuser
scheduling on the parallel access channel.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
