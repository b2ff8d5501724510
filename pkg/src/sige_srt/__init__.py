"""Design calculations for donor spin-resonance transistors in Si-Ge heterostructures."""

__version__ = "0.1.0"

from .donor import ConvergenceError, DonorParams, DisplacedDonor  # noqa: E402,F401
from .materials import AlloySpec, MaterialParams  # noqa: E402,F401
