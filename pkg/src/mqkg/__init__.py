"""Trajectory Wigner quasidensities for a free scalar field with a smeared mass shell."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, MQKGError
from .lattice import FourMomentum, LatticeConfig, MomentumLattice, build_shell_lattice
from .states import ChiValue, FieldModes, chi, scan_negativity

__all__ = ["__version__", "ChiValue", "ConfigError", "DomainError", "FieldModes", "FourMomentum",
           "LatticeConfig", "MQKGError", "MomentumLattice", "build_shell_lattice", "chi",
           "scan_negativity"]
