"""Finite-scale workbench for twisted C*-dynamical systems, their Fourier-Stieltjes
coefficient maps, Morita transfer and amenability witnesses."""
from .algebra import AlgElement, CStarAlgebra, FiniteGroup, Tolerance
from .errors import CheckFailed, InputError, WorkbenchError
from .fourier import CoeffMap, pd_check, pd_check_sampled, sup_norm
from .modules import EquivariantRep, HilbertBimodule
from .system import Isomorphism, TwistedSystem, validate_system

__all__ = ["AlgElement", "CStarAlgebra", "FiniteGroup", "Tolerance", "CheckFailed", "InputError",
           "WorkbenchError", "CoeffMap", "pd_check", "pd_check_sampled", "sup_norm", "EquivariantRep",
           "HilbertBimodule", "Isomorphism", "TwistedSystem", "validate_system"]
