"""Exception hierarchy shared by all galpha modules."""

import numpy as np


class GalphaError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(GalphaError, ValueError):
    """Invalid scalar parameter (degree, element count, rho_inf, tau, ...)."""


class DomainError(ParameterError):
    """Evaluation point outside the parametric domain [0, 1]."""


class DimensionError(GalphaError, ValueError):
    """Array shape does not match the operator it is applied to."""


class FactorizationError(GalphaError, np.linalg.LinAlgError):
    """A matrix expected to be SPD failed to factorize."""
