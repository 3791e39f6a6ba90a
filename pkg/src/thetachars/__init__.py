"""Conformal characters of rational W-algebra models as quaternionic theta series."""

from .arith import QExp, VectorQExp, eta_power
from .models import MODELS, ModelNotSupported, get_model
from .pipeline import characters, solve

__all__ = ["MODELS", "ModelNotSupported", "QExp", "VectorQExp", "characters", "eta_power", "get_model", "solve"]
__version__ = "0.1.0"
