"""Bridge from fitted ensemble objects to the diagnostics bundle format,
plus a predictor server speaking the engine's wire protocol."""

from .export import UnsupportedObject, export_bundle
from .serve import PredictorServer, serve_predictor

__version__ = "0.1.0"
