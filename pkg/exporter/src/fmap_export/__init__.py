"""Export intermediate CNN activations as FMAP feature files."""

from .export import ExportRequest, WeightsUnavailableError, export_features, extract_activation, load_model
from .fmap import read_fmap, write_fmap
from .taps import TapPoint, list_layers, resolve_tap

__all__ = [
    "ExportRequest",
    "WeightsUnavailableError",
    "export_features",
    "extract_activation",
    "load_model",
    "read_fmap",
    "write_fmap",
    "TapPoint",
    "list_layers",
    "resolve_tap",
]

__version__ = "0.1.0"
