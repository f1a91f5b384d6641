"""Expose prediction models as oracles over a newline-delimited JSON protocol."""

from .adapters import ConstantAdapter, ModelAdapter, PlantedAdapter
from .protocol import PROTOCOL_VERSION, handle_request, serve

__version__ = "0.1.0"

__all__ = [
    "ConstantAdapter",
    "ModelAdapter",
    "PlantedAdapter",
    "PROTOCOL_VERSION",
    "handle_request",
    "serve",
]
