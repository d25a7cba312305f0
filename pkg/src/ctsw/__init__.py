"""Context tree switching: universal binary sequence prediction and a
lossless byte compressor built on it."""

from .codec import ContainerHeader, FormatError, compress, decompress
from .model import ByteDecomposedModel, ContextTree, ModelConfig, Variant, make_model

__all__ = [
    "ByteDecomposedModel",
    "ContainerHeader",
    "ContextTree",
    "FormatError",
    "ModelConfig",
    "Variant",
    "compress",
    "decompress",
    "make_model",
]

__version__ = "0.1.0"
