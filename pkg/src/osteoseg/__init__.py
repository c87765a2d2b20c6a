"""Unsupervised osteosarcoma segmentation and surgical safety margin estimation."""

from .image import BinaryMask, GrayImage, LabelMask, StructuringElement
from .errors import (
    DegenerateInputError,
    OsteosegError,
    ParameterError,
    PipelineStepError,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "GrayImage",
    "LabelMask",
    "StructuringElement",
    "OsteosegError",
    "ParameterError",
    "DegenerateInputError",
    "PipelineStepError",
    "__version__",
]
