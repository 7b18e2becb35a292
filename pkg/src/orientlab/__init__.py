"""Dynamic low-outdegree orientations of uniformly sparse graphs."""

from .core import (Metrics, OpKind, OrientedGraph, SequenceError, InvariantError,
                   UpdateOp, UpdateSequence, apply_raw)

__version__ = "0.1.0"

__all__ = ["Metrics", "OpKind", "OrientedGraph", "SequenceError", "InvariantError",
           "UpdateOp", "UpdateSequence", "apply_raw"]
