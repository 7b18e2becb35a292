"""Synchronous message-passing simulator (local wakeup, CONGEST-size messages)."""

from .engine import RoundEngine, RoundReport, SimMessage, SimulationError, Tag
from .node import OutRec, SimNode
from .system import (MEM_C, DistCascade, DistSystem, dist_antireset, dist_matching_update,
                     repr_delete_edge, repr_flip, repr_insert_edge)

__all__ = ["RoundEngine", "RoundReport", "SimMessage", "SimulationError", "Tag", "OutRec",
           "SimNode", "MEM_C", "DistCascade", "DistSystem", "dist_antireset",
           "dist_matching_update", "repr_delete_edge", "repr_flip", "repr_insert_edge"]
