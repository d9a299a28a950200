"""Entangling-bus graph-state toolkit.

Submodules:
  chain       - free-fermion bus: mirror-inverting hopping profiles, propagators
  statevector - dense qubit simulator (states, gates, evolution, fidelity)
  equivalence - the all-pairs CZ circuit C(N)R and its equality to one inversion
  graphstate  - graph compilation onto bus cycles, co-simulation, stabilizers
  bosehubbard - two-species lattice-boson validation experiment with laser noise
  cli         - reproducible command-line harness
"""

from . import bosehubbard, chain, equivalence, graphstate, propagation, statevector
from .errors import (
    DimensionCapError,
    GraphFormatError,
    PropagationError,
    ScheduleError,
    UnsupportedProfileError,
)

__all__ = [
    "bosehubbard",
    "chain",
    "equivalence",
    "graphstate",
    "propagation",
    "statevector",
    "DimensionCapError",
    "GraphFormatError",
    "PropagationError",
    "ScheduleError",
    "UnsupportedProfileError",
]
