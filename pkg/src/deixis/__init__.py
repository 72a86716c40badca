"""deixis: voice + pointing fused into validated robot action sequences.

The pipeline: word tokens and deictic rays stream into the fusion encoder,
which binds pronouns to scene objects at utterance time and emits typed
intentions; a planner (deterministic rules or a constrained language model)
expands them into primitive call sequences; a strict validator gates every
sequence before the simulated workcell executes it.
"""

__version__ = "0.1.0"

from .geometry.backend import BACKEND as GEOMETRY_BACKEND

__all__ = ["GEOMETRY_BACKEND", "__version__"]
