"""Quantum reference frame changes: frame states, twirls, relational measurement and homodyne tables."""

__version__ = "0.1.0"

from .groups import SU2, U1, HaarGrid, compose, haar_grid, identity, inverse, random_element  # noqa: E402
from .hilbert import PhysicalityError, ProductSpace, Space, fidelity, trace_distance  # noqa: E402
from .frames import FAMILIES, FrameError, FrameFamily  # noqa: E402
from .channels import (  # noqa: E402
    InsufficientGridError, decoherence_F, encode, g_twirl, g_twirl_exact, recover, recover_encode_kernel,
)
from .change_frame import ProcedureSpec, change_frame, instrument, povm_effect, predicted_final_state  # noqa: E402

__all__ = [
    "__version__", "U1", "SU2", "HaarGrid", "compose", "inverse", "identity", "haar_grid", "random_element",
    "Space", "ProductSpace", "PhysicalityError", "fidelity", "trace_distance",
    "FAMILIES", "FrameFamily", "FrameError",
    "g_twirl", "g_twirl_exact", "encode", "recover", "recover_encode_kernel", "decoherence_F",
    "InsufficientGridError", "ProcedureSpec", "change_frame", "instrument", "povm_effect",
    "predicted_final_state",
]
