"""Massive 3D-MIMO channel reconstruction and zero-forcing link simulator.

Pipeline: generate ray-sum channels on a planar array (`channel`), reduce
each user's per-unit channels to an effective matrix with orthonormal rows
(`reconstruct`), zero-force and score the multi-user link (`precode`),
and account the reconstruction cost in FLOPs (`flops`). `experiment` and
`cli` tie the pieces into seeded, reproducible runs.
"""

from .channel import ChannelTensor, RayParameterSet, generate_drop
from .config import ExperimentConfig, SamplerConfig, load_config, parse_config
from .flops import CostBreakdown, CostConfig
from .geometry import ArrayGeometry
from .linalg import EigPair, hermitian_eig, kron_vec, principal_angle
from .precode import LinkScore, PrecodeResult, link_score, normalize, zf_precoder
from .reconstruct import (
    DegenerateRankError,
    EffectiveChannel,
    PUView,
    direct_svd,
    method1,
    method2,
    method3,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "ChannelTensor",
    "CostBreakdown",
    "CostConfig",
    "DegenerateRankError",
    "EffectiveChannel",
    "EigPair",
    "ExperimentConfig",
    "LinkScore",
    "PUView",
    "PrecodeResult",
    "RayParameterSet",
    "SamplerConfig",
    "direct_svd",
    "generate_drop",
    "hermitian_eig",
    "kron_vec",
    "link_score",
    "load_config",
    "method1",
    "method2",
    "method3",
    "normalize",
    "parse_config",
    "principal_angle",
    "zf_precoder",
    "__version__",
]
