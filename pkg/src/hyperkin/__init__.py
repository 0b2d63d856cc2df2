#  Author(s):  hyperkin contributors
#  Created on: 2026-10
#
# Copyright (c) 2026 hyperkin contributors
# Released under MIT License

__all__ = ["Tensor", "GradTape", "PoincareBall", "ManifoldPoint", "TangentVector",
           "FrechetConfig", "frechet_mean", "weighted_midpoint", "part_weights",
           "HyperbolicProjection", "HyperbolicAttention", "ContrastiveHead", "AlphaSchedule",
           "TrainConfig", "load_config", "gen_data", "train", "ablate_curvature", "ablate_alpha", "ablate_noise",
           "export_embeddings", "check_grads", "HyperkinError"]

# errors
from .errors import HyperkinError

# differentiable tensors and geometry
from .tensor import Tensor, GradTape
from .manifold import PoincareBall, ManifoldPoint, TangentVector
from .frechet import FrechetConfig, frechet_mean, weighted_midpoint, part_weights
from .layers import HyperbolicProjection, HyperbolicAttention, ContrastiveHead, AlphaSchedule

# harness
from .config import TrainConfig, load_config
from .data import gen_data
from .train import train
from .ablation import ablate_alpha, ablate_curvature, ablate_noise
from .export import export_embeddings
from .gradcheck import check_grads
