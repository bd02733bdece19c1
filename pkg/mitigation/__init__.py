"""
Mitigation Package

Topology transforms that suppress noise without changing the noise-free
network function: ghost neurons, average pooling and their combination.
"""

from .ghost import (
    DirectGhostLayer,
    GhostMode,
    adaptive_ghost_weights,
    attach_ghost,
    attach_ghost_adaptive,
    attach_ghost_direct,
    attach_ghost_weighted,
    ghost_variance,
    ghost_variance_approx,
    optimal_ghost_weight,
)
from .plan import (
    NAMED_PLANS,
    GhostConfig,
    MitigationPlan,
    PoolConfig,
    apply_plan,
    parse_ghost_flag,
    parse_pool_flag,
)
from .pooling import build_pooled_network, pooled_variance

__all__ = [
    'NAMED_PLANS',
    'DirectGhostLayer',
    'GhostConfig',
    'GhostMode',
    'MitigationPlan',
    'PoolConfig',
    'adaptive_ghost_weights',
    'apply_plan',
    'attach_ghost',
    'attach_ghost_adaptive',
    'attach_ghost_direct',
    'attach_ghost_weighted',
    'build_pooled_network',
    'ghost_variance',
    'ghost_variance_approx',
    'optimal_ghost_weight',
    'parse_ghost_flag',
    'parse_pool_flag',
    'pooled_variance',
]
