"""
Mitigation Plans

A plan combines average pooling and ghost neurons. Pooling is applied
first; one ghost is then attached to each selected layer, alongside the
pool replicas. The ghost receives no input, is not pooled itself and is
subtracted from the pool average through the outgoing weights.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional

import numpy as np

from core.exceptions import MitigationError
from core.topology import NetworkTopology
from mitigation.ghost import GhostMode, attach_ghost
from mitigation.pooling import build_pooled_network
from noise.noise_model import NoiseSpec

logger = logging.getLogger(__name__)

PLAN_NONE = 'none'
PLAN_COMBINED = 'combined'
PLAN_COMBINED_FIXED = 'combined-fixed'
NAMED_PLANS = (PLAN_NONE, PLAN_COMBINED, PLAN_COMBINED_FIXED)


def _layer_set(layers: Optional[Iterable[int]]) -> Optional[FrozenSet[int]]:
    return None if layers is None else frozenset(int(n) for n in layers)


def _resolve(layers: Optional[FrozenSet[int]], depth: int) -> List[int]:
    """Selected layer indices; None selects every layer."""
    selected = sorted(range(depth) if layers is None else layers)
    for n in selected:
        if not 0 <= n < depth:
            raise MitigationError(f"layer {n} out of range for a {depth}-layer network")
    return selected


@dataclass(frozen=True)
class GhostConfig:
    """Ghost mode, fixed weight for WEIGHTED mode and target layers (None = all)."""
    mode: GhostMode = GhostMode.ADAPTIVE
    wg: Optional[float] = None
    layers: Optional[FrozenSet[int]] = None

    def __post_init__(self):
        object.__setattr__(self, 'layers', _layer_set(self.layers))

    def validate(self) -> List[str]:
        errors = []
        if self.mode is GhostMode.WEIGHTED:
            if self.wg is None or not np.isfinite(self.wg):
                errors.append("weighted ghost mode needs one finite wg")
        elif self.wg is not None:
            errors.append(f"wg is only used by weighted mode, not {self.mode.value}")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'mode': self.mode.value}
        if self.wg is not None:
            data['wg'] = self.wg
        if self.layers is not None:
            data['layers'] = sorted(self.layers)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'GhostConfig':
        try:
            mode = GhostMode(data.get('mode', 'adaptive'))
        except ValueError as exc:
            raise MitigationError(f"unknown ghost mode {data.get('mode')!r}") from exc
        wg = data.get('wg')
        return cls(mode, None if wg is None else float(wg), _layer_set(data.get('layers')))


@dataclass(frozen=True)
class PoolConfig:
    """Pool size m and target layers (None = all)."""
    m: int = 1
    layers: Optional[FrozenSet[int]] = None

    def __post_init__(self):
        object.__setattr__(self, 'layers', _layer_set(self.layers))

    def validate(self) -> List[str]:
        if int(self.m) != self.m or self.m < 1:
            return [f"pool size m must be a positive integer, got {self.m}"]
        return []

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'m': self.m}
        if self.layers is not None:
            data['layers'] = sorted(self.layers)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PoolConfig':
        return cls(int(data.get('m', 1)), _layer_set(data.get('layers')))


@dataclass(frozen=True)
class MitigationPlan:
    """Optional pooling followed by optional ghost neurons."""
    ghost: Optional[GhostConfig] = None
    pool: Optional[PoolConfig] = None

    @property
    def is_empty(self) -> bool:
        return self.ghost is None and (self.pool is None or self.pool.m == 1)

    def validate(self) -> List[str]:
        errors = []
        if self.ghost is not None:
            errors.extend(self.ghost.validate())
        if self.pool is not None:
            errors.extend(self.pool.validate())
        return errors

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}
        if self.ghost is not None:
            data['ghost'] = self.ghost.to_dict()
        if self.pool is not None:
            data['pool'] = self.pool.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> 'MitigationPlan':
        data = data or {}
        ghost = data.get('ghost')
        pool = data.get('pool')
        return cls(
            ghost=GhostConfig.from_dict(ghost) if ghost else None,
            pool=PoolConfig.from_dict(pool) if pool else None,
        )

    @classmethod
    def named(cls, name: str, layers: Optional[Iterable[int]] = None, m: int = 4) -> 'MitigationPlan':
        """
        Preset plans.

        'none' is empty; 'combined' pools with m and attaches adaptive
        ghosts; 'combined-fixed' does the same with W_g = -1. Pooling and
        ghosts target ``layers`` (all layers when None).
        """
        if name == PLAN_NONE:
            return cls()
        if name == PLAN_COMBINED:
            return cls(GhostConfig(GhostMode.ADAPTIVE, layers=layers), PoolConfig(m, layers))
        if name == PLAN_COMBINED_FIXED:
            return cls(GhostConfig(GhostMode.WEIGHTED, -1.0, layers), PoolConfig(m, layers))
        raise MitigationError(f"unknown plan {name!r}, expected one of {', '.join(NAMED_PLANS)}")


def parse_ghost_flag(value: str, layers: Optional[Iterable[int]] = None) -> Optional[GhostConfig]:
    """Parse ``direct``, ``adaptive``, ``wg=<v>`` or ``none``."""
    value = value.strip().lower()
    if value == 'none':
        return None
    if value.startswith('wg='):
        try:
            wg = float(value[3:])
        except ValueError as exc:
            raise MitigationError(f"invalid ghost weight in {value!r}") from exc
        return GhostConfig(GhostMode.WEIGHTED, wg, layers)
    try:
        mode = GhostMode(value)
    except ValueError as exc:
        raise MitigationError(f"unknown ghost flag {value!r}") from exc
    if mode is GhostMode.WEIGHTED:
        raise MitigationError("weighted ghost needs a weight: use wg=<value>")
    return GhostConfig(mode, None, layers)


def parse_pool_flag(value: str, layers: Optional[Iterable[int]] = None) -> PoolConfig:
    """Parse ``m=<k>`` (a bare integer is accepted too)."""
    text = value.strip().lower()
    if text.startswith('m='):
        text = text[2:]
    try:
        m = int(text)
    except ValueError as exc:
        raise MitigationError(f"invalid pool flag {value!r}, expected m=<k>") from exc
    if m < 1:
        raise MitigationError(f"pool size must be positive, got {m}")
    return PoolConfig(m, layers)


def apply_plan(net: NetworkTopology, plan: Optional[MitigationPlan],
               spec: Optional[NoiseSpec] = None) -> NetworkTopology:
    """
    Apply pooling, then ghosts, returning a new network.

    Args:
        net: network to transform (left unchanged)
        plan: mitigation plan; None or an empty plan returns ``net``
        spec: optional noise spec, used to warn about ghosts on noiseless layers

    Returns:
        Transformed NetworkTopology with the same noise-free function.
    """
    if plan is None or plan.is_empty:
        return net
    errors = plan.validate()
    if errors:
        raise MitigationError("Invalid mitigation plan: " + "; ".join(errors))

    if plan.pool is not None and plan.pool.m > 1:
        pooled = _resolve(plan.pool.layers, net.depth)
        net = build_pooled_network(net, plan.pool.m, pooled)

    if plan.ghost is not None:
        for layer in _resolve(plan.ghost.layers, net.depth):
            if net.layers[layer].ghosts:
                raise MitigationError(
                    f"layer {layer} already carries a ghost neuron; each layer takes at most one")
            net = attach_ghost(net, layer, plan.ghost.mode, plan.ghost.wg, spec)

    logger.info(f"Applied mitigation plan {plan.to_dict()}: widths {net.widths}")
    return net
