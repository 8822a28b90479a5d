"""Valence-driven reweighting of branch probabilities.

A branch with valence ``v`` (higher is more aversive) has its probability
multiplied by ``exp(-strength * v)`` relative to the other branches it
competes with. Under ``Variant.ORIGINAL`` every branch competes with every
other. Under ``Variant.MODIFIED`` only branches created by the same central
mechanism group compete, each group keeps its total probability, and
externally imposed branches are never touched.

Weights act on probabilities (squared moduli); phases pass through.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from reductionlab.errors import EmptyGroup
from reductionlab.quantum import CMInternal, Superposition

INFINITE = math.inf


class Variant(enum.Enum):
    ORIGINAL = "original"
    MODIFIED = "modified"


@dataclass(frozen=True)
class BiasModel:
    variant: Variant = Variant.MODIFIED
    strength: float = 0.0

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", Variant(self.variant.lower()))
        if math.isnan(self.strength) or self.strength < 0:
            raise ValueError(f"bias strength must be >= 0, got {self.strength}")

    @property
    def infinite(self) -> bool:
        return math.isinf(self.strength)

    @classmethod
    def none(cls) -> BiasModel:
        return cls(Variant.MODIFIED, 0.0)


def _reweight(probs: np.ndarray, valences: np.ndarray, strength: float) -> np.ndarray:
    """Reweight one competing group, preserving its total probability."""
    total = probs.sum()
    if math.isinf(strength):
        # Limit of exp(-b v) weighting as b grows: mass moves to the lowest
        # valence among branches that carry probability. Ties keep their
        # prior proportions, which is an equal split for equal priors.
        live = probs > 0
        vmin = valences[live].min()
        out = np.where(live & (valences == vmin), probs, 0.0)
    else:
        # Shift by the minimum valence so the largest weight is exactly 1.
        live = probs > 0
        shift = valences[live].min()
        out = probs * np.exp(-strength * (valences - shift))
    return out * (total / out.sum())


def apply_bias(s: Superposition, model: BiasModel) -> Superposition:
    if model.strength == 0.0:
        return s
    probs = s.probabilities()
    valences = np.array([b.valence for b in s.branches], dtype=float)

    if model.variant is Variant.ORIGINAL:
        if probs.sum() == 0.0:
            raise EmptyGroup("superposition carries zero probability")
        new = _reweight(probs, valences, model.strength)
        return s.with_probabilities(new / new.sum())

    groups: dict[CMInternal, list[int]] = defaultdict(list)
    for i, b in enumerate(s.branches):
        if isinstance(b.origin, CMInternal):
            groups[b.origin].append(i)
    if not groups:
        return s
    new = probs.copy()
    for origin, idx in groups.items():
        idx = np.array(idx)
        if probs[idx].sum() == 0.0:
            raise EmptyGroup(f"group {origin} has zero total probability")
        new[idx] = _reweight(probs[idx], valences[idx], model.strength)
    return s.with_probabilities(new / math.fsum(new))


def bias_shift(p_pain: float, model: BiasModel, external: bool = True) -> float:
    """Post-bias probability of the painful branch of a (pain=1, no pain=0) pair.

    ``external`` is the origin of the pair; it only matters for the modified
    variant, which leaves external pairs alone.
    """
    if not 0.0 <= p_pain <= 1.0:
        raise ValueError(f"p_pain must lie in [0, 1], got {p_pain}")
    if model.strength == 0.0 or (model.variant is Variant.MODIFIED and external):
        return p_pain
    if p_pain in (0.0, 1.0):
        return p_pain
    if model.infinite:
        return 0.0
    w = p_pain * math.exp(-model.strength)
    return w / (w + 1.0 - p_pain)


def strength_for_shift(p_pain: float, delta: float) -> float:
    """Bias strength that lowers the painful branch's probability by ``delta``.

    Inverse of :func:`bias_shift` for the original variant.
    """
    target = p_pain - delta
    if not 0.0 < p_pain < 1.0:
        raise ValueError(f"p_pain must lie strictly inside (0, 1), got {p_pain}")
    if not 0.0 <= delta <= p_pain:
        raise ValueError(f"delta must lie in [0, p_pain], got {delta}")
    if target == 0.0:
        return INFINITE
    return math.log(p_pain * (1.0 - target) / (target * (1.0 - p_pain)))
