"""Incoherent superpositions, Born-rule reduction and the two-observer projection algebra.

Amplitudes are kept in polar form. The model is incoherent, so a branch's
probability is exactly ``modulus**2`` and phases never enter a probability.
Correlated apparatus/observer states are represented by index triples,
which is all the projection algebra needs.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace

import numpy as np

from reductionlab.errors import AllZeroAmplitudes, IndexOutOfRange

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Amplitude:
    modulus: float
    phase: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.modulus) and self.modulus >= 0):
            raise ValueError(f"modulus must be finite and non-negative, got {self.modulus}")
        if not math.isfinite(self.phase):
            raise ValueError(f"phase must be finite, got {self.phase}")

    @property
    def probability(self) -> float:
        return self.modulus * self.modulus

    @classmethod
    def from_probability(cls, p: float, phase: float = 0.0) -> Amplitude:
        if p < 0:
            raise ValueError(f"probability must be non-negative, got {p}")
        return cls(math.sqrt(p), phase)


@dataclass(frozen=True)
class External:
    """Superposition imposed on the organism from outside (e.g. the scaler race)."""

    def __str__(self):
        return "external"


@dataclass(frozen=True)
class CMInternal:
    """Branch created by central mechanism ``cm_id`` within its superposition ``group_id``."""

    cm_id: int = 0
    group_id: int = 0

    def __str__(self):
        return f"cm:{self.cm_id}:{self.group_id}"


EXTERNAL = External()
Origin = External | CMInternal


class OriginMode(enum.Enum):
    """Origin tag for a simulator's two-branch superpositions."""

    EXTERNAL = "external"
    CM = "cm"

    def origin(self) -> Origin:
        return EXTERNAL if self is OriginMode.EXTERNAL else CMInternal(0, 0)


@dataclass(frozen=True)
class Branch:
    label: str
    amplitude: Amplitude
    valence: float = 0.0
    origin: Origin = EXTERNAL

    def __post_init__(self):
        if not math.isfinite(self.valence):
            raise ValueError(f"valence must be finite, got {self.valence}")
        if not isinstance(self.origin, (External, CMInternal)):
            raise TypeError(f"origin must be External or CMInternal, got {self.origin!r}")

    @property
    def probability(self) -> float:
        return self.amplitude.probability


@dataclass(frozen=True)
class Superposition:
    """Ordered, uniquely labelled branches.

    Construction does not force normalization, since ``normalize`` has to
    accept unnormalized input; use :meth:`is_normalized` to check.
    """

    branches: tuple[Branch, ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("a superposition needs at least one branch")
        labels = [b.label for b in self.branches]
        if len(set(labels)) != len(labels):
            raise ValueError(f"branch labels must be unique, got {labels}")

    @classmethod
    def from_probabilities(
        cls,
        probabilities: Sequence[float],
        labels: Sequence[str] | None = None,
        valences: Sequence[float] | None = None,
        origins: Sequence[Origin] | Origin = EXTERNAL,
    ) -> Superposition:
        n = len(probabilities)
        labels = labels if labels is not None else [str(i) for i in range(n)]
        valences = valences if valences is not None else [0.0] * n
        if isinstance(origins, (External, CMInternal)):
            origins = [origins] * n
        if not len(labels) == len(valences) == len(origins) == n:
            raise ValueError("labels, valences and origins must match the number of probabilities")
        return cls(
            tuple(
                Branch(lab, Amplitude.from_probability(p), v, o)
                for p, lab, v, o in zip(probabilities, labels, valences, origins)
            )
        )

    def __len__(self):
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.branches)

    def probabilities(self) -> np.ndarray:
        return np.array([b.probability for b in self.branches], dtype=float)

    def total_probability(self) -> float:
        return math.fsum(b.probability for b in self.branches)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.total_probability() - 1.0) < tol

    def branch(self, label: str) -> Branch:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(label)

    def with_probabilities(self, probabilities: Iterable[float]) -> Superposition:
        """Same branches with new squared moduli; phases, valences and origins kept."""
        return Superposition(
            tuple(
                replace(b, amplitude=Amplitude(math.sqrt(max(p, 0.0)), b.amplitude.phase))
                for b, p in zip(self.branches, probabilities, strict=True)
            )
        )


def normalize(s: Superposition) -> Superposition:
    norm = math.sqrt(s.total_probability())
    if norm == 0.0:
        raise AllZeroAmplitudes(f"cannot normalize {s.labels}: every modulus is zero")
    return Superposition(
        tuple(
            replace(b, amplitude=Amplitude(b.amplitude.modulus / norm, b.amplitude.phase))
            for b in s.branches
        )
    )


def born_probabilities(s: Superposition) -> list[tuple[str, float]]:
    return [(b.label, b.probability) for b in s.branches]


def select_index(probabilities, u):
    """Inverse-CDF selection over branch order for uniform draw(s) ``u`` in [0, 1).

    Vectorized over ``u``. ``probabilities`` need not sum exactly to one;
    they are scaled by their total, and zero-probability branches can never
    be selected.
    """
    probs = np.asarray(probabilities, dtype=float)
    total = probs.sum()
    if total <= 0.0:
        raise AllZeroAmplitudes("no branch carries probability")
    cdf = np.cumsum(probs) / total
    cdf[-1] = 1.0
    # side="right": u landing exactly on a boundary goes to the next branch,
    # so a branch with zero width is skipped.
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(probs) - 1)


def reduce(s: Superposition, rng: np.random.Generator) -> Branch:
    """Collapse ``s`` to one branch sampled with probability ``modulus**2``.

    Consumes exactly one uniform from ``rng``.
    """
    probs = s.probabilities()
    if probs.sum() == 0.0:
        raise AllZeroAmplitudes(f"cannot reduce {s.labels}: every modulus is zero")
    return s.branches[int(select_index(probs, rng.random()))]


@dataclass(frozen=True)
class ObserverChain:
    """Correlated (apparatus, first observer, second observer) basis indices.

    ``dimension`` is the size of each basis; it survives reductions so a
    later projector index can still be range-checked.
    """

    entries: tuple[tuple[int, int, int], ...]
    amplitudes: tuple[Amplitude, ...]
    dimension: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        object.__setattr__(self, "amplitudes", tuple(self.amplitudes))
        if len(self.entries) != len(self.amplitudes):
            raise ValueError("one amplitude per entry is required")
        if self.dimension == 0:
            object.__setattr__(self, "dimension", 1 + max((max(e) for e in self.entries), default=-1))
        for e in self.entries:
            if any(not 0 <= i < self.dimension for i in e):
                raise IndexOutOfRange(f"entry {e} outside basis of size {self.dimension}")

    @classmethod
    def correlated(cls, amplitudes: Sequence[Amplitude | float]) -> ObserverChain:
        """Pre-reduction state sum_i C_i |a_i>|Phi_i>|Theta_i>."""
        amps = tuple(a if isinstance(a, Amplitude) else Amplitude(float(a)) for a in amplitudes)
        return cls(tuple((i, i, i) for i in range(len(amps))), amps, len(amps))

    def is_correlated(self) -> bool:
        return all(a == f == s for a, f, s in self.entries)


def first_reduction(chain: ObserverChain, k: int) -> ObserverChain:
    """Project with the first observer's |Phi_k><Phi_k|.

    The result keeps the bare coefficient C_k and is not renormalized.
    """
    if not 0 <= k < chain.dimension:
        raise IndexOutOfRange(f"k={k} outside basis of size {chain.dimension}")
    kept = [(e, a) for e, a in zip(chain.entries, chain.amplitudes) if e[1] == k]
    return ObserverChain(tuple(e for e, _ in kept), tuple(a for _, a in kept), chain.dimension)


def second_reduction(chain: ObserverChain, m: int) -> ObserverChain | None:
    """Project with the second observer's |Theta_m><Theta_m|; ``None`` is the null state."""
    if not 0 <= m < chain.dimension:
        raise IndexOutOfRange(f"m={m} outside basis of size {chain.dimension}")
    kept = [(e, a) for e, a in zip(chain.entries, chain.amplitudes) if e[2] == m]
    if not kept or all(a.modulus == 0.0 for _, a in kept):
        return None
    if len(kept) == len(chain.entries):
        return chain
    return ObserverChain(tuple(e for e, _ in kept), tuple(a for _, a in kept), chain.dimension)
