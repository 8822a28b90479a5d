"""Virtual two-scaler selector apparatus.

Two background-radiation scalers L and R race to record a count. In part 1
of a trial the winner decides whether a finger on the bars is shocked (L)
or not (R); in part 2 a resistor replaces the finger and only the lamp is
recorded. The part-1 outcome is a reduction of a (shock, no shock)
superposition after the configured bias model has acted on it; part 2 is
the same superposition with neutral valences.

Randomness is counter-based: trial ``i`` part ``k`` reads the uniform at
``(seed, k, i)``, so results do not depend on chunking or thread count.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, astuple, dataclass, field
from functools import cached_property

import numpy as np

from reductionlab import streams
from reductionlab.bias import BiasModel, apply_bias, bias_shift
from reductionlab.errors import ConfigError
from reductionlab.quantum import OriginMode, Superposition, select_index

LEFT, RIGHT = "L", "R"
CSV_COLUMNS = ("index", "part1_shock", "part2_left", "delta")


@dataclass(frozen=True)
class ApparatusConfig:
    rate_left: float = 1.0
    rate_right: float = 1.0
    bias: BiasModel = field(default_factory=BiasModel.none)
    origin_mode: OriginMode = OriginMode.EXTERNAL

    def __post_init__(self):
        for name in ("rate_left", "rate_right"):
            rate = getattr(self, name)
            if not (math.isfinite(rate) and rate > 0):
                raise ConfigError(f"{name} must be positive and finite, got {rate}")
        if isinstance(self.origin_mode, str):
            object.__setattr__(self, "origin_mode", OriginMode(self.origin_mode))

    @property
    def p_left(self) -> float:
        """Probability that L fires first: rate_L / (rate_L + rate_R)."""
        return self.rate_left / (self.rate_left + self.rate_right)

    def superposition(self, valences: tuple[float, float]) -> Superposition:
        p = self.p_left
        return Superposition.from_probabilities(
            [p, 1.0 - p], labels=[LEFT, RIGHT], valences=valences, origins=self.origin_mode.origin()
        )

    @cached_property
    def part1_state(self) -> Superposition:
        """Post-bias (L = shock, R = no shock) state felt through the finger."""
        return apply_bias(self.superposition((1.0, 0.0)), self.bias)

    @cached_property
    def part2_state(self) -> Superposition:
        """Lamp-only state; neutral valences leave every bias model inert."""
        return apply_bias(self.superposition((0.0, 0.0)), self.bias)

    @property
    def shock_probability(self) -> float:
        """Closed-form P(shock); the sampler uses :attr:`part1_state` instead."""
        return bias_shift(self.p_left, self.bias, external=self.origin_mode is OriginMode.EXTERNAL)


@dataclass(frozen=True)
class TrialRecord:
    index: int
    part1_shock: bool
    part2_left: bool

    @property
    def delta(self) -> int:
        return int(self.part2_left) - int(self.part1_shock)


@dataclass(frozen=True)
class ExperimentTally:
    N: int = 0
    N_S: int = 0
    N_L: int = 0
    u: int = 0
    d: int = 0
    e: int = 0

    def __post_init__(self):
        if self.u + self.d + self.e != self.N:
            raise ValueError(f"u + d + e = {self.u + self.d + self.e} but N = {self.N}")

    def merge(self, other: ExperimentTally) -> ExperimentTally:
        return ExperimentTally(*(a + b for a, b in zip(astuple(self), astuple(other))))

    @classmethod
    def from_outcomes(cls, shock, left) -> ExperimentTally:
        shock = np.asarray(shock, dtype=bool)
        left = np.asarray(left, dtype=bool)
        delta = left.astype(np.int8) - shock.astype(np.int8)
        return cls(
            N=int(shock.size),
            N_S=int(shock.sum()),
            N_L=int(left.sum()),
            u=int((delta > 0).sum()),
            d=int((delta < 0).sum()),
            e=int((delta == 0).sum()),
        )

    def ledger_ok(self) -> bool:
        return self.u - self.d == self.N_L - self.N_S and self.u + self.d + self.e == self.N

    def to_dict(self) -> dict:
        return asdict(self)


def race_winner(rate_left: float, rate_right: float, u_left, u_right):
    """Winner of exponential races given uniforms for each channel's waiting time.

    Returns ``(left_won, tied)``; ``tied`` marks exactly equal waiting times,
    which the callers redraw.
    """
    t_left = -np.log1p(-np.asarray(u_left)) / rate_left
    t_right = -np.log1p(-np.asarray(u_right)) / rate_right
    return t_left < t_right, t_left == t_right


def race_select(config: ApparatusConfig, rng: np.random.Generator) -> str:
    """Which channel records the first count. Redraws on an exact tie."""
    while True:
        left, tied = race_winner(config.rate_left, config.rate_right, rng.random(), rng.random())
        if not tied:
            return LEFT if left else RIGHT


def race_sample(config: ApparatusConfig, n: int, seed: int) -> np.ndarray:
    """``n`` counter-based races; True where L won."""
    idx = np.arange(n, dtype=np.uint64)
    out = np.empty(n, dtype=bool)
    pending = np.ones(n, dtype=bool)
    attempt = 0
    while pending.any():
        sub = idx[pending]
        u_l = streams.counter_uniforms(seed, (streams.RACE, attempt, 0), sub)
        u_r = streams.counter_uniforms(seed, (streams.RACE, attempt, 1), sub)
        left, tied = race_winner(config.rate_left, config.rate_right, u_l, u_r)
        out[sub[~tied].astype(np.intp)] = left[~tied]
        pending[sub[~tied].astype(np.intp)] = False
        attempt += 1
    return out


def _outcomes(config: ApparatusConfig, seed: int, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    index = np.arange(lo, hi, dtype=np.uint64)
    u1 = streams.counter_uniforms(seed, (streams.PART1,), index)
    u2 = streams.counter_uniforms(seed, (streams.PART2,), index)
    # Branch order is (L, R): selection index 0 means L.
    shock = select_index(config.part1_state.probabilities(), u1) == 0
    left = select_index(config.part2_state.probabilities(), u2) == 0
    return shock, left


def run_trial(config: ApparatusConfig, seed: int, index: int) -> TrialRecord:
    """Trial ``index`` (1-based) of the run with master ``seed``."""
    if index < 1:
        raise ValueError(f"trial index must be positive, got {index}")
    shock, left = _outcomes(config, seed, index, index + 1)
    return TrialRecord(index, bool(shock[0]), bool(left[0]))


@dataclass(frozen=True)
class TrialArrays:
    """Outcome columns for trials 1..N."""

    shock: np.ndarray
    left: np.ndarray

    @property
    def delta(self) -> np.ndarray:
        return self.left.astype(np.int8) - self.shock.astype(np.int8)

    def tally(self) -> ExperimentTally:
        return ExperimentTally.from_outcomes(self.shock, self.left)

    def records(self) -> list[TrialRecord]:
        return [
            TrialRecord(i + 1, bool(s), bool(l))
            for i, (s, l) in enumerate(zip(self.shock.tolist(), self.left.tolist()))
        ]


def simulate_trials(config: ApparatusConfig, N: int, seed: int, workers: int = 1) -> TrialArrays:
    if N < 1:
        raise ConfigError(f"need at least one trial, got N={N}")
    seed = streams.check_seed(seed)
    parts = streams.map_chunks(lambda lo, hi: _outcomes(config, seed, lo, hi), 1, N + 1, workers)
    return TrialArrays(np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def run_experiment(
    config: ApparatusConfig, N: int, seed: int, workers: int = 1
) -> tuple[ExperimentTally, list[TrialRecord]]:
    trials = simulate_trials(config, N, seed, workers)
    return trials.tally(), trials.records()


def trial_log_csv(trials: TrialArrays) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    delta = trials.delta.tolist()
    for i, (s, l) in enumerate(zip(trials.shock.tolist(), trials.left.tolist())):
        writer.writerow((i + 1, int(s), int(l), delta[i]))
    return buf.getvalue()


def read_trial_log(text: str) -> list[TrialRecord]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected trial log header {rows.fieldnames}")
    out = []
    for row in rows:
        rec = TrialRecord(int(row["index"]), row["part1_shock"] == "1", row["part2_left"] == "1")
        if rec.delta != int(row["delta"]):
            raise ValueError(f"row {rec.index}: delta column disagrees with outcomes")
        out.append(rec)
    return out
