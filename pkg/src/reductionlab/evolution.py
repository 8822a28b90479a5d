"""Survival of withdrawal/contact associations under repeated probe encounters.

At each encounter an organism's nervous system splits into a withdrawal
branch W and a continued-contact branch C at 0.5/0.5. Its genotype fixes
which branch carries the aversive valence. The conscious route biases the
split through the valence, the autonomic route adds a flat bonus to P(W),
and tandem does both (bias first, then the bonus, clamped to [0, 1]).
Choosing C kills with probability ``hazard_per_encounter``.

All three modes of a run read the same per-organism uniforms, so their
survival curves are directly comparable draw for draw.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from reductionlab import streams
from reductionlab.bias import BiasModel, Variant, apply_bias
from reductionlab.errors import ConfigError
from reductionlab.quantum import OriginMode, Superposition, reduce

WITHDRAW, CONTACT = "W", "C"


class Association(enum.Enum):
    CORRECT = "correct"  # W[no pain], C[pain]
    WRONG = "wrong"  # W[pain], C[no pain]

    @property
    def valences(self) -> tuple[float, float]:
        return (0.0, 1.0) if self is Association.CORRECT else (1.0, 0.0)


class Mode(enum.Enum):
    CONSCIOUS_ONLY = "conscious"
    AUTONOMIC_ONLY = "autonomic"
    TANDEM = "tandem"

    @property
    def conscious(self) -> bool:
        return self is not Mode.AUTONOMIC_ONLY

    @property
    def autonomic(self) -> bool:
        return self is not Mode.CONSCIOUS_ONLY


class Outcome(enum.Enum):
    SURVIVED_WITHDREW = "survived_withdrew"
    SURVIVED_CONTINUED = "survived_continued"
    DIED = "died"


@dataclass(frozen=True)
class Genotype:
    association: Association = Association.CORRECT
    autonomic_escape_bonus: float = 0.0

    def __post_init__(self):
        if isinstance(self.association, str):
            object.__setattr__(self, "association", Association(self.association))
        if not 0.0 <= self.autonomic_escape_bonus <= 0.5:
            raise ConfigError(f"autonomic bonus must lie in [0, 0.5], got {self.autonomic_escape_bonus}")


@dataclass(frozen=True)
class LineageConfig:
    """One lineage study.

    ``origin`` is CM by construction of the scenario; EXTERNAL exists as a
    control under which the modified bias must stay inert. ``wrong_fraction``
    seeds a mixed population (the rest get the genotype's association);
    ``reproduce`` refills dead slots from survivors each generation.
    """

    mode: Mode = Mode.TANDEM
    bias: BiasModel = field(default_factory=lambda: BiasModel(Variant.MODIFIED, 0.0))
    population: int = 1000
    hazard_per_encounter: float = 1.0
    generations: int = 50
    origin: OriginMode = OriginMode.CM
    reproduce: bool = False
    wrong_fraction: float | None = None

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", Mode(self.mode))
        if isinstance(self.origin, str):
            object.__setattr__(self, "origin", OriginMode(self.origin))
        if self.population < 1:
            raise ConfigError(f"population must be >= 1, got {self.population}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")
        if not 0.0 <= self.hazard_per_encounter <= 1.0:
            raise ConfigError(f"hazard must lie in [0, 1], got {self.hazard_per_encounter}")
        if self.wrong_fraction is not None and not 0.0 <= self.wrong_fraction <= 1.0:
            raise ConfigError(f"wrong_fraction must lie in [0, 1], got {self.wrong_fraction}")


def encounter_state(g: Genotype, cfg: LineageConfig) -> Superposition:
    """The post-influence W/C superposition an organism reduces at the probe."""
    s = Superposition.from_probabilities(
        [0.5, 0.5],
        labels=[WITHDRAW, CONTACT],
        valences=g.association.valences,
        origins=cfg.origin.origin(),
    )
    if cfg.mode.conscious:
        s = apply_bias(s, cfg.bias)
    if cfg.mode.autonomic:
        p_w = min(1.0, max(0.0, s.branch(WITHDRAW).probability + g.autonomic_escape_bonus))
        s = s.with_probabilities([p_w, 1.0 - p_w])
    return s


def escape_probability(g: Genotype, cfg: LineageConfig) -> float:
    return encounter_state(g, cfg).branch(WITHDRAW).probability


def encounter(g: Genotype, cfg: LineageConfig, rng: np.random.Generator) -> Outcome:
    if reduce(encounter_state(g, cfg), rng).label == WITHDRAW:
        return Outcome.SURVIVED_WITHDREW
    if rng.random() < cfg.hazard_per_encounter:
        return Outcome.DIED
    return Outcome.SURVIVED_CONTINUED


@dataclass(frozen=True)
class SurvivalCurves:
    """Mean fraction alive (relative to the founding population) per generation.

    Row 0 is the founding generation. ``correct_share`` is the share of
    living organisms with the correct association (NaN once extinct).
    """

    generations: np.ndarray
    fraction_alive: dict[Mode, np.ndarray]
    correct_share: dict[Mode, np.ndarray]
    replications: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("generation", "mode", "fraction_alive"))
        for gen in self.generations.tolist():
            for mode, curve in self.fraction_alive.items():
                writer.writerow((gen, mode.value, repr(float(curve[gen]))))
        return buf.getvalue()


def _founders(cfg: LineageConfig, genotype: Genotype) -> np.ndarray:
    """Boolean array, True where the founder carries the correct association."""
    if cfg.wrong_fraction is None:
        return np.full(cfg.population, genotype.association is Association.CORRECT)
    n_wrong = round(cfg.wrong_fraction * cfg.population)
    correct = np.ones(cfg.population, dtype=bool)
    correct[:n_wrong] = False
    return correct


def _escape_table(cfg: LineageConfig, genotype: Genotype) -> dict[Mode, tuple[float, float]]:
    """(P(W) if correct, P(W) if wrong) for every mode."""
    bonus = genotype.autonomic_escape_bonus
    out = {}
    for mode in Mode:
        c = replace(cfg, mode=mode)
        out[mode] = (
            escape_probability(Genotype(Association.CORRECT, bonus), c),
            escape_probability(Genotype(Association.WRONG, bonus), c),
        )
    return out


def _attrition(cfg, table, correct, seed, rep, lo, hi):
    """Alive counts and correct counts per generation for organisms lo..hi-1, no reproduction."""
    index = np.arange(lo, hi, dtype=np.uint64)
    correct = correct[lo:hi]
    alive = {m: np.ones(hi - lo, dtype=bool) for m in Mode}
    counts = {m: np.zeros((cfg.generations + 1, 2), dtype=np.int64) for m in Mode}
    for m in Mode:
        counts[m][0] = (hi - lo, int(correct.sum()))
    p_w = {m: np.where(correct, *table[m]) for m in Mode}
    for gen in range(1, cfg.generations + 1):
        u_branch = streams.counter_uniforms(seed, (streams.EVOLVE, rep, gen, 0), index)
        u_hazard = streams.counter_uniforms(seed, (streams.EVOLVE, rep, gen, 1), index)
        lethal = u_hazard < cfg.hazard_per_encounter
        for m in Mode:
            # Inverse CDF over (W, C): W iff u < P(W).
            died = (u_branch >= p_w[m]) & lethal
            alive[m] &= ~died
            counts[m][gen] = (int(alive[m].sum()), int((alive[m] & correct).sum()))
    return counts


def _with_reproduction(cfg, table, correct, seed, rep):
    n = cfg.population
    index = np.arange(n, dtype=np.uint64)
    counts = {m: np.zeros((cfg.generations + 1, 2), dtype=np.int64) for m in Mode}
    state = {m: correct.copy() for m in Mode}
    alive = {m: np.ones(n, dtype=bool) for m in Mode}
    for m in Mode:
        counts[m][0] = (n, int(correct.sum()))
    for gen in range(1, cfg.generations + 1):
        u_branch = streams.counter_uniforms(seed, (streams.EVOLVE, rep, gen, 0), index)
        u_hazard = streams.counter_uniforms(seed, (streams.EVOLVE, rep, gen, 1), index)
        u_parent = streams.counter_uniforms(seed, (streams.EVOLVE, rep, gen, 2), index)
        lethal = u_hazard < cfg.hazard_per_encounter
        for m in Mode:
            p_w = np.where(state[m], *table[m])
            alive[m] &= ~((u_branch >= p_w) & lethal)
            survivors = np.flatnonzero(alive[m])
            if survivors.size:
                dead = ~alive[m]
                parents = survivors[(u_parent[dead] * survivors.size).astype(np.intp)]
                state[m][dead] = state[m][parents]
                alive[m][:] = True
            counts[m][gen] = (int(alive[m].sum()), int((alive[m] & state[m]).sum()))
    return counts


def run_lineages(
    cfg: LineageConfig,
    genotype: Genotype,
    seed: int,
    replications: int = 1,
    workers: int = 1,
) -> SurvivalCurves:
    """Survival curves for all three modes, averaged over ``replications``.

    ``cfg.mode`` is ignored; every mode is run on the same draws. Organism
    ``i`` of replication ``r`` in generation ``g`` reads its uniforms at
    ``(seed, r, g, i)``.
    """
    seed = streams.check_seed(seed)
    if replications < 1:
        raise ConfigError(f"replications must be >= 1, got {replications}")
    table = _escape_table(cfg, genotype)
    correct = _founders(cfg, genotype)
    total = {m: np.zeros((cfg.generations + 1, 2), dtype=np.int64) for m in Mode}
    for rep in range(replications):
        if cfg.reproduce:
            parts = [_with_reproduction(cfg, table, correct, seed, rep)]
        else:
            parts = streams.map_chunks(
                lambda lo, hi, rep=rep: _attrition(cfg, table, correct, seed, rep, lo, hi),
                0,
                cfg.population,
                workers,
            )
        for part in parts:
            for m in Mode:
                total[m] += part[m]
    denom = cfg.population * replications
    alive = {m: total[m][:, 0] / denom for m in Mode}
    with np.errstate(invalid="ignore", divide="ignore"):
        share = {m: np.where(total[m][:, 0] > 0, total[m][:, 1] / total[m][:, 0], math.nan) for m in Mode}
    return SurvivalCurves(np.arange(cfg.generations + 1), alive, share, replications)
