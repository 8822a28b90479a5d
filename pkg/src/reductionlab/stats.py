"""Trinomial null model, variance algebra and power analysis for the u - d test.

Each two-part trial moves the running difference N_L - N_S up (u), down
(d) or not at all (e). With p0 the probability that L fires and no effect
of the finger, the per-trial step probabilities are

    p = p0*q0,  q = q0*p0,  r = p0**2 + q0**2

and the test statistic u - d has standard deviation
sqrt((4pq + r(p+q)) N), which is sqrt(N/2) at p0 = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import norm

from reductionlab.errors import DegenerateP0, TooLarge, ZeroSigma
from reductionlab.selector import ExperimentTally

EXACT_MAX_N = 12


@dataclass(frozen=True)
class NullModel:
    p0: float
    q0: float
    p: float
    q: float
    r: float

    @property
    def step_variance(self) -> float:
        """Per-trial variance of the u - d step, 4pq + r(p + q)."""
        return 4.0 * self.p * self.q + self.r * (self.p + self.q)


def null_model(p0: float) -> NullModel:
    if not 0.0 < p0 < 1.0:
        raise DegenerateP0(f"p0 must lie strictly between 0 and 1, got {p0}")
    q0 = 1.0 - p0
    return NullModel(p0=p0, q0=q0, p=p0 * q0, q=q0 * p0, r=p0 * p0 + q0 * q0)


def plug_in_model(tally: ExperimentTally) -> NullModel:
    """Null model with p0 estimated as N_L / N, as done for the original data."""
    if tally.N == 0:
        raise DegenerateP0("no trials to estimate p0 from")
    return null_model(tally.N_L / tally.N)


def sigma_ud(model: NullModel, N: int) -> float:
    return math.sqrt(model.step_variance * N)


def sigma_u(model: NullModel, N: int) -> float:
    """Standard deviation of u (and of d) alone: sqrt(p(q + r) N)."""
    return math.sqrt(model.p * (model.q + model.r) * N)


@dataclass(frozen=True)
class StatsReport:
    N: int
    N_S: int
    N_L: int
    u: int
    d: int
    e: int
    p0: float
    q0: float
    p: float
    q: float
    r: float
    sigma_ud: float
    sigma_u: float
    z: float
    threshold: float
    within_one_sigma: bool
    expected_u: float
    u_within_sigma: bool
    d_within_sigma: bool

    @property
    def diff(self) -> int:
        return self.u - self.d

    def to_dict(self) -> dict:
        return asdict(self)

    def rounded(self) -> dict:
        """Values at the precision the original analysis printed them."""
        return {
            "p0": round(self.p0, 4),
            "q0": round(self.q0, 4),
            "p": round(self.p, 4),
            "q": round(self.q, 4),
            "r": round(self.r, 4),
            "sigma_ud": round(self.sigma_ud, 1),
            "sigma_u": round(self.sigma_u, 1),
            "z": round(self.z, 3),
        }


def z_statistic(tally: ExperimentTally, model: NullModel, threshold: float = 1.0) -> StatsReport:
    """z = (u - d) / sigma(u - d), flagged against ``threshold`` sigma.

    ``within_one_sigma`` keeps its historical name but uses ``threshold``.
    p0 is treated as exact, as in the original analysis; estimation error
    in a plugged-in p0 is not propagated.
    """
    if tally.N == 0:
        raise ZeroSigma("sigma(u - d) is zero for N = 0")
    s_ud = sigma_ud(model, tally.N)
    s_u = sigma_u(model, tally.N)
    diff = tally.u - tally.d
    expected_u = model.p * tally.N
    return StatsReport(
        N=tally.N,
        N_S=tally.N_S,
        N_L=tally.N_L,
        u=tally.u,
        d=tally.d,
        e=tally.e,
        p0=model.p0,
        q0=model.q0,
        p=model.p,
        q=model.q,
        r=model.r,
        sigma_ud=s_ud,
        sigma_u=s_u,
        z=diff / s_ud,
        threshold=threshold,
        within_one_sigma=abs(diff) <= threshold * s_ud,
        expected_u=expected_u,
        u_within_sigma=abs(tally.u - expected_u) <= threshold * s_u,
        d_within_sigma=abs(tally.d - model.q * tally.N) <= threshold * s_u,
    )


def exact_ud_distribution(model: NullModel, N: int) -> dict[int, float]:
    """Exact law of u - d after N trials by repeated trinomial convolution."""
    if N < 0:
        raise ValueError(f"N must be non-negative, got {N}")
    if N > EXACT_MAX_N:
        raise TooLarge(f"exact distribution limited to N <= {EXACT_MAX_N}, got {N}")
    # dist[j] is P(u - d = j - N)
    step = np.array([model.q, model.r, model.p])
    dist = np.array([1.0])
    for _ in range(N):
        dist = np.convolve(dist, step)
    return {j - N: float(w) for j, w in enumerate(dist)}


def distribution_moments(dist: dict[int, float]) -> tuple[float, float]:
    mean = math.fsum(k * w for k, w in dist.items())
    var = math.fsum((k - mean) ** 2 * w for k, w in dist.items())
    return mean, var


def required_trials(delta: float, k: float) -> int:
    """Least N with N*delta >= k*sqrt(N/2), i.e. ceil(k**2 / (2 delta**2)).

    This puts the expected u - d exactly at k null sigmas, so the detection
    rate at that N is only about one half; see :func:`trials_for_power`.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 0.5], got {delta}")
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    x = k * k / (2.0 * delta * delta)
    # Absorb float noise such as 9 / 2e-4 = 45000.000000000004.
    n = max(1, math.ceil(x * (1.0 - 1e-12)))
    return n


def detection_power(delta: float, k: float, N: int, p0: float = 0.5) -> float:
    """Normal-approximation probability that |z| > k after N trials.

    The painful branch's probability is lowered from p0 to p0 - delta in
    part 1; z is computed with the null sigma, as in :func:`z_statistic`.
    """
    null_sd = sigma_ud(null_model(p0), N)
    p_shock = p0 - delta
    alt_sd = math.sqrt(N * (p0 * (1 - p0) + p_shock * (1 - p_shock)))
    mean = N * delta
    return float(norm.sf((k * null_sd - mean) / alt_sd) + norm.cdf((-k * null_sd - mean) / alt_sd))


def trials_for_power(delta: float, k: float, power: float, p0: float = 0.5) -> int:
    """Least N whose :func:`detection_power` reaches ``power``."""
    if not 0.0 < power < 1.0:
        raise ValueError(f"power must lie in (0, 1), got {power}")
    lo, hi = 1, max(2, required_trials(delta, k))
    while detection_power(delta, k, hi, p0) < power:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if detection_power(delta, k, mid, p0) >= power:
            hi = mid
        else:
            lo = mid + 1
    return lo
