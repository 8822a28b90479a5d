"""Published shock-experiment data, its identity checks, and replication reports."""

from __future__ import annotations

import math
from dataclasses import dataclass

from reductionlab.errors import DegenerateP0
from reductionlab.selector import ApparatusConfig, ExperimentTally, simulate_trials
from reductionlab.stats import StatsReport, null_model, plug_in_model, sigma_u, sigma_ud, z_statistic

# Counts reported for the 2500 two-part trials.
PUBLISHED_N = 2500
PUBLISHED_N_S = 1244
PUBLISHED_N_L = 1261
PUBLISHED_U = 632
PUBLISHED_D = 615

PUBLISHED_P0 = 0.5044
PUBLISHED_Q0 = 0.4956
PUBLISHED_PQR = (0.2500, 0.2500, 0.5000)
PUBLISHED_SIGMA_UD = 35.4
PUBLISHED_SIGMA_U = 21.7
PUBLISHED_EXPECTED_U = 625

P0_NOTE = "p0 is treated as exact when computing sigma; its estimation error is not propagated"


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    observed: object
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: expected {self.expected}, observed {self.observed}"


def paper_check(
    N: int = PUBLISHED_N,
    N_S: int = PUBLISHED_N_S,
    N_L: int = PUBLISHED_N_L,
    u: int = PUBLISHED_U,
    d: int = PUBLISHED_D,
) -> list[Check]:
    """Recompute every published quantity from the raw counts and compare.

    Pass tampered counts to see which identities break.
    """
    e = N - u - d
    checks = [
        Check("ledger u - d = N_L - N_S", N_L - N_S, u - d, u - d == N_L - N_S),
        Check("u - d = 17", 17, u - d, u - d == 17),
        Check("e = N - u - d = 1253", 1253, e, e == 1253),
    ]
    if not 0 < N_L < N:
        checks.append(Check("p0 = N_L / N in (0, 1)", "(0, 1)", N_L / N if N else math.nan, False))
        return checks

    model = null_model(N_L / N)
    s_ud = sigma_ud(model, N)
    s_u = sigma_u(model, N)
    z = (u - d) / s_ud
    expected_u = model.p * N
    checks += [
        Check("p0 = 0.5044", PUBLISHED_P0, model.p0, round(model.p0, 4) == PUBLISHED_P0),
        Check("q0 = 0.4956", PUBLISHED_Q0, model.q0, round(model.q0, 4) == PUBLISHED_Q0),
        Check(
            "(p, q, r) = (0.2500, 0.2500, 0.5000)",
            PUBLISHED_PQR,
            (model.p, model.q, model.r),
            tuple(round(x, 4) for x in (model.p, model.q, model.r)) == PUBLISHED_PQR,
        ),
        Check("p + q + r = 1", 1.0, model.p + model.q + model.r, abs(model.p + model.q + model.r - 1) < 1e-12),
        Check(
            "sigma(u - d) = 35.4",
            PUBLISHED_SIGMA_UD,
            s_ud,
            abs(s_ud - PUBLISHED_SIGMA_UD) <= 0.05 and round(s_ud, 1) == PUBLISHED_SIGMA_UD,
        ),
        Check(
            "sigma(u) = sigma(d) = 21.7",
            PUBLISHED_SIGMA_U,
            s_u,
            abs(s_u - PUBLISHED_SIGMA_U) <= 0.05 and round(s_u, 1) == PUBLISHED_SIGMA_U,
        ),
        Check("expected u = N p = 625", PUBLISHED_EXPECTED_U, expected_u, round(expected_u) == PUBLISHED_EXPECTED_U),
        Check("|u - N p| <= sigma(u)", f"<= {s_u:.4f}", abs(u - expected_u), abs(u - expected_u) <= s_u),
        Check("|d - N q| <= sigma(d)", f"<= {s_u:.4f}", abs(d - model.q * N), abs(d - model.q * N) <= s_u),
        Check("|z| < 1", "< 1", z, abs(z) < 1),
    ]
    return checks


def replicate(
    config: ApparatusConfig,
    N: int,
    seed: int,
    p0: float | None = None,
    threshold: float = 1.0,
    workers: int = 1,
):
    """Run the virtual experiment and analyse it the way the original data was analysed.

    Returns ``(trials, stats_report, p0_source)``. With ``p0=None`` the null
    model uses the plug-in estimate N_L / N, falling back to the apparatus's
    own rate ratio when every lamp came up the same side.
    """
    trials = simulate_trials(config, N, seed, workers)
    tally = trials.tally()
    if p0 is not None:
        model, source = null_model(p0), "supplied"
    else:
        try:
            model, source = plug_in_model(tally), "plug-in"
        except DegenerateP0:
            model, source = null_model(config.p_left), "apparatus"
    return trials, z_statistic(tally, model, threshold), source


def stats_payload(tally: ExperimentTally, report: StatsReport, p0_source: str) -> dict:
    return {
        "tally": tally.to_dict(),
        "ledger_ok": tally.ledger_ok(),
        "p0_source": p0_source,
        "stats": report.to_dict(),
        "rounded": report.rounded(),
        "notes": [P0_NOTE],
    }
