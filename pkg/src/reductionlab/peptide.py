"""Heisenberg velocity and position spread of a free bio-active peptide."""

from __future__ import annotations

import math
from dataclasses import dataclass

from reductionlab.errors import NonPositiveInput

HBAR = 1.05457e-34  # J s
AMU = 1.66054e-27  # kg

# Figures as printed for a 10 000 u, 10 nm peptide followed for 0.1 s.
CLAIMED_DV = 0.63e-3  # m/s
CLAIMED_SPREAD = 63e-3  # m, printed as "63 mm"
CLAIMED_DT = 0.1  # s


@dataclass(frozen=True)
class Particle:
    mass: float  # u
    delta_x: float  # m

    def __post_init__(self):
        for name in ("mass", "delta_x"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise NonPositiveInput(f"{name} must be positive and finite, got {value}")

    @property
    def mass_kg(self) -> float:
        return self.mass * AMU


def min_velocity_uncertainty(p: Particle, half_hbar: bool = False) -> float:
    """Minimum velocity spread in m/s from dx * dp >= hbar (or hbar/2 with ``half_hbar``)."""
    h = HBAR / 2 if half_hbar else HBAR
    return h / (p.mass_kg * p.delta_x)


def position_spread(dv: float, t: float) -> float:
    if t < 0:
        raise NonPositiveInput(f"elapsed time must be non-negative, got {t}")
    return dv * t


@dataclass(frozen=True)
class PeptideReport:
    mass_u: float
    delta_x_m: float
    t_s: float
    dv_hbar: float
    dv_half_hbar: float
    spread_m: float
    claimed_dv: float
    claimed_spread: float
    spread_ratio: float
    discrepancy: bool
    dt_for_claimed_spread: float

    def notes(self) -> list[str]:
        out = []
        if self.discrepancy:
            out.append(
                f"printed spread {self.claimed_spread * 1e3:g} mm is {self.spread_ratio:.3g}x the "
                f"computed {self.spread_m * 1e6:.3g} um; dv*dt with dt = {self.t_s:g} s gives micrometres"
            )
            out.append(
                f"reading 1: unit typo, mm should be um (computed {self.spread_m * 1e6:.3g} um)"
            )
            out.append(
                f"reading 2: intended dt = {self.dt_for_claimed_spread:.3g} s, "
                f"which yields {self.claimed_spread * 1e3:g} mm"
            )
        return out

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["notes"] = self.notes()
        return d

    def to_text(self) -> str:
        lines = [
            f"mass            {self.mass_u:g} u ({self.mass_u * AMU:.6g} kg)",
            f"delta_x         {self.delta_x_m:g} m",
            f"delta_t         {self.t_s:g} s",
            f"dv (hbar)       {self.dv_hbar:.4g} m/s = {self.dv_hbar * 1e3:.3g} mm/s",
            f"dv (hbar/2)     {self.dv_half_hbar:.4g} m/s = {self.dv_half_hbar * 1e3:.3g} mm/s",
            f"spread dv*dt    {self.spread_m:.4g} m = {self.spread_m * 1e6:.3g} um",
            f"printed dv      {self.claimed_dv * 1e3:g} mm/s",
            f"printed spread  {self.claimed_spread * 1e3:g} mm",
            f"discrepancy     {'YES' if self.discrepancy else 'no'}",
        ]
        lines += [f"note            {n}" for n in self.notes()]
        return "\n".join(lines) + "\n"


def peptide_report(mass: float = 10_000.0, delta_x: float = 10e-9, t: float = CLAIMED_DT) -> PeptideReport:
    particle = Particle(mass, delta_x)
    dv = min_velocity_uncertainty(particle)
    spread = position_spread(dv, t)
    ratio = CLAIMED_SPREAD / spread if spread > 0 else math.inf
    return PeptideReport(
        mass_u=mass,
        delta_x_m=delta_x,
        t_s=t,
        dv_hbar=dv,
        dv_half_hbar=min_velocity_uncertainty(particle, half_hbar=True),
        spread_m=spread,
        claimed_dv=CLAIMED_DV,
        claimed_spread=CLAIMED_SPREAD,
        spread_ratio=ratio,
        # Anything off by more than a factor of two is a units problem, not rounding.
        discrepancy=not 0.5 <= ratio <= 2.0,
        dt_for_claimed_spread=CLAIMED_SPREAD / dv,
    )
