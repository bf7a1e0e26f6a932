"""Maximum secure distance from detector noise and channel loss.

The chain of reasoning: the per-basis QBER threshold translates into a
minimum signal detection probability Gamma, Gamma translates into a
minimum channel transmissivity Omega, and Omega translates into a
distance through the loss model. Fiber and far-field diffraction have
closed forms; every other model goes through a monotonicity-guarded
bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .detection import Attenuated, Decoy, DetectorModel, SinglePhoton, SourceModel, detection_probability
from .errors import (
    BracketError,
    InfeasibleConfigurationError,
    NonMonotonicModelError,
    ValidationError,
)
from .links import BeamGeometry, FiberLink, fiber_transmissivity

BISECT_REL_TOL = 1e-9
BISECT_MAX_ITER = 60
MONOTONE_SAMPLES = 64


@dataclass(frozen=True)
class GammaThreshold:
    """Minimum detection probability for sub-threshold QBER."""

    gamma_min: float
    mub_count: int


@dataclass(frozen=True)
class OmegaValue:
    """Minimum channel transmissivity Omega and its log form.

    omega_prime = -ln(1 - omega); both are set to inf when omega >= 1,
    meaning even a lossless channel cannot beat the threshold.
    """

    omega: float
    omega_prime: float
    source_kind: str


@dataclass(frozen=True)
class DistanceBound:
    """Maximum distance verdict.

    status is "solved" (d_max is the threshold crossing), "infeasible"
    (no distance works, d_max = 0), "unbounded" (threshold holds at any
    loss, d_max = inf) or "feasible-everywhere" (numeric search), where
    d_max is only the bracket end that was still feasible.
    """

    d_max_km: float
    feasible: bool
    method: str
    status: str = "solved"


def gamma_threshold(det: DetectorModel, mub_count: int) -> GammaThreshold:
    """Minimum gamma keeping the symmetric QBER under the protocol threshold.

    Two bases need E < 1/4, giving Gamma = Y0 / (1 + Y0 - 4 e_det);
    three bases need E < 1/3, giving Gamma = Y0 / (2 + Y0 - 6 e_det).
    Misalignment at or above the threshold is infeasible outright.
    """
    if mub_count == 2:
        if det.e_det >= 0.25:
            raise InfeasibleConfigurationError(
                f"e_det={det.e_det} is at or above the two-basis threshold 1/4; "
                "the QBER floor from misalignment alone already breaks security"
            )
        g = det.y0 / (1.0 + det.y0 - 4.0 * det.e_det)
    elif mub_count == 3:
        if det.e_det >= 1.0 / 3.0:
            raise InfeasibleConfigurationError(
                f"e_det={det.e_det} is at or above the three-basis threshold 1/3; "
                "the QBER floor from misalignment alone already breaks security"
            )
        g = det.y0 / (2.0 + det.y0 - 6.0 * det.e_det)
    else:
        raise ValidationError(f"mub_count must be 2 or 3, got {mub_count!r}")
    return GammaThreshold(gamma_min=g, mub_count=mub_count)


def _best_mu(src: Decoy) -> float:
    mu = max(src.intensities)
    if mu <= 0.0:
        raise ValidationError("decoy source has no nonvacuum intensity")
    return mu


def omega(det: DetectorModel, src: SourceModel, g: GammaThreshold) -> OmegaValue:
    """Minimum channel transmissivity for the detection threshold g.

    Single-photon sources need eta_ch > Gamma / eta_eff; attenuated and
    decoy (best-case intensity) sources need
    eta_ch > -ln(1 - Gamma) / (eta_eff mu).
    """
    if isinstance(src, SinglePhoton):
        if src.k != 1:
            raise ValidationError(
                f"closed-form omega covers k=1 only, got k={src.k}; "
                "use max_distance_numeric for multiphoton sources"
            )
        om = g.gamma_min / det.eta_eff
        kind = "single-photon"
    elif isinstance(src, (Attenuated, Decoy)):
        mu = src.mu if isinstance(src, Attenuated) else _best_mu(src)
        om = -math.log1p(-g.gamma_min) / (det.eta_eff * mu)
        kind = "attenuated"
    else:
        raise ValidationError(f"unknown source model {src!r}")
    prime = -math.log1p(-om) if om < 1.0 else math.inf
    return OmegaValue(omega=om, omega_prime=prime, source_kind=kind)


def max_fiber_distance(link: FiberLink, o: OmegaValue) -> DistanceBound:
    """Closed form d_max = -(10 / alpha) log10(Omega) for fiber loss."""
    if o.omega >= 1.0:
        return DistanceBound(0.0, False, "closed-form", "infeasible")
    if o.omega <= 0.0:
        return DistanceBound(math.inf, True, "closed-form", "unbounded")
    d = -(10.0 / link.alpha_db_per_km) * math.log10(o.omega)
    if d <= 0.0:
        return DistanceBound(0.0, False, "closed-form", "infeasible")
    return DistanceBound(d, True, "closed-form", "solved")


def max_diffraction_distance(beam: BeamGeometry, o: OmegaValue) -> DistanceBound:
    """Far-field diffraction bound d < (pi w0 a_R / lambda) sqrt(2 / Omega').

    Uses the spreading envelope w_d >= w0 d / d_R, so it slightly
    overestimates the exact crossing; reported in km.
    """
    if o.omega_prime <= 0.0:
        return DistanceBound(math.inf, True, "closed-form", "unbounded")
    if math.isinf(o.omega_prime):
        return DistanceBound(0.0, False, "closed-form", "infeasible")
    d_m = (
        math.pi * beam.w0_m * beam.aperture_radius_m / beam.wavelength_m
    ) * math.sqrt(2.0 / o.omega_prime)
    return DistanceBound(d_m / 1000.0, True, "closed-form", "solved")


def max_distance_numeric(
    model: Callable[[float], float],
    src: SourceModel,
    det: DetectorModel,
    g: GammaThreshold,
    d_lo_km: float,
    d_hi_km: float,
) -> DistanceBound:
    """Invert gamma(eta_eff * model(d)) = Gamma by bisection on [d_lo, d_hi].

    The model must be a non-increasing transmissivity of distance in km;
    64 log-spaced samples guard against non-monotone models (for
    example a focused beam measured past its waist), which raise
    NonMonotonicModelError. Converges to 1e-9 relative in d or 60
    bisection steps, whichever comes first.
    """
    if not (math.isfinite(d_lo_km) and math.isfinite(d_hi_km)) or d_lo_km < 0.0:
        raise BracketError(f"bad interval [{d_lo_km!r}, {d_hi_km!r}]")
    if d_lo_km >= d_hi_km:
        raise BracketError(f"empty interval [{d_lo_km}, {d_hi_km}]")

    def detect(d: float) -> float:
        eta_ch = model(d)
        if not (math.isfinite(eta_ch) and 0.0 <= eta_ch <= 1.0):
            raise BracketError(f"model returned transmissivity {eta_ch!r} at d={d}")
        return detection_probability(src, det.eta_eff * eta_ch)

    grid = np.geomspace(max(d_lo_km, d_hi_km * 1e-12), d_hi_km, MONOTONE_SAMPLES)
    grid[0] = d_lo_km
    vals = [detect(d) for d in grid]
    for i in range(len(vals) - 1):
        if vals[i + 1] > vals[i] + 1e-12:
            raise NonMonotonicModelError(
                f"detection probability rises from {vals[i]} to {vals[i + 1]} "
                f"between d={grid[i]} and d={grid[i + 1]} km; restrict the "
                "interval to the monotone side of the focus"
            )

    target = g.gamma_min
    if vals[0] <= target:
        return DistanceBound(0.0, False, "bisection", "infeasible")
    if vals[-1] > target:
        return DistanceBound(d_hi_km, True, "bisection", "feasible-everywhere")

    # Narrow to the grid cell holding the crossing; otherwise a wide
    # default bracket cannot reach the relative tolerance in 60 steps.
    idx = next(i for i in range(1, len(vals)) if vals[i] <= target)
    lo, hi = float(grid[idx - 1]), float(grid[idx])
    for _ in range(BISECT_MAX_ITER):
        if hi - lo <= BISECT_REL_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if detect(mid) > target:
            lo = mid
        else:
            hi = mid
    return DistanceBound(0.5 * (lo + hi), True, "bisection", "solved")


@dataclass(frozen=True)
class SweepRow:
    y0: float
    d_max_km: float
    feasible: bool


def dark_count_sweep(
    y0_values: Sequence[float],
    det_template: DetectorModel,
    src: SourceModel,
    link: FiberLink,
    mub_count: int,
) -> list[SweepRow]:
    """Fiber distance bound for each dark-count probability.

    Rows keep the input order; infeasible configurations come back
    flagged rather than raising, so a sweep can cross the feasibility
    boundary. Misalignment infeasibility does raise, since it kills
    every row at once.
    """
    rows = []
    for y0 in y0_values:
        det = DetectorModel(y0=float(y0), e_det=det_template.e_det, eta_eff=det_template.eta_eff)
        bound = max_fiber_distance(link, omega(det, src, gamma_threshold(det, mub_count)))
        rows.append(SweepRow(y0=float(y0), d_max_km=bound.d_max_km, feasible=bound.feasible))
    return rows
