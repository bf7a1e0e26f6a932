"""Channel transmissivity models: fiber, atmosphere, satellite, beam optics.

Distance units follow the conventions of each setting: km for fiber and
atmospheric extinction, meters for beam propagation. Composite models
multiply independent loss factors; the caller keeps the units straight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import ValidationError

# Clear-sky extinction at ground level near 800 nm and the atmosphere's
# effective scale height.
DEFAULT_ALPHA0_PER_KM = 5e-3
DEFAULT_SCALE_HEIGHT_KM = 6.6
DEFAULT_ETA_ZENITH = 0.967


@dataclass(frozen=True)
class FiberLink:
    """Telecom fiber with attenuation alpha in dB/km."""

    alpha_db_per_km: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha_db_per_km) and self.alpha_db_per_km > 0.0):
            raise ValidationError(f"alpha={self.alpha_db_per_km!r} must be positive")


def fiber_transmissivity(link: FiberLink, d_km: float) -> float:
    """eta = 10^(-alpha d / 10)."""
    if not (math.isfinite(d_km) and d_km >= 0.0):
        raise ValidationError(f"distance {d_km!r} must be >= 0")
    return 10.0 ** (-link.alpha_db_per_km * d_km / 10.0)


@dataclass(frozen=True)
class GroundAtmosphere:
    """Horizontal atmospheric path at fixed altitude (Beer-Lambert).

    Extinction decays exponentially with altitude over the scale height.
    """

    alpha0_per_km: float = DEFAULT_ALPHA0_PER_KM
    scale_height_km: float = DEFAULT_SCALE_HEIGHT_KM
    altitude_km: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.alpha0_per_km) and self.alpha0_per_km > 0.0):
            raise ValidationError(f"alpha0={self.alpha0_per_km!r} must be positive")
        if not (math.isfinite(self.scale_height_km) and self.scale_height_km > 0.0):
            raise ValidationError(
                f"scale height {self.scale_height_km!r} must be positive"
            )
        if not (math.isfinite(self.altitude_km) and self.altitude_km >= 0.0):
            raise ValidationError(f"altitude {self.altitude_km!r} must be >= 0")

    @property
    def extinction_per_km(self) -> float:
        return self.alpha0_per_km * math.exp(-self.altitude_km / self.scale_height_km)


def atmospheric_transmissivity(atm: GroundAtmosphere, d_km: float) -> float:
    """eta = exp(-alpha(h) d) along a horizontal path of length d."""
    if not (math.isfinite(d_km) and d_km >= 0.0):
        raise ValidationError(f"distance {d_km!r} must be >= 0")
    return math.exp(-atm.extinction_per_km * d_km)


@dataclass(frozen=True)
class SatellitePath:
    """Ground-to-space slant path through the whole atmosphere.

    eta = eta_zenith ** sec(theta), valid for zenith angles up to 1 rad;
    the default zenith transmissivity is for clear sky near 800 nm.
    """

    zenith_angle_rad: float = 0.0
    eta_zenith: float = DEFAULT_ETA_ZENITH

    def __post_init__(self):
        if not (math.isfinite(self.zenith_angle_rad) and 0.0 <= self.zenith_angle_rad <= 1.0):
            raise ValidationError(
                f"zenith angle {self.zenith_angle_rad!r} outside [0, 1] rad"
            )
        if not (math.isfinite(self.eta_zenith) and 0.0 < self.eta_zenith <= 1.0):
            raise ValidationError(f"eta_zenith={self.eta_zenith!r} outside (0, 1]")


def satellite_transmissivity(sat: SatellitePath) -> float:
    """Atmospheric factor of the slant path (independent of slant range)."""
    return sat.eta_zenith ** (1.0 / math.cos(sat.zenith_angle_rad))


def satellite_slant_distance_km(altitude_km: float, zenith_angle_rad: float) -> float:
    """Slant range d = h / cos(theta).

    Flat-atmosphere approximation; it ignores Earth's curvature, which
    is acceptable within the 1 rad zenith-angle domain.
    """
    if not (math.isfinite(altitude_km) and altitude_km > 0.0):
        raise ValidationError(f"altitude {altitude_km!r} must be positive")
    if not (math.isfinite(zenith_angle_rad) and 0.0 <= zenith_angle_rad <= 1.0):
        raise ValidationError(f"zenith angle {zenith_angle_rad!r} outside [0, 1] rad")
    return altitude_km / math.cos(zenith_angle_rad)


@dataclass(frozen=True)
class BeamGeometry:
    """Gaussian beam against a circular receiver aperture.

    w0_m is the initial spot size, curvature_m the phase-front radius at
    the transmitter (infinite for a collimated beam, negative allowed
    for a diverging one), aperture_radius_m the receiver radius.
    """

    w0_m: float
    wavelength_m: float
    aperture_radius_m: float
    curvature_m: float = math.inf

    def __post_init__(self):
        if not (math.isfinite(self.w0_m) and self.w0_m > 0.0):
            raise ValidationError(f"w0={self.w0_m!r} must be positive")
        if not (math.isfinite(self.wavelength_m) and self.wavelength_m > 0.0):
            raise ValidationError(f"wavelength {self.wavelength_m!r} must be positive")
        if not (math.isfinite(self.aperture_radius_m) and self.aperture_radius_m > 0.0):
            raise ValidationError(
                f"aperture radius {self.aperture_radius_m!r} must be positive"
            )
        if math.isnan(self.curvature_m) or self.curvature_m == 0.0:
            raise ValidationError(f"curvature {self.curvature_m!r} must be nonzero")

    @property
    def rayleigh_range_m(self) -> float:
        return math.pi * self.w0_m**2 / self.wavelength_m


def beam_spot_size(beam: BeamGeometry, d_m: float) -> float:
    """Spot size w_d = w0 sqrt((1 - d/R0)^2 + (d/d_R)^2) at range d.

    Never smaller than the far-field envelope w0 d / d_R.
    """
    if not (math.isfinite(d_m) and d_m >= 0.0):
        raise ValidationError(f"distance {d_m!r} must be >= 0")
    focus = 0.0 if math.isinf(beam.curvature_m) else d_m / beam.curvature_m
    spread = d_m / beam.rayleigh_range_m
    return beam.w0_m * math.hypot(1.0 - focus, spread)


def diffraction_transmissivity(beam: BeamGeometry, d_m: float) -> float:
    """Fraction 1 - exp(-2 a_R^2 / w_d^2) of the beam caught by the aperture."""
    w = beam_spot_size(beam, d_m)
    return -math.expm1(-2.0 * beam.aperture_radius_m**2 / w**2)


def composite_transmissivity(
    parts: Sequence[Callable[[float], float]], d: float
) -> float:
    """Product of independent loss factors evaluated at the same distance.

    All parts must use the same distance unit.
    """
    if not parts:
        raise ValidationError("composite needs at least one transmissivity factor")
    eta = 1.0
    for f in parts:
        eta *= f(d)
    if not (0.0 <= eta <= 1.0):
        raise ValidationError(f"composite transmissivity {eta!r} outside [0, 1]")
    return eta
