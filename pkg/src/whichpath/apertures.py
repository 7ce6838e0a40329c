"""Momentum-space amplitudes and fringe patterns for double-aperture geometries.

Everything lives in the far field: an aperture profile turns into a complex
momentum-space amplitude, and a two-slit experiment with separation ``d``
produces an intensity ``|amplitude|^2 * (1 + V*cos(p*d + phi))``.  Units are
hbar = 1 throughout: lengths in one arbitrary unit, momenta in the inverse
unit, so h = 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Interpolated pattern values more negative than this are treated as real
# errors instead of roundoff and rejected.
NEGATIVE_CLIP = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform symmetric sampling of transverse momentum on [-p_max, +p_max]."""

    p_max: float
    n_points: int

    def __post_init__(self) -> None:
        if self.p_max <= 0:
            raise ValueError(f"p_max must be positive, got {self.p_max}")
        if self.n_points < 2:
            raise ValueError(f"n_points must be >= 2, got {self.n_points}")
        p = np.linspace(-self.p_max, self.p_max, self.n_points)
        # antisymmetrize so p[j] == -p[n-1-j] holds bitwise
        object.__setattr__(self, "_values", _readonly((p - p[::-1]) / 2.0))

    @property
    def values(self) -> np.ndarray:
        return self._values  # type: ignore[attr-defined]

    @property
    def spacing(self) -> float:
        return 2.0 * self.p_max / (self.n_points - 1)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.trapezoid(values, dx=self.spacing))


def default_grid(separation: float, n_points: int = 4096) -> MomentumGrid:
    """Default grid: 8 fringe periods either side of zero, 4096 samples."""
    return MomentumGrid(p_max=8.0 * (2.0 * np.pi / separation), n_points=n_points)


@dataclass(frozen=True)
class ApertureProfile:
    """Single-aperture shape: ``point``, ``rectangular`` (full width) or
    ``gaussian`` (rms width of the transmitted intensity)."""

    kind: str
    width: float | None = None
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("point", "rectangular", "gaussian"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.kind == "rectangular" and (self.width is None or self.width <= 0):
            raise ValueError("rectangular profile needs a positive width")
        if self.kind == "gaussian" and (self.sigma is None or self.sigma <= 0):
            raise ValueError("gaussian profile needs a positive sigma")


def point_profile() -> ApertureProfile:
    return ApertureProfile("point")


def rectangular_profile(width: float) -> ApertureProfile:
    return ApertureProfile("rectangular", width=width)


def gaussian_profile(sigma: float) -> ApertureProfile:
    return ApertureProfile("gaussian", sigma=sigma)


@dataclass(frozen=True)
class ApertureSetup:
    """Two-slit geometry: separation, single-slit profile, particle wavelength."""

    separation: float
    profile: ApertureProfile
    wavelength: float

    def __post_init__(self) -> None:
        if self.separation <= 0:
            raise ValueError(f"separation must be positive, got {self.separation}")
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if (
            self.profile.kind == "rectangular"
            and self.profile.width is not None
            and self.profile.width >= self.separation
        ):
            raise ValueError(
                "rectangular width must be smaller than the separation "
                f"(got width={self.profile.width}, separation={self.separation})"
            )


@dataclass(frozen=True)
class ComplexSpectrum:
    """Complex momentum-space amplitude sampled on a grid, unit L2 norm."""

    grid: MomentumGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if len(self.values) != self.grid.n_points:
            raise ValueError("value count does not match the grid")
        object.__setattr__(self, "values", _readonly(np.array(self.values, dtype=complex)))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


@dataclass(frozen=True)
class Pattern:
    """Nonnegative intensity distribution over a momentum grid.

    ``normalized`` marks distributions whose trapezoid integral is 1; patterns
    carrying a detection probability (e.g. coincidence conditionals) keep
    their fractional mass and are not flagged.
    """

    grid: MomentumGrid
    values: np.ndarray = field(repr=False)
    normalized: bool = True

    def __post_init__(self) -> None:
        if len(self.values) != self.grid.n_points:
            raise ValueError("value count does not match the grid")
        v = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ValueError("pattern values must be finite")
        if np.any(v < 0):
            worst = float(v.min())
            if worst < -NEGATIVE_CLIP:
                raise ValueError(f"pattern values must be nonnegative (min {worst:g})")
            v = np.clip(v, 0.0, None)
        object.__setattr__(self, "values", _readonly(v))

    def mass(self) -> float:
        return self.grid.integrate(self.values)


def single_aperture_amplitude(profile: ApertureProfile, grid: MomentumGrid) -> ComplexSpectrum:
    """Momentum-space amplitude of one aperture, normalized on the grid.

    point      -> flat amplitude
    rectangular(a) -> sin(p a/2)/(p a/2)
    gaussian(s)    -> exp(-s^2 p^2), i.e. momentum rms 1/(2 s)
    """
    p = grid.values
    if profile.kind == "point":
        values = np.ones_like(p, dtype=complex)
    elif profile.kind == "rectangular":
        a = float(profile.width)  # type: ignore[arg-type]
        values = np.sinc(p * a / 2.0 / np.pi).astype(complex)
    else:
        s = float(profile.sigma)  # type: ignore[arg-type]
        values = np.exp(-((s * p) ** 2)).astype(complex)
    norm = grid.integrate(np.abs(values) ** 2)
    return ComplexSpectrum(grid, values / np.sqrt(norm))


def fringe_pattern(
    spectrum: ComplexSpectrum, separation: float, visibility: float, phase: float
) -> Pattern:
    """Two-slit pattern ``|amp|^2 * (1 + V cos(p d + phi))``, normalized."""
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility}")
    p = spectrum.grid.values
    values = spectrum.density() * (1.0 + visibility * np.cos(p * separation + phase))
    norm = spectrum.grid.integrate(values)
    return Pattern(spectrum.grid, values / norm)


def two_slit_pattern(spectrum: ComplexSpectrum, separation: float) -> Pattern:
    """Ideal unit-visibility, zero-phase two-slit pattern."""
    return fringe_pattern(spectrum, separation, visibility=1.0, phase=0.0)


def shift_pattern(pattern: Pattern, shift: float) -> Pattern:
    """Evaluate ``P(p + shift)`` by linear interpolation.

    Values that fall off the grid are taken as zero.  The result is not
    renormalized; the caller decides whether the lost tail matters.
    """
    if abs(shift) > pattern.grid.p_max:
        raise ValueError(
            f"shift {shift:g} exceeds the grid half-width {pattern.grid.p_max:g}"
        )
    p = pattern.grid.values
    values = np.interp(p + shift, p, pattern.values, left=0.0, right=0.0)
    return Pattern(pattern.grid, values, normalized=False)


def direction_to_momentum(direction_cosine: float, wavelength: float) -> float:
    """Transverse momentum seen at a far-field direction cosine (hbar = 1)."""
    if abs(direction_cosine) > 1.0:
        raise ValueError(f"direction cosine must lie in [-1, 1], got {direction_cosine}")
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    return direction_cosine * 2.0 * np.pi / wavelength
