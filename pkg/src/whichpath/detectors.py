"""Which-path detector models as weighted channel expansions.

A detector that marks the particle's path ends up in one of two states, one
per aperture.  Both states are expanded over a common orthonormal channel
basis: each channel carries a nonnegative weight and a pair of unit-scale
complex amplitudes holding the path-dependent phases.  Two physical
constructors are provided (a spontaneously emitted photon, and a pair of
single-mode cavities acting as path markers) plus a free-form one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

NORM_TOL = 1e-9

# Validity floor for the cavity model's momentum grid: the sinc^2 weight must
# be resolved far into its tail before the marginal visibility can vanish.
MIN_CAVITY_KSPAN = 40.0 * np.pi


@dataclass(frozen=True)
class DipoleSpec:
    """Transition dipole orientation: ``isotropic`` or ``fixed`` along a unit vector."""

    kind: str
    direction: tuple[float, float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("isotropic", "fixed"):
            raise ValueError(f"unknown dipole kind {self.kind!r}")
        if self.kind == "fixed":
            if self.direction is None:
                raise ValueError("fixed dipole needs a direction")
            norm = float(np.linalg.norm(self.direction))
            if abs(norm - 1.0) > 1e-12:
                raise ValueError(f"dipole direction must be unit length, |mu| = {norm}")


def isotropic_dipole() -> DipoleSpec:
    return DipoleSpec("isotropic")


def fixed_dipole(direction: tuple[float, float, float]) -> DipoleSpec:
    d = np.asarray(direction, dtype=float)
    n = float(np.linalg.norm(d))
    if n == 0.0:
        raise ValueError("dipole direction must be nonzero")
    return DipoleSpec("fixed", direction=tuple(d / n))


@dataclass(frozen=True)
class PhotonQuadrature:
    """Angular (and optionally spectral) discretization of photon emission.

    ``n_theta`` midpoint nodes in the polar angle and ``n_phi`` uniform
    azimuthal nodes cover the emission sphere.  With ``n_omega > 1`` an outer
    uniform grid over the photon wavenumber is added, spanning
    ``omega_window`` linewidths either side of resonance.
    """

    n_theta: int = 64
    n_phi: int = 64
    n_omega: int = 1
    omega_window: float = 40.0

    def __post_init__(self) -> None:
        if self.n_theta < 4 or self.n_phi < 4:
            raise ValueError(
                f"quadrature too coarse: n_theta={self.n_theta}, n_phi={self.n_phi} (need >= 4)"
            )
        if self.n_omega < 1:
            raise ValueError(f"n_omega must be >= 1, got {self.n_omega}")
        if self.omega_window <= 0:
            raise ValueError(f"omega_window must be positive, got {self.omega_window}")


@dataclass(frozen=True)
class DetectorChannel:
    """One basis channel: weight plus the two path amplitudes."""

    label: int
    weight: float
    amp_a: complex
    amp_b: complex


@dataclass(frozen=True)
class DetectorModel:
    """Ordered channel expansion of the two detector states.

    Invariant: both states are unit-normalized, i.e. sum(w * |amp|^2) == 1
    for each path.  Instances are immutable and safe to share.
    """

    weights: np.ndarray = field(repr=False)
    amp_a: np.ndarray = field(repr=False)
    amp_b: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for arr in (self.weights, self.amp_a, self.amp_b):
            arr.setflags(write=False)
        if not (len(self.weights) == len(self.amp_a) == len(self.amp_b)):
            raise ValueError("channel arrays must have equal length")
        for name, state in (("A", self.amp_a), ("B", self.amp_b)):
            norm = float(np.sum(self.weights * np.abs(state) ** 2))
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"path-{name} state is not normalized: {norm!r}")

    @property
    def n_channels(self) -> int:
        return len(self.weights)

    @property
    def labels(self) -> range:
        return range(self.n_channels)

    def channel(self, label: int) -> DetectorChannel:
        idx = int(label)
        if not 0 <= idx < self.n_channels:
            raise LookupError(f"no channel labelled {label!r}")
        return DetectorChannel(
            idx, float(self.weights[idx]), complex(self.amp_a[idx]), complex(self.amp_b[idx])
        )

    def __iter__(self) -> Iterator[DetectorChannel]:
        return (self.channel(i) for i in self.labels)


def _normalized_state(weights: np.ndarray, amp: np.ndarray, path: str) -> np.ndarray:
    # scale out the largest magnitude first so squaring cannot underflow
    scale = float(np.max(np.abs(amp)))
    if scale == 0.0:
        raise ValueError(f"degenerate detector state: path {path} has zero total amplitude")
    reduced = amp / scale
    norm = float(np.sum(weights * np.abs(reduced) ** 2))
    if norm <= 0.0:
        raise ValueError(f"degenerate detector state: path {path} has zero total amplitude")
    return reduced / np.sqrt(norm)


def _normalized_model(
    weights: np.ndarray, amp_a: np.ndarray, amp_b: np.ndarray, metadata: dict
) -> DetectorModel:
    if np.any(weights < 0):
        raise ValueError("channel weights must be nonnegative")
    return DetectorModel(
        weights=weights.astype(float),
        amp_a=_normalized_state(weights, amp_a, "A"),
        amp_b=_normalized_state(weights, amp_b, "B"),
        metadata=metadata,
    )


def _emission_sphere(quad: PhotonQuadrature, dipole: DipoleSpec):
    """Midpoint nodes on the sphere with polar axis along the slit axis x.

    The midpoint rule in theta converges at second order, so halving the step
    visibly halves the overlap error; spectrally exact rules would sit at the
    roundoff floor already for modest node counts and make convergence
    unobservable.  Returns (weight, x-direction-cosine) arrays.
    """
    h_theta = np.pi / quad.n_theta
    theta = (np.arange(quad.n_theta) + 0.5) * h_theta
    phi = (np.arange(quad.n_phi) + 0.5) * (2.0 * np.pi / quad.n_phi)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")

    base = np.sin(tt) * h_theta * (2.0 * np.pi / quad.n_phi)
    if dipole.kind == "isotropic":
        # polarization-summed emission factor averaged over dipole
        # orientations is direction-independent
        factor = np.full_like(base, 2.0 / 3.0)
    else:
        mu = np.asarray(dipole.direction, dtype=float)
        k_hat = np.stack(
            [np.cos(tt), np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp)], axis=-1
        )
        factor = 1.0 - (k_hat @ mu) ** 2
    weights = (base * factor).ravel()
    cos_x = np.cos(tt).ravel()
    return weights, cos_x


def heisenberg_model(
    k_gamma: float,
    separation: float,
    gamma_over_c: float = 0.0,
    dipole: DipoleSpec | None = None,
    quadrature: PhotonQuadrature | None = None,
) -> DetectorModel:
    """Path marking by one spontaneously emitted free photon.

    Channels are emission directions on the sphere ``|k| = k_gamma`` weighted
    by the polarization-summed dipole factor; each carries the phase
    ``k_x * separation`` between the two aperture positions.  With
    ``n_omega > 1`` and a finite linewidth, an outer Lorentzian wavenumber
    quadrature is added on top of the angular one.
    """
    if k_gamma <= 0:
        raise ValueError(f"k_gamma must be positive, got {k_gamma}")
    if gamma_over_c < 0:
        raise ValueError(f"gamma_over_c must be nonnegative, got {gamma_over_c}")
    if separation <= 0:
        raise ValueError(f"separation must be positive, got {separation}")
    dipole = dipole or isotropic_dipole()
    quad = quadrature or PhotonQuadrature()

    ang_weights, cos_x = _emission_sphere(quad, dipole)

    if quad.n_omega > 1:
        if gamma_over_c == 0.0:
            raise ValueError("a wavenumber quadrature (n_omega > 1) needs a finite linewidth")
        half = quad.omega_window * gamma_over_c
        k_lo = max(k_gamma - half, 1e-12 * k_gamma)
        k_nodes = np.linspace(k_lo, k_gamma + half, quad.n_omega)
        lorentz = 1.0 / ((k_nodes - k_gamma) ** 2 + gamma_over_c**2 / 4.0)
        weights = np.outer(lorentz, ang_weights).ravel()
        k_x = np.outer(k_nodes, cos_x).ravel()
    else:
        weights = ang_weights
        k_x = k_gamma * cos_x

    phase = k_x * separation
    amp_a = np.exp(0.5j * phase)
    amp_b = np.exp(-0.5j * phase)
    weights = weights / weights.sum()
    metadata = {
        "kind": "heisenberg",
        "k_gamma": k_gamma,
        "gamma_over_c": gamma_over_c,
        "separation": separation,
        "dipole": dipole,
        "quadrature": quad,
        "k_x": k_x,
        "unwrapped_phase": phase,
    }
    return _normalized_model(weights, amp_a, amp_b, metadata)


def micromaser_model(
    cavity_length: float,
    separation: float,
    k_max: float | None = None,
    n_k: int = 8001,
) -> DetectorModel:
    """Path marking by one photon stored in either of two adjacent cavities.

    Channels are uniform transverse-wavenumber nodes weighted by the cavity
    mode density ``sinc^2(k_x L / 2)``; the relative phase between the two
    cavity positions is ``k_x * L``.  The grid must extend far into the
    sinc^2 tail (k_max * L >= 40*pi); the default reaches 160*pi, which keeps
    the hard-truncation bias of the oscillatory tail below 1e-3.
    """
    if separation <= 0:
        raise ValueError(f"separation must be positive, got {separation}")
    if cavity_length <= separation:
        raise ValueError(
            "cavities of length "
            f"{cavity_length} centered {separation} apart would overlap the apertures; "
            "need cavity_length > separation"
        )
    if k_max is None:
        k_max = 160.0 * np.pi / cavity_length
    if n_k < 2:
        raise ValueError(f"n_k must be >= 2, got {n_k}")
    if k_max * cavity_length < MIN_CAVITY_KSPAN - 1e-9:
        raise ValueError(
            f"k_max*cavity_length = {k_max * cavity_length:g} is below the validity "
            f"floor {MIN_CAVITY_KSPAN:g}"
        )

    k_x = np.linspace(-k_max, k_max, n_k)
    dk = 2.0 * k_max / (n_k - 1)
    phase = k_x * cavity_length
    weights = np.sinc(phase / 2.0 / np.pi) ** 2 * dk
    weights = weights / weights.sum()
    amp_a = np.exp(0.5j * phase)
    amp_b = np.exp(-0.5j * phase)
    metadata = {
        "kind": "micromaser",
        "cavity_length": cavity_length,
        "separation": separation,
        "k_max": k_max,
        "n_k": n_k,
        "k_x": k_x,
        "unwrapped_phase": phase,
    }
    return _normalized_model(weights, amp_a, amp_b, metadata)


def custom_model(channels: list[tuple[float, complex, complex]]) -> DetectorModel:
    """Detector from explicit ``(weight, amp_a, amp_b)`` triples.

    Both path states are rescaled to unit norm; the relative structure of the
    channels is preserved.
    """
    if not channels:
        raise ValueError("need at least one channel")
    weights = np.array([float(c[0]) for c in channels])
    amp_a = np.array([complex(c[1]) for c in channels])
    amp_b = np.array([complex(c[2]) for c in channels])
    return _normalized_model(weights, amp_a, amp_b, {"kind": "custom"})


def overlap(model: DetectorModel) -> complex:
    """Inner product of the two detector states, <state_B | state_A>.

    Its magnitude is the marginal fringe visibility and its argument the
    fringe phase; Cauchy-Schwarz bounds the magnitude by 1.
    """
    return complex(np.sum(model.weights * np.conj(model.amp_b) * model.amp_a))


def flatten_weights(model: DetectorModel) -> DetectorModel:
    """Fold channel weights into the amplitudes (all weights become 1).

    Basis rotations act on plain amplitude vectors, so they require this form.
    """
    root = np.sqrt(model.weights)
    return DetectorModel(
        weights=np.ones_like(model.weights),
        amp_a=model.amp_a * root,
        amp_b=model.amp_b * root,
        metadata=dict(model.metadata, flattened=True),
    )


def sinc_visibility(x: float, decay: float = 0.0) -> float:
    """Closed-form visibility for an isotropically oriented emitter.

    ``sin(x)/x * exp(-decay)`` where ``x`` is the phase spread (wavenumber
    times slit separation) and ``decay`` the propagation damping exponent;
    the x -> 0 limit is ``exp(-decay)``.
    """
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if decay < 0:
        raise ValueError(f"decay must be nonnegative, got {decay}")
    return float(np.sinc(x / np.pi) * np.exp(-decay))
