"""Per-channel fringe decomposition, visibilities and momentum transfers.

Conditioning a two-slit experiment on a detector channel leaves a perfect
fringe with a channel-dependent phase; the observed (marginal) pattern is the
mass-weighted sum of those fringes.  Each channel phase maps to an observable
momentum transfer ``p = phase / separation`` (hbar = 1), defined modulo the
fringe period, and the spread of those phases is what kills the marginal
visibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .apertures import (
    ApertureSetup,
    MomentumGrid,
    Pattern,
    shift_pattern,
    single_aperture_amplitude,
)
from .detectors import DetectorModel, overlap

MASS_TOL = 1e-9
UNITARY_TOL = 1e-9


def wrap_phase(phase):
    """Wrap angles to the interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2.0 * np.pi)


def weighted_iqr(values: np.ndarray, weights: np.ndarray) -> float:
    """Interquartile range of a weighted sample (midpoint CDF convention)."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.size == 0:
        return 0.0
    order = np.argsort(values)
    v, w = values[order], weights[order]
    positions = (np.cumsum(w) - 0.5 * w) / np.sum(w)
    q25, q75 = np.interp([0.25, 0.75], positions, v)
    return float(q75 - q25)


@dataclass(frozen=True)
class FringeComponent:
    """One channel's contribution: fractional mass, contrast, phase, kick."""

    label: int
    mass: float
    visibility: float
    phase: float
    momentum_transfer: float
    phase_defined: bool


@dataclass(frozen=True)
class FringeDecomposition:
    """Channel-resolved fringe table for a detector model and geometry."""

    setup: ApertureSetup
    labels: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    visibilities: np.ndarray = field(repr=False)
    phases: np.ndarray = field(repr=False)
    transfers: np.ndarray = field(repr=False)
    phase_defined: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        total = float(np.sum(self.masses))
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"component masses must sum to 1, got {total!r}")
        for arr in (
            self.labels,
            self.masses,
            self.visibilities,
            self.phases,
            self.transfers,
            self.phase_defined,
        ):
            arr.setflags(write=False)

    @property
    def n_components(self) -> int:
        return len(self.masses)

    def components(self) -> list[FringeComponent]:
        return [
            FringeComponent(
                int(self.labels[i]),
                float(self.masses[i]),
                float(self.visibilities[i]),
                float(self.phases[i]),
                float(self.transfers[i]),
                bool(self.phase_defined[i]),
            )
            for i in range(self.n_components)
        ]


@dataclass(frozen=True)
class TransferHistogram:
    """Mass-weighted histogram of per-channel momentum transfers.

    Channels without a defined phase contribute no histogram mass; their
    total is reported separately.  Spread is summarized by weighted
    interquartile ranges (the second moment of the channel weights need not
    exist, so the IQR is the stable choice; noted in the metadata).
    """

    bin_edges: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    excluded_mass: float
    phase_iqr: float
    transfer_iqr: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.bin_edges.setflags(write=False)
        self.masses.setflags(write=False)


def decompose(model: DetectorModel, setup: ApertureSetup) -> FringeDecomposition:
    """Split a which-path experiment into per-channel fringe components.

    Per channel: mass ~ w*(|a|^2+|b|^2), contrast 2|a||b|/(|a|^2+|b|^2),
    phase arg(a)-arg(b) wrapped to (-pi, pi], kick = phase/separation.
    Channels with both amplitudes zero carry no mass and are dropped.
    """
    abs_a = np.abs(model.amp_a)
    abs_b = np.abs(model.amp_b)
    power = abs_a**2 + abs_b**2
    keep = power > 0.0
    labels = np.arange(model.n_channels)[keep]
    w = model.weights[keep]
    abs_a, abs_b, power = abs_a[keep], abs_b[keep], power[keep]

    masses = w * power
    masses = masses / masses.sum()
    visibilities = 2.0 * abs_a * abs_b / power
    defined = visibilities > 0.0
    raw = np.angle(model.amp_a[keep]) - np.angle(model.amp_b[keep])
    phases = np.where(defined, wrap_phase(raw), 0.0)
    transfers = phases / setup.separation

    metadata: dict = {}
    unwrapped = model.metadata.get("unwrapped_phase")
    if unwrapped is not None:
        metadata["unwrapped_phase"] = np.asarray(unwrapped)[keep]
    return FringeDecomposition(
        setup=setup,
        labels=labels,
        masses=masses,
        visibilities=visibilities,
        phases=phases,
        transfers=transfers,
        phase_defined=defined,
        metadata=metadata,
    )


def _envelope_density(setup: ApertureSetup, grid: MomentumGrid) -> np.ndarray:
    return single_aperture_amplitude(setup.profile, grid).density()


def envelope_pattern(setup: ApertureSetup, grid: MomentumGrid) -> Pattern:
    """Single-aperture diffraction pattern, normalized."""
    env = _envelope_density(setup, grid)
    return Pattern(grid, env / grid.integrate(env))


def marginal_pattern(model: DetectorModel, setup: ApertureSetup, grid: MomentumGrid) -> Pattern:
    """Screen pattern with the detector traced out, normalized.

    Mass-weighted incoherent sum of the per-channel fringes: the channel sum
    collapses to the state overlap, so the result is a single fringe with
    visibility |overlap| and phase arg(overlap).
    """
    env = _envelope_density(setup, grid)
    fringe = 1.0 + np.real(overlap(model) * np.exp(1j * grid.values * setup.separation))
    values = env * fringe
    return Pattern(grid, values / grid.integrate(values))


def conditional_pattern(
    model: DetectorModel, setup: ApertureSetup, grid: MomentumGrid, label: int
) -> Pattern:
    """Screen pattern in coincidence with one detector channel, normalized."""
    ch = model.channel(label)
    abs_a, abs_b = abs(ch.amp_a), abs(ch.amp_b)
    power = abs_a**2 + abs_b**2
    if power == 0.0:
        raise ValueError(f"channel {label} has zero amplitude on both paths")
    visibility = 2.0 * abs_a * abs_b / power
    phase = float(wrap_phase(np.angle(ch.amp_a) - np.angle(ch.amp_b))) if visibility else 0.0
    env = _envelope_density(setup, grid)
    values = env * (1.0 + visibility * np.cos(grid.values * setup.separation + phase))
    return Pattern(grid, values / grid.integrate(values))


def momentum_kick_pattern(
    decomposition: FringeDecomposition, two_slit: Pattern, envelope: Pattern
) -> Pattern:
    """Narrow-aperture reading of the marginal: kicked copies of the ideal pattern.

    Each channel displaces the ideal two-slit pattern by its momentum
    transfer; contrast below one leaves a fringeless envelope remainder:
    ``sum_i mass_i * [(1-V_i)*envelope + V_i*two_slit(p + kick_i)]``.
    """
    if two_slit.grid != envelope.grid:
        raise ValueError("two-slit pattern and envelope must share one grid")
    grid = two_slit.grid
    values = np.zeros(grid.n_points)
    plain_mass = 0.0
    for i in range(decomposition.n_components):
        mass = float(decomposition.masses[i])
        vis = float(decomposition.visibilities[i])
        plain_mass += mass * (1.0 - vis)
        if vis > 0.0:
            kicked = shift_pattern(two_slit, float(decomposition.transfers[i]))
            values += mass * vis * kicked.values
    values += plain_mass * envelope.values
    return Pattern(grid, values / grid.integrate(values))


def transfer_histogram(decomposition: FringeDecomposition, bins: int) -> TransferHistogram:
    """Histogram the channel momentum kicks over one fringe period."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    d = decomposition.setup.separation
    defined = decomposition.phase_defined
    transfers = decomposition.transfers[defined]
    weights = decomposition.masses[defined]
    masses, edges = np.histogram(
        transfers, bins=bins, range=(-np.pi / d, np.pi / d), weights=weights
    )
    metadata = {"spread_measure": "weighted interquartile range"}
    unwrapped = decomposition.metadata.get("unwrapped_phase")
    if unwrapped is not None:
        metadata["unwrapped_phase_iqr"] = weighted_iqr(unwrapped[defined], weights)
    return TransferHistogram(
        bin_edges=edges,
        masses=masses,
        excluded_mass=float(np.sum(decomposition.masses[~defined])),
        phase_iqr=weighted_iqr(decomposition.phases[defined], weights),
        transfer_iqr=weighted_iqr(transfers, weights),
        metadata=metadata,
    )


def fitted_visibility(pattern: Pattern, setup: ApertureSetup) -> tuple[float, float]:
    """Measure (visibility, phase) of a pattern by least squares.

    The pattern divided by its envelope is projected onto
    ``{1, cos(p d), sin(p d)}`` over the central half of the grid.  Robust to
    envelope curvature, unlike peak picking.
    """
    grid = pattern.grid
    if 2.0 * grid.p_max * setup.separation < 4.0 * 2.0 * np.pi - 1e-9:
        raise ValueError("grid must span at least 4 fringe periods for a stable fit")
    env = _envelope_density(setup, grid)
    window = np.abs(grid.values) <= grid.p_max / 2.0
    env_win = env[window]
    if env_win.min() < 1e-12 * env.max():
        raise ValueError("envelope vanishes inside the fit window; fit is ill-conditioned")
    ratio = pattern.values[window] / env_win
    arg = grid.values[window] * setup.separation
    design = np.column_stack([np.ones(arg.size), np.cos(arg), np.sin(arg)])
    (offset, cos_coef, sin_coef), *_ = np.linalg.lstsq(design, ratio, rcond=None)
    if offset <= 0.0:
        raise ValueError("pattern/envelope ratio has nonpositive mean; fit is ill-conditioned")
    visibility = float(np.hypot(cos_coef, sin_coef) / offset)
    visibility = min(max(visibility, 0.0), 1.0 + 1e-6)
    phase = float(np.arctan2(-sin_coef, cos_coef))
    return visibility, phase


def rect_autocorrelation(width: float, lag: float) -> float:
    """Normalized autocorrelation of a unit rectangle: max(0, 1 - lag/width).

    This is the closed form behind the cavity model's marginal visibility:
    the sinc^2 mode weights are the power spectrum of a rectangle of the
    cavity length, so the visibility at phase lag ``width`` is exactly zero.
    """
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")
    if lag < 0:
        raise ValueError(f"lag must be nonnegative, got {lag}")
    return max(0.0, 1.0 - lag / width)


def rotate_basis(model: DetectorModel, unitary: np.ndarray) -> DetectorModel:
    """Re-express a flat-weight detector model in a rotated channel basis.

    The model must have all weights folded into the amplitudes first (see
    ``flatten_weights``).  Norms and the state overlap are preserved; the
    per-channel fringe table generally is not, which is the whole point of
    basis freedom.
    """
    u = np.asarray(unitary, dtype=complex)
    n = model.n_channels
    if u.shape != (n, n):
        raise ValueError(f"unitary shape {u.shape} does not match {n} channels")
    if np.max(np.abs(model.weights - 1.0)) > 1e-12:
        raise ValueError("model must be in flat-weight form; apply flatten_weights first")
    deviation = float(np.max(np.abs(u @ u.conj().T - np.eye(n))))
    if deviation > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary: max |U U^H - I| = {deviation:g}")
    metadata = {"kind": model.metadata.get("kind", "custom"), "rotated": True}
    return DetectorModel(
        weights=np.ones(n),
        amp_a=u @ model.amp_a,
        amp_b=u @ model.amp_b,
        metadata=metadata,
    )
