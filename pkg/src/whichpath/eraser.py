"""Quantum-eraser constructions: symmetric detector basis and coincidence fringes.

Projecting an ideal path detector onto the symmetric/antisymmetric
superposition of its two states restores unit-contrast fringes in
coincidence, fringes in one output port and anti-fringes in the other.  The
two conditional patterns always add up to the fringeless single-slit sum, no
matter what phase sits between the detector paths, which is the
no-signalling sum rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .apertures import ApertureSetup, MomentumGrid, Pattern
from .analysis import envelope_pattern, fitted_visibility
from .detectors import DetectorModel, overlap

ORTHOGONALITY_TOL = 1e-6

PORT_CONVENTION = {
    "plus": "detector D1 (symmetric port)",
    "minus": "detector D2 (antisymmetric port)",
    "phase": "chi is inserted on the B path before the 50-50 combination",
}


@dataclass(frozen=True)
class EraserResult:
    """Coincidence patterns for the two eraser ports at one phase setting.

    Each conditional pattern carries its detection probability (mass 1/2), so
    ``pattern_plus + pattern_minus`` equals the envelope pointwise.
    """

    pattern_plus: Pattern
    pattern_minus: Pattern
    envelope: Pattern
    chi: float
    p_plus: float
    p_minus: float
    metadata: dict = field(default_factory=lambda: dict(PORT_CONVENTION))


@dataclass(frozen=True)
class EraserSweepPoint:
    chi: float
    visibility: float
    phase: float


def plus_minus_basis(model: DetectorModel) -> DetectorModel:
    """Re-express an ideal which-path detector in its +/- superposition basis.

    Requires (near-)orthogonal detector states.  The output has exactly two
    channels: the symmetric one with equal path amplitudes (zero fringe
    phase) and the antisymmetric one with opposite sign (phase pi, i.e. a
    momentum transfer of half a fringe period).
    """
    o = overlap(model)
    if abs(o) > ORTHOGONALITY_TOL:
        raise ValueError(
            f"detector states are not orthogonal: |overlap| = {abs(o):.3e} "
            f"(need <= {ORTHOGONALITY_TOL:g})"
        )
    root = np.sqrt(model.weights)
    a = model.amp_a * root
    b = model.amp_b * root

    v_plus = (b + a) / np.sqrt(2.0)
    v_minus = (b - a) / np.sqrt(2.0)
    e_plus = v_plus / np.linalg.norm(v_plus)
    residual = v_minus - (e_plus.conj() @ v_minus) * e_plus
    e_minus = residual / np.linalg.norm(residual)

    amp_a = np.array([e_plus.conj() @ a, e_minus.conj() @ a])
    amp_b = np.array([e_plus.conj() @ b, e_minus.conj() @ b])
    metadata = {"kind": "plus_minus", "channel_names": ("plus", "minus"), **PORT_CONVENTION}
    return DetectorModel(weights=np.ones(2), amp_a=amp_a, amp_b=amp_b, metadata=metadata)


def eraser_patterns(
    setup: ApertureSetup,
    grid: MomentumGrid,
    chi: float,
    blocked: str | None = None,
) -> EraserResult:
    """Coincidence patterns behind the two eraser ports for phase ``chi``.

    The two slit waves are combined as ``(psi_A +/- e^{i chi} psi_B)/sqrt(2)``;
    for point apertures the ports show ``(1 +/- cos(p d + chi))/2`` times the
    envelope.  ``blocked`` ("A" or "B") shuts one slit, which removes the
    interference and splits the open slit's pattern evenly between the ports.
    """
    if blocked not in (None, "A", "B"):
        raise ValueError(f"blocked must be None, 'A' or 'B', got {blocked!r}")
    envelope = envelope_pattern(setup, grid)
    env = envelope.values
    frac_a, frac_b = {None: (0.5, 0.5), "A": (0.0, 1.0), "B": (1.0, 0.0)}[blocked]
    cross = np.sqrt(frac_a * frac_b) * np.cos(grid.values * setup.separation + chi)
    plus = 0.5 * env * (frac_a + frac_b + 2.0 * cross)
    minus = 0.5 * env * (frac_a + frac_b - 2.0 * cross)
    return EraserResult(
        pattern_plus=Pattern(grid, plus, normalized=False),
        pattern_minus=Pattern(grid, minus, normalized=False),
        envelope=envelope,
        chi=chi,
        p_plus=0.0,
        p_minus=np.pi / setup.separation,
    )


def eraser_phase_sweep(
    setup: ApertureSetup, grid: MomentumGrid, n_chi: int
) -> list[EraserSweepPoint]:
    """Fitted (visibility, phase) of the symmetric port over a phase sweep.

    ``n_chi`` settings uniform over [0, 2*pi).  For point apertures the
    fitted phase tracks chi exactly and the visibility stays at one.
    """
    if n_chi < 2:
        raise ValueError(f"n_chi must be >= 2, got {n_chi}")
    points = []
    for chi in 2.0 * np.pi * np.arange(n_chi) / n_chi:
        result = eraser_patterns(setup, grid, float(chi))
        visibility, phase = fitted_visibility(result.pattern_plus, setup)
        points.append(EraserSweepPoint(float(chi), visibility, phase))
    return points
