"""Sagnac-Fizeau shift, two-mode non-Hermitian spectrum and the EP.

All quantities here are cyclic (Hz), like the rest of the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT
from .params import SystemParams

EP_TOL_FACTOR = 1e-6  # |delta_sag - kappa| <= factor*kappa classifies as EP


@dataclass(frozen=True)
class SagnacShift:
    """Rotation-induced shift and the two shifted detunings (Hz)."""

    delta_sag: float
    delta_plus: float   # detuning of the CW mode, delta_c + delta_sag
    delta_minus: float  # detuning of the CCW mode, delta_c - delta_sag


@dataclass(frozen=True)
class Eigenpair:
    """Eigenfrequencies of the two-mode optical Hamiltonian (Hz)."""

    omega_plus: complex
    omega_minus: complex
    phase: str  # "APTS", "EP" or "APTB"


def sagnac_coefficient(p: SystemParams) -> float:
    """d(delta_sag)/d(omega_spin): Hz of shift per Hz of spin speed."""
    bracket = (1.0 - 1.0 / p.n_ref**2
               - (p.lambda_0 / p.n_ref) * p.dn_dlambda)
    return p.n_ref * p.radius * p.omega_c / C_LIGHT * bracket


def sagnac_shift(p: SystemParams, omega_spin: float) -> SagnacShift:
    """Sagnac-Fizeau shift of the counter-propagating modes at spin speed
    ``omega_spin`` (Hz), and the resulting detunings delta_c +/- delta_sag."""
    if omega_spin < 0.0:
        raise ValueError("omega_spin must be >= 0")
    ds = sagnac_coefficient(p) * omega_spin
    return SagnacShift(delta_sag=ds,
                       delta_plus=p.delta_c + ds,
                       delta_minus=p.delta_c - ds)


def hamiltonian(p: SystemParams, shift: SagnacShift) -> np.ndarray:
    """2x2 non-Hermitian optical Hamiltonian in the (CW, CCW) basis, Hz."""
    return np.array(
        [[shift.delta_plus - 1j * p.gamma_c, 1j * p.kappa],
         [1j * p.kappa, shift.delta_minus - 1j * p.gamma_c]])


def eigenfrequencies(p: SystemParams, shift: SagnacShift) -> Eigenpair:
    """Closed-form eigenpair delta_c - i gamma_c +/- sqrt(dsag^2 - kappa^2).

    Below the EP the root is taken as +i*sqrt(kappa^2 - dsag^2) so the
    plus branch is always the slowly decaying mode (Im omega_+ >= Im
    omega_-), which keeps sweeps branch-continuous.
    """
    ds, k = shift.delta_sag, p.kappa
    disc = ds * ds - k * k
    root = 1j * np.sqrt(-disc) if disc < 0.0 else complex(np.sqrt(disc))
    center = p.delta_c - 1j * p.gamma_c
    if abs(ds - k) <= EP_TOL_FACTOR * k:
        phase = "EP"
    elif ds < k:
        phase = "APTS"
    else:
        phase = "APTB"
    return Eigenpair(omega_plus=center + root,
                     omega_minus=center - root,
                     phase=phase)


def ep_speed(p: SystemParams) -> float:
    """Spin speed (Hz) at which the Sagnac shift equals kappa.

    The shift is linear in the spin speed, so the EP condition inverts in
    closed form.  Degenerate geometry (nonpositive Sagnac coefficient)
    has no EP at any speed.
    """
    coeff = sagnac_coefficient(p)
    if coeff <= 0.0:
        raise ValueError(
            "degenerate geometry: Sagnac coefficient is nonpositive "
            f"(n_ref={p.n_ref}, dn_dlambda={p.dn_dlambda})")
    return p.kappa / coeff


def apt_defect(p: SystemParams, shift: SagnacShift) -> float:
    """Max-norm anticommutation defect of the optical Hamiltonian with PT.

    P is mode exchange (sigma_x), T complex conjugation; the defect
    sigma_x conj(H) sigma_x + H equals 2*delta_c*Identity analytically,
    so this returns 0 exactly when the pump is tuned to resonance.
    """
    h = hamiltonian(p, shift)
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    return float(np.max(np.abs(sx @ np.conj(h) @ sx + h)))
