"""Linear probe response: sideband coefficient algebra and transmission.

Implements the closed-form upper-sideband amplitudes of the linearized
system and the input-output transmission coefficient, plus an independent
oracle that assembles and solves the full 6x6 linearized sideband system
with a dense generic solver.  The oracle is the build-time referee for
the closed forms and stays independent of them.

Every function accepts a scalar probe detuning or an ndarray of them; the
coefficient algebra broadcasts elementwise.

Two variants of the M coefficient ship (see ``m_variant``): the
literal published form and a symmetrized form that restores exact
mode-exchange covariance and agrees with the oracle to machine precision.
The symmetrized form is the default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .params import OperatingPoint, SystemParams, drive_amplitudes
from .spectrum import sagnac_shift
from .steady import SteadyState, solve_steady_state

M_VARIANTS = ("symmetrized", "as-printed")
SINGULARITY_FACTOR = 1e3  # times machine epsilon times the natural scale


class SingularityError(Exception):
    """Response denominator on a pole (CLI exit code 5)."""


@dataclass(frozen=True)
class SidebandCoefficients:
    """Coefficient block of the closed-form sideband solution.

    Complex scalars or ndarrays broadcast over the probe detuning axis.
    c_cw/c_ccw hold C (the conjugated lower-sideband factors).
    """

    a_mech: complex
    b_cw: complex
    b_ccw: complex
    c_cw: complex
    c_ccw: complex
    v1: complex
    v2: complex
    n_cw: complex
    n_ccw: complex
    m_coef: complex
    hbar_g2: float  # hbar * g^2 prefactor, for the denominator


@dataclass(frozen=True)
class ProbeResponse:
    """Complex transmission for both probe directions and |t|^2 rates."""

    t_cw: complex
    t_ccw: complex
    big_t_cw: float
    big_t_ccw: float


def _context(p: SystemParams, op: OperatingPoint, delta_p):
    """Sagnac shift, probe detuning and sideband frequency xi (Hz).

    Returns (delta_sag, delta_p, xi).  The upper-sideband factors need
    the difference (delta_c +/- delta_sag) - xi = +/-delta_sag - delta_p,
    which is formed analytically here: the two terms are ~delta_c while
    the difference is ~delta_p, so the naive subtraction loses up to five
    digits of the small result.
    """
    shift = sagnac_shift(p, op.omega_spin)
    if delta_p is None:
        delta_p = op.delta_p
    delta_p = np.asarray(delta_p, dtype=float)
    return shift.delta_sag, delta_p, delta_p + p.delta_c


def sideband_coefficients(p: SystemParams, op: OperatingPoint,
                          s: SteadyState, delta_p=None,
                          m_variant: str = "symmetrized") -> SidebandCoefficients:
    """Evaluate the coefficient block at one operating point.

    The CW-labelled factors carry the CCW-mode detuning and vice versa:
    they are the cross-mode factors that appear in the numerator of each
    direction's closed-form solution.
    """
    if m_variant not in M_VARIANTS:
        raise ValueError(f"m_variant must be one of {M_VARIANTS}")
    dsag, dp_probe, xi = _context(p, op, delta_p)
    g, gc, kap = p.g_om, p.gamma_c, p.kappa
    gx = g * s.x_bar

    a_mech = p.mass * (-xi**2 - 1j * xi * p.gamma_m + p.omega_m**2)
    b_cw = 1j * (-dsag - dp_probe - 1j * gc + gx)
    b_ccw = 1j * (dsag - dp_probe - 1j * gc + gx)
    c_cw = np.conj(1j * ((p.delta_c - dsag) - 1j * gc + gx + xi))
    c_ccw = np.conj(1j * ((p.delta_c + dsag) - 1j * gc + gx + xi))
    v1 = b_cw * b_ccw - kap**2
    v2 = c_cw * c_ccw - kap**2

    n_cw_2 = abs(s.a_cw)**2
    n_ccw_2 = abs(s.a_ccw)**2
    cross = np.conj(s.a_cw) * s.a_ccw + np.conj(s.a_ccw) * s.a_cw
    n_cw = (c_cw * b_cw * n_cw_2 + (c_ccw * b_cw - v2) * n_ccw_2
            + kap * b_cw * cross)
    n_ccw = (c_ccw * b_ccw * n_ccw_2 + (c_cw * b_ccw - v2) * n_cw_2
             + kap * b_ccw * cross)
    c_first = c_ccw if m_variant == "as-printed" else c_cw
    m_coef = ((b_cw * v2 - c_first * v1) * n_cw_2
              + (b_ccw * v2 - c_ccw * v1) * n_ccw_2
              + kap * (v2 - v1) * cross)

    return SidebandCoefficients(
        a_mech=a_mech, b_cw=b_cw, b_ccw=b_ccw, c_cw=c_cw, c_ccw=c_ccw,
        v1=v1, v2=v2, n_cw=n_cw, n_ccw=n_ccw, m_coef=m_coef,
        hbar_g2=HBAR * g**2)


def _denominator(c: SidebandCoefficients):
    d = c.a_mech * c.v1 * c.v2 - 1j * c.hbar_g2 * c.m_coef
    scale = (np.abs(c.a_mech * c.v1 * c.v2)
             + c.hbar_g2 * np.abs(c.m_coef))
    bad = np.abs(d) < SINGULARITY_FACTOR * np.finfo(float).eps * scale
    if np.any(bad) or np.any(scale == 0.0):
        raise SingularityError("response denominator on a pole")
    return d


def probe_amplitudes(c: SidebandCoefficients, eps_p: float):
    """Upper-sideband intracavity amplitudes for CW-input and CCW-input
    probes, from the closed-form solution."""
    d = _denominator(c)
    da_cw = (c.a_mech * c.b_cw * c.v2 + 1j * c.hbar_g2 * c.n_cw) / d * eps_p
    da_ccw = (c.a_mech * c.b_ccw * c.v2 + 1j * c.hbar_g2 * c.n_ccw) / d * eps_p
    return da_cw, da_ccw


def transmission(p: SystemParams, op: OperatingPoint,
                 s: SteadyState | None = None, delta_p=None,
                 m_variant: str = "symmetrized") -> ProbeResponse:
    """Probe transmission t = 1 - gamma_ex * (da+/eps_p) for both
    incidence directions, and the rates T = |t|^2.

    The steady state is probe-independent; pass a precomputed one to
    amortize it over a detuning scan.
    """
    if s is None:
        s = solve_steady_state(p, op)
    c = sideband_coefficients(p, op, s, delta_p=delta_p, m_variant=m_variant)
    gex = p.gamma_ex
    d = _denominator(c)
    t_cw = 1.0 - gex * (c.a_mech * c.b_cw * c.v2
                        + 1j * c.hbar_g2 * c.n_cw) / d
    t_ccw = 1.0 - gex * (c.a_mech * c.b_ccw * c.v2
                         + 1j * c.hbar_g2 * c.n_ccw) / d
    return ProbeResponse(t_cw=t_cw, t_ccw=t_ccw,
                         big_t_cw=np.abs(t_cw)**2,
                         big_t_ccw=np.abs(t_ccw)**2)


def sideband_oracle(p: SystemParams, op: OperatingPoint,
                    s: SteadyState | None = None, delta_p=None,
                    drive: str = "single"):
    """Referee: dense solve of the linearized 6x6 sideband system.

    Unknowns are (dx+, conj(dx-), da_cw+, da_ccw+, conj(da_cw-),
    conj(da_ccw-)).  With ``drive="single"`` the probe enters only the
    mode selected by ``op.direction`` (the convention of the closed
    forms); ``drive="both"`` feeds both modes, the literal bidirectional
    drive of the Hamiltonian, to quantify the difference.

    Returns (da_cw+, da_ccw+) with the same shape as ``delta_p``.
    """
    if drive not in ("single", "both"):
        raise ValueError("drive must be 'single' or 'both'")
    if s is None:
        s = solve_steady_state(p, op)
    dsag, dp_probe, xi = _context(p, op, delta_p)
    g, gc, kap = p.g_om, p.gamma_c, p.kappa
    gx = g * s.x_bar
    eps_p = drive_amplitudes(p)[1]

    dp_flat = np.atleast_1d(dp_probe).ravel()
    xi_flat = np.atleast_1d(xi).ravel()
    out_cw = np.empty(xi_flat.shape, complex)
    out_ccw = np.empty(xi_flat.shape, complex)
    for i, (dpp, x) in enumerate(zip(dp_flat, xi_flat)):
        a_mech = p.mass * (-x**2 - 1j * x * p.gamma_m + p.omega_m**2)
        # own-mode upper factors; the detuning difference is formed
        # analytically, as in the closed forms
        bp_cw = 1j * (dsag - dpp - 1j * gc + gx)
        bp_ccw = 1j * (-dsag - dpp - 1j * gc + gx)
        cp_cw = np.conj(1j * ((p.delta_c + dsag) - 1j * gc + gx + x))
        cp_ccw = np.conj(1j * ((p.delta_c - dsag) - 1j * gc + gx + x))
        hg = HBAR * g
        mat = np.array([
            [1j * g * s.a_cw, 0, bp_cw, -kap, 0, 0],
            [1j * g * s.a_ccw, 0, -kap, bp_ccw, 0, 0],
            [0, -1j * g * np.conj(s.a_cw), 0, 0, cp_cw, -kap],
            [0, -1j * g * np.conj(s.a_ccw), 0, 0, -kap, cp_ccw],
            [a_mech, 0, hg * np.conj(s.a_cw), hg * np.conj(s.a_ccw),
             hg * s.a_cw, hg * s.a_ccw],
            [0, a_mech, hg * np.conj(s.a_cw), hg * np.conj(s.a_ccw),
             hg * s.a_cw, hg * s.a_ccw],
        ])
        rhs = np.zeros(6, complex)
        if drive == "both":
            rhs[0] = rhs[1] = eps_p
        elif op.direction == "cw":
            rhs[0] = eps_p
        else:
            rhs[1] = eps_p
        try:
            sol = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularityError(f"singular sideband system: {exc}") from exc
        out_cw[i], out_ccw[i] = sol[2], sol[3]

    shape = np.shape(xi)
    if shape == ():
        return out_cw[0], out_ccw[0]
    return out_cw.reshape(shape), out_ccw.reshape(shape)
