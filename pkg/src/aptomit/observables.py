"""Derived observables: isolation ratio and group delay or advance.

The group delay is the probe-frequency derivative of the transmission
phase, evaluated with an unwrap-safe central difference: the phase
increment is read off arg(t(dp+h) * conj(t(dp-h))), which never crosses a
branch cut for phase steps below pi, so no unwrapping is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import TWO_PI
from .params import OperatingPoint, SystemParams
from .response import ProbeResponse, SingularityError, transmission
from .steady import SteadyState, solve_steady_state

T_DIP_FLOOR = 1e-12    # |t| below this at a stencil point is a dip singularity
DELAY_REL_TOL = 1e-6   # adaptive step refinement target
H_MIN_FACTOR = 1e-6    # smallest step, relative to gamma_c


class UndefinedIsolationError(SingularityError):
    """Isolation ratio diverges: one of the transmissions is zero."""


@dataclass(frozen=True)
class Observables:
    """Isolation and direction-resolved delay at one operating point."""

    isolation_db: float
    tau_cw: float
    tau_ccw: float
    slow_fast_cw: str
    slow_fast_ccw: str


def isolation_db(r: ProbeResponse):
    """Isolation ratio 10*log10(T_cw / T_ccw) in dB."""
    t1 = np.asarray(r.big_t_cw, dtype=float)
    t2 = np.asarray(r.big_t_ccw, dtype=float)
    if np.any(t1 <= 0.0) or np.any(t2 <= 0.0):
        raise UndefinedIsolationError(
            "isolation undefined: transmission is zero (perfect dip)")
    out = 10.0 * np.log10(t1 / t2)
    return float(out) if out.ndim == 0 else out


def _t_direction(p, op, s, delta_p, direction, m_variant):
    r = transmission(p, op, s=s, delta_p=delta_p, m_variant=m_variant)
    return r.t_cw if direction == "cw" else r.t_ccw


def phase_derivative(t_func, delta_p, gamma_c: float):
    """Adaptive unwrap-safe phase derivative of a transmission function.

    ``t_func(delta_p)`` maps cyclic probe detunings (Hz, scalar or array)
    to complex transmission.  Starts at h = max(1e-4*gamma_c, 1e-3 Hz)
    and halves until two successive estimates agree to 1e-6 relative or h
    reaches 1e-6*gamma_c.  Returns d arg(t)/d(omega_p) in seconds.
    """
    dp0 = np.asarray(delta_p, dtype=float)
    h = max(1e-4 * gamma_c, 1e-3)
    h_min = H_MIN_FACTOR * gamma_c

    def estimate(step):
        t_plus = np.asarray(t_func(dp0 + step))
        t_minus = np.asarray(t_func(dp0 - step))
        if (np.any(np.abs(t_plus) < T_DIP_FLOOR)
                or np.any(np.abs(t_minus) < T_DIP_FLOOR)):
            raise SingularityError(
                "group delay stencil hit a transmission dip")
        # d arg / d omega: the detuning step is cyclic, hence the 2*pi
        return np.angle(t_plus * np.conj(t_minus)) / (2.0 * TWO_PI * step)

    tau = estimate(h)
    while h > h_min:
        h *= 0.5
        tau_new = estimate(h)
        scale = np.maximum(np.abs(tau_new), 1e-9 * np.max(np.abs(tau_new)))
        with np.errstate(invalid="ignore"):
            worst = np.max(np.abs(tau_new - tau) / np.where(scale > 0, scale, 1.0))
        tau = tau_new
        if worst <= DELAY_REL_TOL:
            break
    return float(tau) if tau.ndim == 0 else tau


def group_delay(p: SystemParams, op: OperatingPoint, direction: str,
                s: SteadyState | None = None, delta_p=None,
                m_variant: str = "symmetrized"):
    """Group delay of the probe in seconds (positive = slow light).

    The steady state does not depend on the probe detuning, so it is
    computed once and shared across the difference stencil.  ``delta_p``
    may be an ndarray; refinement then runs to the worst unconverged
    point (points crossing tau = 0 are judged against the scan's overall
    delay scale).
    """
    if direction not in ("cw", "ccw"):
        raise ValueError("direction must be 'cw' or 'ccw'")
    if s is None:
        s = solve_steady_state(p, op)
    dp0 = op.delta_p if delta_p is None else delta_p
    return phase_derivative(
        lambda d: _t_direction(p, op, s, d, direction, m_variant),
        dp0, p.gamma_c)


def classify_slow_fast(tau: float, tau_zero_tol: float) -> str:
    """Label a delay as slow (tau > tol), fast (tau < -tol) or zero."""
    if tau > tau_zero_tol:
        return "slow"
    if tau < -tau_zero_tol:
        return "fast"
    return "zero"


def observables_at(p: SystemParams, op: OperatingPoint,
                   m_variant: str = "symmetrized",
                   tau_zero_tol: float = 0.0) -> Observables:
    """Isolation and both-direction delays at a single operating point."""
    s = solve_steady_state(p, op)
    r = transmission(p, op, s=s, m_variant=m_variant)
    tau_cw = group_delay(p, op, "cw", s=s, m_variant=m_variant)
    tau_ccw = group_delay(p, op, "ccw", s=s, m_variant=m_variant)
    return Observables(
        isolation_db=isolation_db(r),
        tau_cw=tau_cw,
        tau_ccw=tau_ccw,
        slow_fast_cw=classify_slow_fast(tau_cw, tau_zero_tol),
        slow_fast_ccw=classify_slow_fast(tau_ccw, tau_zero_tol),
    )
