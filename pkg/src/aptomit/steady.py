"""Self-consistent steady state of the pumped two-mode optomechanical system.

The mean displacement pulls both cavity resonances, which feed back into
the displacement.  The coupled fixed point is solved by damped iteration
on the single real unknown x_bar; a bisection oracle on the same scalar
self-consistency is provided as an independent referee for tests.

All rates and detunings are cyclic (Hz) like the rest of the package;
SteadyState carries SI quantities (meters, sqrt-photon amplitudes).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .constants import HBAR
from .params import OperatingPoint, SystemParams, drive_amplitudes
from .spectrum import sagnac_shift

X_FLOOR = 1e-18   # m; absolute convergence floor so x_bar = 0 terminates
MAX_ITER = 10000


class SolverError(Exception):
    """Fixed-point iteration failed to converge (CLI exit code 4)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class SteadyState:
    """Converged mean fields with convergence metadata."""

    x_bar: float        # mean displacement, m
    a_cw: complex       # CW intracavity amplitude, sqrt(photon)
    a_ccw: complex      # CCW intracavity amplitude, sqrt(photon)
    iterations: int
    residual: float


def _detuned_point(p: SystemParams, op: OperatingPoint):
    """Sagnac-shifted detunings and pump amplitude for one operating point."""
    shift = sagnac_shift(p, op.omega_spin)
    eps_l = drive_amplitudes(p)[0] if op.pump_on else 0.0
    return shift.delta_plus, shift.delta_minus, eps_l


def _amplitudes(dp, dm, gc, kap, g, eps_l, x):
    """Mean intracavity amplitudes at a given (fixed) displacement x."""
    det = (1j * dm + 1j * g * x + gc) * (1j * dp + 1j * g * x + gc) - kap**2
    a_cw = (1j * dm + 1j * g * x + gc + kap) * eps_l / det
    a_ccw = (1j * dp + 1j * g * x + gc + kap) * eps_l / det
    return a_cw, a_ccw


def _displacement_map(p, dp, dm, eps_l):
    """Return F with F(x) the displacement induced by the fields at x."""

    def f(x):
        a_cw, a_ccw = _amplitudes(dp, dm, p.gamma_c, p.kappa, p.g_om, eps_l, x)
        return (-HBAR * p.g_om / (p.mass * p.omega_m**2)
                * (abs(a_cw)**2 + abs(a_ccw)**2))

    return f


def solve_steady_state(p: SystemParams, op: OperatingPoint,
                       rel_tol: float = 1e-12,
                       max_iter: int = MAX_ITER) -> SteadyState:
    """Damped fixed-point solve of the scalar self-consistency in x_bar.

    Starts at x = 0 with full steps (beta = 1); the step is halved
    whenever the update direction oscillates.  Converged when the update
    is below rel_tol relative to max(|x|, X_FLOOR).
    """
    dp, dm, eps_l = _detuned_point(p, op)
    if eps_l == 0.0:
        return SteadyState(0.0, 0j, 0j, iterations=1, residual=0.0)

    f = _displacement_map(p, dp, dm, eps_l)
    x = 0.0
    beta = 1.0
    last_step = 0.0
    for it in range(1, max_iter + 1):
        fx = f(x)
        step = beta * (fx - x)
        x_new = x + step
        if last_step * step < 0.0:
            beta = max(0.5 * beta, 1.0 / 1024.0)
        last_step = step
        if abs(x_new - x) <= rel_tol * max(abs(x), X_FLOOR):
            x = x_new
            break
        x = x_new
    else:
        a_cw, a_ccw = _amplitudes(dp, dm, p.gamma_c, p.kappa, p.g_om, eps_l, x)
        state = SteadyState(x, a_cw, a_ccw, iterations=max_iter,
                            residual=float("nan"))
        res = steady_residual(p, op, state)
        raise SolverError(
            f"steady state did not converge in {max_iter} iterations "
            f"(residual {res:.3e})", residual=res)

    a_cw, a_ccw = _amplitudes(dp, dm, p.gamma_c, p.kappa, p.g_om, eps_l, x)
    state = SteadyState(x, a_cw, a_ccw, iterations=it, residual=0.0)
    return replace(state, residual=steady_residual(p, op, state))


def steady_residual(p: SystemParams, op: OperatingPoint,
                    s: SteadyState) -> float:
    """Max-norm of the equation-of-motion right-hand sides at (x, a, a).

    All time derivatives and the probe are set to zero.  Optical residuals
    are normalized by the pump amplitude, the mechanical one by
    omega_m^2 * max(|x|, X_FLOOR); absolute norms are used when the pump
    is off.
    """
    dp, dm, eps_l = _detuned_point(p, op)
    g, gc, kap = p.g_om, p.gamma_c, p.kappa

    r_cw = (-1j * (dp - 1j * gc + g * s.x_bar) * s.a_cw
            + kap * s.a_ccw + eps_l)
    r_ccw = (-1j * (dm - 1j * gc + g * s.x_bar) * s.a_ccw
             + kap * s.a_cw + eps_l)
    r_x = (-p.omega_m**2 * s.x_bar
           - HBAR * g / p.mass * (abs(s.a_cw)**2 + abs(s.a_ccw)**2))

    if eps_l > 0.0:
        opt = max(abs(r_cw), abs(r_ccw)) / eps_l
        mech = abs(r_x) / (p.omega_m**2 * max(abs(s.x_bar), X_FLOOR))
    else:
        opt = max(abs(r_cw), abs(r_ccw))
        mech = abs(r_x)
    return max(opt, mech)


def bisect_x_bar(p: SystemParams, op: OperatingPoint,
                 rel_tol: float = 1e-12) -> float:
    """Independent bisection referee for the displacement fixed point.

    Brackets the root of G(x) = x - F(x) in [2*F(0), 0]: G(0) <= 0 is
    impossible for positive pump (F(0) < 0) and F is bounded, so the
    bracket is widened geometrically in the rare case G(2*F(0)) > 0.
    """
    dp, dm, eps_l = _detuned_point(p, op)
    if eps_l == 0.0:
        return 0.0
    f = _displacement_map(p, dp, dm, eps_l)

    def g(x):
        return x - f(x)

    hi = 0.0
    lo = 2.0 * f(0.0)
    while g(lo) > 0.0:
        lo *= 2.0
        if lo < -1.0:  # a meter of static displacement: hopeless parameters
            raise SolverError("bisection bracket not found")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rel_tol * max(abs(lo), X_FLOOR):
            break
    return 0.5 * (lo + hi)
