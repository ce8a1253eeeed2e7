"""Anti-PT-symmetric spinning optomechanical resonator simulator.

Computes the Sagnac-shifted two-mode eigenspectrum and its exceptional
point, the self-consistent steady state, the probe transmission spectrum,
nonreciprocal isolation and group delay/advance, and parameter sweeps
over spin speed and probe detuning.
"""

__version__ = "0.1.0"

from .params import (OperatingPoint, SystemParams, drive_amplitudes,
                     load_config, load_preset, resolve_config, write_config)
from .spectrum import (Eigenpair, SagnacShift, apt_defect, eigenfrequencies,
                       ep_speed, sagnac_shift)
from .steady import SteadyState, bisect_x_bar, solve_steady_state, steady_residual
from .response import (ProbeResponse, SidebandCoefficients, probe_amplitudes,
                       sideband_coefficients, sideband_oracle, transmission)
from .observables import (Observables, classify_slow_fast, group_delay,
                          isolation_db, observables_at, phase_derivative)
from .sweep import Axis, SweepResult, SweepSpec, reproduce_figure, run_sweep

__all__ = [
    "OperatingPoint", "SystemParams", "drive_amplitudes", "load_config",
    "load_preset", "resolve_config", "write_config",
    "Eigenpair", "SagnacShift", "apt_defect", "eigenfrequencies", "ep_speed",
    "sagnac_shift",
    "SteadyState", "bisect_x_bar", "solve_steady_state", "steady_residual",
    "ProbeResponse", "SidebandCoefficients", "probe_amplitudes",
    "sideband_coefficients", "sideband_oracle", "transmission",
    "Observables", "classify_slow_fast", "group_delay", "isolation_db",
    "observables_at", "phase_derivative",
    "Axis", "SweepResult", "SweepSpec", "reproduce_figure", "run_sweep",
]
