"""System parameters, unit conventions and config-file ingestion.

Unit convention: every frequency/rate in a config file, in
:class:`SystemParams` and in the dynamical core is a *cyclic* frequency
in Hz, exactly as quoted for experimental devices.  This is the one
convention that reproduces both published spectral landmarks (the 357 Hz
EP spin speed and the +/-335 Hz isolation extrema) from the quoted
device numbers; mixing in 2*pi factors breaks one or the other.  Group
delays are converted to physical seconds at the observables layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from importlib import resources

from .constants import C_LIGHT, HBAR

REL_TOL = 1e-9  # consistency tolerance for redundant loss/Q keys


class ConfigError(Exception):
    """Base class for configuration problems (maps to CLI exit code 3)."""


class ParseError(ConfigError):
    """Malformed config file (bad syntax, unknown or duplicate key)."""


class ValidationError(ConfigError):
    """Config parsed but the values are inconsistent or out of range."""


@dataclass(frozen=True)
class SystemParams:
    """All physical constants and rates of the device (cyclic Hz, SI)."""

    omega_c: float          # optical resonance frequency, Hz
    gamma_0: float          # intrinsic optical loss, Hz
    gamma_ex: float         # waveguide coupling loss, Hz
    gamma_c: float          # total optical loss, Hz
    kappa: float            # dissipative backscattering coupling, Hz
    omega_m: float          # mechanical resonance frequency, Hz
    gamma_m: float          # mechanical damping, Hz
    mass: float             # effective mass, kg
    g_om: float             # optomechanical coupling, Hz/m
    radius: float           # resonator radius, m
    n_ref: float            # refractive index
    dn_dlambda: float       # dispersion dn/dlambda, 1/m
    lambda_0: float         # pump wavelength, m
    p_pump: float           # pump power, W
    p_probe: float          # probe power, W
    delta_c: float          # pump detuning omega_c - omega_l, Hz
    q_factor: float | None = None

    def __post_init__(self):
        positive = [
            "omega_c", "gamma_0", "gamma_ex", "gamma_c", "omega_m",
            "gamma_m", "mass", "radius", "n_ref", "lambda_0", "p_probe",
        ]
        for key in positive:
            if not getattr(self, key) > 0.0:
                raise ValidationError(f"{key} must be strictly positive")
        # kappa and g_om may be zero: decoupled-mode and bare-cavity limits
        for key in ("kappa", "g_om", "p_pump"):
            if getattr(self, key) < 0.0:
                raise ValidationError(f"{key} must be >= 0")
        expected = 0.5 * (self.gamma_0 + self.gamma_ex)
        if abs(self.gamma_c - expected) > REL_TOL * expected:
            raise ValidationError(
                "gamma_c inconsistent with (gamma_0 + gamma_ex)/2")
        object.__setattr__(self, "gamma_c", expected)
        if self.q_factor is not None:
            g0 = self.omega_c / self.q_factor
            if abs(self.gamma_0 - g0) > REL_TOL * g0:
                raise ValidationError(
                    "q_factor inconsistent with gamma_0 = omega_c/q_factor")

    @property
    def omega_l(self) -> float:
        """Pump laser frequency omega_c - delta_c, Hz."""
        return self.omega_c - self.delta_c


@dataclass(frozen=True)
class OperatingPoint:
    """One evaluation point: spin speed, probe detuning, pump and direction.

    ``direction`` selects the probe incidence side: ``"cw"`` drives the CW
    mode (input from the left), ``"ccw"`` the CCW mode (input from the
    right).  Spin direction is fixed CCW; reversal is modeled by
    ``direction``, never by a negative spin speed.
    """

    omega_spin: float       # spinning speed, Hz (cyclic)
    delta_p: float = 0.0    # probe detuning omega_p - omega_c, Hz
    pump_on: bool = True
    direction: str = "cw"

    def __post_init__(self):
        if self.omega_spin < 0.0:
            raise ValidationError("omega_spin must be >= 0")
        if self.direction not in ("cw", "ccw"):
            raise ValidationError("direction must be 'cw' or 'ccw'")


_CONFIG_KEYS = (
    "omega_c", "q_factor", "gamma_0", "gamma_ex", "gamma_c", "kappa",
    "omega_m", "gamma_m", "mass", "g_om", "radius", "n_ref", "dn_dlambda",
    "lambda_0", "p_pump", "p_probe", "delta_c",
)
_REQUIRED_KEYS = ("omega_c", "kappa", "omega_m", "gamma_m", "mass",
                  "radius", "p_pump")


def params_from_dict(raw: dict) -> SystemParams:
    """Build a validated SystemParams from a flat key/value dict.

    Fills derived defaults: the gamma_0/gamma_ex split (critical coupling
    when only gamma_c is given), delta_c = omega_m, n = 1.444 fused silica,
    dn/dlambda = 0, lambda = c/omega_c, g = omega_c/R, P_p = P_l/100.
    """
    for key in raw:
        if key not in _CONFIG_KEYS:
            raise ParseError(f"unknown config key: {key}")
    for key in _REQUIRED_KEYS:
        if key not in raw:
            raise ValidationError(f"missing required config key: {key}")

    d = dict(raw)
    omega_c = d["omega_c"]

    q = d.get("q_factor")
    g0, gex, gc = d.get("gamma_0"), d.get("gamma_ex"), d.get("gamma_c")
    if q is not None and g0 is None:
        g0 = omega_c / q
    if g0 is None and gex is None:
        if gc is None:
            raise ValidationError(
                "no optical loss given: set gamma_c, gamma_0/gamma_ex or q_factor")
        # critical coupling default: gamma_0 = gamma_ex = gamma_c
        g0 = gex = gc
    elif g0 is not None and gex is None:
        if gc is None:
            raise ValidationError("gamma_ex or gamma_c needed with gamma_0")
        gex = 2.0 * gc - g0
    elif g0 is None and gex is not None:
        if gc is None:
            raise ValidationError("gamma_0 or gamma_c needed with gamma_ex")
        g0 = 2.0 * gc - gex
    if gc is None:
        gc = 0.5 * (g0 + gex)

    p_pump = d["p_pump"]
    p_probe = d.get("p_probe")
    if p_probe is None:
        p_probe = p_pump / 100.0 if p_pump > 0 else 1e-15

    return SystemParams(
        omega_c=omega_c,
        gamma_0=g0,
        gamma_ex=gex,
        gamma_c=gc,
        kappa=d["kappa"],
        omega_m=d["omega_m"],
        gamma_m=d["gamma_m"],
        mass=d["mass"],
        g_om=d.get("g_om", omega_c / d["radius"]),
        radius=d["radius"],
        n_ref=d.get("n_ref", 1.444),
        dn_dlambda=d.get("dn_dlambda", 0.0),
        lambda_0=d.get("lambda_0", C_LIGHT / omega_c),
        p_pump=p_pump,
        p_probe=p_probe,
        delta_c=d.get("delta_c", d["omega_m"]),
        q_factor=q,
    )


def _parse_text(text: str, origin: str) -> dict:
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{origin}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in raw:
            raise ParseError(f"{origin}:{lineno}: duplicate key: {key}")
        try:
            raw[key] = float(value.strip())
        except ValueError:
            raise ParseError(
                f"{origin}:{lineno}: bad numeric literal for key {key}") from None
    return raw


def load_config(path) -> SystemParams:
    """Load and validate a flat ``key = value`` config file."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config file {path}: {exc}") from exc
    return params_from_dict(_parse_text(text, str(path)))


def write_config(p: SystemParams, path) -> None:
    """Write a config file that round-trips through load_config exactly."""
    with open(path, "w") as fh:
        for f in fields(p):
            value = getattr(p, f.name)
            if value is None:
                continue
            fh.write(f"{f.name} = {value!r}\n")


def apply_overrides(p: SystemParams, overrides: dict) -> SystemParams:
    """Re-validate with the given keys replaced (atomic: failure -> no change)."""
    d = {f.name: getattr(p, f.name) for f in fields(p)}
    if d["q_factor"] is None:
        del d["q_factor"]
    for key, value in overrides.items():
        if key not in _CONFIG_KEYS:
            raise ParseError(f"unknown config key: {key}")
        d[key] = value
    # force re-derivation of the loss split if any loss key was overridden
    if any(k in overrides for k in ("gamma_0", "gamma_ex", "gamma_c", "q_factor")):
        for k in ("gamma_0", "gamma_ex", "gamma_c"):
            if k not in overrides:
                del d[k]
    return params_from_dict(d)


PRESETS = ("microsphere-nanostring", "spinning-sphere")


def load_preset(name: str) -> SystemParams:
    """Load one of the shipped presets by name."""
    if name not in PRESETS:
        raise ParseError(f"unknown preset: {name} (have {', '.join(PRESETS)})")
    ref = resources.files("aptomit").joinpath("presets", f"{name}.cfg")
    return params_from_dict(_parse_text(ref.read_text(), name))


def resolve_config(spec: str) -> SystemParams:
    """Accept either a preset name or a config-file path."""
    if spec in PRESETS:
        return load_preset(spec)
    return load_config(spec)


def drive_amplitudes(p: SystemParams) -> tuple[float, float]:
    """Pump and probe drive amplitudes, cyclic units of the core.

    eps_l = sqrt(gamma_ex P_l / (hbar omega_l)); the probe amplitude is
    evaluated at omega_p = omega_c (its sub-ppb variation across a probe
    sweep is irrelevant and frozen).
    """
    eps_l = math.sqrt(p.gamma_ex * p.p_pump / (HBAR * p.omega_l))
    eps_p = math.sqrt(p.gamma_ex * p.p_probe / (HBAR * p.omega_c))
    return eps_l, eps_p
