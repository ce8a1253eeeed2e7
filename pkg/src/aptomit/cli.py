"""Command-line interface.

Exit codes: 0 success, 2 usage, 3 config/validation, 4 solver
non-convergence, 5 response singularity.  Every run writes exactly one
artifact (stdout by default); `reproduce` writes a named bundle
directory.  CSV output carries a '#'-prefixed provenance preamble so the
data is self-describing.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .observables import group_delay, isolation_db
from .params import (ConfigError, OperatingPoint, apply_overrides,
                     drive_amplitudes, resolve_config)
from .response import (SingularityError, probe_amplitudes,
                       sideband_coefficients, sideband_oracle, transmission)
from .spectrum import apt_defect, eigenfrequencies, ep_speed, sagnac_shift
from .steady import SolverError, bisect_x_bar, solve_steady_state
from .sweep import (QUANTITIES, Axis, SweepSpec, params_hash,
                    reproduce_figure, run_sweep)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SOLVER = 4
EXIT_SINGULAR = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aptomit",
        description="Anti-PT-symmetric spinning optomechanics simulator")
    parser.add_argument("--version", action="version",
                        version=f"aptomit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True,
                        help="config file path or preset name "
                             "(microsphere-nanostring, spinning-sphere)")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
        sp.add_argument("--output", default="-",
                        help="output file, '-' for stdout")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    def scan_flags(sp):
        sp.add_argument("--omega-spin", type=float, default=0.0,
                        help="spinning speed, Hz")
        sp.add_argument("--pump-off", action="store_true",
                        help="evaluate without pump fields")
        sp.add_argument("--m-variant", choices=("symmetrized", "as-printed"),
                        default="symmetrized")
        sp.add_argument("--delta-p", type=float, default=None,
                        help="single probe detuning, Hz")
        sp.add_argument("--delta-p-min", type=float, default=None)
        sp.add_argument("--delta-p-max", type=float, default=None)
        sp.add_argument("--delta-p-count", type=int, default=2000)

    sp = sub.add_parser("ep", help="exceptional-point spin speed")
    common(sp)

    sp = sub.add_parser("spectrum", help="eigenfrequencies vs spin speed")
    common(sp)
    sp.add_argument("--omega-min", type=float, default=0.0)
    sp.add_argument("--omega-max", type=float, default=None,
                    help="default: twice the EP speed")
    sp.add_argument("--count", type=int, default=2000)

    sp = sub.add_parser("steady", help="self-consistent steady state")
    common(sp)
    sp.add_argument("--omega-spin", type=float, default=0.0)
    sp.add_argument("--pump-off", action="store_true")

    sp = sub.add_parser("transmission", help="probe transmission spectrum")
    common(sp)
    scan_flags(sp)
    sp.add_argument("--direction", choices=("cw", "ccw", "both"),
                    default="both")
    sp.add_argument("--oracle-check", action="store_true",
                    help="also report deviation from the dense-solve oracle")

    sp = sub.add_parser("isolation", help="isolation ratio")
    common(sp)
    scan_flags(sp)

    sp = sub.add_parser("delay", help="group delay/advance")
    common(sp)
    scan_flags(sp)

    sp = sub.add_parser("sweep", help="grid sweep over spin and detuning")
    common(sp)
    scan_flags(sp)
    sp.add_argument("--quantities", default="T_cw,T_ccw,I",
                    help=f"comma list from {','.join(QUANTITIES)}")
    sp.add_argument("--omega-spin-min", type=float, default=None)
    sp.add_argument("--omega-spin-max", type=float, default=None)
    sp.add_argument("--omega-spin-count", type=int, default=400)

    sp = sub.add_parser("reproduce", help="figure-data CSV bundles")
    common(sp)
    sp.add_argument("figure", choices=("fig2", "fig3", "fig4"))
    sp.add_argument("--outdir", required=True)
    sp.add_argument("--heatmap-points", type=int, default=400)
    sp.add_argument("--line-points", type=int, default=2000)
    sp.add_argument("--dp-half", type=float, default=None,
                    help="half-width of the probe-detuning window, Hz")

    sp = sub.add_parser("check", help="built-in oracle/invariant suite")
    common(sp)

    return parser


def _load_params(args):
    p = resolve_config(args.config)
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override must be KEY=VALUE, got {item!r}")
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"override {key!r}: bad numeric literal") from None
    if overrides:
        p = apply_overrides(p, overrides)
    return p


def _preamble(p, extra=None):
    prov = {"generator": f"aptomit {__version__}",
            "params_hash": params_hash(p)}
    prov.update(extra or {})
    return prov


def _emit_table(args, p, columns, rows, extra_prov=None):
    prov = _preamble(p, extra_prov)
    out = sys.stdout if args.output == "-" else open(args.output, "w")
    try:
        if args.format == "json":
            json.dump({"provenance": prov, "columns": columns,
                       "rows": [list(r) for r in rows]}, out, indent=1)
            out.write("\n")
        else:
            for key in sorted(prov):
                out.write(f"# {key} = {prov[key]}\n")
            out.write(",".join(columns) + "\n")
            for r in rows:
                out.write(",".join(str(c) if isinstance(c, str) else repr(float(c))
                                   for c in r) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _delta_p_grid(args):
    if args.delta_p is not None:
        return np.array([args.delta_p])
    if args.delta_p_min is None or args.delta_p_max is None:
        raise ConfigError("give --delta-p or --delta-p-min/--delta-p-max")
    return np.linspace(args.delta_p_min, args.delta_p_max, args.delta_p_count)


def _cmd_ep(args, p):
    w_ep = ep_speed(p)
    _emit_table(args, p, ["omega_ep_hz", "delta_sag_at_ep_hz", "kappa_hz"],
                [[w_ep, sagnac_shift(p, w_ep).delta_sag, p.kappa]])


def _cmd_spectrum(args, p):
    w_max = args.omega_max if args.omega_max is not None else 2.0 * ep_speed(p)
    rows = []
    for w in np.linspace(args.omega_min, w_max, args.count):
        eig = eigenfrequencies(p, sagnac_shift(p, w))
        rows.append([w, eig.omega_plus.real, eig.omega_plus.imag,
                     eig.omega_minus.real, eig.omega_minus.imag, eig.phase])
    _emit_table(args, p,
                ["omega_spin", "re_omega_plus", "im_omega_plus",
                 "re_omega_minus", "im_omega_minus", "phase_label"],
                rows, {"omega_ep": ep_speed(p)})


def _cmd_steady(args, p):
    op = OperatingPoint(omega_spin=args.omega_spin, pump_on=not args.pump_off)
    s = solve_steady_state(p, op)
    _emit_table(args, p,
                ["omega_spin", "x_bar_m", "n_cw", "n_ccw",
                 "iterations", "residual"],
                [[args.omega_spin, s.x_bar, abs(s.a_cw)**2, abs(s.a_ccw)**2,
                  s.iterations, s.residual]])


def _scan_context(args, p):
    op = OperatingPoint(omega_spin=args.omega_spin, pump_on=not args.pump_off)
    return op, solve_steady_state(p, op), _delta_p_grid(args)


def _cmd_transmission(args, p):
    op, s, dps = _scan_context(args, p)
    r = transmission(p, op, s=s, delta_p=dps, m_variant=args.m_variant)
    t_cw = np.atleast_1d(r.t_cw)
    t_ccw = np.atleast_1d(r.t_ccw)
    columns = ["delta_p"]
    if args.direction in ("cw", "both"):
        columns += ["re_t_cw", "im_t_cw", "T_cw"]
    if args.direction in ("ccw", "both"):
        columns += ["re_t_ccw", "im_t_ccw", "T_ccw"]
    if args.oracle_check:
        columns += ["oracle_rel_dev"]
        eps_p = drive_amplitudes(p)[1]
        c = sideband_coefficients(p, op, s, delta_p=dps,
                                  m_variant=args.m_variant)
        da = probe_amplitudes(c, eps_p)
        orc = sideband_oracle(p, op, s=s, delta_p=dps)
        idx = 1 if op.direction == "ccw" else 0
        dev = np.abs(np.atleast_1d(da[idx]) - np.atleast_1d(orc[idx])) \
            / np.abs(np.atleast_1d(orc[idx]))
    rows = []
    for j, d in enumerate(dps):
        row = [d]
        if args.direction in ("cw", "both"):
            row += [t_cw[j].real, t_cw[j].imag, abs(t_cw[j])**2]
        if args.direction in ("ccw", "both"):
            row += [t_ccw[j].real, t_ccw[j].imag, abs(t_ccw[j])**2]
        if args.oracle_check:
            row += [dev[j]]
        rows.append(row)
    _emit_table(args, p, columns, rows,
                {"m_variant": args.m_variant, "pump_on": op.pump_on,
                 "omega_spin": args.omega_spin})


def _cmd_isolation(args, p):
    op, s, dps = _scan_context(args, p)
    r = transmission(p, op, s=s, delta_p=dps, m_variant=args.m_variant)
    iso = np.atleast_1d(isolation_db(r))
    rows = [[d, iso[j]] for j, d in enumerate(dps)]
    _emit_table(args, p, ["delta_p", "I_dB"], rows,
                {"m_variant": args.m_variant, "pump_on": op.pump_on,
                 "omega_spin": args.omega_spin})


def _cmd_delay(args, p):
    op, s, dps = _scan_context(args, p)
    tau_cw = np.atleast_1d(group_delay(p, op, "cw", s=s, delta_p=dps,
                                       m_variant=args.m_variant))
    tau_ccw = np.atleast_1d(group_delay(p, op, "ccw", s=s, delta_p=dps,
                                        m_variant=args.m_variant))
    rows = [[d, tau_cw[j], tau_ccw[j]] for j, d in enumerate(dps)]
    _emit_table(args, p, ["delta_p", "tau_cw_s", "tau_ccw_s"], rows,
                {"m_variant": args.m_variant, "pump_on": op.pump_on,
                 "omega_spin": args.omega_spin})


def _cmd_sweep(args, p):
    quantities = tuple(q for q in args.quantities.split(",") if q)
    axes = []
    try:
        if args.omega_spin_min is not None or args.omega_spin_max is not None:
            if args.omega_spin_min is None or args.omega_spin_max is None:
                raise ConfigError(
                    "give both --omega-spin-min and --omega-spin-max")
            axes.append(Axis("omega_spin", args.omega_spin_min,
                             args.omega_spin_max, args.omega_spin_count))
        if args.delta_p_min is not None:
            if args.delta_p_max is None:
                raise ConfigError("give both --delta-p-min and --delta-p-max")
            axes.append(Axis("delta_p", args.delta_p_min, args.delta_p_max,
                             args.delta_p_count))
        spec = SweepSpec(tuple(axes), quantities,
                         pump_on=not args.pump_off,
                         m_variant=args.m_variant,
                         fixed_omega_spin=args.omega_spin,
                         fixed_delta_p=args.delta_p or 0.0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = run_sweep(p, spec)
    if args.output == "-":
        import tempfile
        with tempfile.NamedTemporaryFile("r+", suffix=".out") as tmp:
            if args.format == "json":
                result.to_json(tmp.name)
            else:
                result.to_csv(tmp.name)
            tmp.seek(0)
            sys.stdout.write(tmp.read())
    elif args.format == "json":
        result.to_json(args.output)
    else:
        result.to_csv(args.output)


def _cmd_reproduce(args, p):
    manifest = reproduce_figure(p, args.figure, args.outdir,
                                heatmap_points=args.heatmap_points,
                                line_points=args.line_points,
                                dp_half=args.dp_half)
    print(json.dumps(manifest, indent=1))


def _cmd_check(args, p):
    """Self-contained oracle/invariant suite; one pass/fail line each."""
    rng = np.random.default_rng(20240811)
    results = []

    def record(name, ok, detail=""):
        results.append(ok)
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else ""))

    w_ep = ep_speed(p)
    shift = sagnac_shift(p, 1.7 * w_ep)
    record("sagnac linearity",
           abs(sagnac_shift(p, 3.4 * w_ep).delta_sag - 2 * shift.delta_sag)
           <= 1e-9 * shift.delta_sag)

    trace_ok = True
    for w in rng.uniform(0, 3 * w_ep, 20):
        eig = eigenfrequencies(p, sagnac_shift(p, float(w)))
        tr = eig.omega_plus + eig.omega_minus
        expected = 2 * (p.delta_c - 1j * p.gamma_c)
        trace_ok &= abs(tr - expected) <= 1e-9 * abs(expected)
    record("eigenvalue trace conservation", trace_ok)

    record("apt defect equals 2|delta_c|",
           abs(apt_defect(p, shift) - 2 * p.delta_c) <= 1e-6 * max(p.delta_c, 1.0))

    op = OperatingPoint(omega_spin=0.7 * w_ep)
    s = solve_steady_state(p, op)
    record("steady residual <= 1e-10", s.residual <= 1e-10,
           f"residual={s.residual:.2e}")
    xb = bisect_x_bar(p, op)
    denom = max(abs(xb), 1e-18)
    record("bisection oracle agreement",
           abs(s.x_bar - xb) / denom <= 1e-9,
           f"rel dev={abs(s.x_bar - xb) / denom:.2e}")

    op0 = OperatingPoint(omega_spin=0.0)
    s0 = solve_steady_state(p, op0)
    dps = np.linspace(-p.gamma_c, p.gamma_c, 101)
    r0 = transmission(p, op0, s=s0, delta_p=dps)
    record("reciprocity at rest",
           float(np.max(np.abs(isolation_db(r0)))) <= 1e-9)

    eps_p = drive_amplitudes(p)[1]
    dev_max = 0.0
    for w in (0.5 * w_ep, w_ep, 1.5 * w_ep):
        opw = OperatingPoint(omega_spin=float(w))
        sw = solve_steady_state(p, opw)
        dp_pts = np.linspace(-0.5 * p.gamma_c, 0.5 * p.gamma_c, 7)
        c = sideband_coefficients(p, opw, sw, delta_p=dp_pts)
        da = probe_amplitudes(c, eps_p)
        orc = sideband_oracle(p, opw, s=sw, delta_p=dp_pts)
        dev_max = max(dev_max, float(np.max(
            np.abs(da[0] - orc[0]) / np.abs(orc[0]))))
    record("closed form vs dense oracle", dev_max <= 1e-8,
           f"max rel dev={dev_max:.2e}")

    r = transmission(p, op, s=s, delta_p=dps)
    t_all = np.concatenate([np.atleast_1d(r.big_t_cw),
                            np.atleast_1d(r.big_t_ccw)])
    if p.kappa < p.gamma_c:
        record("passivity 0 <= T <= 1", bool(np.all((t_all >= 0)
                                                    & (t_all <= 1 + 1e-9))))
    else:
        # kappa >= gamma_c puts one supermode on the gain-like branch:
        # T > 1 is then physical, not a bug, so passivity is not asserted.
        print(f"SKIP passivity 0 <= T <= 1 (kappa={p.kappa:.3g} >= "
              f"gamma_c={p.gamma_c:.3g}: gain-like regime, max T="
              f"{float(np.max(t_all)):.4f})")

    if not all(results):
        raise SystemExit(1)


_COMMANDS = {
    "ep": _cmd_ep,
    "spectrum": _cmd_spectrum,
    "steady": _cmd_steady,
    "transmission": _cmd_transmission,
    "isolation": _cmd_isolation,
    "delay": _cmd_delay,
    "sweep": _cmd_sweep,
    "reproduce": _cmd_reproduce,
    "check": _cmd_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        p = _load_params(args)
        _COMMANDS[args.command](args, p)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SingularityError as exc:
        print(f"singularity: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
