"""Command-line front end.

Verbs: spectrum, power-sweep, pulse, fit <kind>, budget.  CSV outputs carry
'#'-prefixed metadata lines (tool version, config hash, command, seed) and
a header row; floats are printed with 12 significant digits so identical
configs produce byte-identical files.  Exit codes: 0 success, 1 config
error, 2 numerical non-convergence, 3 physical instability.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from . import calibrate, quantumstats, response, timedomain
from .config import RunConfig, load_config
from .errors import ConfigError, ConvergenceError, InstabilityError
from .hybridize import operating_point
from .model import (
    TWO_PI,
    Configuration,
    PumpConfig,
    dbm_to_watts,
    linear_to_db,
)

_FMT = "{:.12g}"


def _metadata_lines(cfg: RunConfig | None, command: str, seed: int | None) -> list[str]:
    lines = [f"# moptrans {__version__}", f"# command: {command}"]
    if cfg is not None:
        lines.append(f"# config_sha256: {cfg.sha256}")
    if seed is not None:
        lines.append(f"# seed: {seed}")
    return lines


def _write_csv(path, cfg, command, seed, header: list[str], rows) -> None:
    text_rows = [",".join(_FMT.format(v) for v in row) for row in rows]
    body = _metadata_lines(cfg, command, seed) + [",".join(header)] + text_rows
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(body) + "\n")


def _write_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_grid_flag(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("--grid expects start,stop,n")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad --grid value: {exc}") from exc
    return start, stop, n


def _grid_from(cfg: RunConfig, args) -> np.ndarray:
    if args.grid is not None:
        start, stop, n = _parse_grid_flag(args.grid)
    else:
        start, stop, n = cfg.require("grid_start_hz", "grid_stop_hz", "grid_points")
    n = int(n)
    if n < 2 or stop <= start:
        raise ConfigError("sweep grid needs stop > start and at least 2 points")
    return np.linspace(float(start), float(stop), n)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig, args) -> int:
    freq_hz = _grid_from(cfg, args)
    device, pump = cfg.device, cfg.pump
    ref = device.transduction_mode
    offsets = TWO_PI * (freq_hz - ref.omega_m / TWO_PI)

    if len(device.acoustic_modes) == 1 and cfg.pump_detuning == 0.0:
        spec = response.onchip_efficiency_spectrum(device, pump, offsets)
        eta = spec.channel("eta_onchip")
    else:
        spec = response.multimode_spectrum(device, pump, cfg.pump_detuning, offsets)
        eta = spec.channel("eta_onchip")

    losses = device.losses
    eta_off = losses.eta_probes * losses.eta_fiber_chip * eta

    # S parameters from the mode nearest to each grid point
    op_by_mode = [operating_point(device, pump, acoustic_mode=m) for m in device.acoustic_modes]
    mode_freqs = np.array([m.omega_m for m in device.acoustic_modes])
    s_ac = np.empty(freq_hz.size, dtype=complex)
    s_cc = np.empty(freq_hz.size, dtype=complex)
    omega_abs = TWO_PI * freq_hz
    nearest = np.argmin(np.abs(omega_abs[:, None] - mode_freqs[None, :]), axis=1)
    for k, op in enumerate(op_by_mode):
        sel = nearest == k
        if not np.any(sel):
            continue
        w = omega_abs[sel] - op.omega_m
        s_ac[sel] = response.transfer_from_rates(op, "microwave", "optical", w)
        s_cc[sel] = response.transfer_from_rates(op, "microwave", "microwave", w)

    rows = zip(freq_hz, eta, eta_off, s_ac.real, s_ac.imag, s_cc.real, s_cc.imag)
    _write_csv(
        args.out, cfg, "spectrum", args.seed,
        ["freq_hz", "eta_onchip", "eta_offchip", "s_ac_re", "s_ac_im", "s_cc_re", "s_cc_im"],
        rows,
    )
    return 0


def cmd_power_sweep(cfg: RunConfig, args) -> int:
    start, stop, n = cfg.require("power_start_dbm", "power_stop_dbm", "power_points")
    n = int(n)
    if n < 1 or stop < start:
        raise ConfigError("power sweep needs stop >= start and at least 1 point")
    dbm = np.linspace(float(start), float(stop), n)
    rows = []
    for p in dbm:
        pump = PumpConfig(cfg.pump.configuration, dbm_to_watts(float(p)), cfg.pump.omega_l)
        budget = response.offchip_efficiency(cfg.device, pump)
        rows.append(
            (p, budget.eta_tot, budget.eta_oc, budget.eta_int, budget.cooperativity, budget.n_bar)
        )
    _write_csv(
        args.out, cfg, "power-sweep", args.seed,
        ["power_dbm", "eta_tot", "eta_oc", "eta_int", "C", "n_bar"],
        rows,
    )
    return 0


def cmd_pulse(cfg: RunConfig, args) -> int:
    on_s, rep_hz, tau_s = cfg.require("pulse_on_s", "pulse_rep_hz", "lockin_tau_s")
    try:
        pulse = timedomain.PulseSequence(
            tau_on=float(on_s),
            f_rep=float(rep_hz),
            shape=(
                timedomain.EnvelopeShape.RAISED_COSINE
                if cfg.get("pulse_edge_s", 0.0) > 0.0
                else timedomain.EnvelopeShape.RECT
            ),
            edge_time=float(cfg.get("pulse_edge_s", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid pulse sequence: {exc}") from exc
    device = cfg.device
    op_mode = device.transduction_mode
    lockin = timedomain.LockInConfig(omega_ref=op_mode.omega_m, tau_rc=float(tau_s))

    input_dbm = float(cfg.get("input_power_dbm", -30.0))
    input_watts = dbm_to_watts(input_dbm)
    from .model import photon_flux

    flux = photon_flux(device.losses.eta_fiber_chip * input_watts, cfg.pump.omega_l_effective)

    duration = cfg.get("sim_duration_s")
    t, amp, phase = timedomain.pulsed_downconversion(
        device,
        pulse,
        optical_input_flux=flux,
        lockin=lockin,
        pump_power=cfg.pump.power_in,
        duration=float(duration) if duration is not None else None,
    )
    _write_csv(args.out, cfg, "pulse", args.seed, ["t_s", "amp", "phase"], zip(t, amp, phase))
    return 0


def _read_csv_columns(path, n_cols: int) -> list[np.ndarray]:
    import io

    try:
        with open(path, "r", encoding="utf-8") as fh:
            body = "\n".join(l for l in fh.read().splitlines() if not l.startswith("#"))
        data = np.genfromtxt(io.StringIO(body), delimiter=",", names=True)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read data file {path!r}: {exc}") from exc
    if data.dtype.names is None or len(data.dtype.names) < n_cols:
        raise ConfigError(f"data file {path!r} needs {n_cols} named columns")
    cols = [np.atleast_1d(np.asarray(data[name], dtype=float)) for name in data.dtype.names[:n_cols]]
    if any(np.any(~np.isfinite(c)) for c in cols):
        raise ConfigError(f"data file {path!r} contains non-numeric entries")
    return cols


def cmd_fit(cfg: RunConfig, args) -> int:
    kind = args.kind
    if kind == "doublet":
        freq, trans = _read_csv_columns(args.data, 2)
        report = calibrate.fit_doublet(TWO_PI * freq, trans)
    elif kind == "s11":
        freq, re_part, im_part = _read_csv_columns(args.data, 3)
        report = calibrate.fit_s11(TWO_PI * freq, re_part + 1j * im_part)
    elif kind == "power":
        dbm, eta = _read_csv_columns(args.data, 2)
        device, pump = cfg.device, cfg.pump
        op = operating_point(device, pump)
        fixed = {
            "eta_probes": device.losses.eta_probes,
            "eta_fiber_fiber": device.losses.eta_fiber_fiber,
            "eta_m": op.kappa_ex_m / op.kappa_m,
            "eta_o": op.kappa_ex_active / op.kappa_active,
            "kappa_o": op.kappa_active,
            "kappa_m": op.kappa_m,
            "omega_l": pump.omega_l_effective,
        }
        watts = np.array([dbm_to_watts(float(p)) for p in dbm])
        report = calibrate.fit_efficiency_power(watts, eta, fixed)
    elif kind == "step":
        t, env = _read_csv_columns(args.data, 2)
        report = calibrate.fit_rc_step(t, env)
    else:
        raise ConfigError(f"unknown fit kind {kind!r}")
    if args.seed is not None:
        report = calibrate.FitReport(
            parameters=report.parameters, units=report.units,
            residual_norm=report.residual_norm, iterations=report.iterations,
            converged=report.converged, covariance_diag=report.covariance_diag,
            flags=report.flags, seed=args.seed,
        )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    return 0


def cmd_budget(cfg: RunConfig, args) -> int:
    device, pump = cfg.device, cfg.pump
    if pump.power_in == 0.0:
        budget_payload = {
            "eta_int": 0.0, "eta_ext": response.eta_extraction(device, pump.configuration),
            "eta_oc": 0.0, "eta_tot": 0.0, "eta_tot_linearized": 0.0,
            "cooperativity": 0.0, "n_bar": 0.0, "stages": {},
        }
        pair_payload = None
        noise_payload = None
    else:
        budget = response.offchip_efficiency(device, pump)
        budget_payload = {
            "eta_int": budget.eta_int,
            "eta_ext": budget.eta_ext,
            "eta_oc": budget.eta_oc,
            "eta_tot": budget.eta_tot,
            "eta_tot_db": linear_to_db(budget.eta_tot) if budget.eta_tot > 0 else None,
            "eta_tot_linearized": budget.eta_tot_linearized,
            "cooperativity": budget.cooperativity,
            "n_bar": budget.n_bar,
            "stages": budget.stages,
        }
        env = quantumstats.ThermalEnvironment(cfg.temperature)
        n_opt = float(cfg.get("n_optical_in", 0.0))
        noise = quantumstats.added_noise(device, pump, 0.0, env, n_opt)
        noise_payload = {
            "n_added_up": noise.n_added_up,
            "n_added_down": noise.n_added_down,
            "breakdown_up": noise.breakdown_up,
            "breakdown_down": noise.breakdown_down,
        }
        if pump.configuration is Configuration.STOKES:
            rate = quantumstats.pair_rate(device, pump)
            n_th = env.occupancy(device.transduction_mode.omega_m)
            g2 = quantumstats.g2_cross(device, pump, 0.0, n_th)
            pair_payload = {
                "closed_form": rate.closed_form,
                "numeric": rate.numeric,
                "alternate_convention": rate.alternate_convention,
                "convention": rate.convention,
                "note": rate.note,
                "g2_cross_zero_offset": g2,
                "cauchy_schwarz_violated": quantumstats.cauchy_schwarz_violated(g2),
                "cauchy_schwarz_assumption": "g2_aa = g2_cc = 2 (thermal marginals)",
            }
        else:
            pair_payload = None

    mode = device.transduction_mode
    temp = cfg.temperature
    n_th = quantumstats.n_thermal(mode.omega_m, temp) if temp > 0 else 0.0
    payload = {
        "efficiency": budget_payload,
        "pair_generation": pair_payload,
        "added_noise": noise_payload,
        "thermal": {
            "temperature_k": temp,
            "n_thermal": n_th,
            "decoherence_rate_hz": quantumstats.decoherence_rate(mode.kappa_m, n_th),
        },
        "config_sha256": cfg.sha256,
    }
    _write_json(args.out, payload)
    return 0


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moptrans", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_data=False):
        p.add_argument("--config", required=True, help="device/run config file")
        p.add_argument("--out", required=True, help="output CSV/JSON path")
        p.add_argument("--grid", default=None, help="start,stop,n frequency grid [Hz]")
        p.add_argument("--seed", type=int, default=None, help="seed recorded in outputs")
        if needs_data:
            p.add_argument("--data", required=True, help="input data CSV")

    common(sub.add_parser("spectrum", help="conversion-efficiency spectrum CSV"))
    common(sub.add_parser("power-sweep", help="efficiency chain vs pump power CSV"))
    common(sub.add_parser("pulse", help="pulsed down-conversion envelope CSV"))
    fit = sub.add_parser("fit", help="parameter recovery from measured data")
    fit.add_argument("kind", choices=("doublet", "s11", "power", "step"))
    common(fit, needs_data=True)
    common(sub.add_parser("budget", help="efficiency/noise/pair-rate JSON report"))
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "spectrum": cmd_spectrum,
        "power-sweep": cmd_power_sweep,
        "pulse": cmd_pulse,
        "fit": cmd_fit,
        "budget": cmd_budget,
    }
    try:
        cfg = load_config(args.config)
        return handlers[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return 2
    except InstabilityError as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())
