"""Closed-form frequency responses, conversion efficiencies and bandwidth.

Frequency bookkeeping: every spectrum and transfer function is expressed
against a single offset omega (rad/s) from the relevant carrier -- for the
microwave port that carrier is the acoustic resonance, for the optical port
it is the converted sideband (omega_L + omega_m for anti-Stokes pumping,
omega_L - omega_m for Stokes).  With chi_x[w] = 1/(-i w + kappa_x/2) the
sideband-resolved transfer functions are

anti-Stokes (pump on a_-, determinant D = 1 + |g_+|^2 chi_+ chi_m):
    S_ac = -i sqrt(kex_+ kex_m) g_+  chi_+ chi_m / D        (c_in -> a_out)
    S_ca = +i sqrt(kex_+ kex_m) g_+* chi_+ chi_m / D        (a_in -> c_out)
    S_aa = 1 - kex_+ chi_+ / D - kex_- chi_-[w + splitting]
    S_cc = -1 + kex_m chi_m / D

Stokes (pump on a_+, determinant D = 1 - |g_-|^2 chi_- chi_m), anomalous
(two-mode-squeezing) cross coefficients:
    S_ac = -i sqrt(kex_- kex_m) g_- chi_- chi_m / D         (c_in^dag -> a_out)
    S_ca = +i sqrt(kex_- kex_m) g_- chi_- chi_m / D         (a_in^dag -> c_out)
    S_aa = 1 - kex_- chi_- / D - kex_+ chi_+[w - splitting]
    S_cc = -1 + kex_m chi_m / D

The on-chip photon-number conversion efficiency is |S_ac|^2 = |S_ca|^2 for
either configuration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InstabilityError
from .hybridize import OperatingPoint, operating_point, supermodes, steady_state_amplitudes, left_ring_decomposition, effective_couplings
from .model import (
    HBAR,
    Configuration,
    DeviceParams,
    PumpConfig,
    photon_flux,
)

PORTS = ("optical", "microwave")


@dataclass(frozen=True)
class Spectrum:
    """Ordered frequency grid with one or more value channels.

    omega is the offset grid in rad/s (strictly ascending); values has
    shape (n,) for a single channel or (k, n) for k labeled channels.
    """

    omega: np.ndarray
    values: np.ndarray
    labels: tuple[str, ...] = ("value",)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        values = np.asarray(self.values)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "values", values)
        if omega.ndim != 1 or omega.size < 2:
            raise ValueError("frequency grid must be a 1-D array with >= 2 points")
        if np.any(np.diff(omega) <= 0.0):
            raise ValueError("frequency grid must be strictly ascending")
        if not np.all(np.isfinite(values.view(float) if np.iscomplexobj(values) else values)):
            raise ValueError("spectrum values must be finite")
        n_channels = 1 if values.ndim == 1 else values.shape[0]
        if values.shape[-1] != omega.size or len(self.labels) != n_channels:
            raise ValueError("values/labels shape mismatch")

    def channel(self, label: str) -> np.ndarray:
        if self.values.ndim == 1:
            if label != self.labels[0]:
                raise KeyError(label)
            return self.values
        return self.values[self.labels.index(label)]


@dataclass(frozen=True)
class EfficiencyBudget:
    """Efficiency chain of one operating point, with a per-stage ledger.

    eta_tot is the exact chain eta_probes * eta_fiber_chip * eta_oc;
    eta_tot_linearized is the low-cooperativity closed form
    16 eta_probes eta_ff eta_m eta_o^2 C0 P_in / (hbar omega_L kappa_o).
    """

    eta_int: float
    eta_ext: float
    eta_oc: float
    eta_tot: float
    eta_tot_linearized: float
    cooperativity: float
    n_bar: float
    stages: dict = field(default_factory=dict)


def cooperativity(g_eff: float, kappa_o: float, kappa_m: float) -> float:
    """Three-wave-mixing cooperativity C = 4 g^2 / (kappa_o kappa_m)."""
    if kappa_o <= 0.0 or kappa_m <= 0.0:
        raise ValueError("linewidths must be positive")
    return 4.0 * abs(g_eff) ** 2 / (kappa_o * kappa_m)


def eta_internal(c: float, configuration: Configuration) -> float:
    """Internal conversion efficiency 4C/(1 +- C)^2 (+ anti-Stokes,
    - Stokes).  Stokes operation at C >= 1 is parametrically unstable."""
    if c < 0.0:
        raise ValueError("cooperativity must be non-negative")
    if configuration is Configuration.ANTI_STOKES:
        return 4.0 * c / (1.0 + c) ** 2
    if c >= 1.0:
        raise InstabilityError(f"Stokes pumping at C = {c!r} >= 1 is above threshold")
    return 4.0 * c / (1.0 - c) ** 2


def eta_extraction(
    params: DeviceParams, configuration: Configuration = Configuration.ANTI_STOKES
) -> float:
    """Extraction efficiency (kappa_ex_o/kappa_o)(kappa_ex_m/kappa_m) of
    the active conversion pair."""
    sm = supermodes(params.left, params.right, params.coupling_j)
    mode = params.transduction_mode
    if configuration is Configuration.ANTI_STOKES:
        eta_o = sm.kappa_ex_plus / sm.kappa_plus
    else:
        eta_o = sm.kappa_ex_minus / sm.kappa_minus
    return eta_o * mode.eta_m


# ---------------------------------------------------------------------------
# transfer functions
# ---------------------------------------------------------------------------

def _chi(omega, kappa):
    return 1.0 / (-1j * omega + 0.5 * kappa)


def _check_stokes_stability(op: OperatingPoint) -> None:
    if op.configuration is Configuration.STOKES and op.cooperativity >= 1.0:
        raise InstabilityError(
            f"Stokes pumping at C = {op.cooperativity!r} >= 1 is above threshold"
        )


def transfer_from_rates(op: OperatingPoint, from_port: str, to_port: str, omega):
    """Closed-form S parameter at signal offset `omega` (scalar or array)
    for the given port pair; see the module docstring for conventions."""
    for p in (from_port, to_port):
        if p not in PORTS:
            raise ValueError(f"unknown port {p!r}")
    _check_stokes_stability(op)

    omega = np.asarray(omega, dtype=float)
    chi_m = _chi(omega, op.kappa_m)
    chi_o = _chi(omega, op.kappa_active)
    g = op.g_active
    if op.configuration is Configuration.ANTI_STOKES:
        det = 1.0 + abs(g) ** 2 * chi_o * chi_m
    else:
        det = 1.0 - abs(g) ** 2 * chi_o * chi_m

    root = math.sqrt(op.kappa_ex_active * op.kappa_ex_m)
    if from_port == "microwave" and to_port == "optical":
        out = -1j * root * g * chi_o * chi_m / det
    elif from_port == "optical" and to_port == "microwave":
        if op.configuration is Configuration.ANTI_STOKES:
            out = 1j * root * g.conjugate() * chi_o * chi_m / det
        else:
            out = 1j * root * g * chi_o * chi_m / det
    elif from_port == "microwave" and to_port == "microwave":
        out = -1.0 + op.kappa_ex_m * chi_m / det
    else:  # optical -> optical
        if op.configuration is Configuration.ANTI_STOKES:
            spectator = op.kappa_ex_minus * _chi(omega + op.splitting, op.kappa_minus)
        else:
            spectator = op.kappa_ex_plus * _chi(omega - op.splitting, op.kappa_plus)
        out = 1.0 - op.kappa_ex_active * chi_o / det - spectator
    return out if out.ndim else complex(out)


def transfer(params: DeviceParams, pump: PumpConfig, from_port: str, to_port: str, omega):
    """S parameter of a device under a given pump.  For Stokes pumping the
    cross-port entries are the anomalous (two-mode-squeezing) coefficients
    S_{a_out <- c_in^dag} and S_{c_out <- a_in^dag}."""
    return transfer_from_rates(operating_point(params, pump), from_port, to_port, omega)


def eta_spectrum_from_rates(op: OperatingPoint, omega):
    """On-chip photon-number conversion efficiency |S_cross|^2 at offsets
    `omega`; identical for up- and down-conversion."""
    s = transfer_from_rates(op, "microwave", "optical", omega)
    return np.abs(s) ** 2


def onchip_efficiency_spectrum(
    params: DeviceParams, pump: PumpConfig, omega_grid
) -> Spectrum:
    """On-chip conversion efficiency over `omega_grid` (offsets from the
    triple-resonance point, rad/s)."""
    op = operating_point(params, pump)
    eta = eta_spectrum_from_rates(op, np.asarray(omega_grid, dtype=float))
    return Spectrum(np.asarray(omega_grid, dtype=float), eta, ("eta_onchip",))


def offchip_efficiency(params: DeviceParams, pump: PumpConfig) -> EfficiencyBudget:
    """Full efficiency ledger at one pump power.

    Reports both the exact chain (probes x fiber-chip x on-chip) and the
    low-cooperativity linearized closed form.
    """
    op = operating_point(params, pump)
    _check_stokes_stability(op)
    c = op.cooperativity
    eta_int_val = eta_internal(c, pump.configuration)
    eta_o = op.kappa_ex_active / op.kappa_active
    eta_m = op.kappa_ex_m / op.kappa_m
    eta_ext_val = eta_o * eta_m
    eta_oc = eta_ext_val * eta_int_val
    losses = params.losses
    eta_tot = losses.eta_probes * losses.eta_fiber_chip * eta_oc

    # low-cooperativity closed form, written with the single-photon
    # cooperativity C0 = g0^2/(kappa_o kappa_m) of the hybridized device
    omega_l = pump.omega_l_effective
    c0 = params.g0 ** 2 / (op.kappa_active * op.kappa_m)
    eta_tot_lin = (
        16.0
        * losses.eta_probes
        * losses.eta_fiber_fiber
        * eta_m
        * eta_o ** 2
        * c0
        * pump.power_in
        / (HBAR * omega_l * op.kappa_active)
    )

    stages = {
        "eta_probes": losses.eta_probes,
        "eta_fiber_chip": losses.eta_fiber_chip,
        "eta_o": eta_o,
        "eta_m": eta_m,
        "C0": c0,
        "n_bar": op.n_pump,
        "sideband_resolution": op.sideband_resolution,
    }
    return EfficiencyBudget(
        eta_int=eta_int_val,
        eta_ext=eta_ext_val,
        eta_oc=eta_oc,
        eta_tot=eta_tot,
        eta_tot_linearized=eta_tot_lin,
        cooperativity=c,
        n_bar=op.n_pump,
        stages=stages,
    )


# ---------------------------------------------------------------------------
# multimode spectra
# ---------------------------------------------------------------------------

def multimode_eta_from_rates(ops, detunings, omega, omega_refs):
    """Sum of per-mode conversion efficiencies (incoherent addition).

    ops/detunings/omega_refs are parallel sequences: per-mode operating
    points, effective sideband detunings and mode offsets relative to the
    common grid origin.
    """
    omega = np.asarray(omega, dtype=float)
    total = np.zeros_like(omega)
    for op, det, ref in zip(ops, detunings, omega_refs):
        w = omega - ref
        chi_m = _chi(w, op.kappa_m)
        chi_o = _chi(w + det, op.kappa_active)
        g = op.g_active
        if op.configuration is Configuration.ANTI_STOKES:
            d = 1.0 + abs(g) ** 2 * chi_o * chi_m
        else:
            d = 1.0 - abs(g) ** 2 * chi_o * chi_m
        total += (
            op.kappa_ex_active
            * op.kappa_ex_m
            * abs(g) ** 2
            * np.abs(chi_o) ** 2
            * np.abs(chi_m) ** 2
            / np.abs(d) ** 2
        )
    return total


def multimode_spectrum(
    params: DeviceParams,
    pump: PumpConfig,
    pump_detuning: float,
    omega_grid,
) -> Spectrum:
    """Total conversion efficiency across all acoustic modes for a pump
    detuned by `pump_detuning` (rad/s) from its supermode.

    The grid is the offset from the transduction mode's frequency.  Each
    mode contributes an independent closed form whose sideband detuning is
    pump_detuning + (omega_mk - splitting) for anti-Stokes pumping (and the
    negative for Stokes); overlapping modes (separation < 3 kappa_m) raise
    a regime warning but are still summed.
    """
    sm = supermodes(params.left, params.right, params.coupling_j)
    a_minus, a_plus = steady_state_amplitudes_detuned(
        sm, pump, params.losses.eta_fiber_chip, pump_detuning
    )
    x, y = left_ring_decomposition(sm)
    coup = effective_couplings(params.g0, x, y, a_minus, a_plus)

    modes = params.acoustic_modes
    freqs = [m.omega_m for m in modes]
    if len(modes) > 1:
        widest = max(m.kappa_m for m in modes)
        min_sep = min(b - a for a, b in zip(freqs, freqs[1:]))
        if min_sep < 3.0 * widest:
            warnings.warn(
                "acoustic modes closer than 3 kappa_m: independent-mode "
                "summation is outside its validity regime",
                RuntimeWarning,
            )

    ref_mode = params.transduction_mode
    ops, dets, refs = [], [], []
    for m in modes:
        ops.append(
            OperatingPoint(
                configuration=pump.configuration,
                omega_m=m.omega_m,
                kappa_m=m.kappa_m,
                kappa_ex_m=m.kappa_ex_m,
                kappa_minus=sm.kappa_minus,
                kappa_plus=sm.kappa_plus,
                kappa_ex_minus=sm.kappa_ex_minus,
                kappa_ex_plus=sm.kappa_ex_plus,
                g_minus=coup.g_minus,
                g_plus=coup.g_plus,
                splitting=sm.splitting,
            )
        )
        mismatch = pump_detuning + (m.omega_m - sm.splitting)
        if pump.configuration is Configuration.STOKES:
            mismatch = pump_detuning - (m.omega_m - sm.splitting)
        dets.append(mismatch)
        refs.append(m.omega_m - ref_mode.omega_m)

    grid = np.asarray(omega_grid, dtype=float)
    eta = multimode_eta_from_rates(ops, dets, grid, refs)
    return Spectrum(grid, eta, ("eta_onchip",))


def steady_state_amplitudes_detuned(sm, pump, eta_fiber_chip, pump_detuning):
    """Steady-state supermode amplitudes for a pump offset by
    `pump_detuning` from its nominal supermode."""
    flux = photon_flux(eta_fiber_chip * pump.power_in, pump.omega_l_effective)
    s_in = math.sqrt(flux)
    split = sm.omega_plus - sm.omega_minus
    if pump.configuration is Configuration.ANTI_STOKES:
        delta_minus = pump_detuning
        delta_plus = pump_detuning - split
    else:
        delta_plus = pump_detuning
        delta_minus = pump_detuning + split
    a_minus = math.sqrt(sm.kappa_ex_minus) * s_in / (-1j * delta_minus + 0.5 * sm.kappa_minus)
    a_plus = math.sqrt(sm.kappa_ex_plus) * s_in / (-1j * delta_plus + 0.5 * sm.kappa_plus)
    return a_minus, a_plus


# ---------------------------------------------------------------------------
# bandwidth and coupling optimization
# ---------------------------------------------------------------------------

def fwhm(spectrum: Spectrum) -> float:
    """Full width at half maximum of a single-peaked real spectrum, via
    linear interpolation of the half-maximum crossings.

    Requires the global maximum strictly inside the grid and a resolution
    of at least 8 grid steps across the extracted width.
    """
    y = np.asarray(spectrum.values, dtype=float)
    if y.ndim != 1:
        raise ValueError("fwhm needs a single-channel real spectrum")
    x = spectrum.omega
    i_max = int(np.argmax(y))
    y_max = y[i_max]
    y_min = float(np.min(y))
    if y_max - y_min <= 0.0 or (y_max - y_min) < 1e-12 * max(abs(y_max), 1.0):
        raise ValueError("spectrum is flat: no peak to measure")
    if i_max == 0 or i_max == y.size - 1:
        raise ValueError("maximum sits on the grid boundary: span insufficient")
    half = 0.5 * y_max

    def cross(idx_range):
        for i in idx_range:
            lo, hi = (y[i], y[i + 1])
            if (lo - half) * (hi - half) <= 0.0 and lo != hi:
                return x[i] + (half - lo) * (x[i + 1] - x[i]) / (hi - lo)
        raise ValueError("half-maximum crossing not found: span insufficient")

    left = cross(range(i_max - 1, -1, -1))
    right = cross(range(i_max, y.size - 1))
    width = right - left
    step = float(np.min(np.diff(x)))
    if width < 8.0 * step:
        raise ValueError("grid too coarse: fewer than 8 points across the width")
    return float(width)


@dataclass(frozen=True)
class CouplingOptimum:
    """Optimal external-coupling result: eta_tot ~ F R^2/(1+R)^4 peaks at
    the critical coupling R = Q_int/Q_ex = 1 with value F/16."""

    r_opt: float
    eta_peak: float
    r_grid: np.ndarray
    eta_grid: np.ndarray


def optimal_coupling(f_prefactor: float, n_grid: int = 201) -> CouplingOptimum:
    """Analytic optimum of eta(R) = F R^2 / (1+R)^4 plus the curve itself
    on a logarithmic grid R in [0.01, 100] for plotting."""
    if f_prefactor <= 0.0:
        raise ValueError("prefactor F must be positive")
    r = np.logspace(-2.0, 2.0, n_grid)
    eta = f_prefactor * r ** 2 / (1.0 + r) ** 4
    return CouplingOptimum(
        r_opt=1.0, eta_peak=f_prefactor / 16.0, r_grid=r, eta_grid=eta
    )
