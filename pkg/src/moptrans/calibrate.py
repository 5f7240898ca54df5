"""Nonlinear least-squares recovery of device parameters from data.

All fitters share one damped least-squares backend (scipy's trust-region
reflective solver with numerically differenced Jacobians, which is the
bounded flavor of Levenberg-Marquardt damping): convergence at relative
cost change < 1e-10 or gradient norm < 1e-8, evaluation cap 500 per
parameter.  Covariances come from the Gauss-Newton approximation
sigma^2 (J^T J)^-1 with sigma^2 the reduced residual variance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import argrelmin

from .errors import ConvergenceError
from .hybridize import supermodes
from .model import HBAR, TWO_PI, OpticalModeBare

_FTOL = 1e-10
_GTOL = 1e-8
_MAX_NFEV = 500


@dataclass(frozen=True)
class FitReport:
    """Recovered parameters with diagnostics.

    parameters/covariance_diag are name-keyed maps; units records the unit
    string per parameter; flags carries non-fatal data-quality notices.
    """

    parameters: dict
    units: dict
    residual_norm: float
    iterations: int
    converged: bool
    covariance_diag: dict
    flags: tuple[str, ...] = ()
    seed: int | None = None

    def to_json(self) -> str:
        payload = {
            "parameters": self.parameters,
            "units": self.units,
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "covariance_diag": self.covariance_diag,
            "flags": list(self.flags),
            "seed": self.seed,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _run_fit(residual_fn, x0, bounds):
    """Shared backend; returns (values, variances, report fields)."""
    import warnings

    with warnings.catch_warnings():
        # scipy's TR subproblem divides by a zero boundary step when part
        # of the Jacobian vanishes (e.g. samples before a step edge)
        warnings.filterwarnings("ignore", category=RuntimeWarning,
                                module=r"scipy\.optimize.*")
        result = least_squares(
            residual_fn,
            x0,
            bounds=bounds,
            method="trf",
            ftol=_FTOL,
            gtol=_GTOL,
            xtol=None,
            max_nfev=_MAX_NFEV * len(x0),
        )
    m, n = result.fun.size, len(x0)
    if m > n:
        sigma2 = 2.0 * result.cost / (m - n)
        try:
            jtj_inv = np.linalg.inv(result.jac.T @ result.jac)
            variances = np.clip(np.diag(jtj_inv), 0.0, None) * sigma2
        except np.linalg.LinAlgError:
            variances = np.full(n, np.nan)
    else:
        variances = np.zeros(n)
    converged = bool(result.status > 0)
    return (
        result.x,
        variances,
        float(np.linalg.norm(result.fun)),
        int(result.nfev),
        converged,
    )


# ---------------------------------------------------------------------------
# optical doublet
# ---------------------------------------------------------------------------

def doublet_transmission(omega, kappa_l, kappa_r, kappa_ex, coupling_j, delta, omega_center):
    """Power transmission |1 - kex_- chi_- - kex_+ chi_+|^2 of the
    hybridized doublet versus absolute angular frequency `omega`.

    kappa_l/kappa_r are total ring linewidths, kappa_ex the common per-ring
    external coupling, delta = omega_l - omega_r and omega_center the mean
    ring frequency.
    """
    left = OpticalModeBare(omega_center + 0.5 * delta, max(kappa_l - kappa_ex, 1e-6), kappa_ex)
    right = OpticalModeBare(omega_center - 0.5 * delta, max(kappa_r - kappa_ex, 1e-6), kappa_ex)
    sm = supermodes(left, right, coupling_j)
    omega = np.asarray(omega, dtype=float)
    chi_minus = 1.0 / (-1j * (omega - sm.omega_minus) + 0.5 * sm.kappa_minus)
    chi_plus = 1.0 / (-1j * (omega - sm.omega_plus) + 0.5 * sm.kappa_plus)
    s21 = 1.0 - sm.kappa_ex_minus * chi_minus - sm.kappa_ex_plus * chi_plus
    return np.abs(s21) ** 2


def _dip_candidates(omega, trans):
    """Indices of the two deepest, well-separated local minima (lightly
    smoothed against point noise); one index if the spectrum has a single
    resolved dip."""
    width = max(3, len(trans) // 100)
    kernel = np.ones(width) / width
    smooth = np.convolve(trans, kernel, mode="same")
    order = max(1, len(trans) // 50)
    idx = argrelmin(smooth, order=order)[0]
    idx = sorted(idx, key=lambda i: smooth[i])
    if not idx:
        return []
    first = idx[0]
    min_sep = (omega[-1] - omega[0]) / 20.0
    for i in idx[1:]:
        if abs(omega[i] - omega[first]) > min_sep:
            return [first, i]
    return [first]


def _doublet_init(omega, trans, flags):
    """Initial (center, splitting, kappa, kappa_ex) guesses from dip
    positions, widths and depth."""
    dips = _dip_candidates(omega, trans)
    span = omega[-1] - omega[0]
    if len(dips) >= 2:
        i1, i2 = sorted(dips[:2])
        center0 = 0.5 * (omega[i1] + omega[i2])
        splitting0 = max(omega[i2] - omega[i1], span / 100.0)
    elif len(dips) == 1:
        flags.append("single-dip spectrum: splitting guess from dip width")
        center0 = omega[dips[0]]
        splitting0 = span / 10.0
    else:
        raise ConvergenceError("no transmission dip found in the spectrum")
    depth = max(1.0 - float(np.min(trans)), 1e-3)
    kappa0 = max(splitting0 / 4.0, span / 50.0)
    kappa_ex0 = 0.5 * kappa0 * (1.0 - math.sqrt(max(1.0 - depth, 0.0)))
    kappa_ex0 = min(max(kappa_ex0, 0.05 * kappa0), 0.45 * kappa0)
    return center0, splitting0, kappa0, kappa_ex0


def fit_doublet(omega, transmission, bias_axis=None) -> FitReport:
    """Recover {kappa_l, kappa_r, kappa_ex, J, delta} (plus the center
    frequency) from power-transmission spectra of the doublet.

    omega is the absolute angular-frequency grid [rad/s]; transmission the
    measured |S21|^2, either one spectrum (1-D) or a stack of shape
    (n_bias, n_freq) taken across a bias sweep with `bias_axis` of length
    n_bias.

    A single spectrum constrains only the supermode observables (center,
    splitting, mean linewidth, linewidth difference, external coupling);
    the bare-ring decomposition (kappa_l vs kappa_r, J vs delta) has an
    exact one-parameter degeneracy, so the per-spectrum result carries a
    'degenerate-decomposition' flag and only the derived supermode
    quantities are unique.  A bias sweep breaks the degeneracy: the joint
    fit shares (kappa_l, kappa_r, kappa_ex, J, omega_center) across
    spectra with the ring detuning linear in bias, delta_i = delta +
    delta_slope * bias_i, and recovers every parameter uniquely.
    """
    omega = np.asarray(omega, dtype=float)
    trans = np.asarray(transmission, dtype=float)
    if omega.ndim != 1 or omega.size < 16:
        raise ValueError("need a 1-D frequency grid with >= 16 points")
    order = np.argsort(omega)
    omega = omega[order]

    if trans.ndim == 1:
        if bias_axis is not None:
            raise ValueError("bias_axis requires a 2-D transmission stack")
        return _fit_doublet_single(omega, trans[order])
    if trans.ndim != 2 or trans.shape[1] != omega.size:
        raise ValueError("transmission stack must have shape (n_bias, n_freq)")
    if bias_axis is None or len(bias_axis) != trans.shape[0]:
        raise ValueError("bias_axis must match the stack's first dimension")
    return _fit_doublet_sweep(omega, trans[:, order], np.asarray(bias_axis, dtype=float))


def _fit_doublet_single(omega, trans) -> FitReport:
    flags: list[str] = [
        "degenerate-decomposition: a single spectrum fixes only the "
        "supermode observables; pass a bias sweep to resolve "
        "(kappa_l, kappa_r, J, delta) uniquely"
    ]
    center0, splitting0, kappa0, kappa_ex0 = _doublet_init(omega, trans, flags)
    span = omega[-1] - omega[0]
    x0 = np.array([kappa0, kappa0, kappa_ex0, 0.5 * splitting0, 0.0, center0])
    lower = np.array([1e-6 * kappa0, 1e-6 * kappa0, 1e-8 * kappa0, 0.0, -span, omega[0]])
    upper = np.array([100 * kappa0, 100 * kappa0, 50 * kappa0, 10 * span, span, omega[-1]])

    def residuals(theta):
        kl, kr, kex, j, d, c = theta
        return doublet_transmission(omega, kl, kr, kex, j, d, c) - trans

    x, variances, rnorm, nfev, converged = _run_fit(residuals, x0, (lower, upper))
    if not converged:
        raise ConvergenceError("doublet fit did not converge")
    x, variances = _canonical_ring_labels(x, variances)
    names = ("kappa_l", "kappa_r", "kappa_ex", "J", "delta", "omega_center")
    return FitReport(
        parameters=dict(zip(names, map(float, x))),
        units={n: "rad/s" for n in names},
        residual_norm=rnorm,
        iterations=nfev,
        converged=converged,
        covariance_diag=dict(zip(names, map(float, variances))),
        flags=tuple(flags),
    )


def _canonical_ring_labels(x, variances):
    """Ring relabeling (kappa_l <-> kappa_r, delta -> -delta, slope ->
    -slope) is an exact model symmetry; report the kappa_l >= kappa_r
    branch."""
    x = list(x)
    variances = list(variances)
    if x[0] < x[1]:
        x[0], x[1] = x[1], x[0]
        variances[0], variances[1] = variances[1], variances[0]
        x[4] = -x[4]
        if len(x) == 7:
            x[5] = -x[5]
    return x, variances


def _fit_doublet_sweep(omega, stack, bias) -> FitReport:
    flags: list[str] = []
    n_bias = stack.shape[0]
    centers, splittings = [], []
    kappa0 = kappa_ex0 = None
    for i in range(n_bias):
        c0, s0, k0, kex0 = _doublet_init(omega, stack[i], flags)
        centers.append(c0)
        splittings.append(s0)
        if i == int(np.argmin([abs(b) for b in bias])):
            kappa0, kappa_ex0 = k0, kex0
    splittings = np.asarray(splittings)
    j0 = 0.5 * float(np.min(splittings))
    i_min = int(np.argmin(splittings))
    delta_mag = np.sqrt(np.clip(splittings ** 2 - 4.0 * j0 ** 2, 0.0, None))
    signs = np.sign(np.arange(n_bias) - i_min)
    signs[signs == 0] = 1.0
    delta_guess = signs * delta_mag
    slope0, delta00 = np.polyfit(bias, delta_guess, 1)
    center0 = float(np.mean(centers))
    span = omega[-1] - omega[0]

    x0 = np.array([kappa0, kappa0, kappa_ex0, j0, delta00, slope0, center0])
    bias_scale = max(float(np.max(np.abs(bias))), 1.0)
    lower = np.array([1e-6 * kappa0, 1e-6 * kappa0, 1e-8 * kappa0, 0.0,
                      -10 * span, -10 * span / bias_scale, omega[0]])
    upper = np.array([100 * kappa0, 100 * kappa0, 50 * kappa0, 10 * span,
                      10 * span, 10 * span / bias_scale, omega[-1]])

    def residuals(theta):
        kl, kr, kex, j, d0, dslope, c = theta
        out = np.empty(stack.size)
        for i in range(n_bias):
            model = doublet_transmission(omega, kl, kr, kex, j, d0 + dslope * bias[i], c)
            out[i * omega.size:(i + 1) * omega.size] = model - stack[i]
        return out

    x, variances, rnorm, nfev, converged = _run_fit(residuals, x0, (lower, upper))
    if not converged:
        raise ConvergenceError("doublet sweep fit did not converge")
    x, variances = _canonical_ring_labels(x, variances)
    names = ("kappa_l", "kappa_r", "kappa_ex", "J", "delta", "delta_slope", "omega_center")
    units = {n: "rad/s" for n in names}
    units["delta_slope"] = "rad/s per bias unit"
    return FitReport(
        parameters=dict(zip(names, map(float, x))),
        units=units,
        residual_norm=rnorm,
        iterations=nfev,
        converged=converged,
        covariance_diag=dict(zip(names, map(float, variances))),
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# microwave one-port reflection
# ---------------------------------------------------------------------------

def s11_model(omega, omega_m, kappa_m, kappa_ex_m):
    """One-port reflection -1 + kappa_ex_m chi_m[omega - omega_m]."""
    omega = np.asarray(omega, dtype=float)
    chi = 1.0 / (-1j * (omega - omega_m) + 0.5 * kappa_m)
    return -1.0 + kappa_ex_m * chi


def fit_s11(omega, s11, magnitude_only: bool = False) -> FitReport:
    """Recover {omega_m, Q_m, eta_m} from complex reflection data around a
    single acoustic resonance.

    Residuals stack real and imaginary parts; pass magnitude_only=True when
    the phase is uncalibrated.  A dip shallower than the scatter of the
    off-resonant baseline is flagged as indistinguishable from background.
    """
    omega = np.asarray(omega, dtype=float)
    s11 = np.asarray(s11)
    if omega.ndim != 1 or omega.shape != s11.shape or omega.size < 8:
        raise ValueError("need matching 1-D arrays with >= 8 points")
    order = np.argsort(omega)
    omega, s11 = omega[order], s11[order]

    mag = np.abs(s11)
    flags: list[str] = []
    i_dip = int(np.argmin(mag))
    baseline = float(np.median(mag))
    dip_depth = baseline - float(mag[i_dip])
    # robust scatter; the deepest point of pure noise sits ~3 sigma below
    # the baseline, so require a clearly larger excursion
    sigma_est = 1.4826 * float(np.median(np.abs(mag - baseline))) + 1e-15
    if dip_depth < 4.5 * sigma_est:
        flags.append("no-resonance: dip depth below background scatter")

    omega_m0 = float(omega[i_dip])
    # -3 dB width of the dip in |S11|^2
    target = float(mag[i_dip]) + 0.5 * dip_depth
    above = np.where(mag > target)[0]
    left = above[above < i_dip]
    right = above[above > i_dip]
    if left.size and right.size:
        width0 = float(omega[right[0]] - omega[left[-1]])
    else:
        width0 = (omega[-1] - omega[0]) / 10.0
    kappa0 = max(width0, (omega[-1] - omega[0]) / 200.0)
    eta0 = min(max(0.5 * (1.0 - float(mag[i_dip])), 1e-3), 0.49)

    x0 = np.array([omega_m0, kappa0, eta0 * kappa0])
    lower = np.array([omega[0], 1e-6 * kappa0, 0.0])
    upper = np.array([omega[-1], 1e3 * kappa0, 1e3 * kappa0])

    if magnitude_only:
        def residuals(theta):
            return np.abs(s11_model(omega, *theta)) - mag
    else:
        def residuals(theta):
            diff = s11_model(omega, *theta) - s11
            return np.concatenate([diff.real, diff.imag])

    x, variances, rnorm, nfev, converged = _run_fit(residuals, x0, (lower, upper))
    if not converged:
        raise ConvergenceError("S11 fit did not converge")
    omega_m, kappa_m, kappa_ex_m = map(float, x)
    var_om, var_km, var_kexm = map(float, variances)
    q_m = omega_m / kappa_m
    eta_m = kappa_ex_m / kappa_m
    params = {
        "omega_m": omega_m,
        "kappa_m": kappa_m,
        "kappa_ex_m": kappa_ex_m,
        "Q_m": q_m,
        "eta_m": eta_m,
    }
    units = {
        "omega_m": "rad/s", "kappa_m": "rad/s", "kappa_ex_m": "rad/s",
        "Q_m": "1", "eta_m": "1",
    }
    # first-order propagation for the derived quantities
    var_q = q_m ** 2 * (var_om / omega_m ** 2 + var_km / kappa_m ** 2)
    var_eta = eta_m ** 2 * (
        (var_kexm / kappa_ex_m ** 2 if kappa_ex_m > 0 else 0.0) + var_km / kappa_m ** 2
    )
    cov = {
        "omega_m": var_om, "kappa_m": var_km, "kappa_ex_m": var_kexm,
        "Q_m": var_q, "eta_m": var_eta,
    }
    return FitReport(
        parameters=params,
        units=units,
        residual_norm=rnorm,
        iterations=nfev,
        converged=converged,
        covariance_diag=cov,
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# efficiency-vs-power
# ---------------------------------------------------------------------------

def fit_efficiency_power(power_in, eta_tot, fixed: dict) -> FitReport:
    """Recover the single-photon cooperativity C0 and vacuum coupling g0
    from (P_in [W], eta_tot) data in the low-cooperativity regime.

    `fixed` must supply eta_probes, eta_fiber_fiber, eta_m, eta_o [linear
    ratios], kappa_o, kappa_m [rad/s] and omega_l [rad/s].  The model is
    linear through the origin,

        eta_tot = 16 eta_probes eta_ff eta_m eta_o^2 C0 P_in/(hbar w_L k_o),

    solved as a least-squares slope; g0 = 2 sqrt(kappa_o kappa_m C0 / 4)
    (the factor two reflecting the optical hybridization).  Data with more
    than 10% relative curvature are flagged as out-of-regime.
    """
    p = np.atleast_1d(np.asarray(power_in, dtype=float))
    eta = np.atleast_1d(np.asarray(eta_tot, dtype=float))
    if p.shape != eta.shape or p.size < 1:
        raise ValueError("need matching power/efficiency arrays")
    if np.any(p <= 0.0) or np.any(eta <= 0.0):
        raise ValueError("powers and efficiencies must be positive")
    required = ("eta_probes", "eta_fiber_fiber", "eta_m", "eta_o", "kappa_o", "kappa_m", "omega_l")
    missing = [k for k in required if k not in fixed]
    if missing:
        raise ValueError(f"missing fixed parameters: {missing}")

    flags: list[str] = []
    if p.size >= 3:
        # deviation of the best power law from slope one
        coeffs = np.polyfit(np.log(p), np.log(eta), 1)
        if abs(coeffs[0] - 1.0) > 0.10:
            flags.append(
                f"out-of-regime: log-log slope {coeffs[0]:.3f} deviates from 1"
            )

    slope = float(np.dot(p, eta) / np.dot(p, p))
    residual = eta - slope * p
    rnorm = float(np.linalg.norm(residual))
    if p.size > 1:
        sigma2 = float(np.dot(residual, residual) / (p.size - 1))
        var_slope = sigma2 / float(np.dot(p, p))
    else:
        var_slope = 0.0
    if p.size >= 2:
        rel_dev = float(np.max(np.abs(residual) / eta))
        if rel_dev > 0.10 and not flags:
            flags.append(f"out-of-regime: relative curvature {rel_dev:.3f} > 0.1")

    conversion = (
        HBAR * fixed["omega_l"] * fixed["kappa_o"]
        / (
            16.0
            * fixed["eta_probes"]
            * fixed["eta_fiber_fiber"]
            * fixed["eta_m"]
            * fixed["eta_o"] ** 2
        )
    )
    c0 = slope * conversion
    var_c0 = var_slope * conversion ** 2
    g0 = 2.0 * math.sqrt(fixed["kappa_o"] * fixed["kappa_m"] * c0 / 4.0)
    var_g0 = (g0 / (2.0 * c0)) ** 2 * var_c0 if c0 > 0 else 0.0

    params = {"C0": float(c0), "g0": float(g0), "slope": slope}
    units = {"C0": "1", "g0": "rad/s", "slope": "1/W"}
    cov = {"C0": float(var_c0), "g0": float(var_g0), "slope": float(var_slope)}
    return FitReport(
        parameters=params,
        units=units,
        residual_norm=rnorm,
        iterations=1,
        converged=True,
        covariance_diag=cov,
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# RC step response
# ---------------------------------------------------------------------------

def rc_step_model(t, amplitude, tau, t0):
    t = np.asarray(t, dtype=float)
    rise = 1.0 - np.exp(-np.clip(t - t0, 0.0, None) / tau)
    return amplitude * np.where(t >= t0, rise, 0.0)


def fit_rc_step(t, envelope) -> FitReport:
    """Recover {tau_rc, amplitude, t0} from a demodulated envelope with one
    rising edge, by least squares against A (1 - exp(-(t - t0)/tau)).

    Initialization: plateau from the latest samples, t0 from the 10%
    crossing, tau from the 10-90% rise time divided by 2.2.
    """
    t = np.asarray(t, dtype=float)
    env = np.asarray(envelope, dtype=float)
    if t.ndim != 1 or t.shape != env.shape or t.size < 8:
        raise ValueError("need matching 1-D arrays with >= 8 points")
    order = np.argsort(t)
    t, env = t[order], env[order]

    tail = env[-max(3, t.size // 10):]
    plateau = float(np.mean(tail))
    base = float(np.min(env))
    if plateau - base <= 1e-12 or plateau <= base + 5.0 * float(np.std(tail) + 1e-15):
        raise ConvergenceError("no rising edge detected in the envelope")

    lo = base + 0.1 * (plateau - base)
    hi = base + 0.9 * (plateau - base)
    above_lo = np.where(env >= lo)[0]
    above_hi = np.where(env >= hi)[0]
    if above_lo.size == 0 or above_hi.size == 0:
        raise ConvergenceError("no rising edge detected in the envelope")
    t_lo, t_hi = float(t[above_lo[0]]), float(t[above_hi[0]])
    tau0 = max((t_hi - t_lo) / 2.2, float(t[1] - t[0]))
    t00 = max(t_lo - 0.105 * tau0, float(t[0]))

    x0 = np.array([plateau, tau0, t00])
    span = float(t[-1] - t[0])
    lower = np.array([0.0, 1e-6 * tau0, float(t[0]) - span])
    upper = np.array([10.0 * plateau, 1e3 * tau0, float(t[-1])])

    def residuals(theta):
        return rc_step_model(t, *theta) - env

    x, variances, rnorm, nfev, converged = _run_fit(residuals, x0, (lower, upper))
    if not converged:
        raise ConvergenceError("RC step fit did not converge")
    names = ("amplitude", "tau_rc", "t0")
    units = {"amplitude": "signal", "tau_rc": "s", "t0": "s"}
    return FitReport(
        parameters=dict(zip(names, map(float, x))),
        units=units,
        residual_norm=rnorm,
        iterations=nfev,
        converged=converged,
        covariance_diag=dict(zip(names, map(float, variances))),
    )


# ---------------------------------------------------------------------------
# photothermal three-plateau model
# ---------------------------------------------------------------------------

def fit_photothermal(f, response_mag) -> FitReport:
    """Recover the three-plateau model {a_kerr, a_local, f_local, a_global,
    f_global} from |H(f)| data (f in Hz, logarithmically spread)."""
    from .timedomain import PhotothermalModel, photothermal_response

    f = np.asarray(f, dtype=float)
    mag = np.asarray(response_mag, dtype=float)
    if f.shape != mag.shape or f.size < 10:
        raise ValueError("need matching arrays with >= 10 points")
    order = np.argsort(f)
    f, mag = f[order], mag[order]

    a_kerr0 = float(np.mean(mag[-3:]))
    dc0 = float(np.mean(mag[:3]))
    a_local0 = max(0.3 * (dc0 - a_kerr0), 1e-6 * dc0)
    a_global0 = max(dc0 - a_kerr0 - a_local0, 1e-6 * dc0)
    f_local0 = float(np.sqrt(f[0] * f[-1]))
    f_global0 = f_local0 / 30.0

    x0 = np.array([a_kerr0, a_local0, f_local0, a_global0, f_global0])
    lower = np.array([0.0, 0.0, f[0] / 10.0, 0.0, f[0] / 100.0])
    upper = np.array([10 * dc0, 10 * dc0, f[-1] * 10.0, 10 * dc0, f[-1]])

    def residuals(theta):
        a_k, a_l, f_l, a_g, f_g = theta
        if f_g >= f_l:  # keep the corners ordered
            f_g = 0.999 * f_l
        model = PhotothermalModel(a_k, a_l, f_l, a_g, f_g)
        return np.abs(photothermal_response(f, model)) - mag

    x, variances, rnorm, nfev, converged = _run_fit(residuals, x0, (lower, upper))
    if not converged:
        raise ConvergenceError("photothermal fit did not converge")
    names = ("a_kerr", "a_local", "f_local", "a_global", "f_global")
    units = {"a_kerr": "signal", "a_local": "signal", "f_local": "Hz",
             "a_global": "signal", "f_global": "Hz"}
    return FitReport(
        parameters=dict(zip(names, map(float, x))),
        units=units,
        residual_norm=rnorm,
        iterations=nfev,
        converged=converged,
        covariance_diag=dict(zip(names, map(float, variances))),
    )
