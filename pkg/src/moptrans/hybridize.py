"""Photonic-molecule supermode structure and pump-dressed couplings.

Two evanescently coupled rings hybridize into a symmetric (lower, "-") and
an antisymmetric (upper, "+") supermode.  Writing delta = omega_l - omega_r,
mu = kappa_l - kappa_r and D = mu/2 + i*delta, the complex splitting is

    W = sqrt(D**2 - 4 J**2),   branch fixed so Im(W) >= 0
                               (and Re(W) >= 0 when Im(W) == 0),

and the supermodes sit at

    omega_pm = omega_bar +- Im(W)/2,      kappa_pm = kappa_bar +- Re(W).

Note the full factor on the linewidths: this is what the direct 2x2
eigendecomposition gives (and what the supermode susceptibilities require);
it reduces to the bare rings at J = 0.

Eigenvector gauge: participation amplitudes are normalized with the first
(left-ring) component real and non-negative; when that component vanishes
the right-ring component is made real positive instead.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .model import (
    Configuration,
    DeviceParams,
    OpticalModeBare,
    PumpConfig,
    photon_flux,
)

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class Supermodes:
    """Hybridized optical doublet.

    Frequencies/linewidths in rad/s; alpha/beta are the complex
    participation amplitudes of the left/right bare rings in each
    supermode (|alpha|^2 + |beta|^2 = 1 per mode).  delta_omega and
    delta_kappa are the signed differences omega_plus - omega_minus and
    kappa_plus - kappa_minus.
    """

    omega_minus: float
    omega_plus: float
    kappa_minus: float
    kappa_plus: float
    kappa_ex_minus: float
    kappa_ex_plus: float
    alpha_minus: complex
    alpha_plus: complex
    beta_minus: complex
    beta_plus: complex
    delta_omega: float
    delta_kappa: float

    def __post_init__(self):
        if self.omega_plus < self.omega_minus:
            raise ValueError("supermode ordering violated: omega_plus < omega_minus")
        if self.kappa_minus <= 0.0 or self.kappa_plus <= 0.0:
            raise ValueError("supermode linewidths must be positive")
        for a, b in ((self.alpha_minus, self.beta_minus), (self.alpha_plus, self.beta_plus)):
            norm = abs(a) ** 2 + abs(b) ** 2
            if abs(norm - 1.0) > _NORM_TOL:
                raise ValueError(f"participation amplitudes not normalized: {norm!r}")

    @property
    def splitting(self) -> float:
        return self.delta_omega


@dataclass(frozen=True)
class EffectiveCouplings:
    """Pump-dressed multi-photon coupling rates g_-+ [rad/s] and the
    steady-state supermode amplitudes [sqrt(photons)] that produced them."""

    g_minus: complex
    g_plus: complex
    alpha_ss_minus: complex
    alpha_ss_plus: complex


def _branch_fixed_w(d: complex, j: float) -> complex:
    """Complex splitting W = sqrt(D^2 - 4J^2) with the documented branch."""
    w = cmath.sqrt(d * d - 4.0 * j * j)
    if w.imag < 0.0 or (w.imag == 0.0 and w.real < 0.0):
        w = -w
    return w


def _gauge(v: tuple[complex, complex]) -> tuple[complex, complex]:
    """Normalize and fix the phase so the dominant-first component is real
    and non-negative."""
    a, b = v
    n = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    a, b = a / n, b / n
    ref = a if abs(a) > 1e-12 else b
    phase = ref / abs(ref)
    return a / phase, b / phase


def supermodes(left: OpticalModeBare, right: OpticalModeBare, coupling_j: float) -> Supermodes:
    """Diagonalize the two-ring system.

    External couplings of the supermodes are apportioned by bare-ring
    participation: kappa_ex_pm = |alpha_pm|^2 kappa_ex_l + |beta_pm|^2
    kappa_ex_r.  For the fitted device (equal per-ring kappa_ex) this makes
    both supermodes equally coupled, reproducing the measured eta_o.
    """
    if coupling_j < 0.0:
        raise ValueError("J must be non-negative")
    delta = left.omega - right.omega
    mu = left.kappa - right.kappa
    omega_bar = 0.5 * (left.omega + right.omega)
    kappa_bar = 0.5 * (left.kappa + right.kappa)
    d = 0.5 * mu + 1j * delta

    if coupling_j == 0.0 and delta == 0.0 and mu == 0.0:
        # Degenerate eigenbasis: any basis diagonalizes; return the bare
        # rings (identity assignment) for determinism.
        return Supermodes(
            omega_minus=left.omega, omega_plus=right.omega,
            kappa_minus=left.kappa, kappa_plus=right.kappa,
            kappa_ex_minus=left.kappa_ex, kappa_ex_plus=right.kappa_ex,
            alpha_minus=1.0 + 0.0j, beta_minus=0.0j,
            alpha_plus=0.0j, beta_plus=1.0 + 0.0j,
            delta_omega=0.0, delta_kappa=0.0,
        )

    w = _branch_fixed_w(d, coupling_j)
    omega_minus = omega_bar - 0.5 * w.imag
    omega_plus = omega_bar + 0.5 * w.imag
    kappa_minus = kappa_bar - w.real
    kappa_plus = kappa_bar + w.real

    # Eigenvectors of the frequency-domain matrix [[chi_l^-1, -iJ],
    # [-iJ, chi_r^-1]] (the off-diagonal sign follows from the -J coupling
    # Hamiltonian; it makes the lower mode symmetric).  For the eigenvalue
    # shifted by s*W/2 the (left, right) components are proportional to
    # (iJ, (D - s W)/2) or ((-D - s W)/2, iJ); use whichever row is better
    # conditioned.
    vecs = []
    for sign in (-1.0, +1.0):
        v1 = (1j * coupling_j, 0.5 * (d - sign * w))
        v2 = (0.5 * (-d - sign * w), 1j * coupling_j)
        pick = v1 if abs(v1[0]) ** 2 + abs(v1[1]) ** 2 >= abs(v2[0]) ** 2 + abs(v2[1]) ** 2 else v2
        vecs.append(_gauge(pick))
    (alpha_minus, beta_minus), (alpha_plus, beta_plus) = vecs

    kappa_ex_minus = abs(alpha_minus) ** 2 * left.kappa_ex + abs(beta_minus) ** 2 * right.kappa_ex
    kappa_ex_plus = abs(alpha_plus) ** 2 * left.kappa_ex + abs(beta_plus) ** 2 * right.kappa_ex

    return Supermodes(
        omega_minus=omega_minus, omega_plus=omega_plus,
        kappa_minus=kappa_minus, kappa_plus=kappa_plus,
        kappa_ex_minus=kappa_ex_minus, kappa_ex_plus=kappa_ex_plus,
        alpha_minus=alpha_minus, alpha_plus=alpha_plus,
        beta_minus=beta_minus, beta_plus=beta_plus,
        # taken from W directly: differencing the stored absolute
        # frequencies would quantize at the float64 resolution of omega
        delta_omega=w.imag,
        delta_kappa=2.0 * w.real,
    )


def eigen_oracle(
    left: OpticalModeBare,
    right: OpticalModeBare,
    coupling_j: float,
    omega_ref: float = 0.0,
) -> tuple[complex, complex]:
    """Independent verification path: eigenvalues of the 2x2 inverse
    susceptibility matrix at s = 0, via numpy's eigensolver.

    Frequencies are measured relative to `omega_ref` (pass the mean optical
    frequency for a well-conditioned comparison of the splitting).  Returns
    (lambda_minus, lambda_plus) ordered by ascending imaginary part, ties
    broken by ascending real part.
    """
    import numpy as np

    m = np.array(
        [
            [1j * (left.omega - omega_ref) + 0.5 * left.kappa, -1j * coupling_j],
            [-1j * coupling_j, 1j * (right.omega - omega_ref) + 0.5 * right.kappa],
        ],
        dtype=complex,
    )
    lam = np.linalg.eigvals(m)
    lam = sorted(lam, key=lambda z: (z.imag, z.real))
    return complex(lam[0]), complex(lam[1])


def steady_state_amplitudes(
    sm: Supermodes, pump: PumpConfig, eta_fiber_chip: float
) -> tuple[complex, complex]:
    """Steady-state supermode amplitudes under a resonant pump.

    alpha_pm = sqrt(kappa_ex_pm) s_in / (-i Delta_pm + kappa_pm / 2) with
    |s_in|^2 the photon flux in the bus waveguide.  Triple resonance fixes
    Delta on the addressed supermode to zero and on the other one to the
    (negative of the) supermode splitting.
    """
    flux = photon_flux(eta_fiber_chip * pump.power_in, pump.omega_l_effective)
    s_in = math.sqrt(flux)
    if pump.configuration is Configuration.ANTI_STOKES:
        delta_minus = 0.0
        delta_plus = -(sm.omega_plus - sm.omega_minus)
    else:
        delta_plus = 0.0
        delta_minus = sm.omega_plus - sm.omega_minus
    a_minus = math.sqrt(sm.kappa_ex_minus) * s_in / (-1j * delta_minus + 0.5 * sm.kappa_minus)
    a_plus = math.sqrt(sm.kappa_ex_plus) * s_in / (-1j * delta_plus + 0.5 * sm.kappa_plus)
    return a_minus, a_plus


def left_ring_decomposition(sm: Supermodes) -> tuple[complex, complex]:
    """Coefficients (x, y) of the acoustically coupled (left) ring in the
    supermode basis, a_l = x a_- + y a_+, taken as the projections
    (alpha_-*, alpha_+*)."""
    return sm.alpha_minus.conjugate(), sm.alpha_plus.conjugate()


def effective_couplings(
    g0: float,
    x: complex,
    y: complex,
    alpha_ss_minus: complex,
    alpha_ss_plus: complex,
) -> EffectiveCouplings:
    """Pump-dressed coupling rates

        g_- = g0 (|x|^2 alpha_- + x* y alpha_+),
        g_+ = g0 (|y|^2 alpha_+ + x y* alpha_-).

    (x, y) must decompose the left ring in the supermode basis; a norm away
    from one beyond the physical non-orthogonality budget signals
    inconsistent hybridization data.
    """
    norm = abs(x) ** 2 + abs(y) ** 2
    if abs(norm - 1.0) > 1e-3:
        raise ValueError(f"(x, y) not normalized: |x|^2+|y|^2 = {norm!r}")
    g_minus = g0 * (abs(x) ** 2 * alpha_ss_minus + x.conjugate() * y * alpha_ss_plus)
    g_plus = g0 * (abs(y) ** 2 * alpha_ss_plus + x * y.conjugate() * alpha_ss_minus)
    return EffectiveCouplings(
        g_minus=g_minus, g_plus=g_plus,
        alpha_ss_minus=alpha_ss_minus, alpha_ss_plus=alpha_ss_plus,
    )


@dataclass(frozen=True)
class OperatingPoint:
    """Everything the frequency- and time-domain engines need, evaluated at
    one pump setting.

    The "active" optical supermode is the one addressed by the converted
    sideband: a_+ for anti-Stokes pumping, a_- for Stokes pumping.
    """

    configuration: Configuration
    omega_m: float
    kappa_m: float
    kappa_ex_m: float
    kappa_minus: float
    kappa_plus: float
    kappa_ex_minus: float
    kappa_ex_plus: float
    g_minus: complex
    g_plus: complex
    splitting: float
    n_pump: float = 0.0

    @property
    def g_active(self) -> complex:
        return self.g_plus if self.configuration is Configuration.ANTI_STOKES else self.g_minus

    @property
    def kappa_active(self) -> float:
        return self.kappa_plus if self.configuration is Configuration.ANTI_STOKES else self.kappa_minus

    @property
    def kappa_ex_active(self) -> float:
        return (
            self.kappa_ex_plus
            if self.configuration is Configuration.ANTI_STOKES
            else self.kappa_ex_minus
        )

    @property
    def cooperativity(self) -> float:
        """C = 4 |g|^2 / (kappa_o kappa_m) of the active conversion pair."""
        return 4.0 * abs(self.g_active) ** 2 / (self.kappa_active * self.kappa_m)

    @property
    def sideband_resolution(self) -> float:
        """Diagnostic max(kappa_pm)/omega_m; the dropped counter-rotating
        terms are suppressed by at least half this factor."""
        return max(self.kappa_minus, self.kappa_plus) / self.omega_m


def operating_point(
    params: DeviceParams,
    pump: PumpConfig,
    acoustic_mode=None,
) -> OperatingPoint:
    """Assemble the full operating point for `params` under `pump`.

    Uses the transduction acoustic mode unless another is supplied.
    """
    mode = acoustic_mode if acoustic_mode is not None else params.transduction_mode
    sm = supermodes(params.left, params.right, params.coupling_j)
    a_minus, a_plus = steady_state_amplitudes(sm, pump, params.losses.eta_fiber_chip)
    x, y = left_ring_decomposition(sm)
    coup = effective_couplings(params.g0, x, y, a_minus, a_plus)
    n_pump = (
        abs(a_minus) ** 2
        if pump.configuration is Configuration.ANTI_STOKES
        else abs(a_plus) ** 2
    )
    return OperatingPoint(
        configuration=pump.configuration,
        omega_m=mode.omega_m,
        kappa_m=mode.kappa_m,
        kappa_ex_m=mode.kappa_ex_m,
        kappa_minus=sm.kappa_minus,
        kappa_plus=sm.kappa_plus,
        kappa_ex_minus=sm.kappa_ex_minus,
        kappa_ex_plus=sm.kappa_ex_plus,
        g_minus=coup.g_minus,
        g_plus=coup.g_plus,
        splitting=sm.splitting,
        n_pump=n_pump,
    )
