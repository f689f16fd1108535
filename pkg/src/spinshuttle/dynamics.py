"""Exact dynamics: auxiliary-trajectory integration and the analytic state.

For arbitrary controls (x0(t), alpha(t)) the two driven-oscillator equations

    xc_ddot = -omega^2 (x_c - x0),      ac_ddot = -omega^2 (a_c - alpha)

started from rest at zero determine, together with three accumulated phases,
the full time-dependent solution for an initial oscillator eigenstate times a
spinor.  ``integrate_auxiliary`` produces the trajectories and phases on a
uniform time grid; ``exact_state`` assembles the wavefunction at any stored
instant by a chain of spectral translations and phase multiplications.  This
is the ground-truth oracle the split-operator propagator is tested against
(interaction-free case only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysicalScales, SimulationGrid, SpinorField, harmonic_eigenstate

__all__ = ["AuxiliaryTrace", "StepSizeError", "exact_state", "integrate_auxiliary"]


class StepSizeError(RuntimeError):
    """Embedded error estimate of the fixed-step integrator above tolerance."""


@dataclass
class AuxiliaryTrace:
    """Auxiliary trajectories and phases sampled at every integrator step."""

    times: np.ndarray
    xc: np.ndarray
    xc_dot: np.ndarray
    ac: np.ndarray
    ac_dot: np.ndarray
    phi_alpha: np.ndarray
    phi_x0: np.ndarray
    phi_sigma: np.ndarray
    scales: PhysicalScales

    def index_of(self, t: float) -> int:
        """Index of the sample at time t; t must be a stored instant."""
        h = self.times[1] - self.times[0]
        i = int(round(t / h))
        if i < 0 or i >= len(self.times) or abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a sampled instant of this trace")
        return i

    def write_csv(self, path):
        from .csvio import write_columns
        write_columns(
            path,
            ["t", "xc", "xc_dot", "ac", "ac_dot", "phi_alpha", "phi_x0", "phi_sigma"],
            [self.times, self.xc, self.xc_dot, self.ac, self.ac_dot,
             self.phi_alpha, self.phi_x0, self.phi_sigma])


def _as_control_funcs(controls):
    """Accept a protocol object, an (x0, alpha) pair, or t -> (x0, alpha)."""
    if hasattr(controls, "x0") and hasattr(controls, "alpha"):
        return (lambda t: float(controls.x0(t))), (lambda t: float(controls.alpha(t)))
    if isinstance(controls, (tuple, list)) and len(controls) == 2:
        x0f, alf = controls
        return (lambda t: float(x0f(t))), (lambda t: float(alf(t)))
    if callable(controls):
        return (lambda t: float(controls(t)[0])), (lambda t: float(controls(t)[1]))
    raise TypeError("controls must be a protocol, an (x0, alpha) pair, or a callable")


def integrate_auxiliary(controls, t_f: float, n_samples: int,
                        scales: PhysicalScales = PhysicalScales(),
                        tol: float | None = 1e-8) -> AuxiliaryTrace:
    """Integrate the auxiliary system and its phases from rest at zero.

    Classic fixed-step RK4 on the 7-vector (xc, xc_dot, ac, ac_dot,
    phi_alpha, phi_x0, phi_sigma); each step is taken as two half-steps and
    the difference from the single full step provides a Richardson error
    estimate.  If the accumulated estimate exceeds ``tol`` the step size is
    too coarse and ``StepSizeError`` is raised (pass ``tol=None`` to skip).
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    x0f, alf = _as_control_funcs(controls)
    m, w, hbar = scales.m, scales.omega, scales.hbar
    w2 = w * w

    def rhs(t, y):
        xc, xcd, ac, acd, _, _, _ = y
        x0 = x0f(t)
        al = alf(t)
        lag_a = 0.5 * m * acd * acd / w2 - 0.5 * m * ac * ac + m * ac * al
        lag_x = 0.5 * m * xcd * xcd - 0.5 * m * w2 * (xc - x0) ** 2
        return (xcd, -w2 * (xc - x0), acd, -w2 * (ac - al),
                -lag_a / hbar, -lag_x / hbar, -(m / hbar) * acd * x0)

    def rk4(t, y, h):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, tuple(y[i] + 0.5 * h * k1[i] for i in range(7)))
        k3 = rhs(t + 0.5 * h, tuple(y[i] + 0.5 * h * k2[i] for i in range(7)))
        k4 = rhs(t + h, tuple(y[i] + h * k3[i] for i in range(7)))
        return tuple(y[i] + h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                     for i in range(7))

    n_steps = n_samples - 1
    h = t_f / n_steps
    out = np.zeros((n_samples, 7))
    y = (0.0,) * 7
    err = 0.0
    for i in range(n_steps):
        t = i * h
        full = rk4(t, y, h)
        half = rk4(t + 0.5 * h, rk4(t, y, 0.5 * h), 0.5 * h)
        err += max(abs(full[j] - half[j]) for j in range(7)) / 15.0
        y = half
        out[i + 1] = y
    if tol is not None and err > tol:
        raise StepSizeError(
            f"accumulated error estimate {err:.2e} exceeds tol={tol:.0e}; "
            f"raise n_samples (got {n_samples})")
    times = np.linspace(0.0, t_f, n_samples)
    return AuxiliaryTrace(times, out[:, 0], out[:, 1], out[:, 2], out[:, 3],
                          out[:, 4], out[:, 5], out[:, 6], scales)


def _translate(f: np.ndarray, shift: float, k: np.ndarray) -> np.ndarray:
    """Spectral translation f(x) -> f(x - shift)."""
    return np.fft.ifft(np.fft.fft(f) * np.exp(-1j * k * shift))


def exact_state(trace: AuxiliaryTrace, t: float, n: int, chi,
                grid: SimulationGrid) -> SpinorField:
    """Analytic solution at a stored instant for initial state chi (x) psi_n.

    Factors applied to psi_n, innermost first: momentum boost
    exp(i m xc_dot x / hbar); translation by x_c; global phase
    exp(-i phi_x0); then per spin branch (sigma = +1 up, -1 down) a
    translation by sigma*ac_dot/omega^2, the phase exp(-i sigma m a_c x /
    hbar) and the rotation exp(-i sigma phi_sigma); finally the global
    phases exp(-i phi_alpha) and exp(-i E_n t / hbar).  Translations are
    spectral, exact for band-limited states.
    """
    i = trace.index_of(t)
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (2,):
        raise ValueError("chi must have two components")
    if abs(np.vdot(chi, chi) - 1.0) > 1e-9:
        raise ValueError("chi must be unit-norm")
    sc = trace.scales
    m, w2, hbar = sc.m, sc.omega ** 2, sc.hbar
    xc = trace.xc[i]
    xc_dot = trace.xc_dot[i]
    ac = trace.ac[i]
    ac_dot = trace.ac_dot[i]

    spin_shift = ac_dot / w2
    width = sc.trap_length * np.sqrt(2 * n + 1)
    hi = max(xc + spin_shift, xc - spin_shift, 0.0)
    lo = min(xc + spin_shift, xc - spin_shift, 0.0)
    if grid.x_max - hi < 5.0 * width or lo - grid.x_min < 5.0 * width:
        raise ValueError(
            f"translated state within 5 widths of the grid edge "
            f"(centres {lo:.3g}..{hi:.3g} on [{grid.x_min}, {grid.x_max}])")

    psi = harmonic_eigenstate(n, sc, grid).astype(complex)
    psi *= np.exp(1j * m * xc_dot * grid.x / hbar)
    psi = _translate(psi, xc, grid.k)
    psi *= np.exp(-1j * trace.phi_x0[i])

    comps = []
    for sigma, weight in ((+1.0, chi[0]), (-1.0, chi[1])):
        g = _translate(psi, sigma * spin_shift, grid.k)
        g *= np.exp(-1j * sigma * m * ac * grid.x / hbar)
        g *= np.exp(-1j * sigma * trace.phi_sigma[i])
        comps.append(weight * g)

    e_n = (n + 0.5) * hbar * sc.omega
    global_phase = np.exp(-1j * (trace.phi_alpha[i] + e_n * t / hbar))
    return SpinorField(grid, comps[0] * global_phase, comps[1] * global_phase)
