"""Closed-form control laws for transport with simultaneous spin flip.

Two families:

* ``StaProtocol`` -- the inverse-engineered shortcut.  The auxiliary
  trajectories are fifth/sixth-order polynomials in s = t/t_f chosen so that
  transport over a distance d finishes with no residual excitation and the
  accumulated spin-rotation phase is exactly pi/2 (a full spin flip of a
  sigma_x eigenstate).  The trap position and coupling strength follow from
  the driven-oscillator relations x0 = x_c + xcdd/omega^2 and
  alpha = a_c + acdd/omega^2.
* ``AdiabaticProtocol`` -- the constant-coupling, constant-velocity
  reference.  Excitation-free only when omega*t_f is a multiple of 2*pi;
  flips the spin after transporting d_sp = (pi/2)*hbar/(m*alpha0).

The a_c polynomial amplitude has a pole at 5*(omega*t_f)^2 = 66
(t_f ~ 3.6332/omega); designs within a relative guard band of the pole are
rejected at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Union

import numpy as np
from scipy.integrate import simpson

from .core import PhysicalScales

__all__ = [
    "AdiabaticProtocol",
    "ControlTrace",
    "QuadratureError",
    "SingularDesignError",
    "StaProtocol",
    "ValidationReport",
    "adiabatic_design_report",
    "phase_sigma",
    "spin_flip_length",
    "spin_flip_time",
    "sta_design_report",
    "validate",
]

SINGULAR_GUARD = 1e-3          # relative half-width of the rejected band around the pole
RANGE_SLACK = 1e-9             # relative tolerance for t in [0, t_f] checks


class SingularDesignError(ValueError):
    """Protocol duration too close to the a_c amplitude pole."""


class QuadratureError(RuntimeError):
    """Phase quadrature error estimate above the requested tolerance."""


def _check_range(t, t_f: float):
    slack = RANGE_SLACK * max(1.0, t_f)
    if isinstance(t, (int, float)):      # scalar fast path, hot in ODE loops
        if t < -slack or t > t_f + slack:
            raise ValueError(f"t must lie in [0, {t_f}]")
        return t
    t = np.asarray(t, dtype=float)
    if np.any(t < -slack) or np.any(t > t_f + slack):
        raise ValueError(f"t must lie in [0, {t_f}]")
    return t


def singularity_margin(t_f: float, omega: float) -> float:
    """Relative distance |5*(omega*t_f)^2 - 66| / 66 from the design pole."""
    return abs(5.0 * (omega * t_f) ** 2 - 66.0) / 66.0


@dataclass(frozen=True)
class StaProtocol:
    """Shortcut protocol: transport by d in time t_f with a spin flip."""

    d: float
    t_f: float
    scales: PhysicalScales = PhysicalScales()

    def __post_init__(self):
        if self.t_f <= 0:
            raise ValueError("t_f must be positive")
        if self.d == 0:
            raise ValueError("transport distance d must be nonzero")
        if singularity_margin(self.t_f, self.scales.omega) < SINGULAR_GUARD:
            raise SingularDesignError(
                f"t_f={self.t_f} is within the guard band of the singular "
                f"duration sqrt(66/5)/omega ~ {math.sqrt(66 / 5) / self.scales.omega:.6f}")

    @property
    def ac_amplitude(self) -> float:
        """Coefficient of the a_c shape polynomial s^3(s-1)^3."""
        sc = self.scales
        wtf2 = (sc.omega * self.t_f) ** 2
        return -231.0 * math.pi * (sc.hbar / (sc.m * self.d)) * wtf2 / (5.0 * wtf2 - 66.0)

    # --- transport trajectory ---------------------------------------------
    def xc(self, t):
        s = _check_range(t, self.t_f) / self.t_f
        return self.d * s ** 3 * (10.0 + s * (-15.0 + 6.0 * s))

    def xc_dot(self, t):
        s = _check_range(t, self.t_f) / self.t_f
        return self.d * s ** 2 * (30.0 + s * (-60.0 + 30.0 * s)) / self.t_f

    def xc_ddot(self, t):
        s = _check_range(t, self.t_f) / self.t_f
        return self.d * s * (60.0 + s * (-180.0 + 120.0 * s)) / self.t_f ** 2

    def x0(self, t):
        """Trap position: x_c + xc_ddot/omega^2."""
        return self.xc(t) + self.xc_ddot(t) / self.scales.omega ** 2

    # --- spin trajectory ----------------------------------------------------
    def ac(self, t):
        s = _check_range(t, self.t_f) / self.t_f
        return self.ac_amplitude * s ** 3 * (s - 1.0) ** 3

    def ac_dot(self, t):
        s = _check_range(t, self.t_f) / self.t_f
        return self.ac_amplitude * s ** 2 * (-3.0 + s * (12.0 + s * (-15.0 + 6.0 * s))) / self.t_f

    def ac_ddot(self, t):
        s = _check_range(t, self.t_f) / self.t_f
        return self.ac_amplitude * s * (-6.0 + s * (36.0 + s * (-60.0 + 30.0 * s))) / self.t_f ** 2

    def alpha(self, t):
        """Coupling strength: a_c + ac_ddot/omega^2; vanishes at both ends."""
        return self.ac(t) + self.ac_ddot(t) / self.scales.omega ** 2

    def controls(self, t):
        return self.x0(t), self.alpha(t)


@dataclass(frozen=True)
class AdiabaticProtocol:
    """Linear trap ramp at constant coupling alpha0."""

    alpha0: float
    d: float
    t_f: float
    scales: PhysicalScales = PhysicalScales()

    def __post_init__(self):
        if self.t_f <= 0:
            raise ValueError("t_f must be positive")

    def x0(self, t):
        return self.d * _check_range(t, self.t_f) / self.t_f

    def alpha(self, t):
        t = _check_range(t, self.t_f)
        if isinstance(t, np.ndarray):
            return np.full_like(t, self.alpha0)
        return self.alpha0

    def ac(self, t):
        """a_c(t) = alpha0*(1 - cos(omega t)); exact for constant coupling."""
        t = _check_range(t, self.t_f)
        return self.alpha0 * (1.0 - np.cos(self.scales.omega * t))

    def ac_dot(self, t):
        t = _check_range(t, self.t_f)
        return self.alpha0 * self.scales.omega * np.sin(self.scales.omega * t)

    def xc(self, t):
        """Oscillator response to the linear ramp from rest at the origin."""
        t = _check_range(t, self.t_f)
        w = self.scales.omega
        return self.d * t / self.t_f - self.d / (w * self.t_f) * np.sin(w * t)

    def controls(self, t):
        return self.x0(t), self.alpha(t)


Protocol = Union[StaProtocol, AdiabaticProtocol]


@dataclass
class ControlTrace:
    """Sampled control and auxiliary trajectories, CSV-exportable."""

    times: np.ndarray
    x0: np.ndarray
    alpha: np.ndarray
    xc: np.ndarray
    ac: np.ndarray

    def __post_init__(self):
        n = len(self.times)
        if not all(len(a) == n for a in (self.x0, self.alpha, self.xc, self.ac)):
            raise ValueError("all trace arrays must have the same length")
        if n < 2 or np.any(np.diff(self.times) <= 0) or self.times[0] != 0:
            raise ValueError("times must increase strictly from 0")

    def write_csv(self, path):
        from .csvio import write_columns
        write_columns(path, ["t", "x0", "alpha", "xc", "ac"],
                      [self.times, self.x0, self.alpha, self.xc, self.ac])


def sample_controls(p: Protocol, n_samples: int = 1001) -> ControlTrace:
    """Evaluate the closed forms on a uniform time grid."""
    t = np.linspace(0.0, p.t_f, n_samples)
    x0, alpha = p.controls(t)
    alpha = np.broadcast_to(alpha, t.shape)
    return ControlTrace(t, np.asarray(x0), np.asarray(alpha).copy(),
                        np.asarray(p.xc(t)), np.asarray(p.ac(t)))


def phase_sigma(p: Protocol, n_samples: int = 4001, tol: float = 1e-6) -> float:
    """Accumulated spin-rotation angle -(m/hbar) * integral of ac_dot * x0.

    Composite Simpson on uniform samples; a Richardson estimate against the
    half-density rule guards the result, raising ``QuadratureError`` when the
    sample count cannot deliver ``tol``.  The shortcut protocol yields pi/2 by
    construction; the constant-coupling protocol with omega*t_f = 2*pi*k
    yields d/lambda_so = m*alpha0*d/hbar.
    """
    n = max(5, int(n_samples))
    if n % 2 == 0:
        n += 1
    t = np.linspace(0.0, p.t_f, n)
    f = np.asarray(p.ac_dot(t)) * np.asarray(p.x0(t))
    scale = -p.scales.m / p.scales.hbar
    fine = simpson(f, x=t)
    coarse = simpson(f[::2], x=t[::2])
    estimate = abs(scale) * abs(fine - coarse) / 15.0
    if estimate > tol:
        raise QuadratureError(
            f"quadrature error estimate {estimate:.2e} exceeds tol={tol:.0e}; "
            f"increase n_samples (got {n})")
    return float(scale * fine)


def spin_flip_length(alpha0: float, scales: PhysicalScales = PhysicalScales()) -> float:
    """Transport distance per adiabatic spin flip: (pi/2)*hbar/(m*alpha0)."""
    if alpha0 == 0:
        raise ValueError("spin-flip length undefined for alpha0 = 0")
    return 0.5 * math.pi * scales.hbar / (scales.m * abs(alpha0))


def spin_flip_time(p: AdiabaticProtocol) -> float:
    """Time of the first adiabatic spin flip, (d_sp/d)*t_f."""
    return spin_flip_length(p.alpha0, p.scales) / abs(p.d) * p.t_f


# --- validation -------------------------------------------------------------

@dataclass
class ValidationReport:
    """Design checks: ``errors`` reject a design, ``warnings`` do not."""

    kind: str
    errors: list = dc_field(default_factory=list)
    warnings: list = dc_field(default_factory=list)
    details: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def as_dict(self) -> dict:
        return {"kind": self.kind, "ok": self.ok, "errors": self.errors,
                "warnings": self.warnings, "details": self.details}


def sta_design_report(d: float, t_f: float,
                      scales: PhysicalScales = PhysicalScales()) -> ValidationReport:
    """Check a shortcut design without constructing it (it may be singular)."""
    rep = ValidationReport(kind="sta")
    margin = singularity_margin(t_f, scales.omega)
    rep.details["singularity_margin"] = margin
    rep.details["singular_t_f"] = math.sqrt(66.0 / 5.0) / scales.omega
    if margin < SINGULAR_GUARD:
        rep.errors.append("singular")
        return rep
    p = StaProtocol(d=d, t_f=t_f, scales=scales)
    t = np.linspace(0.0, t_f, 2001)
    rep.details["alpha_peak"] = float(np.max(np.abs(p.alpha(t))))
    return rep


def adiabatic_design_report(alpha0: float, d: float, t_f: float,
                            scales: PhysicalScales = PhysicalScales()) -> ValidationReport:
    """Excitation and adiabaticity checks for the constant-coupling design."""
    rep = ValidationReport(kind="adiabatic")
    w = scales.omega
    residue = math.remainder(w * t_f, 2.0 * math.pi)
    rep.details["omega_tf_mod_2pi"] = abs(residue)
    if abs(residue) > 1e-9 * max(1.0, w * t_f):
        rep.warnings.append("residual_excitation")
    bound = abs(d) * math.sqrt(scales.m / (2.0 * scales.hbar * w))
    rep.details["adiabatic_bound"] = bound
    if t_f <= bound:
        rep.warnings.append("adiabaticity_violated")
    if alpha0 != 0:
        rep.details["d_sp"] = spin_flip_length(alpha0, scales)
        rep.details["t_sp"] = rep.details["d_sp"] / abs(d) * t_f
    return rep


def validate(p: Protocol) -> ValidationReport:
    """Design-quality report for an already constructed protocol."""
    if isinstance(p, StaProtocol):
        return sta_design_report(p.d, p.t_f, p.scales)
    if isinstance(p, AdiabaticProtocol):
        return adiabatic_design_report(p.alpha0, p.d, p.t_f, p.scales)
    raise TypeError(f"unknown protocol type {type(p)!r}")
