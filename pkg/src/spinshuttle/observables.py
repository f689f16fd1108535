"""Measured quantities: spin density matrix, Bloch vector, centre of mass,
momentum, velocity, density profiles and fidelity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysicalScales, SimulationGrid, SpinorField, inner_product

__all__ = [
    "ObservableRecord",
    "ObservableRecorder",
    "SpinDensityMatrix",
    "bloch_length",
    "com",
    "density_matrix",
    "density_profiles",
    "fidelity",
    "make_target",
    "momentum_expectation",
    "spin_expectations",
    "velocity_expectation",
]


@dataclass(frozen=True)
class SpinDensityMatrix:
    """Reduced 2x2 spin matrix rho_ij = integral psi_i psi_j^* dx."""

    rho11: complex
    rho12: complex
    rho21: complex
    rho22: complex

    @property
    def trace(self) -> float:
        return (self.rho11 + self.rho22).real


def density_matrix(field: SpinorField) -> SpinDensityMatrix:
    dx = field.grid.dx
    r11 = complex(np.sum(np.abs(field.up) ** 2) * dx)
    r22 = complex(np.sum(np.abs(field.down) ** 2) * dx)
    r12 = complex(np.sum(field.up * np.conj(field.down)) * dx)
    return SpinDensityMatrix(r11, r12, np.conj(r12), r22)


def spin_expectations(rho: SpinDensityMatrix) -> tuple[float, float, float]:
    """(<sigma_x>, <sigma_y>, <sigma_z>) from the trace formulas."""
    sx = 2.0 * rho.rho12.real
    sy = -2.0 * rho.rho12.imag
    sz = (rho.rho11 - rho.rho22).real
    return sx, sy, sz


def bloch_length(sx: float, sy: float, sz: float) -> float:
    """Length of the spin vector; 1 for a pure spin state, < 1 when mixed."""
    return float(np.sqrt(sx * sx + sy * sy + sz * sz))


def com(field: SpinorField) -> float:
    """Centre of mass <x>."""
    return float(np.sum(field.grid.x * field.density()) * field.grid.dx)


def momentum_expectation(field: SpinorField,
                         scales: PhysicalScales = PhysicalScales()) -> float:
    """<p>, evaluated spectrally."""
    hk = scales.hbar * field.grid.k
    val = 0.0
    for comp in (field.up, field.down):
        val += np.vdot(comp, np.fft.ifft(hk * np.fft.fft(comp))).real
    return float(val * field.grid.dx)


def velocity_expectation(field: SpinorField, alpha: float,
                         scales: PhysicalScales = PhysicalScales()) -> float:
    """<v> = <p>/m + alpha*<sigma_z>."""
    _, _, sz = spin_expectations(density_matrix(field))
    return momentum_expectation(field, scales) / scales.m + alpha * sz


def density_profiles(field: SpinorField):
    """(total, up, down) densities per grid node."""
    up = np.abs(field.up) ** 2
    down = np.abs(field.down) ** 2
    return up + down, up, down


def fidelity(field: SpinorField, target: SpinorField) -> float:
    """Squared overlap |<target|field>|^2; phase-insensitive and symmetric."""
    return float(abs(inner_product(target, field)) ** 2)


def make_target(d: float, spin_sign: int, grid: SimulationGrid,
                scales: PhysicalScales = PhysicalScales()) -> SpinorField:
    """(1, spin_sign)/sqrt(2) (x) ground state displaced to x = d."""
    if spin_sign not in (-1, 1):
        raise ValueError("spin_sign must be +1 or -1")
    a = scales.trap_length
    psi = (np.pi * a * a) ** -0.25 * np.exp(-((grid.x - d) ** 2) / (2.0 * a * a))
    return SpinorField(grid, psi / np.sqrt(2.0), spin_sign * psi / np.sqrt(2.0))


@dataclass
class ObservableRecord:
    """One sampled row of the observable trace."""

    t: float
    com: float
    mom: float
    vel: float
    sx: float
    sy: float
    sz: float
    bloch: float
    norm: float


class ObservableRecorder:
    """Observer for ``evolve`` that collects an ObservableRecord per sample.

    Needs the control law to evaluate alpha(t) for the velocity operator.
    """

    CSV_COLUMNS = ("t", "com", "mom", "vel", "sx", "sy", "sz", "P", "norm")

    def __init__(self, protocol, scales: PhysicalScales = PhysicalScales()):
        self._controls = protocol.controls if hasattr(protocol, "controls") else protocol
        self._t_f = getattr(protocol, "t_f", None)
        self.scales = scales
        self.records: list[ObservableRecord] = []

    def __call__(self, t: float, field: SpinorField):
        t_ctrl = min(t, self._t_f) if self._t_f is not None else t
        _, alpha = self._controls(t_ctrl)
        rho = density_matrix(field)
        sx, sy, sz = spin_expectations(rho)
        mom = momentum_expectation(field, self.scales)
        self.records.append(ObservableRecord(
            t=t, com=com(field), mom=mom,
            vel=mom / self.scales.m + float(alpha) * sz,
            sx=sx, sy=sy, sz=sz, bloch=bloch_length(sx, sy, sz),
            norm=field.norm()))

    def column(self, name: str) -> np.ndarray:
        key = "bloch" if name == "P" else name
        return np.array([getattr(r, key) for r in self.records])

    def write_csv(self, path):
        from .csvio import write_rows
        rows = ((r.t, r.com, r.mom, r.vel, r.sx, r.sy, r.sz, r.bloch, r.norm)
                for r in self.records)
        write_rows(path, list(self.CSV_COLUMNS), rows)
