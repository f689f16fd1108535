"""Physical scales, spatial/spectral grids, spinor fields and oscillator states.

Everything downstream (protocol design, the exact solution, the split-operator
propagator, observables) works on the types defined here.  Conventions:

* dimensionless units: the trap frequency, the particle mass and hbar are all
  1 by default.  For a Rb-87 trap at omega = 2*pi*250 Hz the corresponding
  laboratory scales are T = 1/omega ~ 0.637 ms and
  a0 = sqrt(hbar/(m*omega)) ~ 0.682 um.
* the spatial grid is periodic and excludes ``x_max`` (x_i = x_min + i*dx),
  which makes the momentum grid the exact FFT dual of the position grid.
* integrals use the uniform-grid rectangle rule, which is spectrally accurate
  for the band-limited fields the propagator produces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PhysicalScales",
    "SimulationGrid",
    "SpinorField",
    "build_grid",
    "harmonic_eigenstate",
    "initial_state",
    "inner_product",
    "norm",
]

TAIL_THRESHOLD = 1e-12


@dataclass(frozen=True)
class PhysicalScales:
    """Mass, trap frequency and hbar in the dimensionless unit system."""

    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.omega <= 0 or self.hbar <= 0:
            raise ValueError("m, omega and hbar must all be positive")

    @property
    def trap_length(self) -> float:
        """Oscillator length a = sqrt(hbar/(m*omega)); ground-state width."""
        return np.sqrt(self.hbar / (self.m * self.omega))

    @property
    def trap_time(self) -> float:
        """Natural time unit 1/omega."""
        return 1.0 / self.omega


@dataclass(frozen=True)
class SimulationGrid:
    """Uniform periodic position grid with its FFT-dual momentum grid."""

    x_min: float
    x_max: float
    n_points: int
    dt: float
    n_steps: int
    x: np.ndarray = field(repr=False, compare=False)
    k: np.ndarray = field(repr=False, compare=False)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def t_final(self) -> float:
        return self.n_steps * self.dt

    def times(self, stride: int = 1) -> np.ndarray:
        """Sample instants 0, stride*dt, ... up to n_steps*dt."""
        return self.dt * np.arange(0, self.n_steps + 1, stride)


def build_grid(x_min: float, x_max: float, n_points: int, dt: float,
               t_f: float) -> SimulationGrid:
    """Construct the simulation grid; n_steps = round(t_f/dt).

    ``n_points`` must be a power of two and ``0 < dt < t_f``.
    """
    if x_max <= x_min:
        raise ValueError(f"x_max ({x_max}) must exceed x_min ({x_min})")
    if n_points < 2 or n_points & (n_points - 1) != 0:
        raise ValueError(f"n_points must be a power of two >= 2, got {n_points}")
    if not 0 < dt < t_f:
        raise ValueError(f"need 0 < dt < t_f, got dt={dt}, t_f={t_f}")
    dx = (x_max - x_min) / n_points
    x = x_min + dx * np.arange(n_points)
    k = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dx)
    return SimulationGrid(x_min=x_min, x_max=x_max, n_points=n_points,
                          dt=dt, n_steps=round(t_f / dt), x=x, k=k)


@dataclass
class SpinorField:
    """Two-component complex amplitude on a grid: (psi_up, psi_down)."""

    grid: SimulationGrid
    up: np.ndarray
    down: np.ndarray

    def __post_init__(self):
        self.up = np.asarray(self.up, dtype=complex)
        self.down = np.asarray(self.down, dtype=complex)
        if self.up.shape != (self.grid.n_points,) or self.down.shape != (self.grid.n_points,):
            raise ValueError("spinor components must match the grid size")

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.up.copy(), self.down.copy())

    def norm(self) -> float:
        return norm(self)

    def density(self) -> np.ndarray:
        """Total density |psi_up|^2 + |psi_down|^2 per node."""
        return np.abs(self.up) ** 2 + np.abs(self.down) ** 2


def _same_grid(a: SimulationGrid, b: SimulationGrid) -> bool:
    return a is b or (a.x_min == b.x_min and a.x_max == b.x_max
                      and a.n_points == b.n_points)


def norm(f: SpinorField) -> float:
    """sqrt of the total probability, rectangle rule."""
    return float(np.sqrt((np.sum(np.abs(f.up) ** 2)
                          + np.sum(np.abs(f.down) ** 2)) * f.grid.dx))


def inner_product(a: SpinorField, b: SpinorField) -> complex:
    """<a|b> with conjugation on the first argument."""
    if not _same_grid(a.grid, b.grid):
        raise ValueError("inner_product requires fields on the same grid")
    return complex((np.vdot(a.up, b.up) + np.vdot(a.down, b.down)) * a.grid.dx)


def harmonic_eigenstate(n: int, scales: PhysicalScales,
                        grid: SimulationGrid) -> np.ndarray:
    """Unit-norm oscillator eigenstate psi_n(x) of the trap centred at 0.

    Uses the normalized Hermite recurrence, stable for any reasonable n.
    Raises if the state has not decayed below 1e-12 at the grid boundary.
    """
    if n < 0:
        raise ValueError(f"quantum number must be >= 0, got {n}")
    a = scales.trap_length
    xi = grid.x / a
    prev = np.zeros_like(xi)
    cur = np.pi ** -0.25 / np.sqrt(a) * np.exp(-0.5 * xi ** 2)
    for j in range(1, n + 1):
        prev, cur = cur, np.sqrt(2.0 / j) * xi * cur - np.sqrt((j - 1) / j) * prev
    tail = max(abs(cur[0]), abs(cur[-1]))
    if tail > TAIL_THRESHOLD:
        raise ValueError(
            f"grid too narrow for eigenstate n={n}: boundary amplitude {tail:.2e}")
    return cur


def initial_state(grid: SimulationGrid, scales: PhysicalScales,
                  chi=(2 ** -0.5, 2 ** -0.5), n: int = 0) -> SpinorField:
    """Product state chi (x) psi_n; chi defaults to the +x spin eigenstate."""
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (2,):
        raise ValueError("chi must have two components")
    if abs(np.vdot(chi, chi) - 1.0) > 1e-9:
        raise ValueError("chi must be unit-norm")
    psi = harmonic_eigenstate(n, scales, grid)
    return SpinorField(grid, chi[0] * psi, chi[1] * psi)
