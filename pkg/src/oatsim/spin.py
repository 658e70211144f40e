"""Exact two-mode collective-spin states and their unitary transformations.

A system of N two-mode particles is represented on the population-imbalance
basis |m>, m = -N/2 ... N/2 (half-integer m for odd N), so a state is an
(N+1)-vector of complex amplitudes.  The module provides the binomial
coherent state, the twisting evolution that imprints a phase quadratic in m,
and rotations generated by arbitrary collective-spin components.

All objects are immutable after construction and every operation is a pure
function, so sweeps can map over them in parallel.  Rotation generators are
eigendecomposed once per (N, axis) pair and cached; the cache is append-only
and should be warmed up before sharing across threads.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "SpinState",
    "Direction",
    "CollectiveOps",
    "X_AXIS",
    "Y_AXIS",
    "Z_AXIS",
    "make_coherent_state",
    "apply_oat",
    "build_ops",
    "rotate",
    "m_values",
    "beta_coefficients",
]

_NORM_TOL = 1e-12


def m_values(n_particles: int) -> np.ndarray:
    """Imbalance grid m = -N/2 ... N/2 in ascending order."""
    return np.arange(n_particles + 1) - n_particles / 2.0


def beta_coefficients(n_particles: int) -> np.ndarray:
    """Raising couplings beta_m = sqrt((N/2+m+1)(N/2-m)) on the m grid."""
    m = m_values(n_particles)
    return np.sqrt((n_particles / 2.0 + m + 1.0) * (n_particles / 2.0 - m))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpinState:
    """Normalized amplitude vector over |m>, stored with m ascending."""

    n_particles: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        amps = np.array(self.amplitudes, dtype=complex)  # defensive copy
        if amps.shape != (self.n_particles + 1,):
            raise ValueError(
                f"expected {self.n_particles + 1} amplitudes, got shape {amps.shape}"
            )
        norm = np.sum(np.abs(amps) ** 2)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm^2 = {norm!r} deviates from 1 beyond {_NORM_TOL}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def m_values(self) -> np.ndarray:
        return m_values(self.n_particles)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Direction:
    """Unit vector selecting a collective-spin component J_n = n . J."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = np.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"direction norm {norm!r} deviates from 1 beyond {_NORM_TOL}")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "Direction":
        norm = np.sqrt(x * x + y * y + z * z)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def from_angles(cls, polar: float, azimuth: float) -> "Direction":
        sp = np.sin(polar)
        return cls.normalized(sp * np.cos(azimuth), sp * np.sin(azimuth), np.cos(polar))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


X_AXIS = Direction(1.0, 0.0, 0.0)
Y_AXIS = Direction(0.0, 1.0, 0.0)
Z_AXIS = Direction(0.0, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class CollectiveOps:
    """The operator triad J_x, J_y, J_z on the (N+1)-dimensional m basis."""

    n_particles: int
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def beta(self) -> np.ndarray:
        """Coupling coefficients beta_m, index-aligned with the m grid."""
        return beta_coefficients(self.n_particles)

    def matrix(self, direction: Direction) -> np.ndarray:
        """Generator J_n for the given axis."""
        return direction.x * self.jx + direction.y * self.jy + direction.z * self.jz


def build_ops(n_particles: int) -> CollectiveOps:
    """Construct J_x, J_y, J_z for N particles.

    J_z is diagonal with entries m; J_x and J_y are tridiagonal with
    couplings beta_m / 2 from the two-mode ladder structure.
    """
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    n = n_particles
    beta = beta_coefficients(n)
    jplus = np.zeros((n + 1, n + 1), dtype=complex)
    idx = np.arange(n)
    jplus[idx + 1, idx] = beta[:-1]
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2.0
    jy = (jplus - jminus) / 2.0j
    jz = np.diag(m_values(n)).astype(complex)
    return CollectiveOps(n, _frozen(jx), _frozen(jy), _frozen(jz))


def make_coherent_state(n_particles: int) -> SpinState:
    """Equal superposition of the two modes: binomial amplitudes peaked at m=0.

    Amplitudes are evaluated through log-gamma so that particle numbers of a
    few thousand stay finite and normalized.
    """
    if n_particles < 1:
        raise ValueError("n_particles must be >= 1")
    n = n_particles
    m = m_values(n)
    log_c = 0.5 * (
        gammaln(n + 1.0)
        - gammaln(n / 2.0 + m + 1.0)
        - gammaln(n / 2.0 - m + 1.0)
        - n * np.log(2.0)
    )
    amps = np.exp(log_c)
    amps /= np.sqrt(np.sum(amps**2))  # absorb log-gamma rounding at large N
    return SpinState(n, amps.astype(complex))


def apply_oat(state: SpinState, alpha: float) -> SpinState:
    """Twist a state: multiply each amplitude by the phase e^{-i alpha m^2}.

    Amplitude magnitudes are untouched; alpha is the dimensionless product of
    interaction strength and duration.
    """
    phases = np.exp(-1j * alpha * state.m_values**2)
    return SpinState(state.n_particles, state.amplitudes * phases)


@lru_cache(maxsize=64)
def _rotation_eigensystem(n_particles: int, nx: float, ny: float, nz: float):
    """Eigendecomposition of J_n, cached per (N, axis) and reused across theta."""
    ops = build_ops(n_particles)
    jn = nx * ops.jx + ny * ops.jy + nz * ops.jz
    eigvals, eigvecs = np.linalg.eigh(jn)
    return _frozen(eigvals), _frozen(eigvecs)


def _rotate_amplitudes(amplitudes: np.ndarray, n_particles: int,
                       direction: Direction, theta: float) -> np.ndarray:
    if direction.x == 0.0 and direction.y == 0.0:
        # J_n diagonal: pure phase, no eigendecomposition needed.
        m = m_values(n_particles)
        return amplitudes * np.exp(-1j * theta * direction.z * m)
    eigvals, eigvecs = _rotation_eigensystem(n_particles, direction.x, direction.y, direction.z)
    return eigvecs @ (np.exp(-1j * theta * eigvals) * (eigvecs.conj().T @ amplitudes))


def rotate(state: SpinState, direction: Direction, theta: float) -> SpinState:
    """Apply the unitary e^{-i theta J_n} to the state."""
    return SpinState(
        state.n_particles,
        _rotate_amplitudes(state.amplitudes, state.n_particles, direction, theta),
    )
