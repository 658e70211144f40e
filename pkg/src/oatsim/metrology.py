"""Metrological figures of merit for collective-spin states.

Covers the spin-squeezing parameter (with direction optimization), the
quantum Fisher information for pure states (exact, direction-optimized, and
the fast-phase analytical estimate), the classical Fisher information of
imbalance measurements behind a rotation (exact derivative, exact
tridiagonal decomposition and plateau estimate), Cramer-Rao bounds, and the
Bhattacharyya fidelity between outcome distributions.

Probability families
--------------------
``classical_fi`` consumes a *family*: a callable ``theta -> (p, dp)``
returning the outcome probabilities and their analytic theta-derivative on
the m grid.  ``pure_family`` builds one from a state; the imperfections
module contributes ensemble- and resolution-convolved families with the same
signature, so the information functional is shared by all detection models.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .spin import (
    CollectiveOps,
    Direction,
    SpinState,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    _rotate_amplitudes,
    beta_coefficients,
)

__all__ = [
    "OutcomeDistribution",
    "OutcomeAmplitudes",
    "MetrologyReport",
    "ProbabilityFamily",
    "DEFAULT_THETA_PROBE",
    "variance",
    "qfi_pure",
    "qfi_optimized",
    "qfi_fast_phase_approx",
    "spin_squeezing",
    "optimize_squeezing",
    "outcome_distribution",
    "rotated_amplitudes",
    "pure_family",
    "classical_fi",
    "fi_bs_exact_decomposition",
    "fi_mzi_exact_decomposition",
    "fi_plateau_approx",
    "crlb",
    "fidelity",
    "metrology_report",
    "axis_for",
]

ProbabilityFamily = Callable[[float], tuple]

# Probe used wherever a single small phase is needed; the smallest value on
# the resolution-sweep grid.
DEFAULT_THETA_PROBE = 0.02 * math.pi

_DENOM_FLOOR = 1e-30        # mean spin orthogonal-projection cutoff for xi^2
_DENOM_FLOOR_REL = 1e-12    # relative cutoff: roundoff scale of the projection
_PROB_FLOOR_REL = 1e-14     # relative cutoff for outcomes entering the FI sum

_AXES = {"bs": X_AXIS, "mzi": Y_AXIS, "phase": Z_AXIS}


def axis_for(interferometer: str) -> Direction:
    """Rotation axis for a named interferometer (bs -> x, mzi -> y, phase -> z)."""
    try:
        return _AXES[interferometer.lower()]
    except KeyError:
        raise ValueError(f"unknown interferometer {interferometer!r}") from None


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probabilities of imbalance outcomes behind a rotation by theta."""

    probabilities: np.ndarray
    theta: float
    direction: Direction
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        p = np.array(self.probabilities, dtype=float)
        if np.any(p < -1e-15):
            raise ValueError(f"negative probability {p.min()!r} beyond roundoff")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __len__(self):
        return len(self.probabilities)


@dataclass(frozen=True, eq=False)
class OutcomeAmplitudes:
    """Complex amplitudes behind a rotation; keeps the outcome phases."""

    amplitudes: np.ndarray
    theta: float
    direction: Direction
    provenance: Mapping = field(default_factory=dict)

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    def phases(self) -> np.ndarray:
        return np.angle(self.amplitudes)

    def to_distribution(self) -> OutcomeDistribution:
        return OutcomeDistribution(
            np.abs(self.amplitudes) ** 2, self.theta, self.direction, self.provenance
        )


def _mean_and_covariance(state: SpinState, ops: CollectiveOps):
    """Mean spin vector and symmetrized 3x3 covariance matrix."""
    a = state.amplitudes
    va = np.stack([ops.jx @ a, ops.jy @ a, ops.jz @ a])
    means = np.real(va @ a.conj())
    second = np.real(va.conj() @ va.T)  # Re <J_i J_j> = symmetrized moment
    return means, second - np.outer(means, means)


def variance(state: SpinState, ops: CollectiveOps, n: Direction) -> float:
    """Variance of J_n in the state (non-negative up to roundoff)."""
    a = state.amplitudes
    jn_a = ops.matrix(n) @ a
    mean = np.real(np.vdot(a, jn_a))
    return float(np.real(np.vdot(jn_a, jn_a)) - mean**2)


def qfi_pure(state: SpinState, ops: CollectiveOps, n: Direction) -> float:
    """Phase information of a pure state through e^{-i theta J_n}: 4 Var J_n."""
    return max(4.0 * variance(state, ops, n), 0.0)


def qfi_optimized(state: SpinState, ops: CollectiveOps) -> tuple[float, Direction]:
    """Maximum of qfi_pure over the rotation axis.

    Var J_n = n^T Gamma n is a quadratic form, so the optimum is four times
    the top eigenvalue of the covariance matrix and the axis its eigenvector.
    """
    _, gamma = _mean_and_covariance(state, ops)
    eigvals, eigvecs = np.linalg.eigh(gamma)
    vec = eigvecs[:, -1]
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec  # fix the sign for reproducibility
    return max(4.0 * float(eigvals[-1]), 0.0), Direction.normalized(*vec)


def qfi_fast_phase_approx(n_particles: int, alpha: float, which: str) -> float:
    """Fast-phase estimate of the QFI for the x (bs) or y (mzi) generator.

    Valid once the quadratic phase jumps quickly between neighboring m
    (alpha well above 1/sqrt(N)); evaluated literally for any alpha.  The
    oscillatory cross term adds for the beam splitter and subtracts for the
    Mach-Zehnder, which produces the peak/dip pair at alpha = pi/2.
    """
    which = which.lower()
    if which not in ("bs", "mzi"):
        raise ValueError(f"which must be 'bs' or 'mzi', got {which!r}")
    from .spin import make_coherent_state

    c = np.real(make_coherent_state(n_particles).amplitudes)
    beta = beta_coefficients(n_particles)
    m = np.arange(n_particles + 1) - n_particles / 2.0
    direct = np.sum(c**2 * beta**2)
    osc = np.sum(c[:-2] * c[2:] * beta[:-2] * beta[1:-1] * np.exp(4j * alpha * m[:-2]))
    sign = 1.0 if which == "bs" else -1.0
    return float(2.0 * (direct + sign * np.real(osc)))


def _denom_floor(means):
    # absolute floor per contract, widened by the roundoff scale of |<J>|^2
    # so that axes parallel to the mean spin register as degenerate
    return max(_DENOM_FLOOR, float(means @ means) * _DENOM_FLOOR_REL)


def _xi2_from_quadratics(means, gamma, n_particles, axis_vec):
    num = max(float(axis_vec @ gamma @ axis_vec), 0.0)  # variance up to roundoff
    denom = float(means @ means - (means @ axis_vec) ** 2)
    if denom < _denom_floor(means):
        return math.inf
    return n_particles * num / denom


def spin_squeezing(state: SpinState, ops: CollectiveOps, n1: Direction) -> float:
    """Squeezing parameter: N Var(J_n1) over the squared transverse mean spin.

    The denominator is the squared projection of <J> onto the plane
    orthogonal to n1, which is what any orthonormal completion (n2, n3)
    yields; it is therefore completion-independent.  Returns +inf when the
    mean spin is parallel to n1 (squeezing direction undefined).
    """
    means, gamma = _mean_and_covariance(state, ops)
    return _xi2_from_quadratics(means, gamma, state.n_particles, n1.as_array())


def _transverse_frame(axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal completion: Gram-Schmidt against the
    coordinate axis least aligned with the input."""
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(axis)))] = 1.0
    u1 = seed - (seed @ axis) * axis
    u1 /= np.linalg.norm(u1)
    return u1, np.cross(axis, u1)


def optimize_squeezing(state: SpinState, ops: CollectiveOps) -> tuple[float, Direction]:
    """Minimize the squeezing parameter over the axis n1.

    Both numerator and denominator are quadratic forms in n1, so after
    eliminating the component along the mean spin (a scalar Schur
    complement) the minimum is the bottom eigenvalue of a 2x2 matrix on the
    transverse plane; no search is involved.  If the mean spin vanishes,
    every direction is degenerate and the +inf sentinel is returned.
    """
    means, gamma = _mean_and_covariance(state, ops)
    n = state.n_particles
    v2 = float(means @ means)
    if v2 < _DENOM_FLOOR:  # zero mean spin: every direction degenerate
        return math.inf, Z_AXIS
    vhat = means / math.sqrt(v2)
    u1, u2 = _transverse_frame(vhat)
    plane = np.stack([u1, u2])
    g_vv = float(vhat @ gamma @ vhat)
    g_vw = plane @ (gamma @ vhat)
    g_ww = plane @ gamma @ plane.T
    # a vanishing variance along the mean spin kills the cross coupling too
    # (positive semidefiniteness), so the plane block then stands alone
    use_schur = g_vv > 1e-10 * max(float(np.trace(gamma)), 1e-300)
    schur = g_ww - np.outer(g_vw, g_vw) / g_vv if use_schur else g_ww
    eigvals, eigvecs = np.linalg.eigh(schur)
    w_best = eigvecs[:, 0]
    tilt = -float(g_vw @ w_best) / g_vv if use_schur else 0.0
    axis = tilt * vhat + w_best[0] * u1 + w_best[1] * u2
    value = n * max(float(eigvals[0]), 0.0) / v2
    return value, Direction.normalized(*axis)


def rotated_amplitudes(state: SpinState, ops: CollectiveOps, n: Direction,
                       theta: float, provenance: Mapping | None = None) -> OutcomeAmplitudes:
    """Complex outcome amplitudes <m| e^{-i theta J_n} |state>."""
    amps = _rotate_amplitudes(state.amplitudes, state.n_particles, n, theta)
    return OutcomeAmplitudes(amps, theta, n, dict(provenance or {}))


def outcome_distribution(state: SpinState, ops: CollectiveOps, n: Direction,
                         theta: float, provenance: Mapping | None = None) -> OutcomeDistribution:
    """Imbalance outcome probabilities behind the rotation."""
    return rotated_amplitudes(state, ops, n, theta, provenance).to_distribution()


def pure_family(state: SpinState, ops: CollectiveOps, n: Direction) -> ProbabilityFamily:
    """theta -> (p, dp) for a pure state, with the analytic derivative.

    The derivative comes from generator insertion,
    d_theta <m|U|psi> = <m|(-i J_n) U|psi>, so no step-size tuning enters.
    """
    jn = ops.matrix(n)
    amps = state.amplitudes
    n_particles = state.n_particles

    def family(theta: float):
        a = _rotate_amplitudes(amps, n_particles, n, theta)
        da = -1j * (jn @ a)
        p = np.abs(a) ** 2
        dp = 2.0 * np.real(np.conj(a) * da)
        return p, dp

    return family


def classical_fi(dist_family: ProbabilityFamily, theta: float) -> float:
    """Fisher information sum_m (d_theta p)^2 / p of an outcome family.

    Outcomes below a relative probability floor are skipped; their exact
    contribution vanishes in the same limit.
    """
    p, dp = dist_family(theta)
    keep = p > _PROB_FLOOR_REL * p.max()
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def _exact_decomposition(amps: OutcomeAmplitudes, ops: CollectiveOps, trig) -> float:
    mag = np.abs(amps.amplitudes)
    phase = np.angle(amps.amplitudes)
    beta = ops.beta
    # neighbors above / below, zero-padded at the edges of the m grid
    up = trig(np.diff(phase, append=0.0)) * np.append(mag[1:], 0.0) * beta
    dn = trig(np.diff(phase, prepend=0.0)) * np.insert(mag[:-1], 0, 0.0) * np.insert(beta[:-1], 0, 0.0)
    return float(np.sum((up - dn) ** 2))


def fi_bs_exact_decomposition(amps: OutcomeAmplitudes, ops: CollectiveOps) -> float:
    """Beam-splitter FI rewritten over amplitude magnitudes and phase steps.

    Exact rewriting of the derivative of |<m|U_x|psi>|^2 against the
    tridiagonal structure of J_x; agrees with classical_fi to roundoff.
    """
    return _exact_decomposition(amps, ops, np.sin)


def fi_mzi_exact_decomposition(amps: OutcomeAmplitudes, ops: CollectiveOps) -> float:
    """Mach-Zehnder variant of the exact decomposition (cosine phase steps)."""
    return _exact_decomposition(amps, ops, np.cos)


def fi_plateau_approx(amps: OutcomeAmplitudes, ops: CollectiveOps) -> float:
    """Plateau estimate sum_m beta_m^2 |a_m|^2 (squared sines averaged to 1/2)."""
    return float(np.sum(ops.beta**2 * np.abs(amps.amplitudes) ** 2))


def crlb(fisher: float, repetitions: int) -> float:
    """Best attainable phase uncertainty from F over mu repetitions."""
    if fisher <= 0.0:
        raise ValueError("fisher information must be positive")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    return 1.0 / math.sqrt(repetitions * fisher)


def fidelity(p: OutcomeDistribution, q: OutcomeDistribution) -> float:
    """Bhattacharyya overlap sum_m sqrt(p_m q_m); 1 iff the distributions match."""
    if len(p) != len(q):
        raise ValueError("outcome grids differ")
    return float(np.sum(np.sqrt(p.probabilities * q.probabilities)))


@dataclass(frozen=True)
class MetrologyReport:
    """All figures of merit for one twisted state."""

    n_particles: int
    alpha: float
    xi2_optimized: float
    xi2_direction: Direction
    qfi_bs: float
    qfi_mzi: float
    qfi_optimized: float
    qfi_direction: Direction
    fi_bs: float
    fi_mzi: float
    theta_probe: float

    def as_dict(self) -> dict:
        return {
            "n_particles": self.n_particles,
            "alpha": self.alpha,
            "xi2_optimized": self.xi2_optimized,
            "xi2_direction": [float(v) for v in self.xi2_direction.as_array()],
            "qfi_bs": self.qfi_bs,
            "qfi_mzi": self.qfi_mzi,
            "qfi_optimized": self.qfi_optimized,
            "qfi_direction": [float(v) for v in self.qfi_direction.as_array()],
            "fi_bs": self.fi_bs,
            "fi_mzi": self.fi_mzi,
            "theta_probe": self.theta_probe,
        }


def metrology_report(n_particles: int, alpha: float,
                     theta_probe: float = DEFAULT_THETA_PROBE) -> MetrologyReport:
    """Evaluate every report quantity for the twisted state at alpha."""
    from .spin import apply_oat, build_ops, make_coherent_state

    ops = build_ops(n_particles)
    state = apply_oat(make_coherent_state(n_particles), alpha)
    xi2, xi2_dir = optimize_squeezing(state, ops)
    qfi_opt, qfi_dir = qfi_optimized(state, ops)
    return MetrologyReport(
        n_particles=n_particles,
        alpha=alpha,
        xi2_optimized=xi2,
        xi2_direction=xi2_dir,
        qfi_bs=qfi_pure(state, ops, X_AXIS),
        qfi_mzi=qfi_pure(state, ops, Y_AXIS),
        qfi_optimized=qfi_opt,
        qfi_direction=qfi_dir,
        fi_bs=classical_fi(pure_family(state, ops, X_AXIS), theta_probe),
        fi_mzi=classical_fi(pure_family(state, ops, Y_AXIS), theta_probe),
        theta_probe=theta_probe,
    )
