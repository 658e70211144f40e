"""Detection-imperfection models for the twisted-state interferometer.

Two mechanisms are covered:

* shot-to-shot Gaussian fluctuation of the twisting strength, which turns
  the pure twisted state into a weighted ensemble (discretized here with
  Gauss-Hermite quadrature), and
* finite atom-counting resolution, a discrete Gaussian convolution of the
  outcome distribution.

Both plug into the shared Fisher-information machinery through probability
families (theta -> (p, dp)), and both come with the closed-form scaling
estimates used to benchmark them.
"""

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.ndimage import convolve1d
from scipy.special import roots_hermite

from .metrology import OutcomeDistribution, ProbabilityFamily
from .spin import CollectiveOps, Direction, SpinState, _rotate_amplitudes, apply_oat, make_coherent_state

__all__ = [
    "StateEnsemble",
    "ResolutionKernel",
    "mix_over_alpha",
    "ensemble_family",
    "ensemble_distribution",
    "convolve_resolution",
    "convolved_family",
    "dalpha_scaling_prediction",
    "resolution_scaling_fit",
]


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    """Weighted mixture of twisted states sharing one particle number."""

    components: tuple
    alpha_center: float
    delta_alpha: float

    def __post_init__(self):
        if not self.components:
            raise ValueError("ensemble needs at least one component")
        total = sum(w for w, _ in self.components)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total!r}, expected 1")
        n = self.components[0][1].n_particles
        if any(s.n_particles != n for _, s in self.components):
            raise ValueError("all components must share the same particle number")

    @property
    def n_particles(self) -> int:
        return self.components[0][1].n_particles


def mix_over_alpha(n_particles: int, alpha: float, delta_alpha: float,
                   nodes: int = 41) -> StateEnsemble:
    """Discretize a Gaussian twist-strength fluctuation of width delta_alpha.

    Gauss-Hermite quadrature places component k at alpha + sqrt(2) *
    delta_alpha * x_k with weight w_k / sqrt(pi).  A zero width returns the
    single pure component.  Node counts well above the default are needed
    for delta_alpha beyond ~0.1 because the averaged phases oscillate
    rapidly; see the ensemble tests for the convergence behavior.
    """
    if nodes < 1:
        raise ValueError("nodes must be >= 1")
    if delta_alpha < 0.0:
        raise ValueError("delta_alpha must be non-negative")
    coherent = make_coherent_state(n_particles)
    if delta_alpha == 0.0:
        return StateEnsemble(((1.0, apply_oat(coherent, alpha)),), alpha, 0.0)
    x, w = roots_hermite(nodes)  # stable up to thousands of nodes
    weights = w / math.sqrt(math.pi)
    components = tuple(
        (float(wk), apply_oat(coherent, alpha + math.sqrt(2.0) * delta_alpha * xk))
        for xk, wk in zip(x, weights)
    )
    return StateEnsemble(components, alpha, delta_alpha)


def ensemble_family(ensemble: StateEnsemble, ops: CollectiveOps,
                    n: Direction) -> ProbabilityFamily:
    """theta -> (p, dp) for the mixture: weighted sums of component terms."""
    jn = ops.matrix(n)
    n_particles = ensemble.n_particles

    def family(theta: float):
        p = np.zeros(n_particles + 1)
        dp = np.zeros(n_particles + 1)
        for weight, state in ensemble.components:
            a = _rotate_amplitudes(state.amplitudes, n_particles, n, theta)
            da = -1j * (jn @ a)
            p += weight * np.abs(a) ** 2
            dp += weight * 2.0 * np.real(np.conj(a) * da)
        return p, dp

    return family


def ensemble_distribution(ensemble: StateEnsemble, ops: CollectiveOps, n: Direction,
                          theta: float) -> OutcomeDistribution:
    """Outcome distribution of the mixture behind a rotation."""
    p, _ = ensemble_family(ensemble, ops, n)(theta)
    return OutcomeDistribution(
        p, theta, n,
        {"alpha": ensemble.alpha_center, "delta_alpha": ensemble.delta_alpha},
    )


@dataclass(frozen=True, eq=False)
class ResolutionKernel:
    """Discrete Gaussian response of an atom counter with spread sigma."""

    sigma: float
    half_width: int
    weights: np.ndarray

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        w = np.array(self.weights, dtype=float)
        if w.shape != (2 * self.half_width + 1,):
            raise ValueError("weights length must be 2*half_width + 1")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("kernel weights must sum to 1")
        if not np.allclose(w, w[::-1], rtol=0.0, atol=1e-15):
            raise ValueError("kernel must be symmetric")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def gaussian(cls, sigma: float) -> "ResolutionKernel":
        """Normalized exp(-k^2 / 2 sigma^2) truncated at ceil(6 sigma)."""
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        half_width = int(math.ceil(6.0 * sigma))
        k = np.arange(-half_width, half_width + 1)
        w = np.exp(-(k.astype(float) ** 2) / (2.0 * sigma**2))
        return cls(sigma, half_width, w / w.sum())


def _blur(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # mirror boundary: counts past the grid edge fold back onto valid outcomes
    return convolve1d(values, weights, mode="reflect")


def convolve_resolution(dist: OutcomeDistribution,
                        kernel: ResolutionKernel) -> OutcomeDistribution:
    """Blur an outcome distribution with the detector kernel.

    The convolution stays on the original m grid; mass smeared past the
    edges is mirrored back and the result renormalized, which leaves a
    uniform distribution exactly invariant.
    """
    blurred = _blur(dist.probabilities, kernel.weights)
    provenance = dict(dist.provenance)
    provenance["sigma"] = kernel.sigma
    return OutcomeDistribution(
        blurred / blurred.sum(), dist.theta, dist.direction, provenance
    )


def convolved_family(family: ProbabilityFamily,
                     kernel: ResolutionKernel) -> ProbabilityFamily:
    """Wrap a probability family with the detector blur.

    The derivative passes through the convolution; the renormalization that
    folds boundary mass back in is differentiated alongside (quotient rule)
    so the family stays exactly consistent with its probabilities.
    """
    w = kernel.weights

    def blurred(theta: float):
        p, dp = family(theta)
        pc = _blur(p, w)
        dpc = _blur(dp, w)
        total = pc.sum()
        dtotal = dpc.sum()
        return pc / total, (dpc * total - pc * dtotal) / total**2

    return blurred


def dalpha_scaling_prediction(n_particles: int, delta_alpha: float) -> float:
    """Closed-form plateau information under twist-strength fluctuations.

    (N^2/4) / sqrt(1 + 2 N delta_alpha^2): approaches N^2/4 for a quiet
    drive and crosses over to a N^(3/2) scaling once delta_alpha exceeds
    1/sqrt(N).
    """
    return (n_particles**2 / 4.0) / math.sqrt(1.0 + 2.0 * n_particles * delta_alpha**2)


def resolution_scaling_fit(sigma_grid: Sequence[float],
                           fi_ratios: Sequence[float]) -> tuple[float, float]:
    """Power-law fit ratio = prefactor * sigma^exponent by least squares in logs."""
    sigma = np.asarray(sigma_grid, dtype=float)
    ratio = np.asarray(fi_ratios, dtype=float)
    if sigma.shape != ratio.shape or sigma.size < 3:
        raise ValueError("need grids of equal length >= 3")
    if np.any(sigma <= 0.0) or np.any(ratio <= 0.0):
        raise ValueError("power-law fit needs positive values")
    exponent, log_pref = np.polyfit(np.log(sigma), np.log(ratio), 1)
    return float(np.exp(log_pref)), float(exponent)
