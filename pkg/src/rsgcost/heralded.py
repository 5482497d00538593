"""Multi-photon noise model for heralded pair sources.

A pumped nonlinear source emits a two-mode squeezed state whose pair
number follows P(n) = (1 - lam^2) lam^(2n).  Threshold detection of the
idler ties the multi-photon error to the success probability; counting
idler photons (with heralding efficiency eta_h on the idler path)
decouples them, at most up to p_s = 1/4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PairSourceState",
    "HeraldResult",
    "TruncationError",
    "herald_threshold",
    "herald_pnr",
    "max_ps_under_error",
    "heralding_curve",
]

TAIL_TOLERANCE = 1e-12
_BISECT_TOL = 1e-10


class TruncationError(ValueError):
    """Photon-number truncation leaves too much probability in the tail."""


@dataclass(frozen=True)
class PairSourceState:
    """Two-mode squeezed pair source with squeezing parameter lam in [0, 1)."""

    lam: float
    n_max: int = 40

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValueError("lam must be in [0, 1)")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def mu(self) -> float:
        """Pair emission probability lam^2."""
        return self.lam * self.lam

    def pair_probs(self) -> np.ndarray:
        """P(n) for n = 0..n_max."""
        n = np.arange(self.n_max + 1)
        return (1.0 - self.mu) * self.mu ** n

    def tail_mass(self) -> float:
        """Probability of more than n_max pairs."""
        return self.mu ** (self.n_max + 1)

    def check_truncation(self, tol: float = TAIL_TOLERANCE):
        if self.tail_mass() > tol:
            raise TruncationError(
                f"tail mass {self.tail_mass():.3e} above {tol:.1e}; raise n_max")


@dataclass(frozen=True)
class HeraldResult:
    """Herald success probability and conditional multi-photon error."""

    p_s: float
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.p_s <= 1.0:
            raise ValueError("p_s out of range")
        if not 0.0 <= self.epsilon <= 1.0 + 1e-12:
            raise ValueError("epsilon out of range")


def herald_threshold(state: PairSourceState) -> HeraldResult:
    """Lossless threshold detection: herald on at least one idler photon.

    Both the success probability and the multi-photon error equal lam^2,
    which is why bright pumping is self-defeating for these sources.
    """
    return HeraldResult(p_s=state.mu, epsilon=state.mu)


def herald_pnr(state: PairSourceState, eta_h: float,
               tail_tol: float = TAIL_TOLERANCE) -> HeraldResult:
    """Photon-number-resolved heralding with idler transmission eta_h.

    The idler passes a loss channel (transmission eta_h) and is projected
    onto exactly one detected photon; the signal mode is lossless.  The
    error is the chance the heralded signal holds two or more photons.
    """
    if not 0.0 < eta_h <= 1.0:
        raise ValueError("eta_h must be in (0, 1]")
    state.check_truncation(tail_tol)
    if state.mu == 0.0:
        return HeraldResult(0.0, 0.0)
    probs = state.pair_probs()
    n = np.arange(state.n_max + 1)
    detect_one = n * eta_h * (1.0 - eta_h) ** np.maximum(n - 1, 0)
    weights = probs * detect_one
    p_s = float(weights.sum())
    if p_s == 0.0:
        return HeraldResult(0.0, 0.0)
    eps = 1.0 - float(weights[1]) / p_s
    return HeraldResult(p_s=p_s, epsilon=min(max(eps, 0.0), 1.0))


def _mu_peak(eta_h: float) -> float:
    # Unconstrained argmax of p_s over mu; the optimum value is exactly
    # 1/4 for every eta_h because idler loss thins high pair numbers in
    # proportion.
    return 1.0 / (1.0 + eta_h)


def max_ps_under_error(eta_h: float, eps_max: float, n_max: int = 40) -> float:
    """Best herald success probability with the error capped at eps_max.

    epsilon grows monotonically with the pump while p_s rises and then
    falls, so the optimum sits either at the unconstrained p_s peak or on
    the epsilon boundary, located here by bisection on lam.
    """
    if not 0.0 < eta_h <= 1.0:
        raise ValueError("eta_h must be in (0, 1]")
    if not 0.0 < eps_max < 1.0:
        raise ValueError("eps_max must be in (0, 1)")
    mu_pk = _mu_peak(eta_h)
    # Keep the truncation tail negligible even when a low eta_h pushes
    # the search region toward bright pumping.
    need = int(math.ceil(math.log(1e-13) / math.log(mu_pk))) if mu_pk > 0.4 else n_max
    n_max = max(n_max, need)

    def result_at(lam: float) -> HeraldResult:
        return herald_pnr(PairSourceState(lam, n_max), eta_h)

    lam_pk = math.sqrt(mu_pk)
    peak = result_at(lam_pk)
    if peak.epsilon <= eps_max:
        return peak.p_s
    lo, hi = 0.0, lam_pk
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if result_at(mid).epsilon <= eps_max:
            lo = mid
        else:
            hi = mid
    return result_at(lo).p_s


def heralding_curve(eta_h_grid, eps_levels, n_max: int = 40):
    """Grid of achievable p_s values: rows of (eta_h, eps_max, p_s)."""
    rows = []
    for eps in eps_levels:
        for eta in eta_h_grid:
            rows.append((float(eta), float(eps), max_ps_under_error(eta, eps, n_max)))
    return rows
