"""Gaussian score model: closed-form EER and a seeded sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InputError
from .metrics import EerResult
from .score_io import ScoredTrials

BISECTION_TOL = 1e-12


def normal_cdf(x: float) -> float:
    """Standard normal CDF as 0.5 * erfc(-x / sqrt(2)).

    erfc keeps full relative precision in the lower tail, where 1 + erf(x)
    would cancel.
    """
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class GaussianScoreModel:
    mu_pos: float
    sigma_pos: float
    mu_neg: float
    sigma_neg: float

    def __post_init__(self):
        if not (self.sigma_pos > 0 and self.sigma_neg > 0):
            raise InputError("sigmas must be strictly positive")
        if not all(map(math.isfinite, (self.mu_pos, self.sigma_pos, self.mu_neg, self.sigma_neg))):
            raise InputError("model parameters must be finite")

    def frr(self, theta: float) -> float:
        return normal_cdf((theta - self.mu_pos) / self.sigma_pos)

    def far(self, theta: float) -> float:
        return normal_cdf((self.mu_neg - theta) / self.sigma_neg)


@dataclass(frozen=True)
class SampleSpec:
    n_pos: int
    n_neg: int
    seed: int = 0

    def __post_init__(self):
        if self.n_pos < 1 or self.n_neg < 1:
            raise InputError("sample counts must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise InputError("seed must be a 64-bit unsigned integer")


def analytic_eer(model: GaussianScoreModel) -> EerResult:
    """Solve FRR(theta) = FAR(theta) by bisection.

    FRR - FAR is strictly increasing in theta. Where both tails underflow
    to the same double the sign is taken from the standardized arguments,
    which order the same way as their CDF values.
    """
    if not model.mu_pos > model.mu_neg:
        raise EvaluationError("analytic EER needs mu_pos > mu_neg")
    lo = model.mu_neg - 10.0 * model.sigma_neg
    hi = model.mu_pos + 10.0 * model.sigma_pos
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        diff = model.frr(mid) - model.far(mid)
        if diff == 0.0:
            diff = (mid - model.mu_pos) / model.sigma_pos - (model.mu_neg - mid) / model.sigma_neg
        if diff < 0:
            lo = mid
        elif diff > 0:
            hi = mid
        else:
            lo = hi = mid
    theta = 0.5 * (lo + hi)
    return EerResult(model.frr(theta), theta)


def sample_scores(model: GaussianScoreModel, spec: SampleSpec) -> ScoredTrials:
    """Draw i.i.d. scores with numpy's PCG64 generator seeded by ``spec.seed``.

    Positives are drawn first, then negatives, from one stream of
    ``Generator.standard_normal`` variates. The stream is platform independent
    for a given numpy release.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    pos = model.mu_pos + model.sigma_pos * rng.standard_normal(spec.n_pos)
    neg = model.mu_neg + model.sigma_neg * rng.standard_normal(spec.n_neg)
    return ScoredTrials.from_arrays(pos, neg, name=f"gauss_seed{spec.seed}")
