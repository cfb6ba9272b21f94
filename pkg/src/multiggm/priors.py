"""Closed-form prior densities, normalizing constants, and conditional odds.

One generic binary Markov random field serves both levels of the
hierarchy: edge-inclusion vectors across the K groups of a platform
(coupling matrix of group similarities) and group-relatedness vectors
across the S platforms (coupling matrix of platform similarities).  The
quadratic form g' C g with symmetric C counts each pair twice, so the
conditional log-odds of coordinate i carry a factor 2 on the couplings.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betaln, gammaln, logsumexp

from .errors import DimensionTooLarge, InconsistentState, InvalidParameter

MAX_ENUM_DIM = 20


@dataclass
class MrfParams:
    """Sparsity scalar and symmetric nonnegative coupling matrix (zero diagonal)."""
    sparsity: float
    coupling: np.ndarray

    def __post_init__(self):
        self.coupling = np.asarray(self.coupling, dtype=float)
        c = self.coupling
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise InvalidParameter("coupling must be a square matrix")
        if np.any(np.diag(c) != 0):
            raise InvalidParameter("coupling diagonal must be exactly zero")
        if not np.array_equal(c, c.T):
            raise InvalidParameter("coupling must be symmetric")
        if np.any(c < 0):
            raise InvalidParameter("coupling entries must be nonnegative")

    @property
    def dim(self):
        return self.coupling.shape[0]


@dataclass
class SpikeSlabGamma:
    """Gamma slab of a spike-and-slab prior (point mass at zero as spike)."""
    shape: float
    rate: float

    def __post_init__(self):
        if self.shape <= 0 or self.rate <= 0:
            raise InvalidParameter("shape and rate must be positive")


@dataclass
class LogisticBeta:
    """Prior on a real x such that logistic(x) ~ Beta(a, b)."""
    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameter("a and b must be positive")

    @property
    def mean_probability(self):
        return self.a / (self.a + self.b)


@lru_cache(maxsize=32)
def _binary_configs(B):
    """All 2^B binary vectors as a (2^B, B) float array, plus their sums."""
    if B > MAX_ENUM_DIM:
        raise DimensionTooLarge(f"exact enumeration capped at B={MAX_ENUM_DIM}, got {B}")
    configs = ((np.arange(2 ** B)[:, None] >> np.arange(B)) & 1).astype(float)
    return configs, configs.sum(axis=1)


def mrf_log_normalizer(sparsity, coupling):
    """log C(sparsity, coupling) by exact enumeration over 2^B configurations.

    `sparsity` may be a scalar or an array of sparsity values sharing one
    coupling matrix; the result has the same shape.
    """
    coupling = np.asarray(coupling, dtype=float)
    B = coupling.shape[0]
    configs, ones = _binary_configs(B)
    quad = np.einsum("ci,ij,cj->c", configs, coupling, configs)
    nu = np.asarray(sparsity, dtype=float)
    log_terms = nu[..., None] * ones + quad
    return logsumexp(log_terms, axis=-1)


def mrf_normalizer(params: MrfParams, B=None):
    """Normalizing constant of the binary MRF; always >= 1."""
    if B is not None and B != params.dim:
        raise InvalidParameter(f"B={B} does not match coupling dimension {params.dim}")
    return float(np.exp(mrf_log_normalizer(params.sparsity, params.coupling)))


def mrf_log_density(g, params: MrfParams):
    """Log probability of the binary vector g under the MRF."""
    g = np.asarray(g, dtype=float)
    if g.shape[0] != params.dim:
        raise InvalidParameter("g length must match coupling dimension")
    energy = params.sparsity * g.sum() + g @ params.coupling @ g
    return float(energy - mrf_log_normalizer(params.sparsity, params.coupling))


def mrf_conditional_odds(idx, g_others, params: MrfParams):
    """Log-odds of coordinate idx being 1 given the remaining coordinates."""
    g_others = np.asarray(g_others, dtype=float)
    B = params.dim
    if not 0 <= idx < B:
        raise IndexError(f"idx {idx} out of range for dimension {B}")
    if g_others.shape[0] != B - 1:
        raise InvalidParameter("g_others must hold all coordinates except idx")
    others = np.delete(np.arange(B), idx)
    return float(params.sparsity + 2.0 * params.coupling[idx, others] @ g_others)


def gamma_log_pdf(x, shape, rate):
    """Log density of Gamma(shape, rate) at x > 0."""
    return shape * np.log(rate) - gammaln(shape) + (shape - 1) * np.log(x) - rate * x


def spike_slab_log_density(value, indicator, prior: SpikeSlabGamma):
    """Log density of the spike-and-slab mixture at (value, indicator)."""
    if indicator == 0:
        if value != 0:
            raise InconsistentState(
                f"indicator 0 requires value exactly 0, got {value}")
        return 0.0
    if value <= 0:
        raise InconsistentState("indicator 1 requires a positive value")
    return float(gamma_log_pdf(value, prior.shape, prior.rate))


def logistic_beta_log_density(x, prior: LogisticBeta):
    """Log density of x when logistic(x) ~ Beta(a, b)."""
    a, b = prior.a, prior.b
    # a*x - (a+b)*log(1+e^x), evaluated stably for large |x|
    log1pex = np.logaddexp(0.0, x)
    return float(a * x - (a + b) * log1pex - betaln(a, b))


def omega_edge_log_density(omega, slab, nu0, nu1):
    """Log density of the two-component normal mixture for one edge weight."""
    if not 0 < nu0 < nu1:
        raise InvalidParameter(f"need 0 < nu0 < nu1, got nu0={nu0}, nu1={nu1}")
    sd = nu1 if slab else nu0
    return float(-0.5 * np.log(2 * np.pi) - np.log(sd) - 0.5 * (omega / sd) ** 2)
