"""Seedable random streams and positive-definite linear algebra.

All randomness in the package flows through numpy Generators backed by
PCG64.  A (seed, stream) pair fully determines the draw sequence, and
distinct streams are statistically independent, so chains can run in
parallel while staying reproducible.
"""

import numpy as np

from .errors import InvalidParameter, NotPositiveDefinite


def rng_stream(seed, stream=0):
    """Return a PCG64 Generator for the given (seed, stream) pair.

    Identical (seed, stream) pairs yield identical draw sequences.
    """
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=(stream,))))


def cholesky(m):
    """Lower-triangular L with L @ L.T = m.

    Raises NotPositiveDefinite if m has a non-positive pivot; such a
    failure during a sampler run signals a corrupted state, not noise.
    """
    m = np.asarray(m, dtype=float)
    try:
        return np.linalg.cholesky(m)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefinite(str(e)) from e


def pd_inverse(m):
    """Inverse of a symmetric positive-definite matrix, symmetrized."""
    m = np.asarray(m, dtype=float)
    L = cholesky(m)
    inv = np.linalg.inv(L)
    out = inv.T @ inv
    return (out + out.T) / 2.0


def sample_mvn(mean, cov, rng):
    """Draw one vector from N(mean, cov) via the Cholesky factor of cov."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.asarray(cov, dtype=float)
    n = mean.shape[0]
    if n == 0:
        return np.empty(0)
    L = cholesky(cov)
    return mean + L @ rng.standard_normal(n)


def sample_gamma(shape, rate, rng):
    """Draw from Gamma(shape, rate); mean is shape / rate."""
    if shape <= 0 or rate <= 0:
        raise InvalidParameter(
            f"gamma parameters must be positive, got shape={shape}, rate={rate}")
    return rng.gamma(shape, 1.0 / rate)


def is_pd(m):
    """True if the symmetric matrix m admits a Cholesky factorization."""
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False
