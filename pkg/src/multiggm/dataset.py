"""In-memory representation of a multi-platform, multi-group dataset."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch


@dataclass
class Dataset:
    """Centered data matrices X[s][k] of shape (n_sk, p_s).

    Platforms may have different variable sets (p_s varies); all
    platforms must cover the same groups in the same order.
    """
    x: list                      # x[s][k]: (n_sk, p_s) float arrays
    platform_names: list = None
    group_names: list = None
    var_names: list = None       # var_names[s]: list of p_s strings
    grams: list = field(default=None, repr=False)

    def __post_init__(self):
        S = len(self.x)
        if S == 0:
            raise DimensionMismatch("need at least one platform")
        K = len(self.x[0])
        for s in range(S):
            if len(self.x[s]) != K:
                raise DimensionMismatch("all platforms must have the same group count")
            p = self.x[s][0].shape[1]
            for k in range(K):
                self.x[s][k] = np.ascontiguousarray(self.x[s][k], dtype=float)
                if self.x[s][k].shape[1] != p:
                    raise DimensionMismatch(
                        f"platform {s}: inconsistent variable counts across groups")
        if self.platform_names is None:
            self.platform_names = [f"platform{s + 1}" for s in range(S)]
        if self.group_names is None:
            self.group_names = [f"group{k + 1}" for k in range(K)]
        if self.var_names is None:
            self.var_names = [[f"v{i + 1}" for i in range(self.p(s))] for s in range(S)]
        if self.grams is None:
            self.grams = [[x.T @ x for x in plat] for plat in self.x]

    @property
    def S(self):
        return len(self.x)

    @property
    def K(self):
        return len(self.x[0])

    def p(self, s):
        return self.x[s][0].shape[1]

    def n(self, s, k):
        return self.x[s][k].shape[0]

    @staticmethod
    def empty(S, K, p, platform_names=None, group_names=None):
        """A dataset with zero samples everywhere (prior-only runs)."""
        ps = [p] * S if np.isscalar(p) else list(p)
        x = [[np.zeros((0, ps[s])) for _ in range(K)] for s in range(S)]
        return Dataset(x, platform_names=platform_names, group_names=group_names)


def center_columns(x):
    """Subtract column means (no-op for empty matrices)."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] == 0:
        return x
    return x - x.mean(axis=0)


def standardize_columns(x):
    """Center columns and scale each to unit sample standard deviation."""
    x = center_columns(x)
    if x.shape[0] < 2:
        return x
    sd = x.std(axis=0, ddof=1)
    sd[sd == 0] = 1.0
    return x / sd
