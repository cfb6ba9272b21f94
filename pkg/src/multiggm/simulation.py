"""Ground-truth generators and data simulation for the benchmark scenarios.

Two network families are supported: preferential-attachment scale-free
graphs (one edge per arriving node, attachment probability proportional
to degree^alpha) and banded AR(2) precision matrices.  "Similar" groups
share a stated fraction of the base graph's edges, with the remainder
rewired to random non-edges so total edge counts stay constant.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import ConfigError, InvalidParameter, NotPositiveDefinite, SupportLost
from .numerics import cholesky, pd_inverse


@dataclass
class SimulationScenario:
    family: str               # "scale-free" or "ar2"
    p: int = 40
    n: int = 100
    S: int = 2
    K: int = 3
    layout: object = "setting_two"   # name or explicit per-platform blocks
    share_fraction: float = 0.9
    seed: int = 0
    alpha: float = 1.0
    edge_value: float = 0.5

    def __post_init__(self):
        if self.family not in ("scale-free", "ar2"):
            raise ConfigError(f"unknown family {self.family!r}")
        if self.p < 3:
            raise ConfigError("p must be >= 3")
        if not 0 < self.share_fraction <= 1:
            raise ConfigError("share_fraction must lie in (0, 1]")

    def blocks(self):
        """Per-platform partitions of group indices into similarity blocks."""
        if isinstance(self.layout, str):
            if self.layout == "setting_one":
                if self.S < 2 or self.K < 3:
                    raise ConfigError("setting_one needs S >= 2 and K >= 3")
                first = [[0, 1], [2]] + [[k] for k in range(3, self.K)]
                rest = [list(range(self.K))]
                return [first] + [rest for _ in range(self.S - 1)]
            if self.layout == "setting_two":
                return [[[k] for k in range(self.K)] for _ in range(self.S)]
            raise ConfigError(f"unknown layout {self.layout!r}")
        blocks = [[list(b) for b in plat] for plat in self.layout]
        if len(blocks) != self.S:
            raise ConfigError("layout must give one partition per platform")
        for plat in blocks:
            flat = sorted(k for b in plat for k in b)
            if flat != list(range(self.K)):
                raise ConfigError("each platform layout must partition the groups")
        return blocks


@dataclass
class GroundTruth:
    adjacency: list           # [s][k]: (p, p) int8
    precision: list           # [s][k]: (p, p) float
    data: list                # [s][k]: (n, p) float
    scenario: SimulationScenario = None

    def dataset(self):
        return Dataset([[x.copy() for x in plat] for plat in self.data])


def gen_scale_free(p, alpha=1.0, rng=None):
    """Connected preferential-attachment graph with p-1 edges.

    Each arriving node attaches to one existing node with probability
    proportional to degree^alpha.
    """
    if p < 2:
        raise InvalidParameter("p must be >= 2")
    if alpha <= 0:
        raise InvalidParameter("alpha must be positive")
    adj = np.zeros((p, p), dtype=np.int8)
    adj[0, 1] = adj[1, 0] = 1
    deg = np.zeros(p)
    deg[:2] = 1
    for v in range(2, p):
        wts = deg[:v] ** alpha
        target = rng.choice(v, p=wts / wts.sum())
        adj[v, target] = adj[target, v] = 1
        deg[v] = 1
        deg[target] += 1
    return adj


def gen_ar2(p):
    """Banded AR(2) precision: unit diagonal, 0.5 on band 1, 0.4 on band 2."""
    if p < 3:
        raise InvalidParameter("p must be >= 3")
    m = np.eye(p)
    i = np.arange(p - 1)
    m[i, i + 1] = m[i + 1, i] = 0.5
    i = np.arange(p - 2)
    m[i, i + 2] = m[i + 2, i] = 0.4
    cholesky(m)  # assert positive definite
    return m


def _edge_list(adj):
    rows, cols = np.nonzero(np.triu(adj, 1))
    return list(zip(rows.tolist(), cols.tolist()))


def perturb_similar(base, share_fraction, rng):
    """Keep ceil(f*|E|) random base edges; rewire the rest to non-edges.

    The result has exactly as many edges as the base, and its overlap
    with the base is exactly the kept count.
    """
    if not 0 < share_fraction <= 1:
        raise InvalidParameter("share_fraction must lie in (0, 1]")
    base = np.asarray(base)
    p = base.shape[0]
    edges = _edge_list(base)
    n_edges = len(edges)
    n_keep = math.ceil(share_fraction * n_edges)
    if n_keep >= n_edges:
        return base.astype(np.int8).copy()
    keep_idx = rng.choice(n_edges, size=n_keep, replace=False)
    rows, cols = np.triu_indices(p, 1)
    non = [(int(i), int(j)) for i, j in zip(rows, cols) if base[i, j] == 0]
    n_new = min(n_edges - n_keep, len(non))
    new_idx = rng.choice(len(non), size=n_new, replace=False)
    out = np.zeros((p, p), dtype=np.int8)
    for idx in keep_idx:
        i, j = edges[idx]
        out[i, j] = out[j, i] = 1
    for idx in new_idx:
        i, j = non[idx]
        out[i, j] = out[j, i] = 1
    return out


def adjacency_to_precision(adj, edge_value=0.5, min_eig=0.1):
    """Positive-definite precision matrix with the given edge support.

    Off-diagonals start at edge_value, are divided by 1.5 times their
    row's off-diagonal absolute sum, and the matrix is averaged with its
    transpose.  Row scaling alone does not keep the symmetrized matrix
    positive definite once hub nodes appear, so if the smallest
    eigenvalue falls below min_eig the whole matrix is shifted and
    renormalized to a unit diagonal, which shrinks every off-diagonal by
    a common factor and leaves the support unchanged.
    """
    adj = np.asarray(adj)
    p = adj.shape[0]
    m = np.eye(p) + edge_value * (adj != 0)
    off = m - np.diag(np.diag(m))
    row_sums = np.abs(off).sum(axis=1)
    scale = np.where(row_sums > 0, 1.5 * row_sums, 1.0)
    off = off / scale[:, None]
    m = np.eye(p) + (off + off.T) / 2.0
    smallest = np.linalg.eigvalsh(m)[0]
    if smallest < min_eig:
        c = min_eig - smallest
        m = (m + c * np.eye(p)) / (1.0 + c)
    support = np.triu(m, 1) != 0
    if not np.array_equal(support, np.triu(adj, 1) != 0):
        raise SupportLost("rescaling changed the edge support")
    cholesky(m)
    return m


def sample_dataset(precisions, n, rng):
    """n standardized Gaussian samples per precision matrix.

    Columns are centered and scaled to unit sample standard deviation.
    """
    if n < 2:
        raise InvalidParameter("n must be >= 2")
    out = []
    for plat in precisions:
        row = []
        for prec in plat:
            cov = pd_inverse(prec)
            L = cholesky(cov)
            x = rng.standard_normal((n, prec.shape[0])) @ L.T
            x = x - x.mean(axis=0)
            x = x / x.std(axis=0, ddof=1)
            row.append(x)
        out.append(row)
    return out


def build_scenario(scenario: SimulationScenario, rng=None):
    """Generate ground-truth graphs, precisions, and data for a scenario."""
    from .numerics import rng_stream
    if rng is None:
        rng = rng_stream(scenario.seed)
    blocks = scenario.blocks()
    adjacency = []
    precision = []
    for s in range(scenario.S):
        adj_row = [None] * scenario.K
        prec_row = [None] * scenario.K
        for block in blocks[s]:
            lead = block[0]
            if scenario.family == "scale-free":
                base_adj = gen_scale_free(scenario.p, scenario.alpha, rng)
                base_prec = adjacency_to_precision(base_adj, scenario.edge_value)
            else:
                base_prec = gen_ar2(scenario.p)
                base_adj = (np.triu(base_prec, 1) != 0).astype(np.int8)
                base_adj = base_adj + base_adj.T
            adj_row[lead] = base_adj
            prec_row[lead] = base_prec
            for k in block[1:]:
                adj = perturb_similar(base_adj, scenario.share_fraction, rng)
                adj_row[k] = adj
                prec_row[k] = adjacency_to_precision(adj, scenario.edge_value)
        adjacency.append(adj_row)
        precision.append(prec_row)
    data = sample_dataset(precision, scenario.n, rng)
    return GroundTruth(adjacency=adjacency, precision=precision, data=data,
                       scenario=scenario)
