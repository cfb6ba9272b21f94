"""Posterior summarization: inclusion probabilities, median model, diagnostics."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch


@dataclass
class PosteriorSummary:
    """Pooled marginal posterior probabilities and selected graphs."""
    edge_mpp: list            # [s]: (K, p_s, p_s) symmetric, zero diagonal
    selected: list            # [s]: (K, p_s, p_s) int8
    gamma_mpp: np.ndarray     # (S, K, K)
    zeta_mpp: np.ndarray      # (S, S)
    theta_samples: np.ndarray  # pooled (N, S, K, K) post-burn-in draws
    phi_samples: np.ndarray    # pooled (N, S, S)
    platform_names: list
    group_names: list
    var_names: list
    n_records: int
    threshold: float = 0.5

    @property
    def S(self):
        return len(self.edge_mpp)

    @property
    def K(self):
        return self.edge_mpp[0].shape[0]

    def p(self, s):
        return self.edge_mpp[s].shape[1]


def _check_compatible(traces):
    if not traces:
        raise DimensionMismatch("need at least one trace")
    ref = traces[0]
    for t in traces[1:]:
        if t.S != ref.S or t.K != ref.K or t.p != ref.p:
            raise DimensionMismatch("traces have mismatched dimensions")


def compute_mpp(traces, threshold=0.5):
    """Pool inclusion frequencies across chains (weighted by record count)."""
    _check_compatible(traces)
    ref = traces[0]
    total = sum(t.n_records for t in traces)
    if total == 0:
        raise DimensionMismatch("traces contain no records")
    edge_mpp = []
    for s in range(ref.S):
        p = ref.p[s]
        rows, cols = np.triu_indices(p, 1)
        counts = np.zeros((ref.K, len(rows)))
        for t in traces:
            counts += t.graph_records(s).sum(axis=0)
        freq = counts / total
        mat = np.zeros((ref.K, p, p))
        mat[:, rows, cols] = freq
        mat[:, cols, rows] = freq
        edge_mpp.append(mat)
    gamma_mpp = sum(t.gammas.sum(axis=0) for t in traces) / total
    zeta_mpp = sum(t.zetas.sum(axis=0) for t in traces) / total
    theta_samples = np.concatenate([t.thetas_all for t in traces], axis=0)
    phi_samples = np.concatenate([t.phis_all for t in traces], axis=0)
    summary = PosteriorSummary(
        edge_mpp=edge_mpp, selected=None,
        gamma_mpp=gamma_mpp, zeta_mpp=zeta_mpp,
        theta_samples=theta_samples, phi_samples=phi_samples,
        platform_names=ref.platform_names, group_names=ref.group_names,
        var_names=ref.var_names, n_records=total, threshold=threshold)
    summary.selected = median_model(summary, threshold)
    return summary


def median_model(summary: PosteriorSummary, threshold=0.5):
    """Graphs of edges with MPP strictly greater than the threshold."""
    if not 0 <= threshold <= 1:
        raise ValueError(f"threshold must lie in [0,1], got {threshold}")
    return [(m > threshold).astype(np.int8) for m in summary.edge_mpp]


def _edge_mpp_vector(summary: PosteriorSummary):
    parts = []
    for s in range(summary.S):
        rows, cols = np.triu_indices(summary.p(s), 1)
        parts.append(summary.edge_mpp[s][:, rows, cols].ravel())
    return np.concatenate(parts)


def chain_agreement(a: PosteriorSummary, b: PosteriorSummary):
    """Pearson correlation of the two summaries' edge MPP vectors."""
    va, vb = _edge_mpp_vector(a), _edge_mpp_vector(b)
    if va.shape != vb.shape:
        raise DimensionMismatch("summaries have mismatched dimensions")
    if np.ptp(va) == 0 or np.ptp(vb) == 0:
        raise DegenerateInput("MPP vector is constant; correlation undefined")
    return float(np.corrcoef(va, vb)[0, 1])
