"""Network accuracy metrics and graph summaries.

All edge-level comparisons run over the strict upper triangle of the
adjacency matrices.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateInput, DimensionMismatch


@dataclass
class ConfusionMetrics:
    tp: int
    fp: int
    tn: int
    fn: int
    tpr: float
    fpr: float
    mcc: float


def _upper(mat):
    mat = np.asarray(mat)
    rows, cols = np.triu_indices(mat.shape[0], 1)
    return mat[rows, cols]


def confusion_from_counts(tp, fp, tn, fn):
    tpr = tp / (tp + fn) if tp + fn else 0.0
    fpr = fp / (fp + tn) if fp + tn else 0.0
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / np.sqrt(denom) if denom else 0.0
    return ConfusionMetrics(tp=tp, fp=fp, tn=tn, fn=fn,
                            tpr=float(tpr), fpr=float(fpr), mcc=float(mcc))


def confusion(estimated, truth):
    """Edge-level confusion counts, TPR, FPR, and MCC."""
    estimated, truth = np.asarray(estimated), np.asarray(truth)
    if estimated.shape != truth.shape:
        raise DimensionMismatch("graphs differ in dimension")
    e, t = _upper(estimated) != 0, _upper(truth) != 0
    tp = int(np.sum(e & t))
    fp = int(np.sum(e & ~t))
    tn = int(np.sum(~e & ~t))
    fn = int(np.sum(~e & t))
    return confusion_from_counts(tp, fp, tn, fn)


def auc(scores, truth):
    """Area under the ROC by the rank (Mann-Whitney) method, ties averaged.

    `scores` is a symmetric matrix of edge scores (e.g. inclusion MPPs)
    or an already-flattened vector matching a flattened truth vector.
    """
    scores, truth = np.asarray(scores, dtype=float), np.asarray(truth)
    if scores.shape != truth.shape:
        raise DimensionMismatch("scores and truth differ in dimension")
    if scores.ndim == 2:
        scores, truth = _upper(scores), _upper(truth)
    pos = truth != 0
    n_pos, n_neg = int(pos.sum()), int((~pos).sum())
    if n_pos == 0 or n_neg == 0:
        raise DegenerateInput("truth must contain both edges and non-edges")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def clustering_coefficient(graph):
    """Global clustering: 3 x triangles / connected triplets (0 if none)."""
    a = (np.asarray(graph) != 0).astype(float)
    np.fill_diagonal(a, 0)
    triangles = np.trace(a @ a @ a) / 6.0
    deg = a.sum(axis=1)
    triplets = np.sum(deg * (deg - 1) / 2.0)
    if triplets == 0:
        return 0.0
    return float(3.0 * triangles / triplets)


def betweenness(graph):
    """Exact shortest-path betweenness (Brandes), normalized by (p-1)(p-2)/2.

    Returns (per-node array, average).
    """
    a = (np.asarray(graph) != 0)
    p = a.shape[0]
    neighbors = [np.flatnonzero(a[v]) for v in range(p)]
    bc = np.zeros(p)
    for src in range(p):
        stack = []
        preds = [[] for _ in range(p)]
        sigma = np.zeros(p)
        sigma[src] = 1.0
        dist = np.full(p, -1)
        dist[src] = 0
        queue = [src]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            stack.append(v)
            for w in neighbors[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(p)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != src:
                bc[w] += delta[w]
    bc /= 2.0  # each unordered pair counted from both endpoints
    if p > 2:
        bc /= (p - 1) * (p - 2) / 2.0
    return bc, float(bc.mean())


def hub_nodes(graph, min_degree=4):
    """Nodes of degree >= min_degree, sorted by degree descending then index."""
    if min_degree < 1:
        raise ValueError("min_degree must be >= 1")
    a = (np.asarray(graph) != 0).astype(int)
    np.fill_diagonal(a, 0)
    deg = a.sum(axis=1)
    hubs = [v for v in np.argsort(-deg, kind="stable") if deg[v] >= min_degree]
    return [int(v) for v in hubs]


def disruption_codes(graphs):
    """Presence/absence codes per edge across K graphs ordered by severity.

    Returns (codes, summary): codes maps (i, j) -> K-character 0/1 string
    for every edge present in at least one graph; summary holds counts
    per code, Total Pairs, the named patterns, and Total Disrupted
    (present somewhere but not everywhere).
    """
    graphs = [np.asarray(g) for g in graphs]
    p = graphs[0].shape[0]
    if any(g.shape != (p, p) for g in graphs):
        raise DimensionMismatch("graphs differ in dimension")
    K = len(graphs)
    rows, cols = np.triu_indices(p, 1)
    bits = np.stack([(g[rows, cols] != 0).astype(int) for g in graphs])
    present = bits.any(axis=0)
    codes = {}
    counts = {}
    for e in np.flatnonzero(present):
        code = "".join(str(b) for b in bits[:, e])
        codes[(int(rows[e]), int(cols[e]))] = code
        counts[code] = counts.get(code, 0) + 1
    all_ones = "1" * K
    summary = {"Total Pairs": int(present.sum()), "counts": counts}
    for pattern in ("100", "110", "011", "001") if K == 3 else ():
        summary[pattern] = counts.get(pattern, 0)
    summary["Total Disrupted"] = int(present.sum()) - counts.get(all_ones, 0)
    return codes, summary
