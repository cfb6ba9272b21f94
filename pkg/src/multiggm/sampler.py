"""MCMC kernels and chain driver for the hierarchical network model.

Per iteration the kernels sweep in a fixed order: precision matrices and
graphs for every (platform, group), group-similarity parameters and
their indicators per platform, edge sparsity parameters, cross-group
sparsity parameters, and finally platform-similarity parameters.  A
fixed scan keeps runs bit-reproducible for a given (seed, stream).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import expit, logit

from ._gibbs import sweep_precision
from .dataset import Dataset
from .errors import ConfigError, InconsistentState, NotPositiveDefinite
from .numerics import rng_stream
from .priors import mrf_log_normalizer


@dataclass
class Hyperparameters:
    """Fixed prior hyperparameters and proposal scales."""
    nu0: float = 0.02       # spike sd of the edge-weight mixture
    nu1: float = 1.0        # slab sd
    lam: float = 1.0        # exponential rate on precision diagonals
    alpha: float = 1.0      # Gamma slab shape for group-similarity weights
    beta: float = 9.0       # Gamma slab rate for group-similarity weights
    a: float = 1.0          # Beta(a, b) on logistic(edge sparsity)
    b: float = 7.0
    d: float = 1.0          # Beta(d, f) on logistic(cross-group sparsity)
    f: float = 19.0
    eta: float = 4.0        # Gamma slab shape for platform-similarity weights
    kappa: float = 5.0      # Gamma slab rate
    u: float = 0.1          # Bernoulli prior on platform-relatedness indicators
    theta_step: float = 0.5  # log-normal random-walk scale, within-model moves
    phi_step: float = 0.5

    def __post_init__(self):
        if not 0 < self.nu0 < self.nu1:
            raise ConfigError(f"need 0 < nu0 < nu1, got {self.nu0}, {self.nu1}")
        if not 0 <= self.u <= 1:
            raise ConfigError(f"u must lie in [0,1], got {self.u}")
        for name in ("lam", "alpha", "beta", "a", "b", "d", "f", "eta", "kappa"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


@dataclass
class RunControls:
    iterations: int          # total sweeps, burn-in included
    burnin: int
    thinning: int = 1
    seed: int = 0
    stream: int = 0
    check_pd: bool = False   # Cholesky-check every precision matrix each sweep
    progress: object = None  # optional callable(iteration, total, accept_rates)
    progress_every: int = 0

    def __post_init__(self):
        # iterations == burnin is allowed and yields an empty trace
        if self.burnin < 0 or self.iterations < self.burnin:
            raise ConfigError(
                f"need iterations >= burnin >= 0, got {self.iterations}, {self.burnin}")
        if self.thinning < 1:
            raise ConfigError("thinning must be >= 1")


@dataclass
class ChainState:
    """All latent variables of one chain."""
    omegas: list              # omegas[s][k]: (p_s, p_s) precision matrix
    graphs: list              # graphs[s]: (K, p_s, p_s) int8 adjacency
    thetas: np.ndarray        # (S, K, K) group-similarity weights, zero diag
    gammas: np.ndarray        # (S, K, K) int8 indicators
    nus: list                 # nus[s]: (p_s, p_s) symmetric edge sparsity
    ws: np.ndarray            # (K, K) cross-group sparsity
    phi: np.ndarray           # (S, S) platform-similarity weights, zero diag
    zetas: np.ndarray         # (S, S) int8 indicators

    @property
    def S(self):
        return len(self.omegas)

    @property
    def K(self):
        return self.graphs[0].shape[0]

    def check_couplings(self):
        """Raise if a value/indicator pair violates value = 0 iff indicator = 0."""
        if np.any((self.thetas == 0) != (self.gammas == 0)):
            raise InconsistentState("theta/gamma coupling violated")
        if np.any((self.phi == 0) != (self.zetas == 0)):
            raise InconsistentState("phi/zeta coupling violated")


def initial_state(data: Dataset, hp: Hyperparameters, init="empty"):
    """Cold start: identity precisions, sparse-prior-mean sparsity scalars.

    init="corr" instead seeds the graphs by thresholding the absolute
    sample correlations at 0.5, giving a second chain a distinct start.
    """
    S, K = data.S, data.K
    omegas, graphs, nus = [], [], []
    for s in range(S):
        p = data.p(s)
        omegas.append([np.eye(p) for _ in range(K)])
        g = np.zeros((K, p, p), dtype=np.int8)
        if init == "corr":
            for k in range(K):
                x = data.x[s][k]
                if x.shape[0] >= 3:
                    c = np.corrcoef(x, rowvar=False)
                    np.fill_diagonal(c, 0.0)
                    g[k] = (np.abs(c) > 0.5).astype(np.int8)
        elif init != "empty":
            raise ConfigError(f"unknown init mode {init!r}")
        graphs.append(g)
        nus.append(np.full((p, p), logit(hp.a / (hp.a + hp.b))))
    return ChainState(
        omegas=omegas,
        graphs=graphs,
        thetas=np.zeros((S, K, K)),
        gammas=np.zeros((S, K, K), dtype=np.int8),
        nus=nus,
        ws=np.full((K, K), logit(hp.d / (hp.d + hp.f))),
        phi=np.zeros((S, S)),
        zetas=np.zeros((S, S), dtype=np.int8),
    )


# ---------------------------------------------------------------------------
# kernels

def update_precision(state: ChainState, s, k, data: Dataset, hp, rng):
    """Block Gibbs sweep over all columns of one precision matrix."""
    sweep_precision(state.omegas[s][k], state.graphs[s][k], data.grams[s][k],
                    data.n(s, k), hp.lam, hp.nu0, hp.nu1, rng)


def _edge_logit(omega_val, nu_val, coup, hp):
    log_ratio = (np.log(hp.nu0 / hp.nu1)
                 + 0.5 * omega_val ** 2 * (1.0 / hp.nu0 ** 2 - 1.0 / hp.nu1 ** 2))
    return nu_val + coup + log_ratio


def update_graph(state: ChainState, s, i, j, hp, rng):
    """Gibbs scan of the K inclusion indicators for edge (i, j) on platform s."""
    K = state.K
    theta = state.thetas[s]
    for k in range(K):
        g_edge = state.graphs[s][:, i, j].astype(float)
        coup = 2.0 * float(theta[k] @ g_edge)  # theta[k, k] = 0
        logit_p = _edge_logit(state.omegas[s][k][i, j], state.nus[s][i, j], coup, hp)
        g = np.int8(rng.random() < expit(logit_p))
        state.graphs[s][k, i, j] = g
        state.graphs[s][k, j, i] = g


def update_graphs_platform(state: ChainState, s, hp, rng):
    """Vectorized edge-indicator scan over all (i, j) pairs of a platform.

    Given the similarity matrix, distinct edges are conditionally
    independent, so the coordinate-k update can run across all edges at
    once; k is scanned in index order as in update_graph.
    """
    K = state.K
    p = state.graphs[s].shape[1]
    rows, cols = np.triu_indices(p, 1)
    om = np.stack([state.omegas[s][k][rows, cols] for k in range(K)])
    nu_e = state.nus[s][rows, cols]
    log_ratio = (np.log(hp.nu0 / hp.nu1)
                 + 0.5 * om ** 2 * (1.0 / hp.nu0 ** 2 - 1.0 / hp.nu1 ** 2))
    ge = state.graphs[s][:, rows, cols].astype(float)
    theta = state.thetas[s]
    for k in range(K):
        coup = 2.0 * (theta[k] @ ge)
        pr = expit(nu_e + coup + log_ratio[k])
        ge[k] = rng.random(ge.shape[1]) < pr
    gi = ge.astype(np.int8)
    state.graphs[s][:, rows, cols] = gi
    state.graphs[s][:, cols, rows] = gi


def _theta_loglik_delta(ge, nu_e, theta_cur, theta_prop, k, m, logc_cur=None):
    """Change in the edge-vector MRF log likelihood when theta[k, m] moves."""
    dtheta = theta_prop[k, m] - theta_cur[k, m]
    pair = float(ge[k] @ ge[m])
    if logc_cur is None:
        logc_cur = mrf_log_normalizer(nu_e, theta_cur)
    logc_prop = mrf_log_normalizer(nu_e, theta_prop)
    return 2.0 * dtheta * pair - float(np.sum(logc_prop) - np.sum(logc_cur))


def update_theta_gamma(state: ChainState, s, k, m, hp, rng, accept=None):
    """Reversible-jump update of one (theta[s,k,m], gamma[s,k,m]) pair.

    A between-model move adds or deletes the similarity weight; when the
    weight is present, a within-model log-normal random walk refines it.
    The Gamma slab doubles as the birth proposal, so slab and proposal
    densities cancel in the between-model ratio.
    """
    p = state.graphs[s].shape[1]
    rows, cols = np.triu_indices(p, 1)
    ge = state.graphs[s][:, rows, cols].astype(float)
    nu_e = state.nus[s][rows, cols]
    theta = state.thetas[s]
    prior_lo = float(state.ws[k, m] + 2.0 * state.phi[s] @ state.gammas[:, k, m])
    logc_cur = mrf_log_normalizer(nu_e, theta)

    # between-model move
    if state.gammas[s, k, m] == 0:
        prop = rng.gamma(hp.alpha, 1.0 / hp.beta)
        theta_prop = theta.copy()
        theta_prop[k, m] = theta_prop[m, k] = prop
        log_acc = _theta_loglik_delta(ge, nu_e, theta, theta_prop, k, m, logc_cur) + prior_lo
        if accept is not None:
            accept["theta_between"][1] += 1
        if np.log(rng.random()) < log_acc:
            state.thetas[s] = theta = theta_prop
            state.gammas[s, k, m] = state.gammas[s, m, k] = 1
            logc_cur = None
            if accept is not None:
                accept["theta_between"][0] += 1
    else:
        theta_prop = theta.copy()
        theta_prop[k, m] = theta_prop[m, k] = 0.0
        log_acc = _theta_loglik_delta(ge, nu_e, theta, theta_prop, k, m, logc_cur) - prior_lo
        if accept is not None:
            accept["theta_between"][1] += 1
        if np.log(rng.random()) < log_acc:
            state.thetas[s] = theta = theta_prop
            state.gammas[s, k, m] = state.gammas[s, m, k] = 0
            logc_cur = None
            if accept is not None:
                accept["theta_between"][0] += 1

    # within-model move
    if state.gammas[s, k, m] == 1:
        cur = theta[k, m]
        prop = cur * math.exp(hp.theta_step * rng.standard_normal())
        theta_prop = theta.copy()
        theta_prop[k, m] = theta_prop[m, k] = prop
        # slab ratio plus log-normal proposal Jacobian
        log_acc = (_theta_loglik_delta(ge, nu_e, theta, theta_prop, k, m, logc_cur)
                   + hp.alpha * math.log(prop / cur) - hp.beta * (prop - cur))
        if accept is not None:
            accept["theta_within"][1] += 1
        if np.log(rng.random()) < log_acc:
            state.thetas[s] = theta_prop
            if accept is not None:
                accept["theta_within"][0] += 1


def update_nu(state: ChainState, s, i, j, hp, rng, accept=None):
    """Independence MH update of one edge sparsity parameter from its prior."""
    g_edge = state.graphs[s][:, i, j].astype(float)
    cur = state.nus[s][i, j]
    prop = float(logit(rng.beta(hp.a, hp.b)))
    theta = state.thetas[s]
    log_acc = ((prop - cur) * g_edge.sum()
               - float(mrf_log_normalizer(prop, theta) - mrf_log_normalizer(cur, theta)))
    if accept is not None:
        accept["nu"][1] += 1
    if np.log(rng.random()) < log_acc:
        state.nus[s][i, j] = state.nus[s][j, i] = prop
        if accept is not None:
            accept["nu"][0] += 1


def update_nus_platform(state: ChainState, s, hp, rng, accept=None):
    """Simultaneous independence MH update of all edge sparsity parameters.

    The MRF likelihood factorizes over edges given the similarity
    matrix, so per-edge accept/reject decisions are independent.
    """
    p = state.graphs[s].shape[1]
    rows, cols = np.triu_indices(p, 1)
    ge = state.graphs[s][:, rows, cols]
    ng = ge.sum(axis=0).astype(float)
    cur = state.nus[s][rows, cols]
    prop = logit(rng.beta(hp.a, hp.b, size=cur.shape[0]))
    theta = state.thetas[s]
    log_acc = ((prop - cur) * ng
               - (mrf_log_normalizer(prop, theta) - mrf_log_normalizer(cur, theta)))
    acc = np.log(rng.random(cur.shape[0])) < log_acc
    newval = np.where(acc, prop, cur)
    state.nus[s][rows, cols] = newval
    state.nus[s][cols, rows] = newval
    if accept is not None:
        accept["nu"][0] += int(acc.sum())
        accept["nu"][1] += acc.shape[0]


def update_w(state: ChainState, k, m, hp, rng, accept=None):
    """Independence MH update of one cross-group sparsity parameter."""
    gvec = state.gammas[:, k, m].astype(float)
    cur = state.ws[k, m]
    prop = float(logit(rng.beta(hp.d, hp.f)))
    log_acc = ((prop - cur) * gvec.sum()
               - float(mrf_log_normalizer(prop, state.phi)
                       - mrf_log_normalizer(cur, state.phi)))
    if accept is not None:
        accept["w"][1] += 1
    if np.log(rng.random()) < log_acc:
        state.ws[k, m] = state.ws[m, k] = prop
        if accept is not None:
            accept["w"][0] += 1


def _phi_loglik_delta(state: ChainState, phi_prop, s, t):
    K = state.K
    ks, ms = np.triu_indices(K, 1)
    dphi = phi_prop[s, t] - state.phi[s, t]
    pair = float(np.sum(state.gammas[s, ks, ms] * state.gammas[t, ks, ms]))
    w_vec = state.ws[ks, ms]
    logc_cur = mrf_log_normalizer(w_vec, state.phi)
    logc_prop = mrf_log_normalizer(w_vec, phi_prop)
    return 2.0 * dphi * pair - float(np.sum(logc_prop) - np.sum(logc_cur))


def update_phi_zeta(state: ChainState, s, t, hp, rng, accept=None):
    """Reversible-jump update of one (phi[s,t], zeta[s,t]) pair."""
    if hp.u == 0.0:
        prior_lo = -np.inf
    elif hp.u == 1.0:
        prior_lo = np.inf
    else:
        prior_lo = math.log(hp.u) - math.log1p(-hp.u)

    if state.zetas[s, t] == 0:
        if hp.u > 0.0:
            prop = rng.gamma(hp.eta, 1.0 / hp.kappa)
            phi_prop = state.phi.copy()
            phi_prop[s, t] = phi_prop[t, s] = prop
            log_acc = _phi_loglik_delta(state, phi_prop, s, t) + prior_lo
            if accept is not None:
                accept["phi_between"][1] += 1
            if np.log(rng.random()) < log_acc:
                state.phi = phi_prop
                state.zetas[s, t] = state.zetas[t, s] = 1
                if accept is not None:
                    accept["phi_between"][0] += 1
    else:
        phi_prop = state.phi.copy()
        phi_prop[s, t] = phi_prop[t, s] = 0.0
        log_acc = _phi_loglik_delta(state, phi_prop, s, t) - prior_lo
        if accept is not None:
            accept["phi_between"][1] += 1
        if np.log(rng.random()) < log_acc:
            state.phi = phi_prop
            state.zetas[s, t] = state.zetas[t, s] = 0
            if accept is not None:
                accept["phi_between"][0] += 1

    if state.zetas[s, t] == 1:
        cur = state.phi[s, t]
        prop = cur * math.exp(hp.phi_step * rng.standard_normal())
        phi_prop = state.phi.copy()
        phi_prop[s, t] = phi_prop[t, s] = prop
        log_acc = (_phi_loglik_delta(state, phi_prop, s, t)
                   + hp.eta * math.log(prop / cur) - hp.kappa * (prop - cur))
        if accept is not None:
            accept["phi_within"][1] += 1
        if np.log(rng.random()) < log_acc:
            state.phi = phi_prop
            if accept is not None:
                accept["phi_within"][0] += 1


# ---------------------------------------------------------------------------
# chain driver

@dataclass
class ChainTrace:
    """Post-burn-in records of one chain (graphs bit-packed per edge)."""
    S: int
    K: int
    p: list
    platform_names: list
    group_names: list
    var_names: list
    graph_bits: list          # [s]: (R, K, ceil(E_s/8)) uint8
    gammas: np.ndarray        # (R, S, K, K) uint8
    zetas: np.ndarray         # (R, S, S) uint8
    thetas: np.ndarray        # (R, S, K, K)
    phis: np.ndarray          # (R, S, S)
    thetas_all: np.ndarray    # unthinned (iterations - burnin, S, K, K)
    phis_all: np.ndarray
    accept: dict              # kernel -> [accepted, proposed]
    iterations: int
    burnin: int
    thinning: int
    seed: int
    stream: int

    @property
    def n_records(self):
        return self.gammas.shape[0]

    def n_edges(self, s):
        return self.p[s] * (self.p[s] - 1) // 2

    def graph_records(self, s):
        """Unpacked (R, K, E_s) 0/1 array of edge indicators."""
        bits = np.unpackbits(self.graph_bits[s], axis=-1)
        return bits[..., :self.n_edges(s)]


def acceptance_rates(accept):
    return {k: (v[0] / v[1] if v[1] else float("nan")) for k, v in accept.items()}


def run_chain(data: Dataset, hp: Hyperparameters, controls: RunControls,
              init="empty"):
    """Run one MCMC chain and return its trace.

    Kernel order per sweep is fixed; identical (data, hp, controls,
    init) yield bit-identical traces.
    """
    rng = rng_stream(controls.seed, controls.stream)
    state = initial_state(data, hp, init=init)
    S, K = data.S, data.K
    ps = [data.p(s) for s in range(S)]
    triu = [np.triu_indices(p, 1) for p in ps]
    n_post = controls.iterations - controls.burnin
    n_rec = -(-n_post // controls.thinning) if n_post > 0 else 0

    graph_bits = [np.zeros((n_rec, K, -(-len(triu[s][0]) // 8)), dtype=np.uint8)
                  for s in range(S)]
    gammas = np.zeros((n_rec, S, K, K), dtype=np.uint8)
    zetas = np.zeros((n_rec, S, S), dtype=np.uint8)
    thetas = np.zeros((n_rec, S, K, K))
    phis = np.zeros((n_rec, S, S))
    thetas_all = np.zeros((max(n_post, 0), S, K, K))
    phis_all = np.zeros((max(n_post, 0), S, S))
    accept = {k: [0, 0] for k in ("theta_between", "theta_within", "nu", "w",
                                  "phi_between", "phi_within")}

    rec = 0
    for it in range(controls.iterations):
        for s in range(S):
            for k in range(K):
                update_precision(state, s, k, data, hp, rng)
        for s in range(S):
            update_graphs_platform(state, s, hp, rng)
        for s in range(S):
            for k in range(K):
                for m in range(k + 1, K):
                    update_theta_gamma(state, s, k, m, hp, rng, accept)
        for s in range(S):
            update_nus_platform(state, s, hp, rng, accept)
        for k in range(K):
            for m in range(k + 1, K):
                update_w(state, k, m, hp, rng, accept)
        for s in range(S):
            for t in range(s + 1, S):
                update_phi_zeta(state, s, t, hp, rng, accept)

        if controls.check_pd:
            for s in range(S):
                for k in range(K):
                    try:
                        np.linalg.cholesky(state.omegas[s][k])
                    except np.linalg.LinAlgError as e:
                        raise NotPositiveDefinite(
                            f"precision (s={s}, k={k}) lost positive definiteness "
                            f"at iteration {it}") from e
            state.check_couplings()

        post = it - controls.burnin
        if post >= 0:
            thetas_all[post] = state.thetas
            phis_all[post] = state.phi
            if post % controls.thinning == 0:
                for s in range(S):
                    ge = state.graphs[s][:, triu[s][0], triu[s][1]]
                    graph_bits[s][rec] = np.packbits(ge.astype(np.uint8), axis=-1)
                gammas[rec] = state.gammas
                zetas[rec] = state.zetas
                thetas[rec] = state.thetas
                phis[rec] = state.phi
                rec += 1
        if (controls.progress is not None and controls.progress_every > 0
                and (it + 1) % controls.progress_every == 0):
            controls.progress(it + 1, controls.iterations, acceptance_rates(accept))

    return ChainTrace(
        S=S, K=K, p=ps,
        platform_names=data.platform_names,
        group_names=data.group_names,
        var_names=data.var_names,
        graph_bits=graph_bits, gammas=gammas, zetas=zetas,
        thetas=thetas, phis=phis, thetas_all=thetas_all, phis_all=phis_all,
        accept=accept,
        iterations=controls.iterations, burnin=controls.burnin,
        thinning=controls.thinning, seed=controls.seed, stream=controls.stream,
    )


def _chain_job(args):
    data, hp, controls, init = args
    return run_chain(data, hp, controls, init=init)


def run_chains(data: Dataset, hp: Hyperparameters, controls: RunControls,
               chains=2, threads=1):
    """Run several chains with distinct streams and distinct starts.

    Chain 0 starts from empty graphs, chain 1 from correlation-threshold
    graphs, alternating beyond that.  Chains run in parallel processes
    when threads > 1.
    """
    jobs = []
    for c in range(chains):
        ctl = replace(controls, stream=controls.stream + c, progress=None)
        init = "empty" if c % 2 == 0 else "corr"
        jobs.append((data, hp, ctl, init))
    if threads > 1 and chains > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=min(threads, chains)) as ex:
            return list(ex.map(_chain_job, jobs))
    return [_chain_job(j) for j in jobs]
