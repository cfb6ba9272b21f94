"""Joint Bayesian inference of Gaussian graphical models across sample
groups and data platforms.

The model places a two-component normal mixture on precision matrix
entries, couples edge selection across groups within a platform through
a binary Markov random field, and couples the group-relatedness
indicators across platforms through a second MRF, all sampled with a
block Gibbs / Metropolis-Hastings scheme.
"""

from .dataset import Dataset
from .errors import (ConfigError, DegenerateInput, DimensionMismatch,
                     DimensionTooLarge, EmptyGroup, InconsistentState,
                     InvalidParameter, MultiggmError, NotPositiveDefinite,
                     ParseError, SchemaError, SupportLost)
from .metrics import (auc, betweenness, clustering_coefficient, confusion,
                      disruption_codes, hub_nodes)
from .numerics import cholesky, pd_inverse, rng_stream, sample_gamma, sample_mvn
from .priors import (LogisticBeta, MrfParams, SpikeSlabGamma,
                     logistic_beta_log_density, mrf_conditional_odds,
                     mrf_log_density, mrf_normalizer, omega_edge_log_density,
                     spike_slab_log_density)
from .sampler import (ChainState, ChainTrace, Hyperparameters, RunControls,
                      run_chain, run_chains)
from .selection import PosteriorSummary, chain_agreement, compute_mpp, median_model
from .simulation import (GroundTruth, SimulationScenario, adjacency_to_precision,
                         build_scenario, gen_ar2, gen_scale_free,
                         perturb_similar, sample_dataset)

__version__ = "0.1.0"
