"""Pósa endpoint sets in random graphs of minimum degree three.

Sampling of uniform min-degree-3 graphs through the pairing model, rotation
closures with their structural decomposition and lemma checks, small dense
subgraph searches, and the analytic constants and expected-number bounds
that go with them.

    >>> from posa import critical_constants
    >>> round(critical_constants().a_star, 4)
    2.6616
"""
from .bounds import BoundQuery, expectation_sweep, locate_sign_flip, log_e_star, log_n1, log_n2
from .census import density_profile, scan_small_dense
from .graph import Graph, read_edgelist, write_edgelist
from .numeric import (DegreeSupport, critical_constants, exponent_functions, log_c_nm,
                      model_params, solve_lambda, tail_exp, thresholds, trunc_poisson_stats)
from .rotation import (check_structure, decompose_structure, endpoint_closure, maximal_path,
                       posa_pair, rotate)
from .sampler import sample_degrees, sample_min3_graph, trial_rng

__version__ = "0.1.0"
