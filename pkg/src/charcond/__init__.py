"""Condition numbers of characteristic polynomials of random matrices.

Library layout:

* ``polynomial``  -- complex polynomials, log-space coefficient norms
* ``linalg``      -- Ginibre sampling, Hessenberg/QR eigensolver
* ``condition``   -- the four condition-number flavors and their oracle
* ``randtheory``  -- digamma, chi-square identities, Kostlan verification
* ``bounds``      -- closed-form lower bounds
* ``experiments`` -- Monte Carlo harness and table emission
* ``cli``         -- the ``charcond`` command
"""

from .bounds import (
    average_ln_cond_bound,
    min_ln_cond_empirical_bound,
    per_index_ln_cond_bound,
    second_moment_ln_bound,
    universal_ln_cond_floor,
)
from .condition import (
    CondProfile,
    CondRecord,
    cond_profile,
    finite_difference_cond_oracle,
    ln_cond,
    ln_cond_componentwise,
    ln_cond_weyl,
    ln_mu_projective,
    ln_pair_product_bound,
)
from .experiments import (
    ExperimentConfig,
    ExperimentTable,
    emit_table,
    normalized_curves,
    run_cond_experiment,
    run_second_moment_check,
    verify_theorem_bounds,
)
from .linalg import (
    EigensolverError,
    Spectrum,
    companion_matrix,
    eigenvalues,
    ln_abs_det,
    polynomial_roots,
    sample_ginibre,
)
from .polynomial import Polynomial, char_poly_from_spectrum
from .randtheory import (
    KostlanReport,
    digamma,
    expected_ln_chi2,
    ginibre_log_density,
    ks_two_sample,
    sample_chi2,
    verify_kostlan,
)
from .rng import derive_seed, make_rng

__version__ = "0.1.0"
