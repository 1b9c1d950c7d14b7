"""Estimators and resource models for quantum transition probabilities.

The package is organised around five layers:

- :mod:`notrap.pauli`: symbolic Pauli-string algebra (symplectic masks),
  operator parsing, grouping, and the Hermitian embedding of general
  matrices;
- :mod:`notrap.simulator`: matrix-free statevector kernels, exponentials,
  overlap probabilities, and the finite-shot sampling model;
- :mod:`notrap.estimators`: the short-depth, high-depth, and tunable
  transition-probability estimators plus extrapolation and shot budgeting;
- :mod:`notrap.resources`: analytic circuit-depth, circuit-count, and
  shot-count formulas;
- :mod:`notrap.apps`: benchmark generators for spin operators, vibronic
  models, and random tensor trains.
"""

__version__ = "0.1.0"

from .apps import (
    DuschinskyModel,
    TensorTrainMatrix,
    build_a_loc,
    build_a_nonloc,
    build_tensor_train,
    build_vibronic,
    encode_dlevel,
    fig4_states,
    naphthalene,
    phenanthrene,
    vqls_objective,
)
from .estimators import (
    ExtrapolationPlan,
    HDShotBudget,
    InfeasibleBudgetError,
    OrthogonalizedProblem,
    SDTermSet,
    TTermSet,
    centered_tau_grid,
    default_tau_grid,
    hd_estimate,
    hd_f,
    hd_shot_budget,
    orthogonalize,
    richardson_solve,
    sd_estimate,
    sd_w_terms,
    t_estimate,
    t_terms,
)
from .pauli import (
    PauliOperator,
    PauliString,
    TermGrouping,
    group_terms,
    hermitian_embed,
    multiply,
    parse_operator,
    pauli_decompose,
    read_operator,
    spectral_norm,
    weight,
    write_operator,
)
from .simulator import (
    ShotSample,
    StateVector,
    apply_pauli,
    apply_pauli_exponential,
    derive_seed,
    exact_exponential,
    overlap_probability,
    sample,
    trotter_step,
)

__all__ = [
    "__version__",
    "DuschinskyModel",
    "ExtrapolationPlan",
    "HDShotBudget",
    "InfeasibleBudgetError",
    "OrthogonalizedProblem",
    "PauliOperator",
    "PauliString",
    "SDTermSet",
    "ShotSample",
    "StateVector",
    "TTermSet",
    "TensorTrainMatrix",
    "TermGrouping",
    "apply_pauli",
    "apply_pauli_exponential",
    "build_a_loc",
    "build_a_nonloc",
    "build_tensor_train",
    "build_vibronic",
    "centered_tau_grid",
    "default_tau_grid",
    "derive_seed",
    "encode_dlevel",
    "exact_exponential",
    "fig4_states",
    "group_terms",
    "hd_estimate",
    "hd_f",
    "hd_shot_budget",
    "hermitian_embed",
    "multiply",
    "naphthalene",
    "orthogonalize",
    "overlap_probability",
    "parse_operator",
    "pauli_decompose",
    "phenanthrene",
    "read_operator",
    "richardson_solve",
    "sample",
    "sd_estimate",
    "sd_w_terms",
    "spectral_norm",
    "t_estimate",
    "t_terms",
    "trotter_step",
    "vqls_objective",
    "weight",
    "write_operator",
]
