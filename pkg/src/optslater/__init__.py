"""Optimal Slater-determinant approximation of fermion states."""

from ._backend import BACKEND, available_backends, get_kernels
from .catalog import BUILTINS, builtin_state
from .ensemble import EnsembleReport, run_ensemble
from .errors import *  # noqa: F401,F403
from .fock import (
    FermionState,
    basis_state,
    canonical_order,
    complete_basis,
    embed,
    haar_frame,
    haar_unitary,
    inner_product,
    interior_contraction,
    normalize,
    overlap,
    random_state,
    rotate_basis,
    slater_amplitudes,
    wedge,
)
from .fstio import dump, dumps, load, loads
from .optimizer import (
    ApproximationResult,
    OptimizerConfig,
    alternating_sweeps,
    brute_force_oracle,
    exact_rank_dminus1,
    optimize_slater,
    optimize_subspace,
    riemannian_ascent,
    subspace_weight,
    weight_gradient,
)
from .rdm import (
    BorlandDennisReport,
    NaturalOrbitalDecomposition,
    borland_dennis_check,
    envelope_rank,
    natural_orbitals,
    natural_orbitals_of,
    one_particle_rdm,
)
from .reductions import (
    branch,
    decompose_full,
    factor_out,
    find_certain_orbitals,
    find_simultaneous_pairs,
    slater_form_nplus1,
)
from .three_in_six import (
    CanonicalForm36,
    PairedAnsatz,
    canonicalize36,
    natural_pair_leakage,
    paired_ansatz_optimize,
    verify_bd_blocks,
)

__version__ = "0.1.0"
