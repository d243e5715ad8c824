"""Curve-count asymptotics: stable-pairs tables, flat-section integrals,
Poisson-kernel potentials, and the reconstruction of the underlying
integer invariants from small-parameter expansions."""

from ._backend import BackendError, get_backend, set_backend
from .bps import (
    GvTable,
    bps_kernel,
    connected_series,
    connected_to_disconnected,
    disconnected_to_connected,
    dt_rank_one,
    dt_torsion,
    pairs_table,
)
from .flatsec import (
    RayPoleError,
    WeightValue,
    h_double,
    h_double_plain,
    h_single,
    hhat_single,
    prefactor_scan,
    symmetrization_check,
    symmetrization_check_double,
    vanishing_experiment,
    weight_two_vertex,
)
from .genus0 import (
    genus0_potential_numeric,
    gv_genus0_series,
    potential_series,
    theorem1_check,
)
from .kernelquad import (
    FinitePartSpec,
    eps_grid,
    finite_part_integral,
    kernel,
    kernel_deriv,
    kernel_deriv_at_zero,
    pde_residual,
    richardson_limit,
)
from .lattice import (
    Geometry,
    LatticeClass,
    central_charge,
    curve_volume,
    rank_one_class,
    skew_pair,
    torsion_class,
    twisted_sign,
)
from .potentials import (
    ReconstructionError,
    apply_L,
    framed_potential,
    framed_potential_finiteG,
    genus0_regularized,
    genus1_extract,
    gv_derivatives,
    phi_inner,
    potential_grid,
    reconstruct_taylor,
    stable_pairs_weights,
    synthetic_asymptotic_samples,
    theorem2_check,
    unframed_potential,
)
from .quadrature import QuadratureError, QuadResult, integrate_halfline
from .series import QComplex, TwistedSeries, WindowError, taylor_sin_power
from .specialfn import bernoulli, polylog_eval, zeta_even

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "Geometry",
    "GvTable",
    "FinitePartSpec",
    "LatticeClass",
    "QComplex",
    "QuadResult",
    "QuadratureError",
    "RayPoleError",
    "ReconstructionError",
    "TwistedSeries",
    "WeightValue",
    "WindowError",
    "apply_L",
    "bernoulli",
    "bps_kernel",
    "central_charge",
    "connected_series",
    "connected_to_disconnected",
    "curve_volume",
    "disconnected_to_connected",
    "dt_rank_one",
    "dt_torsion",
    "eps_grid",
    "finite_part_integral",
    "framed_potential",
    "framed_potential_finiteG",
    "genus0_potential_numeric",
    "genus0_regularized",
    "genus1_extract",
    "get_backend",
    "gv_derivatives",
    "gv_genus0_series",
    "h_double",
    "h_double_plain",
    "h_single",
    "hhat_single",
    "integrate_halfline",
    "kernel",
    "kernel_deriv",
    "kernel_deriv_at_zero",
    "pairs_table",
    "pde_residual",
    "phi_inner",
    "polylog_eval",
    "potential_grid",
    "potential_series",
    "prefactor_scan",
    "rank_one_class",
    "reconstruct_taylor",
    "richardson_limit",
    "set_backend",
    "skew_pair",
    "stable_pairs_weights",
    "symmetrization_check",
    "symmetrization_check_double",
    "synthetic_asymptotic_samples",
    "taylor_sin_power",
    "theorem1_check",
    "theorem2_check",
    "torsion_class",
    "twisted_sign",
    "unframed_potential",
    "vanishing_experiment",
    "weight_two_vertex",
    "zeta_even",
]
