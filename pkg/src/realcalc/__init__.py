"""Computations with real calculi over the matrix algebra Mat(N)."""
from .calculus import (CalculusInstance, FreeCalculusInstance, canonical_diag_1d,
                       module_action, validate_calculus, validate_free_calculus)
from .classify1d import (QuasiEquivalence1D, ZeroPattern, anti_selfsimilar, count_classes,
                         enumerate_classes, is_isomorphic_1d, quasi_equivalent_1d,
                         witness_1d, zero_pattern)
from .errors import *  # noqa: F401,F403
from .iso_nd import (IsoWitness, apply_witness, check_compatible_pair,
                     check_free_isomorphism, check_isomorphism_witness, search_witness)
from .lie_rep import LieAlgebraSpec, MatrixRep, ValidationReport, rep_1d, remove_trace, validate_rep
from .matrix_core import Tolerance, commutator, dagger, direct_sum, eig_antihermitian_sorted, kron
from .metric_conn import (AlignedMetric, ConnectionSpec, FreeMetric, ScalarMetric,
                          abelian_closed_form, christoffel_free, connection_on_CN,
                          eval_scalar_metric, is_real_metric_calculus, koszul_rhs, lc_abelian,
                          lc_connection_1d, lc_exists_1d, validate_metric, validate_metric_on_CN,
                          verify_pseudo_riemannian)
from .projection import (ProjectedGeometry, ProjectionSpec, SplitRealization,
                         build_split_realization, is_orthogonal_projection,
                         metric_symmetry_condition, project_connection, projection_from_anchor,
                         restrict_metric)

__version__ = "0.1.0"
