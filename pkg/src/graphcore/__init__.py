"""Exact analysis of graph-algebra cores and their canonical interaction pair.

Everything is computed in exact arithmetic: rationals, rational multiples
of square roots of squarefree integers, and arbitrary-precision integer
linear algebra.  Every decision procedure with any subtlety is backed by
at least one independent cross-checking oracle.
"""

from .errors import BoundExceededError, OracleMismatchError, ParseError
from .exact import (AbelianGroup, IntMatrix, RadicalScalar, SmithDecomposition,
                    cokernel_group, kernel_group, smith_normal_form)
from .graph import (Graph, adjacency_matrix, all_hereditary_saturated,
                    condition_K, condition_L, hereditary_saturated_closure,
                    interaction_powers, is_cstar_dynamical, is_minimal,
                    is_partially_stochastic, parse_graph, simple_loops,
                    transfer_is_multiplicative, transition_matrix, verdicts)
from .core_algebra import (BratteliDiagram, CoreElement, bratteli,
                           centrality_check, edge_shift_map, forward_map,
                           forward_unit, ideal_invariance_check,
                           interaction_axiom_report, matrix_unit, state_eval,
                           transfer_map, transfer_unit, transfer_unit_power,
                           unit, vertex_projection)
from .dynamics import (PathPoint, QuotientClass, class_of, eventually_equal,
                       in_basis_set, lasso, parse_point, periodic_orbits,
                       shift, shift_inverse_class, sink_path)
from .ktheory import (delta_matrix, hstar_action, k0_core_presentation,
                      k_groups, truncated_sequence_oracle)
from .rep import (TruncatedRep, build_rep, ck_window_check,
                  check_forward_transfer, positivity_spot_check,
                  power_partial_isometry_check)

__all__ = [name for name in dir() if not name.startswith("_")]
