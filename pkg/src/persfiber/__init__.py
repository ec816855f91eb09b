"""Persistence diagrams of vectors on a path complex and their preimages.

The package computes zeroth sublevel persistence of points in R^N, describes
the preimage of a diagram under the persistence map (components labelled by
critical value sequences, cells indexed by a poset of strings over {0,1,X}),
machine-verifies that each component's order complex is contractible, and
monitors ODE trajectories observed only through their diagrams.
"""

from .bottleneck import bottleneck_distance
from .components import (ComponentEnumeration, NonconvexityWitness, containment_count,
                         enumerate_components, fiber_membership, nonconvexity_witness)
from .contraction import (ContractibilityReport, contractibility_report, homotopy_witness,
                          poset_dot, retraction_depth, retraction_step,
                          verify_downset_product)
from .diagrams import (INF, CriticalValueSequence, ExtremaPairingReport, InfiniteDeath,
                       PersistenceDiagram, PersistencePoint, collapsed_critical_values,
                       critical_value_sequence, extrema_pairing_check, is_typical,
                       negate_diagram, sublevel_diagram, superlevel_diagram)
from .dynamics import (DiagramNeighborhood, InvarianceRecord, InvarianceReport, OrderStudy,
                       SparsityMargin, TrajectoryObservation, fixed_point_search,
                       in_neighborhood, integrate, monitor_invariance, rk4_order_study,
                       sparsity_margin)
from .errors import (DivergenceError, DomainError, FiberError, InfeasibleError,
                     InvalidDiagramError, InvalidInputError, InvalidPairError,
                     StringValidationError, StructuralError, TieError)
from .fields import (LinearField, Periodic3Field, PolynomialField, VectorField,
                     field_from_config)
from .order_complex import BettiReport, SimplicialComplex, gf2_betti, gf2_rank, order_complex
from .polytopes import (BlockConstraint, cell_contains, cell_intersection_equals,
                        cell_polytope, cell_subset, cells_intersection_empty, default_cap,
                        generic_cell_point, locate_string, sample_component,
                        sup_distance_to_component)
from .strings import (CellularString, StringPoset, canonical_blocks, enumerate_strings,
                      greatest_lower_bound, string_leq, string_poset)

__version__ = "0.1.0"
