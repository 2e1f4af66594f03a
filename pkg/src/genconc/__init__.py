"""Generalized concurrence for distinguishable particles, bosons and fermions."""
from .concurrence import (ConcurrenceResult, CoherenceVerdict, bipartition_value,
                          bipartition_values, concurrence_pure, invariant_variance,
                          is_coherent)
from .errors import (CapError, GenconcError, IntegrityError, KindError, ParameterError,
                     ShapeError, ValidationError)
from .mixed import (BoundReport, Decomposition, RoofEstimate, convex_roof_upper,
                    fermionic_detection, fermionic_lower_from_distinguishable, mb_bound,
                    mb_bound_bosonic, wootters_oracle)
from .projectors import (HealthReport, ProjectorSpec, Tag, apply_projector, expect_pb,
                         expect_pd, expect_pf, expect_pminus, healthcheck_grid,
                         materialize_dense, projector_healthcheck, two_copy_expectation)
from .states import (MixedState, PureState, bell_state, bosonic_state, condensate,
                     ghz_state, maximally_mixed, product_state, random_coherent,
                     random_mixed, random_pure, schmidt_coefficients, slater_from_orbitals,
                     slater_state, symmetry_kind_check, w_state, werner_state)
from .tensor_core import Kind, SystemShape, alpha_factor, partial_trace, reduced_density

__version__ = "0.1.0"
