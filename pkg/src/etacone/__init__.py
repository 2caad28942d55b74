"""Eta-cone metric spaces: axiom checks, topology probes and fixed-point solvers."""
from .cone import ConeSpace, cone_contains, leq, normal_constant_estimate, strictly_interior
from .errors import (ContractViolation, DataError, DomainError, EstimationError, EtaConeError,
                     InconsistentDataError, InfeasibleError, PreconditionError, TableFormatError)
from .fixed_point import (CheckResult, OrbitTrace, SelfMap, SolveReport, cauchy_rate_check,
                          estimate_contraction, orbit_distance_bound, orbit_eta_condition,
                          partial_sum_bound, partial_sums, picard_orbit, solve_banach,
                          solve_banach_iterate_power, solve_hardy_rogers, solve_strict_compact)
from .fixtures import FIXTURE_NAMES, FixtureEntry, fixture
from .space import (AxiomReport, Classification, DerivedEtaMetric, EtaConeSpace, PointSet,
                    SamplingPlan, chain_triangle_bound, check_axioms, check_axioms_sin_variant,
                    classify, derive_eta_metric, minimal_eta)
from .tableio import format_table, load_table, parse_table
from .topology import (SequencePrefix, ball_contains, closure_contains, detect_metric_discontinuity,
                       is_cauchy_prefix, is_convergent, local_base)

__version__ = "0.1.0"
