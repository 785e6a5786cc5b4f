"""Fixed-point schemes for order-preserving nonexpansive semigroups on CAT(kappa) model spaces."""
from .errors import ConfigError, DomainError, NonUniqueGeodesicError, OrderContractError, ScheduleError
from .geometry import (ComparisonTriangle, GeodesicSegment, Point, Space, angle_from_sides,
                       build_comparison_triangle, cat_inequality_slack, comparison_point,
                       convexity_modulus, dist, geodesic_point, model_diameter, side_from_angle)
from .orders import (ArcOrder, ConeOrder, EqualityOrder, OrderInterval, check_interp_monotone,
                     comparable, interval_contains, leq, validate_A1, validate_A2)
from .reports import ValidationReport
from .semigroups import (ArcDrift, Box, DiagonalFlow, ExpansiveFlow, IndexSet, Semigroup,
                         Translation, apply, residual, seed_admissible, validate_semigroup)
from .schemes import (ArithmeticSchedule, BrowderConfig, IterationTrace, KMConfig, ar_fix_check,
                      browder_run, km_run, km_schedule_witness, picard_fixed_point, uar_estimate)
from .analysis import (WindowedSequence, asymptotic_center, fix_segment_check,
                       project_to_segment, projection_angle_check)

__version__ = "0.1.0"
