"""Divergence invariants of right-angled Coxeter groups at finite scale."""

__version__ = "0.1.0"

from .coxeter import (  # noqa: E402
    GraphFormatError,
    InvalidParameter,
    InvalidWord,
    PresentationGraph,
    build_family,
    coset_min_rep,
    dihedral_line,
    distance_to_coset,
    gamma,
    inverse,
    is_reduced,
    load_graph,
    multiply,
    normal_form,
    omega,
    subgroup_membership,
)
from .cayley import (  # noqa: E402
    Budget,
    BudgetExceeded,
    CayleyBall,
    GeodesicSpec,
    InvalidQuery,
    PathQueryResult,
    PathStatus,
    annulus_distance,
    avoidant_distance,
    build_ball,
    geodesic_point,
    geodesic_segment,
    shortest_path_avoiding,
)
from .divergence import (  # noqa: E402
    DivergenceSample,
    GrowthFit,
    fit_growth,
    fit_points,
    gersten_delta,
    ldiv,
    pair_divergence,
    rho,
)
from .relhyp import (  # noqa: E402
    ConedOffBall,
    PeripheralCoset,
    PeripheralStructure,
    build_coned_off,
    classify_transitions,
    coned_distance,
    enumerate_cosets,
    penetration_check,
)
from .experiments import (  # noqa: E402
    GapReport,
    SpectrumReport,
    morse_heuristic,
    run_gamma_spectrum,
    run_omega_gap,
    write_report,
)
