"""Boundary structure of bounded planar grid domains.

The package models a domain as open grid cells with blockable edges and
computes: prime ends and their impressions, accessibility of boundary
points, finite-connectedness verdicts, the inner-metric (Mazurkiewicz)
distance and boundary, discrete p-capacity of condensers with decay
tests, and John / uniform / almost-John classifications.
"""

__version__ = "0.1.0"

from .domain import (
    BoundaryPoint,
    GridDomain,
    GridSpec,
    MassExponents,
    WeightSpec,
    dyadic_ladder,
    estimate_mass_exponents,
)
from .ends import (
    DiscreteChain,
    PrimeEndRecord,
    component_tree,
    divides,
    end_in_neighborhood,
    end_sequence_converges,
    enumerate_prime_ends_at,
    equivalent,
    impression,
    is_singleton,
    point_sequence_converges,
    prime_end_at,
    separation_probe,
    validate_chain,
)
from .gallery import build_gallery, gallery_names
from .john import (
    BallChain,
    ContentEstimate,
    JohnAssessment,
    almost_john_assess,
    build_ball_chain,
    content_vs_modulus,
    hausdorff_content,
    john_assess,
    john_bounded_connectivity,
    modp_end_is_prime_check,
    uniform_assess,
    validate_ball_chain,
)
from .mazurkiewicz import (
    MazBoundaryAtlas,
    MazDistanceResult,
    maz_boundary,
    maz_distance,
    maz_sequential_criterion,
    phi_correspondence,
    psi_project,
)
from .modulus import (
    CapacityProblem,
    CapacityResult,
    ball_capacity_decay,
    capacity,
    compact_set_independence,
    impression_in_boundary,
    modp_chain_decay,
)
from .regions import (
    AccessibilityWitness,
    ComponentReport,
    Inaccessible,
    RegionSet,
    accessibility,
    ball,
    boundary_separation,
    component_report,
    components,
    finitely_connected_at,
    relative_boundary,
)

__all__ = [name for name in dir() if not name.startswith("_")]
