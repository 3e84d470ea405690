"""Labyrinths of flat tangent discs in convex domains, plus an escape auditor.

Construction: concentric shells of sublevel spheres inside the unit ball
(or an annulus), each carrying one class of a separated sphere family as
tangent discs; ellipsoids by exact linear normalisation; smooth strictly
convex planar domains by local osculating charts under a patch-cover
schedule.  Verification: structural audits plus a roadmap search for short
escape paths, reported as explicit upper bounds.
"""

from .config import TOL, Tolerances
from .geometry import (
    FlatBall,
    Hyperplane,
    Segment,
    flatball_extremal_points,
    flatball_pair_distance,
    point_flatball_distance,
    segment_flatball_intersect,
    separating_hyperplane,
)
from .nets import (
    SeparatedNet,
    build_separated_families,
    color_net,
    covering_radius,
    greedy_net,
)
from .shells import (
    ExhaustionPlan,
    Labyrinth,
    ShellSchedule,
    annulus_labyrinth,
    build_labyrinth,
    build_shell,
    compute_tangent_radius_constant,
    exhaustion_labyrinth,
    make_schedule,
    truncate,
)
from .verifier import (
    EffortBudget,
    EscapePath,
    Roadmap,
    audit_labyrinth,
    build_roadmap,
    min_escape_length,
    shortcut,
    shortest_escape,
)

__all__ = [
    "TOL",
    "Tolerances",
    "FlatBall",
    "Hyperplane",
    "Segment",
    "flatball_extremal_points",
    "flatball_pair_distance",
    "point_flatball_distance",
    "segment_flatball_intersect",
    "separating_hyperplane",
    "SeparatedNet",
    "build_separated_families",
    "color_net",
    "covering_radius",
    "greedy_net",
    "ExhaustionPlan",
    "Labyrinth",
    "ShellSchedule",
    "annulus_labyrinth",
    "build_labyrinth",
    "build_shell",
    "compute_tangent_radius_constant",
    "exhaustion_labyrinth",
    "make_schedule",
    "truncate",
    "EffortBudget",
    "EscapePath",
    "Roadmap",
    "audit_labyrinth",
    "build_roadmap",
    "min_escape_length",
    "shortcut",
    "shortest_escape",
]
