"""Pseudorandom fit graphs, cycle-avoiding colourings and arrowing search."""

from __future__ import annotations

__version__ = "0.1.0"

from .arrows import ArrowVerdict, arrows, export_cnf, ramsey_cycle_number, rstar_formula
from .coloring import (
    ALL_ODD,
    AvoidanceSpec,
    AvoidanceVerdict,
    Color,
    EdgeColoring,
    color_bipartite_blocking,
    color_extremal_lower_bound,
    monochromatic_cycle,
    verify_avoidance,
)
from .cycles import UNKNOWN, SearchBudget, components_bipartiteness, cycle_spectrum, find_cycle_of_length
from .errors import *  # noqa: F401,F403
from .fit import FitCertificate, ToleranceProfile, build_fit_graph, certify_fit
from .graph import CycleWitness, Graph, codegree, edge_count_between, verify_cycle
from .regularity import Partition, check_regular_pair, pair_density, property_Mt, reduced_graph
from .spectral import spectral_discrepancy_bound
from .witness import (
    SideThresholds,
    bipartite_path_builder,
    build_blue_spectrum,
    build_red_pancyclic,
    classify_vertices,
    rotation_extend,
)
