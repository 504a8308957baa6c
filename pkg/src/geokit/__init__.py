"""Numerical toolkit for the Heisenberg group and related sub-Riemannian models."""
from geokit.ccmetric import (
    CCSolverConfig,
    GeodesicArc,
    NearCenterError,
    UnconvergedError,
    cc_dist,
    cc_geodesic,
    cc_oracle,
    comparability_scan,
    eikonal_check,
    geodesic_point,
)
from geokit.curves import (
    HorizontalityError,
    SampledCurve,
    contact_defect,
    horizontal_length,
    horizontal_lift,
    left_translate,
    polygon_area,
)
from geokit.embeddings import (
    bilip_estimate,
    cayley_phi,
    cayley_sphere,
    legendrian_F,
    pullback_defect,
)
from geokit.gridmap import GridMap, annular_energies, compose_on_grid, horizontal_energy
from geokit.grushin import GrushinGeodesic, grushin_curvature, grushin_dist, grushin_length
from geokit.heisenberg import (
    HeisPoint,
    HorizontalVec,
    dilate,
    group_mul,
    inverse,
    koranyi_dist,
    koranyi_norm,
)
from geokit.lab import OneForm, rank_check, stokes_check, winding_number

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
