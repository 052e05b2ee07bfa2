"""Discrete 2-modulus of conjugate curve families on meshed metric surfaces.

The package builds polygonal metric surfaces, computes certified moduli of
the two conjugate families of a quadrilateral, derives the potential of the
extremal density and checks the inequalities that lead to the lower bound
``Mod(G1) * Mod(G2) >= 1 / kappa``.
"""
from .analysis import (KAPPAS, CoareaReport, NotLipschitz, ReciprocalityReport, coarea_check,
                       coarea_u_check, modulus_product, oscillation_check, reciprocality_report,
                       ring_modulus)
from .curves import CurvePath, NotConnected, double_traversal, extract_path
from .meshio import read_mesh, write_mesh
from .modulus import (INFINITE, FamilyEmpty, ModulusOptions, ModulusResult, certify, is_infinite,
                      shortest_violating_path, solve_modulus)
from .potential import (LevelCurve, PotentialField, build_potential, level_set, max_principle_check,
                        oscillation)
from .surface import (FamilySpec, MeshError, MetricMesh, NoSeparatingCut, QuadFrame, ball,
                      build_collapsed_disk, build_conformal, build_rectangle, separating_cut,
                      sub_rectangle)

__version__ = "0.1.0"

__all__ = [
    "ball",
    "build_collapsed_disk",
    "build_conformal",
    "build_potential",
    "build_rectangle",
    "certify",
    "coarea_check",
    "coarea_u_check",
    "CoareaReport",
    "CurvePath",
    "double_traversal",
    "extract_path",
    "FamilyEmpty",
    "FamilySpec",
    "INFINITE",
    "is_infinite",
    "KAPPAS",
    "level_set",
    "LevelCurve",
    "max_principle_check",
    "MeshError",
    "MetricMesh",
    "modulus_product",
    "ModulusOptions",
    "ModulusResult",
    "NoSeparatingCut",
    "NotConnected",
    "NotLipschitz",
    "oscillation",
    "oscillation_check",
    "PotentialField",
    "QuadFrame",
    "read_mesh",
    "reciprocality_report",
    "ReciprocalityReport",
    "ring_modulus",
    "separating_cut",
    "shortest_violating_path",
    "solve_modulus",
    "sub_rectangle",
    "write_mesh",
]
