"""Finite-difference conformal geometry on gridded manifolds with boundary.

Charts and fields, curvature operators, explicit collar constructions
(cutoffs, boundary flattening, gluing, doubling), and class-constant
estimates with inequality verdicts.
"""

from .grid import (
    Axis,
    BoundaryField,
    ChartKind,
    Face,
    GridChart,
    MetricField,
    PositivityError,
    ScalarField,
    SymTensorField,
    build_chart,
    gradient,
    integrate,
    quadrature_weights,
)
from .geometry import (
    BoundaryGeometry,
    CurvatureBundle,
    EscobarReport,
    VariationReport,
    boundary_geometry,
    conformal_metric,
    conformal_scalar_curvature,
    curvature,
    escobar_conditions,
    laplace_beltrami,
    linearized_scalar_curvature,
    smoothed_scalar,
    variational_identity_check,
)
from .constructions import (
    CollarAssembly,
    CutoffFunction,
    GluedManifold,
    PscPathReport,
    approximation_family,
    blend_metrics,
    collar_metric,
    double_manifold,
    glue_metrics,
    kobayashi_cutoff,
    phi_field,
    psc_linear_path,
    region_chart_metric,
)
from .yamabe import (
    ConformalFactor,
    DiscreteOperator,
    EigenConvergenceError,
    Verdict,
    YamabeReport,
    assemble_operator,
    doubling_inequality_check,
    einstein_hilbert,
    gluing_eigenvalue_bound,
    neumann_first_eigenvalue,
    relative_yamabe_constant,
    yamabe_quotient,
    yamabe_sandwich,
)

__version__ = "0.1.0"
