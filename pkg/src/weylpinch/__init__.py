"""Numerical curvature lab for oriented Riemannian 4-manifolds.

Metrics are given on coordinate charts (built-in models or metric spec
files); the pipeline runs metric jets -> curvature tensors -> Lambda^+/-
operator blocks -> Weyl spectra, and on top of that the Kaehler curvature
functionals, quadrature of the signature and Euler integrands, and algebraic
identities on eigenvalue triples.
"""

__version__ = "0.1.0"

from .curvature import CurvaturePoint, curvature_at
from .forms import OperatorBlocks, curvature_operator, orthonormal_frame
from .metrics import ChartMetric, builtin_model, load_metric_spec, metric_at, parse_metric_spec
from .spectral import LambdaTriple, WeylSpectrum, pinch_predicates, spectrum

__all__ = [
    "ChartMetric",
    "CurvaturePoint",
    "LambdaTriple",
    "OperatorBlocks",
    "WeylSpectrum",
    "builtin_model",
    "curvature_at",
    "curvature_operator",
    "load_metric_spec",
    "metric_at",
    "orthonormal_frame",
    "parse_metric_spec",
    "pinch_predicates",
    "spectrum",
    "__version__",
]
