"""Exact arithmetic for smooth moment polytopes.

Half-space polytope model, exact volume and moment polynomials in the
support numbers, mass-linearity testing for linear functionals, facet
equivalence and inessential decompositions, bundle / expansion / blowup
constructions, and the classification pipeline for four-dimensional
mass linear pairs.
"""

from .constructions import (
    Bundle121Spec,
    BlowdownReport,
    D2PolygonBundleSpec,
    FunctionalSpace,
    YkBundleSpec,
    blowdown,
    blowup,
    bundle_121,
    bundle_D2_polygon,
    bundle_Yk,
    double_expansion,
    expansion,
    minimal_family_a3,
    minimal_family_b,
    ml_space_121,
    ml_space_D2_polygon,
    ml_space_Yk,
    product,
    simplex,
    trapezoid,
)
from .errors import PolytopeError, StructuralInconsistency
from .masslinear import (
    EquivalenceClasses,
    FullMassLinearReport,
    InessentialWitness,
    MassLinearReport,
    equivalence_classes,
    fully_mass_linear_test,
    generating_vector,
    inessential_space,
    is_inessential,
    mass_linear_test,
    ml_space,
    restrict_to_face,
)
from .measure import (
    center_of_mass,
    integrate_monomial,
    skeleton_barycenter,
    volume,
    volume_poly,
)
from .polytope import HPolytope
from .recognize import (
    BlowupPlan,
    ClassificationResult,
    RecognitionCertificate,
    TypeRecognition,
    certificate_holds,
    classify4d,
    essential_blowup_planner,
    recognize_bundle_over_segment,
    recognize_double_expansion,
    recognize_expansion,
    recognize_type,
    reconstruct,
    replay_trace,
)

__version__ = "0.1.0"

__all__ = [
    "Bundle121Spec",
    "BlowdownReport",
    "BlowupPlan",
    "ClassificationResult",
    "D2PolygonBundleSpec",
    "EquivalenceClasses",
    "FullMassLinearReport",
    "FunctionalSpace",
    "HPolytope",
    "InessentialWitness",
    "MassLinearReport",
    "PolytopeError",
    "RecognitionCertificate",
    "StructuralInconsistency",
    "TypeRecognition",
    "YkBundleSpec",
    "blowdown",
    "blowup",
    "bundle_121",
    "bundle_D2_polygon",
    "bundle_Yk",
    "center_of_mass",
    "certificate_holds",
    "classify4d",
    "double_expansion",
    "equivalence_classes",
    "essential_blowup_planner",
    "expansion",
    "fully_mass_linear_test",
    "generating_vector",
    "inessential_space",
    "integrate_monomial",
    "is_inessential",
    "mass_linear_test",
    "minimal_family_a3",
    "minimal_family_b",
    "ml_space",
    "ml_space_121",
    "ml_space_D2_polygon",
    "ml_space_Yk",
    "product",
    "recognize_bundle_over_segment",
    "recognize_double_expansion",
    "recognize_expansion",
    "recognize_type",
    "reconstruct",
    "replay_trace",
    "restrict_to_face",
    "simplex",
    "skeleton_barycenter",
    "trapezoid",
    "volume",
    "volume_poly",
]
