"""Numerical verification toolkit for unit vector fields on round spheres,
realized as submanifolds of the unit tangent bundle.

The package builds the singular-value frames of the shape operator of a
field, assembles the second fundamental form of the field's image in the
unit tangent bundle by two independent routes, samples sectional curvatures
of that image, and certifies the sign of the second volume variation.
"""

from .manifold import (
    BasePointMismatchError,
    DegenerateInputError,
    DegeneratePlaneError,
    Frame,
    SpherePoint,
    SphereSpec,
    TangentVector,
    gram_schmidt_rows,
)
from .fields import (
    DecompositionFailure,
    PreconditionError,
    PredicateResult,
    SingularData,
    SingularLocusError,
    UnitVectorField,
    complex_structure,
    conjugate_shape_operator,
    covariant_normality_residual,
    half_curvature,
    hopf_field,
    is_geodesic,
    is_killing,
    is_normal,
    is_strongly_normal,
    jacobi_relation_residual,
    killing_canonical_frames,
    meridian_field,
    sasakian_identity_residual,
    shape_apply_array,
    shape_matrix,
    shape_operator,
    singular_decomposition,
)
from .sasaki import (
    BundleVector,
    SecondFormTensor,
    SubmanifoldFrames,
    bundle_covariant_derivative,
    bundle_sectional_curvature,
    geodesic_field_obstruction,
    horizontal_lift,
    normal_connection,
    sasaki_inner,
    second_form_direct,
    second_form_lemma,
    submanifold_frames,
    submanifold_plane_curvature,
    tangency_decomposition,
    tangential_lift,
    vertical_lift,
    xi_normal_lift,
    xi_tangential_lift,
)
from .variation import (
    FiberFrame,
    PropagationFailure,
    Quadrature,
    QuadratureFailure,
    VariationField,
    destabilizing_field,
    destabilizing_integrand,
    duschek_integrand_general,
    horizontal_extension_field,
    hopf_frame_s3,
    integrate_over_sphere,
    propagate_fiber_frame,
    random_hopf_combination,
    reduced_integrand,
    s3_stable_form,
    sphere_volume,
    stability_verdict,
)
from .report import VerificationReport, reports_from_json, reports_to_csv, reports_to_json

__version__ = "0.1.0"

__all__ = [
    "BasePointMismatchError",
    "BundleVector",
    "DecompositionFailure",
    "DegenerateInputError",
    "DegeneratePlaneError",
    "FiberFrame",
    "Frame",
    "PreconditionError",
    "PredicateResult",
    "PropagationFailure",
    "Quadrature",
    "QuadratureFailure",
    "SecondFormTensor",
    "SingularData",
    "SingularLocusError",
    "SpherePoint",
    "SphereSpec",
    "SubmanifoldFrames",
    "TangentVector",
    "UnitVectorField",
    "VariationField",
    "VerificationReport",
    "bundle_covariant_derivative",
    "bundle_sectional_curvature",
    "complex_structure",
    "conjugate_shape_operator",
    "covariant_normality_residual",
    "destabilizing_field",
    "destabilizing_integrand",
    "duschek_integrand_general",
    "geodesic_field_obstruction",
    "gram_schmidt_rows",
    "half_curvature",
    "hopf_field",
    "hopf_frame_s3",
    "horizontal_extension_field",
    "horizontal_lift",
    "integrate_over_sphere",
    "is_geodesic",
    "is_killing",
    "is_normal",
    "is_strongly_normal",
    "jacobi_relation_residual",
    "killing_canonical_frames",
    "meridian_field",
    "normal_connection",
    "propagate_fiber_frame",
    "random_hopf_combination",
    "reduced_integrand",
    "reports_from_json",
    "reports_to_csv",
    "reports_to_json",
    "s3_stable_form",
    "sasaki_inner",
    "sasakian_identity_residual",
    "second_form_direct",
    "second_form_lemma",
    "shape_apply_array",
    "shape_matrix",
    "shape_operator",
    "singular_decomposition",
    "sphere_volume",
    "stability_verdict",
    "submanifold_frames",
    "submanifold_plane_curvature",
    "tangency_decomposition",
    "tangential_lift",
    "vertical_lift",
    "xi_normal_lift",
    "xi_tangential_lift",
]
