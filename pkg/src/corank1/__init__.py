"""Second-order geometry of corank-1 3-manifolds in R^5."""
from .poly import Poly, parse_poly, parse_tuple
from .germcore import (
    ConstantTermError,
    GermArityError,
    GermParseError,
    GermSyntaxError,
    MapGerm,
    NotCorankOne,
    PreparedGerm,
    corank_at_origin,
    first_form_coefficients,
    germ,
    jet_of,
    parse_germ,
    prepare,
    second_form_matrix,
)
from .classify import (
    OrbitLabel,
    TopologicalType,
    NotSpecialClass,
    apply_witness,
    classify_orbit,
    is_non_degenerate,
    is_special_class,
    locus_type_exact,
    reduce_isometric_prenormal,
    reduce_to_orbit_normal_form,
)
from .locus import (
    GridSpec,
    RegularGerm,
    affine_hull_of_locus,
    blowup_residual,
    lift_to_regular,
    point_type,
    sample_regular_locus,
    sample_singular_locus,
)
from .nets import Net, discriminant_cubic, parse_net, table2_label, verify_example44
from .isometry import (
    UnsupportedOrbit,
    check_jet_isometry_equivalence,
    locus_isometries,
    sixteen_solutions,
)

__version__ = "0.1.0"
