"""Visual-angle integral identities for planar convex bodies.

Bodies are trigonometric polynomials in their support function. Each
identity is checked by computing its two sides independently: exterior
integrals of functions of the visual angle, and measures of line pairs
weighted by angular densities.
"""

__version__ = "0.1.0"

from .errors import (
    BadParam, DecayCheckFailed, DegenerateDirection, InvalidBody, NoConvergence, NotConvex,
    NotPositive, PointNotExterior, RootCountError, TruncationError, UnknownDensity,
    UnknownIdentity, UnknownPreset, VisangleError,
)
from .geometry import (
    PlanarPoint, SupportBody, area, make_body, make_const_width, make_disk, make_ellipse,
    perimeter, standard_suite, support_eval,
)
from .visual_angle import (
    VisualAngleData, direction_angle, exterior_margins, is_exterior, omega_split, probe, tangent_normals,
    visual_angle, visual_angles,
)
from .line_space import (
    AngularDensity, LineCoords, density_catalog, pair_measure_direct, pair_measure_fourier,
    parse_density, rigid_motion, invariance_check,
)
from .exterior import (
    ExteriorIntegrand, RadialProfile, exterior_integral, exterior_integral_split, radial_boundary,
    radial_profile,
)
from .identities import HFunction, IdentityReport, build_H, h_k, hurwitz_f, power_sine_A, verify

__all__ = [name for name in dir() if not name.startswith("_")]
