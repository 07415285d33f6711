"""Exact counting of caps and planar-space realizations in PG(3, q)."""

__version__ = "0.1.0"

from .field import Field, field_arith, make_field
from .formulas import a_indicator, formula_eval, identity_check, pgl_order, quasipoly_consistency
from .geometry import Geometry, build_geometry
from .planar_space import (
    IsoClass,
    PlanarSpace,
    are_isomorphic,
    canonical_form,
    catalog,
    enumerate_planar_spaces,
    induced_planar_space,
    is_hyperfiguration,
    point_index,
    validate,
)
from .search import (
    CapCount,
    ClassTable,
    classify_caps,
    count_caps,
    count_strong_realizations,
    max_cap_size,
    verify_decomposition,
)
