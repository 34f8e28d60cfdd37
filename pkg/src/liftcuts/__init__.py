"""Lifted cutting planes for w <= f(a^T x) with concave f over integer boxes."""

from .concave_core import (
    TOL,
    ConcaveFn,
    ExpUtility,
    MinLinear,
    NegAbs,
    NegExp,
    NegQuadratic,
    PiecewiseLinear,
    check_regrouped_sum,
    check_slope,
    reflect,
    shift,
)
from .cutgen import (
    complement_transform,
    knapsack_pack_cover_cuts,
    mir_closed_form,
    single_phase_cut,
    submodular_cut_closed_forms,
    tworow_transform,
    two_phase_cut_I,
    two_phase_cut_II,
)
from .lifting import InstanceX, LiftContext, make_context
from .seed import Cut, Instance1D, hull_1d, seed_inequality

__version__ = "0.1.0"
