"""Numerical verification of the acoustic wave-transport structure of the
compressible Euler equations with dynamic entropy."""

from .eos import EosModel, EosPoint, chaplygin, custom, evaluate, polytropic
from .evolve import (InitialDataSet, SliceStack, build_slice_stack,
                     complete_initial_data, euler_rhs, make_fixture,
                     material_derivative, rk4_step)
from .grid import Grid
from .metric import MetricPoint, box_g, metric_at
from .nullframes import (NullFrame, build_null_frame, decompose_inverse_metric,
                         frame_coefficients, null_form_qab, null_form_qg,
                         strong_null_check)
from .sources import (all_residuals, divcurl_residuals,
                      frequency_scaling_probe, source_terms, term_catalog,
                      transport_residuals, wave_residuals)
from .state import DerivedState, FluidState, compute_derived
from .shock1d import (CharacteristicFan, RiemannMap, blowup_time, build_fan,
                      build_riemann_map, eikonal_mu, embed_plane_wave_3d,
                      mu_star, riemann_invariants, simple_wave_solution)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
