"""hypsgn: hyperbolic Serre-Green-Naghdi dispersive shallow-water solver.

High-order ADER discontinuous-Galerkin schemes for the first-order
hyperbolic reformulation of the SGN equations over general (non-mild)
bottom topographies, with the mild-bottom variant for comparison.
"""

from .ader import (AderSolver, DepthFloorError, PredictorError, SchemeConfig,
                   SpaceTimeBasis, compute_time_step, corrector_update,
                   local_predictor, path_jump, rusanov_flux)
from .bathymetry import (BathymetryField, Flat, GaussianBump, SmoothedStep,
                         Tabulated, TrapezoidalBar, eval_zb, project_to_field)
from .boundary import (BoundaryKind, RelaxationZone, TargetSeries,
                       absorbing_target, blend_state, ghost_state,
                       relaxation_weight, wavemaker_target)
from .dg import (ElementSolution, Mesh, NodalBasis, build_basis,
                 convergence_order, l2_error, l2_project, sample_equispaced)
from .model import (HyperbolicSGN, MildBottomSGN, ModelError, PhysParams,
                    StateGradient, make_model)
from .scenarios import (ConvergenceTable, GaugeSeries, RunOptions, RunReport,
                        Scenario, builtin_scenario, compare_models,
                        convergence_study, energy_monitor, list_scenarios,
                        record_gauges, run)
from .soliton import (SolitonParams, SolitonProfile, integrate_profile,
                      ode_rhs, sample_initial_condition)

__version__ = "0.1.0"
