"""Choreographies of the n-body problem on the unit sphere with the cotangent force function."""

from .action import (ActionBreakdown, action, action_gradient, collision_bound, loop_velocities,
                     path_action, velocity_identity_residual)
from .choreography import (BodySystem, DiscreteLoop, apply_E2, apply_E3, build_choreography,
                           min_pair_separation, symmetrize, symmetry_residuals, test_loop)
from .geometry import (EPS_COLL, AntipodalError, CollisionError, cot_bounds, cot_pair,
                       geodesic_distance, potential, potential_gradient)
from .integrator import (PhaseState, Trajectory, accelerations, closure_error, el_residual,
                         initial_state, integrate, step_rk4)
from .minimizer import MinimizeOptions, MinimizeReport, descent_step, minimize

__version__ = "0.1.0"
