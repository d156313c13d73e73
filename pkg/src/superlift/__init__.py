"""Grassmann-algebra arithmetic and N=1 / N=2 superconformal calculus."""

from .errors import *  # noqa: F401,F403
from .grassmann import (GrassmannNumber, MultiIndex, gr_exp, gr_int_pow, gr_invert, gr_log,
                        gr_mul, gr_sqrt, odd_mult_matrix)
from .analytic import ComponentFunction, EvenFunction, OddFunction, eval_at, winding_degree
from .supermap import (N1Map, N2Map, SuperPoint, build_n1_superconformal, check_n1_superconformal,
                       check_n2_superconformal, compose, f1_functor, f2_functor, invert,
                       to_homogeneous, to_nonhomogeneous)
from .cech import Atlas, CoboundaryProblem, Obstruction, Splitting, check_atlas_cocycle, solve_coboundary
from .sphere import (SphereStructure, make_supersphere, mobius_action, sphere_degree,
                     spheres_equivalent, uniformize_sphere)
from .torus import (ThetaType, TorusStructure, is_trivial_type, make_supertorus,
                    spin_structure_torus_n1, supertori_equivalent, types_equivalent,
                    validate_theta_type)
from .nsalg import SuperDerivation, loop_exponential, make_generator, super_bracket, verify_ns_relations

__version__ = "0.1.0"
