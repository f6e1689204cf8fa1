"""Sharp-interface Eulerian solver for compressible multimaterial flows."""

from .errors import (DegenerateDeformation, DegenerateFan, HyperbolicityLoss,
                     NoConvergence, NonPhysicalState, OrphanFlip, ParseError,
                     SolverError, VacuumFormation)
from .materials import (DefGrad, MaterialKind, MaterialParams, Stress,
                        cauchy_stress, elastic_energy, eps_from_rho_p,
                        pressure_from_rho_eps, sound_speed_sq, wave_speeds)
from .state import (ConsState, PrimState, cons_to_prim, physical_flux,
                    prim_to_cons, swap_direction)
from .hllc import (FaceMode, FacePair, RiemannFan, ShearMode, davis_speeds,
                   multimaterial_flux_pair, single_material_flux, solve_fan)

__version__ = "0.1.0"
