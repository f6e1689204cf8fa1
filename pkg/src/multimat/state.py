"""Conservative/primitive state algebra and the 1D physical flux.

The conservative cell vector carries eight components, ordered

    0: rho          density
    1: phi1 = rho*u1
    2: phi2 = rho*u2
    3: y11  = dY1/dx1
    4: y21  = dY2/dx1
    5: y12  = dY1/dx2
    6: y22  = dY2/dx2
    7: psi  = rho*e  (total energy per unit volume)

i.e. the two columns of grad(Y) stored column-major.  A 1D sweep along x1
transports only six of them (the x2 column has zero flux in that direction);
the transverse entries y12, y22 still enter the stress and the flux of the
x1 column, so all eight are kept in every cell.  Sweeps along x2 reuse the
same flux function after axis relabelling (swap_direction).
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NonPhysicalState
from .materials import (DefGrad, eps_iso_k, eps_vol_from_rho_p_k,
                        p_from_rho_eps_k, stress_k)

N_COMP = 8
I_RHO, I_PHI1, I_PHI2, I_Y11, I_Y21, I_Y12, I_Y22, I_PSI = range(N_COMP)

# Axis relabelling x1 <-> x2: exchange momenta and both the rows and the
# columns of grad(Y), so the constitutive law evaluates identically in the
# swapped frame.  The permutation is its own inverse.
SWAP_PERM = np.array([I_RHO, I_PHI2, I_PHI1, I_Y22, I_Y12, I_Y21, I_Y11,
                      I_PSI], dtype=np.int64)

# Components transported by a single 1D sweep, in flux order.
SWEEP_COMP = np.array([I_RHO, I_PHI1, I_PHI2, I_Y11, I_Y21, I_PSI],
                      dtype=np.int64)


@dataclass(frozen=True)
class ConsState:
    rho: float
    phi1: float
    phi2: float
    g: DefGrad
    psi: float

    def as_array(self):
        return np.array([self.rho, self.phi1, self.phi2, self.g.y11,
                         self.g.y21, self.g.y12, self.g.y22, self.psi])

    @staticmethod
    def from_array(u):
        return ConsState(rho=u[I_RHO], phi1=u[I_PHI1], phi2=u[I_PHI2],
                         g=DefGrad(u[I_Y11], u[I_Y12], u[I_Y21], u[I_Y22]),
                         psi=u[I_PSI])


@dataclass(frozen=True)
class PrimState:
    rho: float
    u1: float
    u2: float
    p: float
    g: DefGrad


@njit(cache=True)
def eps_vol_of_k(row, u):
    """Volumetric specific energy eps - |u|^2/2 - eps_iso from a cell vector."""
    rho = u[0]
    if rho <= 0.0:
        return np.nan
    u1 = u[1] / rho
    u2 = u[2] / rho
    e_iso = eps_iso_k(row, u[3], u[5], u[4], u[6])
    return u[7] / rho - 0.5 * (u1 * u1 + u2 * u2) - e_iso


@njit(cache=True)
def pressure_of_k(row, u):
    ev = eps_vol_of_k(row, u)
    if not np.isfinite(ev):
        return np.nan
    return p_from_rho_eps_k(row, u[0], ev)


@njit(cache=True)
def flux_x1_k(row, u, out):
    """Physical flux along x1 into out[0:6]; returns the pressure (NaN on

    an inadmissible state).  Component order matches SWEEP_COMP:
    (mass, x-momentum, y-momentum, y11 transport, y21 transport, energy).
    """
    rho = u[0]
    p = pressure_of_k(row, u)
    if not np.isfinite(p):
        return np.nan
    u1 = u[1] / rho
    u2 = u[2] / rho
    s11, s21, _ = stress_k(row, rho, p, u[3], u[5], u[4], u[6])
    out[0] = u[1]
    out[1] = u[1] * u1 - s11
    out[2] = u[1] * u2 - s21
    out[3] = u1 * u[3] + u2 * u[5]
    out[4] = u1 * u[4] + u2 * u[6]
    out[5] = u1 * u[7] - (s11 * u1 + s21 * u2)
    return p


@njit(cache=True)
def swap_k(u, out):
    for c in range(N_COMP):
        out[c] = u[SWAP_PERM[c]]


def swap_direction(u):
    """Relabel axes 1 <-> 2 of a conservative vector (an involution)."""
    u = np.asarray(u, dtype=np.float64)
    return u[SWAP_PERM]


def cons_to_prim(mat, u):
    u = np.asarray(u, dtype=np.float64)
    row = mat.row
    ev = eps_vol_of_k(row, u)
    p = p_from_rho_eps_k(row, u[I_RHO], ev) if np.isfinite(ev) else np.nan
    if not np.isfinite(p):
        raise NonPhysicalState(f"state {u!r} not admissible for {mat.name or mat.kind.name}")
    rho = u[I_RHO]
    return PrimState(rho=rho, u1=u[I_PHI1] / rho, u2=u[I_PHI2] / rho, p=p,
                     g=DefGrad(u[I_Y11], u[I_Y12], u[I_Y21], u[I_Y22]))


def prim_to_cons(mat, w):
    row = mat.row
    ev = eps_vol_from_rho_p_k(row, w.rho, w.p)
    e_iso = eps_iso_k(row, w.g.y11, w.g.y12, w.g.y21, w.g.y22)
    if not (np.isfinite(ev) and np.isfinite(e_iso)):
        raise NonPhysicalState(f"primitive state {w!r} not admissible")
    e = ev + e_iso + 0.5 * (w.u1 * w.u1 + w.u2 * w.u2)
    return np.array([w.rho, w.rho * w.u1, w.rho * w.u2, w.g.y11, w.g.y21,
                     w.g.y12, w.g.y22, w.rho * e])


def physical_flux(mat, u):
    """The six-component x1 flux of a conservative state."""
    u = np.asarray(u, dtype=np.float64)
    out = np.empty(6)
    p = flux_x1_k(mat.row, u, out)
    if not np.isfinite(p):
        raise NonPhysicalState(f"state {u!r} not admissible for {mat.name or mat.kind.name}")
    return out


def flux_x2(mat, u):
    """The eight-component x2 flux, evaluated through swap_direction."""
    u = np.asarray(u, dtype=np.float64)
    f6 = physical_flux(mat, swap_direction(u))
    f8 = np.zeros(N_COMP)
    f8[SWEEP_COMP] = f6
    return f8[SWAP_PERM]


def embed_flux(f6):
    """Lift a 6-component sweep flux to the 8-component layout (zeros for

    the transverse grad(Y) column)."""
    f8 = np.zeros(N_COMP)
    f8[SWEEP_COMP] = np.asarray(f6)
    return f8
