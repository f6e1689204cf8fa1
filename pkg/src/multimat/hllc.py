"""Approximate Riemann solver: HLLC with elastic shear branches.

The fan approximates the full five-wave pattern with three waves: the
extreme speeds s_l, s_r (Davis estimates from the fastest characteristic of
each side) and the contact u1*, defining intermediate states Psi-, Psi+.
Writing Q = F(Psi) - s*Psi for each outer wave, the jump conditions give

    u1*       = (Ql2 - Qr2) / (Ql1 - Qr1)
    sigma11*  = (Ql2*Qr1 - Ql1*Qr2) / (Ql1 - Qr1)
    rho-+     = Ql1/(u1* - s_l),  Qr1/(u1* - s_r)

and so on for the transported grad(Y) column and the energy.  The shear
closure depends on the media:

* solid-solid (chi > 0 on both sides): tangential velocity and shear
  traction are continuous across the contact,
      u2* = (Ql3 - Qr3)/(Ql1 - Qr1),
      sigma21* = (Ql3*Qr1 - Ql1*Qr3)/(Ql1 - Qr1);
* fluid present (chi = 0 on either side): the tangential velocity slips,
      u2- = Ql3/Ql1,  u2+ = Qr3/Qr1,  sigma21* = 0.

Each side's own tangential velocity is used in its grad(Y) and energy
relations; in solid-solid mode both equal u2*, and in fluid mode this keeps
the energy flux consistent with a vanishing interface shear.

The transverse grad(Y) entries are parameters of the 1D flux, not unknowns:
at a single-material face they take the arithmetic average of the two cells;
at a multimaterial face they are one-sided (left value for the minus state,
right value for the plus state) so the discontinuity of Y never enters a
difference.  A multimaterial face hands F- to the left cell and F+ to the
right cell; the scheme is locally non-conservative there but consistent,
since both reduce to F(Psi) for identical states.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import HyperbolicityLoss, NonPhysicalState
from .materials import (csq_from_rho_eps_k, eps_vol_from_rho_p_k,
                        lam_fast_k, p_from_rho_eps_k, stress_k)
from .state import eps_vol_of_k

# Relative threshold on |Ql1 - Qr1| below which the fan is treated as
# degenerate and replaced by the central (equal-state limit) flux.
DEGENERATE_Q_TOL = 1e-12

STATUS_OK = 0
STATUS_NONPHYSICAL = 1
STATUS_HYPERBOLICITY = 2


class ShearMode(Enum):
    SolidSolid = "solid_solid"
    FluidPresent = "fluid_present"


class FaceMode(Enum):
    SingleMaterial = "single_material"
    Multimaterial = "multimaterial"


@dataclass
class RiemannFan:
    s_l: float
    s_r: float
    u1_star: float
    sigma11_star: float
    sigma21_star: float
    state_minus: np.ndarray
    state_plus: np.ndarray
    flux_minus: np.ndarray
    flux_plus: np.ndarray
    degenerate: bool = False


@dataclass
class FacePair:
    flux_left_cell: np.ndarray
    flux_right_cell: np.ndarray


@njit(cache=True)
def fan_k(row_l, ul, row_r, ur, solid_shear, one_sided, fluxes, states, misc):
    """Solve one face.  fluxes rows: F(ul), F-, F+, F(ur) (6 components in

    sweep order); states rows: full 8-component Psi-, Psi+; misc:
    (s_l, s_r, u1*, sigma11*, sigma21*, u2-, u2+, degenerate_flag).
    Returns a status code (0 ok, 1 non-physical state, 2 hyperbolicity loss).
    """
    rho_l = ul[0]
    rho_r = ur[0]
    ev_l = eps_vol_of_k(row_l, ul)
    ev_r = eps_vol_of_k(row_r, ur)
    if not (np.isfinite(ev_l) and np.isfinite(ev_r)):
        return STATUS_NONPHYSICAL
    p_l = p_from_rho_eps_k(row_l, rho_l, ev_l)
    p_r = p_from_rho_eps_k(row_r, rho_r, ev_r)
    if not (np.isfinite(p_l) and np.isfinite(p_r)):
        return STATUS_NONPHYSICAL
    csq_l = csq_from_rho_eps_k(row_l, rho_l, ev_l)
    csq_r = csq_from_rho_eps_k(row_r, rho_r, ev_r)
    if not (csq_l > 0.0 and csq_r > 0.0):
        return STATUS_HYPERBOLICITY

    u1_l = ul[1] / rho_l
    u2_l = ul[2] / rho_l
    u1_r = ur[1] / rho_r
    u2_r = ur[2] / rho_r

    lam_l = lam_fast_k(row_l, rho_l, csq_l, ul[3], ul[5], ul[4], ul[6])
    lam_r = lam_fast_k(row_r, rho_r, csq_r, ur[3], ur[5], ur[4], ur[6])
    s_l = min(u1_l - lam_l, u1_r - lam_r)
    s_r = max(u1_l + lam_l, u1_r + lam_r)

    s11_l, s21_l, _ = stress_k(row_l, rho_l, p_l, ul[3], ul[5], ul[4], ul[6])
    s11_r, s21_r, _ = stress_k(row_r, rho_r, p_r, ur[3], ur[5], ur[4], ur[6])

    # Outer physical fluxes.
    fluxes[0, 0] = ul[1]
    fluxes[0, 1] = ul[1] * u1_l - s11_l
    fluxes[0, 2] = ul[1] * u2_l - s21_l
    fluxes[0, 3] = u1_l * ul[3] + u2_l * ul[5]
    fluxes[0, 4] = u1_l * ul[4] + u2_l * ul[6]
    fluxes[0, 5] = u1_l * ul[7] - (s11_l * u1_l + s21_l * u2_l)
    fluxes[3, 0] = ur[1]
    fluxes[3, 1] = ur[1] * u1_r - s11_r
    fluxes[3, 2] = ur[1] * u2_r - s21_r
    fluxes[3, 3] = u1_r * ur[3] + u2_r * ur[5]
    fluxes[3, 4] = u1_r * ur[4] + u2_r * ur[6]
    fluxes[3, 5] = u1_r * ur[7] - (s11_r * u1_r + s21_r * u2_r)

    # Q = F(Psi) - s*Psi on the six transported components.
    ql0 = fluxes[0, 0] - s_l * rho_l
    ql1 = fluxes[0, 1] - s_l * ul[1]
    ql2 = fluxes[0, 2] - s_l * ul[2]
    ql3 = fluxes[0, 3] - s_l * ul[3]
    ql4 = fluxes[0, 4] - s_l * ul[4]
    ql5 = fluxes[0, 5] - s_l * ul[7]
    qr0 = fluxes[3, 0] - s_r * rho_r
    qr1 = fluxes[3, 1] - s_r * ur[1]
    qr2 = fluxes[3, 2] - s_r * ur[2]
    qr3 = fluxes[3, 3] - s_r * ur[3]
    qr4 = fluxes[3, 4] - s_r * ur[4]
    qr5 = fluxes[3, 5] - s_r * ur[7]

    # Transverse grad(Y) entries: averaged, or one-sided at a material face.
    if one_sided != 0:
        y12m = ul[5]
        y22m = ul[6]
        y12p = ur[5]
        y22p = ur[6]
    else:
        y12m = 0.5 * (ul[5] + ur[5])
        y22m = 0.5 * (ul[6] + ur[6])
        y12p = y12m
        y22p = y22m

    denom = ql0 - qr0
    scale = abs(ql0) + abs(qr0)
    misc[0] = s_l
    misc[1] = s_r
    misc[7] = 0.0
    degenerate = (scale == 0.0) or (abs(denom) <= DEGENERATE_Q_TOL * scale)

    if not degenerate:
        u1s = (ql1 - qr1) / denom
        if u1s < s_l:
            u1s = s_l  # roundoff-level wave-ordering violation
        elif u1s > s_r:
            u1s = s_r
        sig11 = (ql1 * qr0 - ql0 * qr1) / denom
        if solid_shear != 0:
            u2m = (ql2 - qr2) / denom
            u2p = u2m
            sig21 = (ql2 * qr0 - ql0 * qr2) / denom
        else:
            u2m = ql2 / ql0
            u2p = qr2 / qr0
            sig21 = 0.0
        dm = u1s - s_l
        dp = u1s - s_r
        if dm <= 0.0 or dp >= 0.0:
            degenerate = True

    if degenerate:
        # Equal-state limit: central average of states and fluxes.
        for c in range(6):
            fluxes[1, c] = 0.5 * (fluxes[0, c] + fluxes[3, c])
            fluxes[2, c] = fluxes[1, c]
        for c in range(8):
            states[0, c] = 0.5 * (ul[c] + ur[c])
            states[1, c] = states[0, c]
        misc[2] = 0.5 * (u1_l + u1_r)
        misc[3] = 0.5 * (s11_l + s11_r)
        misc[4] = 0.5 * (s21_l + s21_r)
        misc[5] = 0.5 * (u2_l + u2_r)
        misc[6] = misc[5]
        misc[7] = 1.0
        return STATUS_OK

    rho_m = ql0 / dm
    rho_p = qr0 / dp
    if not (rho_m > 0.0 and rho_p > 0.0):
        return STATUS_NONPHYSICAL
    y11m = (ql3 - u2m * y12m) / dm
    y21m = (ql4 - u2m * y22m) / dm
    y11p = (qr3 - u2p * y12p) / dp
    y21p = (qr4 - u2p * y22p) / dp
    psi_m = (ql5 + sig11 * u1s + sig21 * u2m) / dm
    psi_p = (qr5 + sig11 * u1s + sig21 * u2p) / dp

    states[0, 0] = rho_m
    states[0, 1] = rho_m * u1s
    states[0, 2] = rho_m * u2m
    states[0, 3] = y11m
    states[0, 4] = y21m
    states[0, 5] = y12m
    states[0, 6] = y22m
    states[0, 7] = psi_m
    states[1, 0] = rho_p
    states[1, 1] = rho_p * u1s
    states[1, 2] = rho_p * u2p
    states[1, 3] = y11p
    states[1, 4] = y21p
    states[1, 5] = y12p
    states[1, 6] = y22p
    states[1, 7] = psi_p

    fluxes[1, 0] = rho_m * u1s
    fluxes[1, 1] = rho_m * u1s * u1s - sig11
    fluxes[1, 2] = rho_m * u1s * u2m - sig21
    fluxes[1, 3] = u1s * y11m + u2m * y12m
    fluxes[1, 4] = u1s * y21m + u2m * y22m
    fluxes[1, 5] = u1s * psi_m - (sig11 * u1s + sig21 * u2m)
    fluxes[2, 0] = rho_p * u1s
    fluxes[2, 1] = rho_p * u1s * u1s - sig11
    fluxes[2, 2] = rho_p * u1s * u2p - sig21
    fluxes[2, 3] = u1s * y11p + u2p * y12p
    fluxes[2, 4] = u1s * y21p + u2p * y22p
    fluxes[2, 5] = u1s * psi_p - (sig11 * u1s + sig21 * u2p)

    misc[2] = u1s
    misc[3] = sig11
    misc[4] = sig21
    misc[5] = u2m
    misc[6] = u2p
    return STATUS_OK


@njit(cache=True)
def select_flux_k(fluxes, s_l, u1s, s_r, out):
    """Single-material upwind selection among F(ul), F-, F+, F(ur)."""
    if s_l >= 0.0:
        k = 0
    elif u1s >= 0.0:
        k = 1
    elif s_r >= 0.0:
        k = 2
    else:
        k = 3
    for c in range(6):
        out[c] = fluxes[k, c]


def _raise_status(status, ul, ur):
    if status == STATUS_NONPHYSICAL:
        raise NonPhysicalState(f"face states not admissible: {ul!r} | {ur!r}")
    if status == STATUS_HYPERBOLICITY:
        raise HyperbolicityLoss(f"face states not hyperbolic: {ul!r} | {ur!r}")


def _solve(mat_l, ul, mat_r, ur, solid_shear, one_sided):
    ul = np.asarray(ul, dtype=np.float64)
    ur = np.asarray(ur, dtype=np.float64)
    fluxes = np.empty((4, 6))
    states = np.empty((2, 8))
    misc = np.empty(8)
    status = fan_k(mat_l.row, ul, mat_r.row, ur,
                   1 if solid_shear else 0, 1 if one_sided else 0,
                   fluxes, states, misc)
    _raise_status(status, ul, ur)
    return fluxes, states, misc


def davis_speeds(mat_l, w_l, mat_r, w_r):
    """Outer wave-speed bounds from the fastest characteristic of each side."""
    speeds = []
    for mat, w in ((mat_l, w_l), (mat_r, w_r)):
        row = mat.row
        ev = eps_vol_from_rho_p_k(row, w.rho, w.p)
        if not np.isfinite(ev):
            raise NonPhysicalState(f"state {w!r} not admissible")
        csq = csq_from_rho_eps_k(row, w.rho, ev)
        if not csq > 0.0:
            raise HyperbolicityLoss(f"c^2 = {csq!r} <= 0 for {w!r}")
        lam = lam_fast_k(row, w.rho, csq, w.g.y11, w.g.y12, w.g.y21, w.g.y22)
        speeds.append((w.u1 - lam, w.u1 + lam))
    s_l = min(speeds[0][0], speeds[1][0])
    s_r = max(speeds[0][1], speeds[1][1])
    return s_l, s_r


def solve_fan(mat_l, ul, mat_r, ur, shear_mode=None, face_mode=FaceMode.SingleMaterial):
    """Full fan for one face; shear_mode defaults to the chi-based rule."""
    if shear_mode is None:
        shear_mode = (ShearMode.SolidSolid if mat_l.is_solid and mat_r.is_solid
                      else ShearMode.FluidPresent)
    solid = shear_mode == ShearMode.SolidSolid
    one_sided = face_mode == FaceMode.Multimaterial
    fluxes, states, misc = _solve(mat_l, ul, mat_r, ur, solid, one_sided)
    return RiemannFan(s_l=misc[0], s_r=misc[1], u1_star=misc[2],
                      sigma11_star=misc[3], sigma21_star=misc[4],
                      state_minus=states[0], state_plus=states[1],
                      flux_minus=fluxes[1], flux_plus=fluxes[2],
                      degenerate=misc[7] != 0.0)


def single_material_flux(mat, ul, ur):
    """Upwind HLLC flux for a face whose two cells share a material."""
    solid = mat.is_solid
    fluxes, _, misc = _solve(mat, ul, mat, ur, solid, one_sided=False)
    out = np.empty(6)
    select_flux_k(fluxes, misc[0], misc[2], misc[1], out)
    return out


def multimaterial_flux_pair(mat_l, ul, mat_r, ur):
    """Two-sided flux at a material face: F- for the left cell, F+ for the

    right cell.  Locally non-conservative but consistent."""
    solid = mat_l.is_solid and mat_r.is_solid
    fluxes, _, _ = _solve(mat_l, ul, mat_r, ur, solid, one_sided=True)
    return FacePair(flux_left_cell=fluxes[1].copy(),
                    flux_right_cell=fluxes[2].copy())
