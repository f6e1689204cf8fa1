"""Constitutive laws: internal energy, pressure, Cauchy stress and wave speeds.

Two families of materials are supported through a single parameter record:

* a general gas / neohookean solid, whose specific internal energy is

      eps = kappa(s)/(gamma-1) * (1/rho - b)^(1-gamma) - a*rho + p_inf/rho
            + chi/rho0 * (Tr(Bbar) - 2)

  covering perfect gases (a = b = p_inf = chi = 0), Van der Waals gases,
  stiffened gases (liquids) and neohookean elastic solids (chi > 0);

* a Mie-Gruneisen fluid whose volumetric energy is

      eps_vol = kappa(s)*rho^(gamma-1)/(gamma-1)
                + A1/(rho_ref*(E1-1)) * (rho/rho_ref)^(E1-1)
                - A2/(rho_ref*(E2-1)) * (rho/rho_ref)^(E2-1)

Entropy is never carried at runtime: every query is posed in terms of
(rho, eps_vol) by algebraic elimination of kappa(s).  The kappa-explicit
forward forms are kept alongside because the exact Riemann solver integrates
rarefactions at frozen entropy and the tests sample admissible states by
drawing (rho, kappa) directly.

Bbar is the rescaled left Cauchy-Green tensor built from the inverse
deformation gradient G = grad(Y):

      Bbar = inv(G) inv(G)^T / J,   J = 1/det(G),

which has unit determinant and measures isochoric deformation only.  For the
neohookean energy the Cauchy stress comes out as

      sigma = -p I + chi * [[beta-alpha, -2*delta], [-2*delta, alpha-beta]]

with alpha = y11^2 + y21^2, beta = y12^2 + y22^2, delta = y11*y12 + y21*y22.

All kernels are numba-compiled scalar functions; failures are signalled by
NaN and converted to typed exceptions by the thin Python wrappers.
"""

from dataclasses import dataclass, field
from enum import IntEnum
import math

import numpy as np
from numba import njit

from .errors import DegenerateDeformation, HyperbolicityLoss, NonPhysicalState

# Positivity guards: states below these are rejected, never clamped.
RHO_FLOOR = 1e-10
COVOL_FLOOR = 1e-14

# Material-table row layout (shared with every compiled kernel).
N_MAT_FIELDS = 12
(M_KIND, M_GAMMA, M_A, M_B, M_PINF, M_CHI, M_RHO0,
 M_RHOREF, M_A1, M_A2, M_E1, M_E2) = range(N_MAT_FIELDS)


class MaterialKind(IntEnum):
    GeneralGas = 0
    MieGruneisen = 1


@dataclass(frozen=True)
class MaterialParams:
    """Constants identifying one medium.

    gamma, a, b, p_inf describe the volumetric (gas/liquid) response, chi is
    the neohookean shear modulus and rho0 the reference density entering the
    elastic energy chi/rho0*(Tr(Bbar)-2).  The Mie-Gruneisen set
    (rho_ref, A1, A2, E1, E2) is only read when kind is MieGruneisen.
    """

    kind: MaterialKind = MaterialKind.GeneralGas
    gamma: float = 1.4
    a: float = 0.0
    b: float = 0.0
    p_inf: float = 0.0
    chi: float = 0.0
    rho0: float = 1.0
    rho_ref: float = 0.0
    A1: float = 0.0
    A2: float = 0.0
    E1: float = 0.0
    E2: float = 0.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")
        if min(self.a, self.b, self.p_inf, self.chi) < 0.0:
            raise ValueError("a, b, p_inf, chi must be non-negative")
        if not self.rho0 > 0.0:
            raise ValueError("rho0 must be positive")
        if self.kind == MaterialKind.MieGruneisen:
            if self.chi != 0.0:
                raise ValueError("Mie-Gruneisen materials must have chi = 0")
            if self.rho_ref <= 0.0:
                raise ValueError("rho_ref must be positive")
            if self.E1 == 1.0 or self.E2 == 1.0:
                raise ValueError("E1 and E2 must differ from 1")

    @property
    def row(self):
        """Material constants as a flat float64 row for compiled kernels."""
        return np.array(
            [float(self.kind), self.gamma, self.a, self.b, self.p_inf,
             self.chi, self.rho0, self.rho_ref, self.A1, self.A2,
             self.E1, self.E2], dtype=np.float64)

    @property
    def is_solid(self):
        return self.chi > 0.0

    # Convenience constructors for the classical parameter choices.
    @staticmethod
    def perfect_gas(gamma, name=""):
        return MaterialParams(gamma=gamma, name=name)

    @staticmethod
    def van_der_waals(gamma, a, b, name=""):
        return MaterialParams(gamma=gamma, a=a, b=b, name=name)

    @staticmethod
    def stiffened_gas(gamma, p_inf, name=""):
        return MaterialParams(gamma=gamma, p_inf=p_inf, name=name)

    @staticmethod
    def neohookean(gamma, p_inf, chi, rho0, name=""):
        return MaterialParams(gamma=gamma, p_inf=p_inf, chi=chi, rho0=rho0,
                              name=name)

    @staticmethod
    def mie_gruneisen(gamma, rho_ref, A1, A2, E1, E2, name=""):
        return MaterialParams(kind=MaterialKind.MieGruneisen, gamma=gamma,
                              rho_ref=rho_ref, A1=A1, A2=A2, E1=E1, E2=E2,
                              rho0=rho_ref, name=name)


def material_table(materials):
    """Stack MaterialParams rows into the (n, 12) table the kernels read."""
    table = np.empty((len(materials), N_MAT_FIELDS), dtype=np.float64)
    for i, mat in enumerate(materials):
        table[i] = mat.row
    return table


@dataclass(frozen=True)
class DefGrad:
    """Components of the inverse deformation gradient grad(Y).

    Layout is the 2x2 matrix [[y11, y12], [y21, y22]] where yij is the
    derivative of the i-th backward-map component along x_j.
    """

    y11: float
    y12: float
    y21: float
    y22: float

    def det(self):
        return self.y11 * self.y22 - self.y12 * self.y21

    @staticmethod
    def identity():
        return DefGrad(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class Stress:
    """Cauchy stress components; always symmetric (s12 == s21)."""

    s11: float
    s21: float
    s12: float
    s22: float


# ---------------------------------------------------------------------------
# Compiled scalar kernels.  NaN signals an inadmissible state.
# ---------------------------------------------------------------------------

@njit(cache=True)
def eps_vol_from_rho_p_k(row, rho, p):
    if rho <= RHO_FLOOR:
        return np.nan
    if row[M_KIND] == 0.0:
        gamma = row[M_GAMMA]
        a = row[M_A]
        b = row[M_B]
        p_inf = row[M_PINF]
        v = 1.0 / rho - b
        if v <= COVOL_FLOOR:
            return np.nan
        if p + p_inf + a * rho * rho <= 0.0:
            return np.nan
        return ((p + p_inf + a * rho * rho) * v / (gamma - 1.0)
                - a * rho + p_inf / rho)
    gamma = row[M_GAMMA]
    rho_ref = row[M_RHOREF]
    a1 = row[M_A1]
    a2 = row[M_A2]
    e1 = row[M_E1]
    e2 = row[M_E2]
    r = rho / rho_ref
    pc = a1 * r ** e1 - a2 * r ** e2
    if p - pc <= 0.0:
        return np.nan
    h = (a1 / (rho_ref * (e1 - 1.0)) * r ** (e1 - 1.0)
         - a2 / (rho_ref * (e2 - 1.0)) * r ** (e2 - 1.0))
    return (p - pc) / ((gamma - 1.0) * rho) + h


@njit(cache=True)
def p_from_rho_eps_k(row, rho, eps_vol):
    if rho <= RHO_FLOOR:
        return np.nan
    if row[M_KIND] == 0.0:
        gamma = row[M_GAMMA]
        a = row[M_A]
        b = row[M_B]
        p_inf = row[M_PINF]
        v = 1.0 / rho - b
        if v <= COVOL_FLOOR:
            return np.nan
        w = eps_vol + a * rho - p_inf / rho
        if w <= 0.0:
            return np.nan  # implied kappa(s) <= 0
        return -p_inf - a * rho * rho + (gamma - 1.0) * w / v
    gamma = row[M_GAMMA]
    rho_ref = row[M_RHOREF]
    a1 = row[M_A1]
    a2 = row[M_A2]
    e1 = row[M_E1]
    e2 = row[M_E2]
    r = rho / rho_ref
    h = (a1 / (rho_ref * (e1 - 1.0)) * r ** (e1 - 1.0)
        - a2 / (rho_ref * (e2 - 1.0)) * r ** (e2 - 1.0))
    w = eps_vol - h
    if w <= 0.0:
        return np.nan
    return (gamma - 1.0) * rho * w + a1 * r ** e1 - a2 * r ** e2


@njit(cache=True)
def csq_from_rho_eps_k(row, rho, eps_vol):
    """Squared isentropic sound speed d(p)/d(rho) at fixed entropy."""
    if rho <= RHO_FLOOR:
        return np.nan
    if row[M_KIND] == 0.0:
        gamma = row[M_GAMMA]
        a = row[M_A]
        b = row[M_B]
        p_inf = row[M_PINF]
        v = 1.0 / rho - b
        if v <= COVOL_FLOOR:
            return np.nan
        w = eps_vol + a * rho - p_inf / rho
        if w <= 0.0:
            return np.nan
        # gamma*kappa/rho^2*(1/rho-b)^(-gamma-1) - 2*a*rho with kappa
        # eliminated through p + p_inf + a*rho^2 = kappa*(1/rho-b)^-gamma.
        return gamma * (gamma - 1.0) * w / (v * v * rho * rho) - 2.0 * a * rho
    gamma = row[M_GAMMA]
    rho_ref = row[M_RHOREF]
    a1 = row[M_A1]
    a2 = row[M_A2]
    e1 = row[M_E1]
    e2 = row[M_E2]
    r = rho / rho_ref
    h = (a1 / (rho_ref * (e1 - 1.0)) * r ** (e1 - 1.0)
         - a2 / (rho_ref * (e2 - 1.0)) * r ** (e2 - 1.0))
    w = eps_vol - h
    if w <= 0.0:
        return np.nan
    return (gamma * (gamma - 1.0) * w
            + a1 * e1 / rho_ref * r ** (e1 - 1.0)
            - a2 * e2 / rho_ref * r ** (e2 - 1.0))


# kappa-explicit forward forms (frozen entropy): used by the exact solver's
# rarefaction integration and by admissible-state sampling in tests.

@njit(cache=True)
def kappa_from_rho_eps_k(row, rho, eps_vol):
    if row[M_KIND] == 0.0:
        gamma = row[M_GAMMA]
        v = 1.0 / rho - row[M_B]
        if v <= COVOL_FLOOR:
            return np.nan
        w = eps_vol + row[M_A] * rho - row[M_PINF] / rho
        return (gamma - 1.0) * w * v ** (gamma - 1.0)
    gamma = row[M_GAMMA]
    rho_ref = row[M_RHOREF]
    r = rho / rho_ref
    h = (row[M_A1] / (rho_ref * (row[M_E1] - 1.0)) * r ** (row[M_E1] - 1.0)
         - row[M_A2] / (rho_ref * (row[M_E2] - 1.0)) * r ** (row[M_E2] - 1.0))
    return (gamma - 1.0) * (eps_vol - h) / rho ** (gamma - 1.0)


@njit(cache=True)
def eps_vol_from_rho_kappa_k(row, rho, kappa):
    if row[M_KIND] == 0.0:
        gamma = row[M_GAMMA]
        v = 1.0 / rho - row[M_B]
        if v <= COVOL_FLOOR:
            return np.nan
        return (kappa / (gamma - 1.0) * v ** (1.0 - gamma)
                - row[M_A] * rho + row[M_PINF] / rho)
    gamma = row[M_GAMMA]
    rho_ref = row[M_RHOREF]
    r = rho / rho_ref
    h = (row[M_A1] / (rho_ref * (row[M_E1] - 1.0)) * r ** (row[M_E1] - 1.0)
         - row[M_A2] / (rho_ref * (row[M_E2] - 1.0)) * r ** (row[M_E2] - 1.0))
    return kappa * rho ** (gamma - 1.0) / (gamma - 1.0) + h


@njit(cache=True)
def p_from_rho_kappa_k(row, rho, kappa):
    if row[M_KIND] == 0.0:
        v = 1.0 / rho - row[M_B]
        if v <= COVOL_FLOOR:
            return np.nan
        return (-row[M_PINF] - row[M_A] * rho * rho
                + kappa * v ** (-row[M_GAMMA]))
    r = rho / row[M_RHOREF]
    return (kappa * rho ** row[M_GAMMA]
            + row[M_A1] * r ** row[M_E1] - row[M_A2] * r ** row[M_E2])


@njit(cache=True)
def csq_from_rho_kappa_k(row, rho, kappa):
    if row[M_KIND] == 0.0:
        gamma = row[M_GAMMA]
        v = 1.0 / rho - row[M_B]
        if v <= COVOL_FLOOR:
            return np.nan
        return (gamma * kappa / (rho * rho) * v ** (-gamma - 1.0)
                - 2.0 * row[M_A] * rho)
    gamma = row[M_GAMMA]
    rho_ref = row[M_RHOREF]
    r = rho / rho_ref
    return (gamma * kappa * rho ** (gamma - 1.0)
            + row[M_A1] * row[M_E1] / rho_ref * r ** (row[M_E1] - 1.0)
            - row[M_A2] * row[M_E2] / rho_ref * r ** (row[M_E2] - 1.0))


@njit(cache=True)
def eps_iso_k(row, y11, y12, y21, y22):
    chi = row[M_CHI]
    if chi == 0.0:
        return 0.0
    d = y11 * y22 - y12 * y21
    if d <= 0.0:
        return np.nan
    alpha = y11 * y11 + y21 * y21
    beta = y12 * y12 + y22 * y22
    return chi / row[M_RHO0] * ((alpha + beta) / d - 2.0)


@njit(cache=True)
def stress_k(row, rho, p, y11, y12, y21, y22):
    """Cauchy stress (s11, s21, s22): -p*I plus a traceless shear deviator."""
    chi = row[M_CHI]
    if chi == 0.0:
        return -p, 0.0, -p
    alpha = y11 * y11 + y21 * y21
    beta = y12 * y12 + y22 * y22
    delta = y11 * y12 + y21 * y22
    s11 = -p + chi * (beta - alpha)
    s21 = -2.0 * chi * delta
    s22 = -p + chi * (alpha - beta)
    return s11, s21, s22


@njit(cache=True)
def acoustic_terms_k(row, rho, csq, y11, y12, y21, y22):
    """(A1, sqrt(A2)) of the characteristic-speed formula.

    The four nonlinear speeds are u1 +- sqrt((A1 +- sqrt(A2))/rho).  With
    c^2 > 0 the neohookean energy guarantees A1 >= sqrt(A2) >= 0, so all
    speeds are real.
    """
    chi = row[M_CHI]
    half = 0.5 * rho * csq
    if chi == 0.0:
        return half, half
    alpha = y11 * y11 + y21 * y21
    beta = y12 * y12 + y22 * y22
    delta = y11 * y12 + y21 * y22
    a_one = half + chi * (alpha + beta)
    t = half + chi * (alpha - beta)
    a_two = t * t + 4.0 * chi * chi * delta * delta
    return a_one, math.sqrt(a_two)


@njit(cache=True)
def lam_fast_k(row, rho, csq, y11, y12, y21, y22):
    a_one, sq2 = acoustic_terms_k(row, rho, csq, y11, y12, y21, y22)
    return math.sqrt((a_one + sq2) / rho)


@njit(cache=True)
def lam_slow_k(row, rho, csq, y11, y12, y21, y22):
    a_one, sq2 = acoustic_terms_k(row, rho, csq, y11, y12, y21, y22)
    arg = (a_one - sq2) / rho
    if arg < 0.0:
        arg = 0.0  # roundoff only; analytically >= 0 when c^2 > 0
    return math.sqrt(arg)


# ---------------------------------------------------------------------------
# Python-facing operations.
# ---------------------------------------------------------------------------

def pressure_from_rho_eps(mat, rho, eps_vol):
    """Pressure from density and volumetric specific internal energy."""
    p = p_from_rho_eps_k(mat.row, rho, eps_vol)
    if not np.isfinite(p):
        raise NonPhysicalState(
            f"inadmissible (rho={rho!r}, eps_vol={eps_vol!r}) for {mat.name or mat.kind.name}")
    return p


def eps_from_rho_p(mat, rho, p):
    """Volumetric specific internal energy from density and pressure."""
    eps = eps_vol_from_rho_p_k(mat.row, rho, p)
    if not np.isfinite(eps):
        raise NonPhysicalState(
            f"inadmissible (rho={rho!r}, p={p!r}) for {mat.name or mat.kind.name}")
    return eps


def elastic_energy(mat, g):
    """Isochoric (shear) part of the specific internal energy."""
    e = eps_iso_k(mat.row, g.y11, g.y12, g.y21, g.y22)
    if not np.isfinite(e):
        raise DegenerateDeformation(f"det(grad Y) = {g.det()!r} <= 0")
    return e


def cauchy_stress(mat, rho, p, g):
    if g.det() <= 0.0:
        raise DegenerateDeformation(f"det(grad Y) = {g.det()!r} <= 0")
    s11, s21, s22 = stress_k(mat.row, rho, p, g.y11, g.y12, g.y21, g.y22)
    return Stress(s11=s11, s21=s21, s12=s21, s22=s22)


def sound_speed_sq(mat, rho, eps_vol):
    csq = csq_from_rho_eps_k(mat.row, rho, eps_vol)
    if not np.isfinite(csq):
        raise NonPhysicalState(
            f"inadmissible (rho={rho!r}, eps_vol={eps_vol!r}) for {mat.name or mat.kind.name}")
    if csq <= 0.0:
        raise HyperbolicityLoss(f"c^2 = {csq!r} <= 0")
    return csq


def wave_speeds(mat, rho, u1, eps_vol, g):
    """Characteristic speeds of the 1D sweep.

    Returns (lam_min, lam_max, speeds) where speeds are the six eigenvalues
    {u1, u1, u1 +- slow, u1 +- fast} sorted ascending.
    """
    csq = sound_speed_sq(mat, rho, eps_vol)
    row = mat.row
    fast = lam_fast_k(row, rho, csq, g.y11, g.y12, g.y21, g.y22)
    slow = lam_slow_k(row, rho, csq, g.y11, g.y12, g.y21, g.y22)
    speeds = (u1 - fast, u1 - slow, u1, u1, u1 + slow, u1 + fast)
    return u1 - fast, u1 + fast, speeds
