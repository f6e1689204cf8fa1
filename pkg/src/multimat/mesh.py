"""Cartesian finite-volume scheme: MUSCL sweeps, RK2 stepping, boundaries.

The unsplit semi-discretization updates each cell with the flux differences
of both directions; 1D Riemann problems are solved normal to every face,
the x2 direction through the axis relabelling of the state vector.  Faces
where the material id changes receive the two-sided multimaterial flux (the
minus-side flux for the lower cell, plus-side for the upper) and their fan
states are recorded for the end-of-step cell flips.

Second order comes from minmod-limited piecewise-linear reconstruction of
the conservative components.  A cell adjacent to a multimaterial face may
not difference across the interface: the neighbor value in its slope is
replaced by the corresponding intermediate state of a first-order
multimaterial Riemann problem on that face, which shrinks the stencil to
one material.  Traces that fall outside the admissible state space drop
back to the cell value.

Time integration is two-stage Runge-Kutta with a CFL-limited step computed
once per step from the fastest characteristic over the grid in both
directions.  The level set advances inside each stage with the stage's
cell-centered velocity; flips are applied once, after the final stage,
using the final stage's fans.
"""

import os
from dataclasses import dataclass, field as dfield

import numpy as np
from numba import get_num_threads, get_thread_id, njit, prange

from .errors import HyperbolicityLoss, NonPhysicalState
from .hllc import fan_k, select_flux_k
from .levelset import (N_GHOST, advect_rate_cons_k, advect_rate_k,
                       flip_cells, material_of_sign)
from .materials import (M_CHI, csq_from_rho_eps_k, lam_fast_k, material_table)
from .state import SWAP_PERM, eps_vol_of_k, pressure_of_k

BC_NEUMANN = "neumann"
BC_REFLECTIVE = "reflective"

# conservative components whose sign flips under a wall reflection:
# the normal momentum and both off-diagonal grad(Y) entries
_REFLECT_FLIP_X = np.array([1, 4, 5])   # phi1, y21, y12
_REFLECT_FLIP_Y = np.array([2, 4, 5])   # phi2, y21, y12


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    dx1: float
    dx2: float
    x0: float = 0.0
    y0: float = 0.0
    n_ghost: int = N_GHOST

    def __post_init__(self):
        if self.dx1 <= 0.0 or self.dx2 <= 0.0:
            raise ValueError("grid spacings must be positive")
        if self.n_ghost < 3:
            raise ValueError("three ghost layers are required")

    @property
    def shape(self):
        g = 2 * self.n_ghost
        return (self.nx + g, self.ny + g)

    def x_centers(self):
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx1

    def y_centers(self):
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dx2

    def interior(self):
        ng = self.n_ghost
        return slice(ng, ng + self.nx), slice(ng, ng + self.ny)


@dataclass
class SchemeConfig:
    cfl: float = 0.6
    order: int = 2
    t_end: float = 0.0
    limiter: str = "minmod"
    bc: tuple = (BC_NEUMANN, BC_NEUMANN, BC_NEUMANN, BC_NEUMANN)

    def __post_init__(self):
        if not 0.0 < self.cfl < 1.0:
            raise ValueError("cfl must lie in (0, 1)")
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.limiter != "minmod":
            raise ValueError("only the minmod limiter is implemented")


class Field2D:
    """Cell data on the padded grid: conservative vector, material id and

    level-set value per cell."""

    def __init__(self, grid, materials):
        self.grid = grid
        self.materials = list(materials)
        self.table = material_table(self.materials)
        self.u = np.zeros(grid.shape + (8,))
        self.mat = np.zeros(grid.shape, dtype=np.int64)
        self.phi = np.zeros(grid.shape)

    def copy(self):
        out = Field2D.__new__(Field2D)
        out.grid = self.grid
        out.materials = self.materials
        out.table = self.table
        out.u = self.u.copy()
        out.mat = self.mat.copy()
        out.phi = self.phi.copy()
        return out

    def interior_view(self, arr=None):
        sx, sy = self.grid.interior()
        return (arr if arr is not None else self.u)[sx, sy]

    def scratch(self, key, shape):
        """Reusable work array (zeroing is the caller's responsibility)."""
        store = self.__dict__.setdefault("_scratch", {})
        arr = store.get(key)
        if arr is None or arr.shape != shape:
            arr = np.zeros(shape)
            store[key] = arr
        return arr


@njit(cache=True, inline="always")
def minmod_k(a, b):
    if a * b <= 0.0:
        return 0.0
    if abs(a) <= abs(b):
        return a
    return b


def minmod(a, b):
    """Zero across extrema, else the smaller-magnitude argument."""
    return minmod_k(a, b)


@njit(cache=True)
def _row_slopes(n, u_row, mats, table, ng, order, fo_m, fo_p, fo_mask,
                slopes, scratch_fluxes, scratch_states, scratch_misc):
    """Minmod slopes with interface-reduced stencils.

    fo_* receive the first-order fan at multimaterial faces (face f sits
    between cells f-1 and f).  Returns a nonzero face index on failure.
    """
    if order == 1:
        for i in range(n):
            for c in range(8):
                slopes[i, c] = 0.0
        return 0
    for f in range(ng - 1, n - ng + 2):
        fo_mask[f] = False
        if mats[f - 1] != mats[f]:
            solid = (table[mats[f - 1], M_CHI] > 0.0
                     and table[mats[f], M_CHI] > 0.0)
            status = fan_k(table[mats[f - 1]], u_row[f - 1], table[mats[f]],
                           u_row[f], 1 if solid else 0, 1, scratch_fluxes,
                           scratch_states, scratch_misc)
            if status != 0:
                return f
            fo_mask[f] = True
            for c in range(8):
                fo_m[f, c] = scratch_states[0, c]
                fo_p[f, c] = scratch_states[1, c]
    for i in range(ng - 1, n - ng + 1):
        for c in range(8):
            if fo_mask[i]:
                dl = u_row[i, c] - fo_p[i, c]
            else:
                dl = u_row[i, c] - u_row[i - 1, c]
            if fo_mask[i + 1]:
                dr = fo_m[i + 1, c] - u_row[i, c]
            else:
                dr = u_row[i + 1, c] - u_row[i, c]
            slopes[i, c] = minmod_k(dl, dr)
    return 0


@njit(cache=True)
def _sweep_row(n, u_row, mats, table, inv_dx, ng, order, dudt_row, fan_m,
               fan_p, fan_mask, slopes, fo_m, fo_p, fo_mask, fluxes, states,
               misc, wl, wr, out6):
    """Fluxes and flux differences along one pencil of cells.

    Face f lies between cells f-1 and f; interior cells ng..n-ng-1 receive
    contributions from faces ng..n-ng.  Multimaterial faces store their fan
    states (for the flips) and apply the two-sided flux pair.  All scratch
    buffers are per-thread preallocations (allocation inside the parallel
    loops serializes on the runtime's allocator).
    Returns 0 or the face index at which the solve failed (packed as
    status*1000000 + face).
    """
    bad = _row_slopes(n, u_row, mats, table, ng, order, fo_m, fo_p, fo_mask,
                      slopes, fluxes, states, misc)
    if bad != 0:
        return 1000000 + bad
    for i in range(n):
        for c in range(8):
            dudt_row[i, c] = 0.0
    for f in range(ng, n - ng + 1):
        ml = mats[f - 1]
        mr = mats[f]
        for c in range(8):
            wl[c] = u_row[f - 1, c] + 0.5 * slopes[f - 1, c]
            wr[c] = u_row[f, c] - 0.5 * slopes[f, c]
        if order == 2:
            # inadmissible traces fall back to the cell value
            if not np.isfinite(pressure_of_k(table[ml], wl)):
                for c in range(8):
                    wl[c] = u_row[f - 1, c]
            if not np.isfinite(pressure_of_k(table[mr], wr)):
                for c in range(8):
                    wr[c] = u_row[f, c]
        if ml == mr:
            solid = table[ml, M_CHI] > 0.0
            status = fan_k(table[ml], wl, table[mr], wr, 1 if solid else 0,
                           0, fluxes, states, misc)
            if status != 0:
                return status * 1000000 + f
            select_flux_k(fluxes, misc[0], misc[2], misc[1], out6)
            dudt_row[f - 1, 0] -= out6[0] * inv_dx
            dudt_row[f - 1, 1] -= out6[1] * inv_dx
            dudt_row[f - 1, 2] -= out6[2] * inv_dx
            dudt_row[f - 1, 3] -= out6[3] * inv_dx
            dudt_row[f - 1, 4] -= out6[4] * inv_dx
            dudt_row[f - 1, 7] -= out6[5] * inv_dx
            dudt_row[f, 0] += out6[0] * inv_dx
            dudt_row[f, 1] += out6[1] * inv_dx
            dudt_row[f, 2] += out6[2] * inv_dx
            dudt_row[f, 3] += out6[3] * inv_dx
            dudt_row[f, 4] += out6[4] * inv_dx
            dudt_row[f, 7] += out6[5] * inv_dx
        else:
            solid = (table[ml, M_CHI] > 0.0 and table[mr, M_CHI] > 0.0)
            status = fan_k(table[ml], wl, table[mr], wr, 1 if solid else 0,
                           1, fluxes, states, misc)
            if status != 0:
                return status * 1000000 + f
            dudt_row[f - 1, 0] -= fluxes[1, 0] * inv_dx
            dudt_row[f - 1, 1] -= fluxes[1, 1] * inv_dx
            dudt_row[f - 1, 2] -= fluxes[1, 2] * inv_dx
            dudt_row[f - 1, 3] -= fluxes[1, 3] * inv_dx
            dudt_row[f - 1, 4] -= fluxes[1, 4] * inv_dx
            dudt_row[f - 1, 7] -= fluxes[1, 5] * inv_dx
            dudt_row[f, 0] += fluxes[2, 0] * inv_dx
            dudt_row[f, 1] += fluxes[2, 1] * inv_dx
            dudt_row[f, 2] += fluxes[2, 2] * inv_dx
            dudt_row[f, 3] += fluxes[2, 3] * inv_dx
            dudt_row[f, 4] += fluxes[2, 4] * inv_dx
            dudt_row[f, 7] += fluxes[2, 5] * inv_dx
            fan_mask[f] = True
            for c in range(8):
                fan_m[f, c] = states[0, c]
                fan_p[f, c] = states[1, c]
    return 0


def thread_scratch(n):
    """Per-thread row buffers: seven (n+1, 8) panels, two masks, a material

    row, and a flat pad for the face solver temporaries."""
    nt = get_num_threads()
    panels = np.empty((nt, 7, n + 1, 8))
    masks = np.zeros((nt, 2, n + 1), dtype=np.bool_)
    mats = np.empty((nt, n + 1), dtype=np.int64)
    pads = np.empty((nt, 70))
    return panels, masks, mats, pads


@njit(cache=True, parallel=True)
def sweep_x_k(u, mat, table, dx1, ng, order, dudt, fan_m, fan_p, fan_mask,
              errs, panels, masks, mats_s, pads):
    nx, ny = mat.shape
    inv_dx = 1.0 / dx1
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        tid = get_thread_id()
        u_row = panels[tid, 0, :nx]
        dudt_row = panels[tid, 1, :nx]
        slopes = panels[tid, 2, :nx]
        fo_m = panels[tid, 3]
        fo_p = panels[tid, 4]
        frow_m = panels[tid, 5]
        frow_p = panels[tid, 6]
        fo_mask = masks[tid, 0]
        frow_mask = masks[tid, 1]
        mats = mats_s[tid]
        pad = pads[tid]
        fluxes = pad[:24].reshape(4, 6)
        states = pad[24:40].reshape(2, 8)
        misc = pad[40:48]
        wl = pad[48:56]
        wr = pad[56:64]
        out6 = pad[64:70]
        for f in range(nx + 1):
            frow_mask[f] = False
        for i in range(nx):
            mats[i] = mat[i, j]
            for c in range(8):
                u_row[i, c] = u[i, j, c]
        err = _sweep_row(nx, u_row, mats, table, inv_dx, ng, order, dudt_row,
                         frow_m, frow_p, frow_mask, slopes, fo_m, fo_p,
                         fo_mask, fluxes, states, misc, wl, wr, out6)
        errs[j] = err
        if err != 0:
            continue
        for i in range(ng, nx - ng):
            for c in range(8):
                dudt[i, j, c] += dudt_row[i, c]
        for f in range(nx + 1):
            if frow_mask[f]:
                fan_mask[f, j] = True
                for c in range(8):
                    fan_m[f, j, c] = frow_m[f, c]
                    fan_p[f, j, c] = frow_p[f, c]


@njit(cache=True, parallel=True)
def sweep_y_k(u, mat, table, dx2, ng, order, dudt, fan_m, fan_p, fan_mask,
              errs, panels, masks, mats_s, pads):
    """x2-direction sweep through the axis relabelling of the state."""
    nx, ny = mat.shape
    inv_dx = 1.0 / dx2
    for ii in prange(nx - 2 * ng):
        i = ii + ng
        tid = get_thread_id()
        u_row = panels[tid, 0, :ny]
        dudt_row = panels[tid, 1, :ny]
        slopes = panels[tid, 2, :ny]
        fo_m = panels[tid, 3]
        fo_p = panels[tid, 4]
        frow_m = panels[tid, 5]
        frow_p = panels[tid, 6]
        fo_mask = masks[tid, 0]
        frow_mask = masks[tid, 1]
        mats = mats_s[tid]
        pad = pads[tid]
        fluxes = pad[:24].reshape(4, 6)
        states = pad[24:40].reshape(2, 8)
        misc = pad[40:48]
        wl = pad[48:56]
        wr = pad[56:64]
        out6 = pad[64:70]
        for f in range(ny + 1):
            frow_mask[f] = False
        for j in range(ny):
            mats[j] = mat[i, j]
            for c in range(8):
                u_row[j, c] = u[i, j, SWAP_PERM[c]]
        err = _sweep_row(ny, u_row, mats, table, inv_dx, ng, order, dudt_row,
                         frow_m, frow_p, frow_mask, slopes, fo_m, fo_p,
                         fo_mask, fluxes, states, misc, wl, wr, out6)
        errs[i] = err
        if err != 0:
            continue
        for j in range(ng, ny - ng):
            for c in range(8):
                dudt[i, j, SWAP_PERM[c]] += dudt_row[j, c]
        for f in range(ny + 1):
            if frow_mask[f]:
                fan_mask[i, f] = True
                for c in range(8):
                    fan_m[i, f, c] = frow_m[f, SWAP_PERM[c]]
                    fan_p[i, f, c] = frow_p[f, SWAP_PERM[c]]


@njit(cache=True, parallel=True)
def lam_max_k(u, mat, table, ng, out):
    """Per-cell fastest characteristic magnitude over both directions.

    NaN marks an inadmissible or non-hyperbolic cell.
    """
    nx, ny = mat.shape
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        for i in range(ng, nx - ng):
            row = table[mat[i, j]]
            cell = u[i, j]
            ev = eps_vol_of_k(row, cell)
            if not np.isfinite(ev):
                out[i, j] = np.nan
                continue
            csq = csq_from_rho_eps_k(row, cell[0], ev)
            if not csq > 0.0:
                out[i, j] = np.nan
                continue
            rho = cell[0]
            au1 = abs(cell[1] / rho)
            au2 = abs(cell[2] / rho)
            fx = lam_fast_k(row, rho, csq, cell[3], cell[5], cell[4], cell[6])
            fy = lam_fast_k(row, rho, csq, cell[6], cell[4], cell[5], cell[3])
            lx = au1 + fx
            ly = au2 + fy
            out[i, j] = lx if lx > ly else ly


def apply_bc(field, bcs):
    """Fill ghost layers: zeroth-order copy (Neumann) or mirror with sign

    flips on the normal momentum and both off-diagonal grad(Y) entries
    (reflective wall).  Ordering: (x-lo, x-hi, y-lo, y-hi); the y pass runs
    second so corners inherit x-ghost data.
    """
    ng = field.grid.n_ghost
    u, mat, phi = field.u, field.mat, field.phi
    left, right, bottom, top = bcs

    def fill_x(side, kind):
        if side == 0:
            ghost = slice(0, ng)
            edge = slice(ng, ng + 1)
            mirror = slice(2 * ng - 1, ng - 1, -1)
        else:
            ghost = slice(-ng, None)
            edge = slice(-ng - 1, -ng)
            mirror = slice(-ng - 1, -2 * ng - 1, -1)
        if kind == BC_NEUMANN:
            u[ghost] = u[edge]
            mat[ghost] = mat[edge]
            phi[ghost] = phi[edge]
        else:
            u[ghost] = u[mirror]
            u[ghost][:, :, _REFLECT_FLIP_X] *= -1.0
            mat[ghost] = mat[mirror]
            phi[ghost] = phi[mirror]

    def fill_y(side, kind):
        if side == 0:
            ghost = slice(0, ng)
            edge = slice(ng, ng + 1)
            mirror = slice(2 * ng - 1, ng - 1, -1)
        else:
            ghost = slice(-ng, None)
            edge = slice(-ng - 1, -ng)
            mirror = slice(-ng - 1, -2 * ng - 1, -1)
        if kind == BC_NEUMANN:
            u[:, ghost] = u[:, edge]
            mat[:, ghost] = mat[:, edge]
            phi[:, ghost] = phi[:, edge]
        else:
            u[:, ghost] = u[:, mirror]
            u[:, ghost][:, :, _REFLECT_FLIP_Y] *= -1.0
            mat[:, ghost] = mat[:, mirror]
            phi[:, ghost] = phi[:, mirror]

    fill_x(0, left)
    fill_x(1, right)
    fill_y(0, bottom)
    fill_y(1, top)
    return field


@njit(cache=True, parallel=True)
def stage1_k(u0, l1, dt, ng, out):
    """out = u0 + dt*l1 over the interior (fused first RK stage)."""
    nx, ny, nc = u0.shape
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        for i in range(ng, nx - ng):
            for c in range(nc):
                out[i, j, c] = u0[i, j, c] + dt * l1[i, j, c]


@njit(cache=True, parallel=True)
def stage2_k(u0, u1, l2, dt, ng, out):
    """out = (u0 + u1 + dt*l2)/2 over the interior (final RK combination)."""
    nx, ny, nc = u0.shape
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        for i in range(ng, nx - ng):
            for c in range(nc):
                out[i, j, c] = 0.5 * (u0[i, j, c] + u1[i, j, c]
                                      + dt * l2[i, j, c])


def compute_dt(field, cfl):
    """CFL step from the fastest characteristic over the interior cells."""
    grid = field.grid
    ng = grid.n_ghost
    lam = field.scratch("lam", grid.shape)
    lam_max_k(field.u, field.mat, field.table, ng, lam)
    sx, sy = grid.interior()
    lam_int = lam[sx, sy]
    lam_peak = float(lam_int.max())  # NaN propagates through max
    if np.isnan(lam_peak):
        i, j = np.argwhere(np.isnan(lam_int))[0]
        raise NonPhysicalState(f"inadmissible state in cell ({i}, {j}): "
                               f"{field.u[ng + i, ng + j]}")
    if lam_peak <= 0.0:
        raise HyperbolicityLoss("no positive characteristic speed on grid")
    return cfl * min(grid.dx1, grid.dx2) / lam_peak


def _residual(field, cfg, fans=None, dudt=None):
    """dU/dt over the padded array (interior filled) plus recorded fans."""
    grid = field.grid
    ng = grid.n_ghost
    nx, ny = grid.shape
    if dudt is None:
        dudt = np.zeros(grid.shape + (8,))
    else:
        dudt[:] = 0.0
    if fans is None:
        fans = dict(
            xm=np.zeros((nx + 1, ny, 8)), xp=np.zeros((nx + 1, ny, 8)),
            xmask=np.zeros((nx + 1, ny), dtype=bool),
            ym=np.zeros((nx, ny + 1, 8)), yp=np.zeros((nx, ny + 1, 8)),
            ymask=np.zeros((nx, ny + 1), dtype=bool))
    else:
        fans["xmask"][:] = False
        fans["ymask"][:] = False
    errs_x = np.zeros(ny, dtype=np.int64)
    errs_y = np.zeros(nx, dtype=np.int64)
    scr = field.__dict__.setdefault("_sweep_scratch", {})
    key = (get_num_threads(), max(nx, ny))
    if scr.get("key") != key:
        scr["key"] = key
        scr["bufs"] = thread_scratch(max(nx, ny))
    panels, masks, mats_s, pads = scr["bufs"]
    sweep_x_k(field.u, field.mat, field.table, grid.dx1, ng, cfg.order, dudt,
              fans["xm"], fans["xp"], fans["xmask"], errs_x,
              panels, masks, mats_s, pads)
    _check_sweep_errors(errs_x, axis=0, ng=ng)
    sweep_y_k(field.u, field.mat, field.table, grid.dx2, ng, cfg.order, dudt,
              fans["ym"], fans["yp"], fans["ymask"], errs_y,
              panels, masks, mats_s, pads)
    _check_sweep_errors(errs_y, axis=1, ng=ng)
    return dudt, fans


def _check_sweep_errors(errs, axis, ng):
    bad = np.nonzero(errs)[0]
    if bad.size == 0:
        return
    row = int(bad[0])
    code = int(errs[row]) // 1000000
    face = int(errs[row]) % 1000000
    where = (f"face {face - ng}+-1/2, row {row - ng}" if axis == 0
             else f"row {row - ng}, face {face - ng}+-1/2")
    if code == 2:
        raise HyperbolicityLoss(f"hyperbolicity lost at {where}")
    raise NonPhysicalState(f"non-physical state at {where}")


def step_rk2(field, cfg, dt):
    """Advance one time step in place; returns the number of flipped cells.

    Both stages see the pre-step material layout; the level set advances
    with each stage's velocity and cells are flipped once at the end using
    the final stage's face fans.
    """
    grid = field.grid
    ng = grid.n_ghost
    sx, sy = grid.interior()
    u0 = field.scratch("u0", grid.shape + (8,))
    u0[:] = field.u
    phi0 = field.scratch("phi0", grid.shape)
    phi0[:] = field.phi
    dudt = field.scratch("dudt", grid.shape + (8,))
    adv = field.scratch("adv", grid.shape)

    apply_bc(field, cfg.bc)
    l1, fans = _residual(field, cfg, getattr(field, "_fans", None), dudt)
    field._fans = fans
    advect_rate_cons_k(field.phi, field.u, grid.dx1, grid.dx2, ng, adv)

    # first stage, written straight back into the field (u0/phi0 keep the
    # originals; the material layout is untouched until the flip pass)
    stage1_k(u0, l1, dt, ng, field.u)
    field.phi[sx, sy] = phi0[sx, sy] + dt * adv[sx, sy]

    apply_bc(field, cfg.bc)
    u1 = field.scratch("u1", grid.shape + (8,))
    u1[:] = field.u
    phi1 = field.scratch("phi1", grid.shape)
    phi1[:] = field.phi
    l2, fans = _residual(field, cfg, fans, dudt)
    advect_rate_cons_k(field.phi, field.u, grid.dx1, grid.dx2, ng, adv)

    stage2_k(u0, u1, l2, dt, ng, field.u)
    field.phi[sx, sy] = 0.5 * (phi0[sx, sy] + phi1[sx, sy]
                               + dt * adv[sx, sy])

    n_flip = flip_cells(field.u, field.mat, u0, field.phi, fans, ng,
                        dx_min=min(grid.dx1, grid.dx2))
    return n_flip


def muscl_reconstruct(u_row, mats, materials, order=2):
    """Per-face trace pairs along one pencil (two ghost cells each side).

    Returns (w_left, w_right) of shape (n-1, 8) for the faces between
    consecutive cells; faces whose cells lack slope stencils carry the
    unreconstructed cell values.
    """
    u_row = np.ascontiguousarray(u_row, dtype=np.float64)
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    table = material_table(materials)
    n = u_row.shape[0]
    slopes = np.zeros((n, 8))
    if order == 2:
        fo_m = np.empty((n + 1, 8))
        fo_p = np.empty((n + 1, 8))
        fo_mask = np.zeros(n + 1, dtype=np.bool_)
        bad = _row_slopes(n, u_row, mats, table, 2, order, fo_m, fo_p,
                          fo_mask, slopes, np.empty((4, 6)),
                          np.empty((2, 8)), np.empty(8))
        if bad != 0:
            raise NonPhysicalState(f"interface fan failed at face {bad}")
    w_l = u_row[:-1] + 0.5 * slopes[:-1]
    w_r = u_row[1:] - 0.5 * slopes[1:]
    return w_l, w_r


def set_num_workers(n):
    """Limit the compiled kernels' thread count (determinism is unaffected:

    every parallel loop writes disjoint slots)."""
    import numba
    numba.set_num_threads(max(1, int(n)))


def configured_workers(default=None):
    value = os.environ.get("MULTIMAT_NUM_THREADS", "")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return default
