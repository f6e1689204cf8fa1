"""Output writers and diagnostics: line cuts, field dumps, Schlieren,

mass-conservation and density/deformation consistency monitors.

All writers format with 17 significant digits so that identical runs
produce byte-identical files.
"""

import numpy as np
from numba import njit, prange

from .errors import NonPhysicalState
from .materials import M_CHI, M_RHO0, stress_k, p_from_rho_eps_k
from .state import eps_vol_of_k

_FMT = "%.17g"


@njit(cache=True, parallel=True)
def prim_fields_k(u, mat, table, ng, out):
    """(rho, u1, u2, p, sigma11, sigma21) per interior cell; NaN pressure

    marks an inadmissible state."""
    nx, ny = mat.shape
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        for i in range(ng, nx - ng):
            row = table[mat[i, j]]
            cell = u[i, j]
            rho = cell[0]
            u1 = cell[1] / rho
            u2 = cell[2] / rho
            ev = eps_vol_of_k(row, cell)
            p = p_from_rho_eps_k(row, rho, ev) if np.isfinite(ev) else np.nan
            out[i - ng, j - ng, 0] = rho
            out[i - ng, j - ng, 1] = u1
            out[i - ng, j - ng, 2] = u2
            out[i - ng, j - ng, 3] = p
            if np.isfinite(p):
                s11, s21, _ = stress_k(row, rho, p, cell[3], cell[5],
                                       cell[4], cell[6])
            else:
                s11 = np.nan
                s21 = np.nan
            out[i - ng, j - ng, 4] = s11
            out[i - ng, j - ng, 5] = s21


def primitive_fields(field):
    """Interior arrays of (rho, u1, u2, p, sigma11, sigma21)."""
    grid = field.grid
    out = np.empty((grid.nx, grid.ny, 6))
    prim_fields_k(field.u, field.mat, field.table, grid.n_ghost, out)
    if np.isnan(out[:, :, 3]).any():
        i, j = np.argwhere(np.isnan(out[:, :, 3]))[0]
        raise NonPhysicalState(f"inadmissible state in cell ({i}, {j})")
    return out


def schlieren(field):
    """Cell-centered |grad rho| by central differences (raw, unscaled;

    apply a logarithmic map in post-processing)."""
    grid = field.grid
    ng = grid.n_ghost
    rho = field.u[:, :, 0]
    east = rho[ng + 1:rho.shape[0] - ng + 1, ng:-ng]
    west = rho[ng - 1:rho.shape[0] - ng - 1, ng:-ng]
    north = rho[ng:-ng, ng + 1:rho.shape[1] - ng + 1]
    south = rho[ng:-ng, ng - 1:rho.shape[1] - ng - 1]
    ddx = (east - west) / (2.0 * grid.dx1)
    ddy = (north - south) / (2.0 * grid.dx2)
    return np.hypot(ddx, ddy)


def consistency_error(field):
    """Per-cell |rho/rho0 - det(grad Y)| inside the solid and its norms.

    The density carried by the continuity update and the deformation
    determinant are analytically redundant for constant initial density, so
    the residual gauges the discretization's internal consistency.  Returns
    (error field over the interior, dict of norms); cells of fluid
    materials hold zero.
    """
    grid = field.grid
    sx, sy = grid.interior()
    u = field.u[sx, sy]
    mat = field.mat[sx, sy]
    det = (u[:, :, 3] * u[:, :, 6] - u[:, :, 5] * u[:, :, 4])
    err = np.zeros(mat.shape)
    solid_any = False
    for m, params in enumerate(field.materials):
        if params.chi <= 0.0:
            continue
        solid_any = True
        mask = mat == m
        err[mask] = np.abs(u[:, :, 0][mask] / params.rho0 - det[mask])
    n_solid = int(np.count_nonzero(err != 0.0)) or 1
    norms = {
        "max": float(err.max()) if solid_any else 0.0,
        "l1": float(err.sum() / n_solid),
        "l2": float(np.sqrt((err ** 2).sum() / n_solid)),
    }
    return err, norms


def mass_by_material(field):
    grid = field.grid
    sx, sy = grid.interior()
    rho = field.u[sx, sy, 0]
    mat = field.mat[sx, sy]
    vol = grid.dx1 * grid.dx2
    return np.array([float(rho[mat == m].sum() * vol) for m in (0, 1)])


class Diagnostics:
    """Per-step time series: mass per material, conservation error, and the

    density/deformation consistency norms."""

    def __init__(self, field):
        self.rows = []
        self.mass0 = mass_by_material(field).sum()

    def record(self, t, field):
        masses = mass_by_material(field)
        err_pct = (masses.sum() - self.mass0) / self.mass0 * 100.0
        _, norms = consistency_error(field)
        self.rows.append((t, masses[0], masses[1], err_pct,
                          norms["max"], norms["l1"], norms["l2"]))

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("t,mass_mat0,mass_mat1,mass_error_pct,"
                     "consistency_max,consistency_l1,consistency_l2\n")
            for row in self.rows:
                fh.write(",".join(_FMT % v for v in row) + "\n")

    @property
    def mass_error_series(self):
        return (np.array([r[0] for r in self.rows]),
                np.array([r[3] for r in self.rows]))


def write_linecut(field, axis, coordinate, path):
    """CSV profile along a grid line through the given transverse coordinate.

    axis "x": a cut at y = coordinate; axis "y": a cut at x = coordinate.
    Columns: x,rho,u1,u2,p,phi,sigma11,sigma21 (17 significant digits).
    """
    grid = field.grid
    prim = primitive_fields(field)
    sx, sy = grid.interior()
    phi = field.phi[sx, sy]
    if axis == "x":
        ys = grid.y_centers()
        if not (ys.min() - 0.5 * grid.dx2 <= coordinate
                <= ys.max() + 0.5 * grid.dx2):
            raise ValueError(f"coordinate {coordinate!r} outside the domain")
        j = int(np.argmin(np.abs(ys - coordinate)))
        pos = grid.x_centers()
        cut = prim[:, j, :]
        phi_cut = phi[:, j]
    elif axis == "y":
        xs = grid.x_centers()
        if not (xs.min() - 0.5 * grid.dx1 <= coordinate
                <= xs.max() + 0.5 * grid.dx1):
            raise ValueError(f"coordinate {coordinate!r} outside the domain")
        i = int(np.argmin(np.abs(xs - coordinate)))
        pos = grid.y_centers()
        cut = prim[i, :, :]
        phi_cut = phi[i, :]
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,rho,u1,u2,p,phi,sigma11,sigma21\n")
        for k in range(pos.size):
            row = (pos[k], cut[k, 0], cut[k, 1], cut[k, 2], cut[k, 3],
                   phi_cut[k], cut[k, 4], cut[k, 5])
            fh.write(",".join(_FMT % v for v in row) + "\n")


def write_field(field, path):
    """Full-field dump: header `nx ny dx dy x0 y0`, then one record per

    cell in row-major order (y rows outer, x inner):
    rho u1 u2 p phi mat y11 y12 y21 y22."""
    grid = field.grid
    prim = primitive_fields(field)
    sx, sy = grid.interior()
    phi = field.phi[sx, sy]
    mat = field.mat[sx, sy]
    u = field.u[sx, sy]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(" ".join(_FMT % v for v in
                          (grid.nx, grid.ny, grid.dx1, grid.dx2,
                           grid.x0, grid.y0)) + "\n")
        for j in range(grid.ny):
            for i in range(grid.nx):
                row = (prim[i, j, 0], prim[i, j, 1], prim[i, j, 2],
                       prim[i, j, 3], phi[i, j], float(mat[i, j]),
                       u[i, j, 3], u[i, j, 5], u[i, j, 4], u[i, j, 6])
                fh.write(" ".join(_FMT % v for v in row) + "\n")


def write_scalar_field(values, grid, path):
    """Plain-text dump of one interior scalar (same header as write_field)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(" ".join(_FMT % v for v in
                          (grid.nx, grid.ny, grid.dx1, grid.dx2,
                           grid.x0, grid.y0)) + "\n")
        for j in range(grid.ny):
            fh.write(" ".join(_FMT % values[i, j]
                              for i in range(grid.nx)) + "\n")
