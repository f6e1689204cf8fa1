"""Level-set interface tracking: WENO5 transport, face detection, cell flips.

The signed level set phi partitions cells into two material regions
(material 0 where phi >= 0, material 1 below).  It is transported in
non-conservative form, phi_t + u . grad(phi) = 0, with fifth-order WENO
upwind derivatives and the same ghost policy as the conservative field.

When the zero line crosses a cell center during a step, the cell's
conservative state belongs to the wrong material.  It is reassigned from
the intermediate states of the multimaterial Riemann fan on the face the
interface came through: the minus state when the interface moved in the
positive direction, the plus state otherwise.
"""

import numpy as np
from numba import njit, prange

from .errors import OrphanFlip

N_GHOST = 3


def material_of_sign(phi):
    """Material ids from the level-set sign (0 for phi >= 0, 1 below)."""
    return (np.asarray(phi) < 0.0).astype(np.int64)


@njit(cache=True, inline="always")
def _weno5(v1, v2, v3, v4, v5):
    s1 = (13.0 / 12.0) * (v1 - 2.0 * v2 + v3) ** 2 \
        + 0.25 * (v1 - 4.0 * v2 + 3.0 * v3) ** 2
    s2 = (13.0 / 12.0) * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (v2 - v4) ** 2
    s3 = (13.0 / 12.0) * (v3 - 2.0 * v4 + v5) ** 2 \
        + 0.25 * (3.0 * v3 - 4.0 * v4 + v5) ** 2
    eps = 1e-6 * max(v1 * v1, max(v2 * v2, max(v3 * v3,
                     max(v4 * v4, v5 * v5)))) + 1e-99
    a1 = 0.1 / (eps + s1) ** 2
    a2 = 0.6 / (eps + s2) ** 2
    a3 = 0.3 / (eps + s3) ** 2
    inv = 1.0 / (a1 + a2 + a3)
    return inv * (a1 * (v1 / 3.0 - 7.0 * v2 / 6.0 + 11.0 * v3 / 6.0)
                  + a2 * (-v2 / 6.0 + 5.0 * v3 / 6.0 + v4 / 3.0)
                  + a3 * (v3 / 3.0 + 5.0 * v4 / 6.0 - v5 / 6.0))


@njit(cache=True, parallel=True)
def advect_rate_cons_k(phi, u, dx1, dx2, ng, out):
    """-(u . grad phi) with the velocity taken from a conservative field."""
    nx, ny = phi.shape
    inv1 = 1.0 / dx1
    inv2 = 1.0 / dx2
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        for i in range(ng, nx - ng):
            rho = u[i, j, 0]
            ua = u[i, j, 1] / rho
            ub = u[i, j, 2] / rho
            if ua >= 0.0:
                px = _weno5((phi[i - 2, j] - phi[i - 3, j]) * inv1,
                            (phi[i - 1, j] - phi[i - 2, j]) * inv1,
                            (phi[i, j] - phi[i - 1, j]) * inv1,
                            (phi[i + 1, j] - phi[i, j]) * inv1,
                            (phi[i + 2, j] - phi[i + 1, j]) * inv1)
            else:
                px = _weno5((phi[i + 3, j] - phi[i + 2, j]) * inv1,
                            (phi[i + 2, j] - phi[i + 1, j]) * inv1,
                            (phi[i + 1, j] - phi[i, j]) * inv1,
                            (phi[i, j] - phi[i - 1, j]) * inv1,
                            (phi[i - 1, j] - phi[i - 2, j]) * inv1)
            if ub >= 0.0:
                py = _weno5((phi[i, j - 2] - phi[i, j - 3]) * inv2,
                            (phi[i, j - 1] - phi[i, j - 2]) * inv2,
                            (phi[i, j] - phi[i, j - 1]) * inv2,
                            (phi[i, j + 1] - phi[i, j]) * inv2,
                            (phi[i, j + 2] - phi[i, j + 1]) * inv2)
            else:
                py = _weno5((phi[i, j + 3] - phi[i, j + 2]) * inv2,
                            (phi[i, j + 2] - phi[i, j + 1]) * inv2,
                            (phi[i, j + 1] - phi[i, j]) * inv2,
                            (phi[i, j] - phi[i, j - 1]) * inv2,
                            (phi[i, j - 1] - phi[i, j - 2]) * inv2)
            out[i, j] = -(ua * px + ub * py)


@njit(cache=True, parallel=True)
def advect_rate_k(phi, u1, u2, dx1, dx2, ng, out):
    """-(u . grad phi) with upwind-biased WENO5 one-sided derivatives."""
    nx, ny = phi.shape
    inv1 = 1.0 / dx1
    inv2 = 1.0 / dx2
    for jj in prange(ny - 2 * ng):
        j = jj + ng
        for i in range(ng, nx - ng):
            ua = u1[i, j]
            if ua >= 0.0:
                px = _weno5((phi[i - 2, j] - phi[i - 3, j]) * inv1,
                            (phi[i - 1, j] - phi[i - 2, j]) * inv1,
                            (phi[i, j] - phi[i - 1, j]) * inv1,
                            (phi[i + 1, j] - phi[i, j]) * inv1,
                            (phi[i + 2, j] - phi[i + 1, j]) * inv1)
            else:
                px = _weno5((phi[i + 3, j] - phi[i + 2, j]) * inv1,
                            (phi[i + 2, j] - phi[i + 1, j]) * inv1,
                            (phi[i + 1, j] - phi[i, j]) * inv1,
                            (phi[i, j] - phi[i - 1, j]) * inv1,
                            (phi[i - 1, j] - phi[i - 2, j]) * inv1)
            ub = u2[i, j]
            if ub >= 0.0:
                py = _weno5((phi[i, j - 2] - phi[i, j - 3]) * inv2,
                            (phi[i, j - 1] - phi[i, j - 2]) * inv2,
                            (phi[i, j] - phi[i, j - 1]) * inv2,
                            (phi[i, j + 1] - phi[i, j]) * inv2,
                            (phi[i, j + 2] - phi[i, j + 1]) * inv2)
            else:
                py = _weno5((phi[i, j + 3] - phi[i, j + 2]) * inv2,
                            (phi[i, j + 2] - phi[i, j + 1]) * inv2,
                            (phi[i, j + 1] - phi[i, j]) * inv2,
                            (phi[i, j] - phi[i, j - 1]) * inv2,
                            (phi[i, j - 1] - phi[i, j - 2]) * inv2)
            out[i, j] = -(ua * px + ub * py)


def weno5_advect(phi, u1, u2, dx1, dx2, dt):
    """One forward-Euler substep of the level-set transport.

    Expects ghost layers (three cells) already filled on phi, u1, u2;
    ghost entries of the result are left untouched.
    """
    phi = np.asarray(phi, dtype=np.float64)
    out = phi.copy()
    rate = np.zeros_like(phi)
    advect_rate_k(phi, np.asarray(u1, dtype=np.float64),
                  np.asarray(u2, dtype=np.float64), dx1, dx2, N_GHOST, rate)
    ng = N_GHOST
    out[ng:-ng, ng:-ng] += dt * rate[ng:-ng, ng:-ng]
    return out


def detect_faces(phi):
    """Multimaterial faces: sign changes between adjacent cell centers.

    Returns a list of (axis, i, j) where the face lies between cell (i, j)
    and its neighbor in +axis direction.
    """
    phi = np.asarray(phi)
    neg = phi < 0.0
    faces = []
    ii, jj = np.nonzero(neg[:-1, :] != neg[1:, :])
    faces.extend((0, int(i), int(j)) for i, j in zip(ii, jj))
    ii, jj = np.nonzero(neg[:, :-1] != neg[:, 1:])
    faces.extend((1, int(i), int(j)) for i, j in zip(ii, jj))
    return faces


def flip_cells(u, mat, u0, phi_new, fans, ng=N_GHOST, dx_min=None):
    """Reassign cells whose level-set sign changed during the step.

    u is updated in place together with mat.  u0 holds the pre-step states
    (their velocities choose the flip direction), fans the face fans of the
    final stage evaluation keyed by the pre-step material layout:
    dict with xm, xp, xmask (nx+1 faces) and ym, yp, ymask (ny+1 faces).

    Sub-cell topology events are handled without a fan: when a structure
    thinner than a cell vanishes between two centers the zero line
    disappears and the enclosed material with it, so the cell is absorbed
    into the deepest neighbor of its new material; a fresh zero crossing
    with no such neighbor is a one-cell nucleation the model cannot
    support, and its level-set sign is reset to the cell's material
    (recognizable by |phi| far below a cell width).  A deep sign flip far
    from any interface still aborts: the interface cannot cross more than
    one face per step at an admissible CFL number.
    Returns the number of flipped cells.
    """
    nx, ny = mat.shape
    new_mat = material_of_sign(phi_new)
    mat_pre = mat.copy()  # flips read only pre-step data (order independent)
    changed = np.argwhere(new_mat[ng:nx - ng, ng:ny - ng]
                          != mat_pre[ng:nx - ng, ng:ny - ng])
    if changed.size == 0:
        return 0
    xmask, xm, xp = fans["xmask"], fans["xm"], fans["xp"]
    ymask, ym, yp = fans["ymask"], fans["ym"], fans["yp"]
    u_snapshot = None
    n_flip = 0
    for di, dj in changed:
        i = int(di) + ng
        j = int(dj) + ng
        target = new_mat[i, j]
        rho = u0[i, j, 0]
        vel = (u0[i, j, 1] / rho, u0[i, j, 2] / rho)

        def candidates(axis):
            if axis == 0:
                lo_ok = xmask[i, j] and mat_pre[i - 1, j] == target
                hi_ok = xmask[i + 1, j] and mat_pre[i + 1, j] == target
                return (lo_ok, (xm, (i, j))), (hi_ok, (xp, (i + 1, j)))
            lo_ok = ymask[i, j] and mat_pre[i, j - 1] == target
            hi_ok = ymask[i, j + 1] and mat_pre[i, j + 1] == target
            return (lo_ok, (ym, (i, j))), (hi_ok, (yp, (i, j + 1)))

        # the paper's rule is one-dimensional; in 2D take the direction of
        # the dominant velocity component, ties toward x
        order = (0, 1) if abs(vel[0]) >= abs(vel[1]) else (1, 0)
        source = None
        for axis in order:
            (lo_ok, lo_src), (hi_ok, hi_src) = candidates(axis)
            if lo_ok and hi_ok:
                # one-cell sliver: upwind by the velocity sign
                source = lo_src if vel[axis] >= 0.0 else hi_src
                break
            if lo_ok:
                source = lo_src
                break
            if hi_ok:
                source = hi_src
                break
        if source is not None:
            arr, idx = source
            u[i, j, :] = arr[idx[0], idx[1], :]
        else:
            # sub-cell pinch-off: the zero line vanished here; absorb the
            # cell into the deepest adjacent cell of its new material
            if u_snapshot is None:
                u_snapshot = u.copy()
            best = None
            for oi, oj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if mat_pre[oi, oj] != target:
                    continue
                depth = abs(phi_new[oi, oj])
                if best is None or depth > best[0]:
                    best = (depth, oi, oj)
            if best is None:
                if dx_min is not None and abs(phi_new[i, j]) < 0.5 * dx_min:
                    # spurious one-cell nucleation: keep the material and
                    # pull the level set back to its side
                    phi_new[i, j] = ((0.05 * dx_min)
                                     if mat_pre[i, j] == 0 else
                                     (-0.05 * dx_min))
                    continue
                raise OrphanFlip(
                    f"cell ({i - ng}, {j - ng}) changed material with no "
                    f"adjacent multimaterial face or same-material "
                    f"neighbor (CFL violation)")
            u[i, j, :] = u_snapshot[best[1], best[2], :]
        mat[i, j] = target
        n_flip += 1
    return n_flip
