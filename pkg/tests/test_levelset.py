"""Level-set transport, face detection, and the cell-flip reassignment."""

import numpy as np
import pytest

import multimat as mm
from multimat.errors import OrphanFlip
from multimat.levelset import (N_GHOST, advect_rate_k, detect_faces,
                               flip_cells, material_of_sign, weno5_advect)
from multimat.materials import DefGrad
from multimat.mesh import Field2D, Grid, SchemeConfig, compute_dt, step_rk2
from multimat.state import prim_to_cons

from oracles import AIR, COPPER

I2 = DefGrad.identity()
NG = N_GHOST


def padded(nx, ny):
    return nx + 2 * NG, ny + 2 * NG


class TestWeno5Advect:
    def test_constant_field_unchanged(self):
        nx, ny = padded(20, 12)
        phi = np.full((nx, ny), 3.7)
        u1 = np.full((nx, ny), 11.0)
        u2 = np.full((nx, ny), -4.0)
        out = weno5_advect(phi, u1, u2, 0.1, 0.1, 1e-3)
        assert np.array_equal(out, phi)

    def test_linear_field_exact_rate(self):
        # phi = x advected by u = (1, 0) must translate: phi_t = -1 exactly
        nx, ny = padded(24, 8)
        dx = 0.05
        x = (np.arange(nx) - NG + 0.5) * dx
        phi = np.broadcast_to(x[:, None], (nx, ny)).copy()
        u1 = np.ones((nx, ny))
        u2 = np.zeros((nx, ny))
        dt = 1e-3
        out = weno5_advect(phi, u1, u2, dx, dx, dt)
        core = (slice(NG, -NG), slice(NG, -NG))
        assert np.allclose(out[core], phi[core] - dt, rtol=1e-13)

    def test_polynomial_exactness(self):
        # WENO5 differentiates quartics exactly (uniform weights limit)
        nx, ny = padded(30, 6)
        dx = 0.05
        x = (np.arange(nx) - NG + 0.5) * dx
        phi = np.broadcast_to((x ** 3)[:, None], (nx, ny)).copy()
        rate = np.zeros((nx, ny))
        u1 = np.ones((nx, ny))
        advect_rate_k(phi, u1, np.zeros((nx, ny)), dx, dx, NG, rate)
        core = (slice(NG, -NG), slice(NG, -NG))
        expect = -3.0 * np.broadcast_to((x ** 2)[:, None], (nx, ny))
        assert np.allclose(rate[core], expect[core], rtol=1e-10, atol=1e-12)

    def test_fifth_order_on_smooth_data(self):
        def deriv_err(n):
            dx = 1.0 / n
            nx, ny = padded(n, 1)
            x = (np.arange(nx) - NG + 0.5) * dx
            phi = np.broadcast_to(np.sin(2 * np.pi * x)[:, None],
                                  (nx, ny)).copy()
            rate = np.zeros((nx, ny))
            advect_rate_k(phi, np.ones((nx, ny)), np.zeros((nx, ny)),
                          dx, dx, NG, rate)
            core = rate[NG:-NG, NG]
            expect = -2 * np.pi * np.cos(2 * np.pi * x[NG:-NG])
            return np.max(np.abs(core - expect))

        errs = [deriv_err(n) for n in (32, 64, 128)]
        orders = [np.log2(errs[k] / errs[k + 1]) for k in range(2)]
        assert min(orders) > 4.5


class TestDetectFaces:
    def test_uniform_sign_no_faces(self):
        assert detect_faces(np.ones((8, 8))) == []

    def test_single_crossing(self):
        phi = np.ones((10, 1))
        phi[5:] = -1.0
        faces = detect_faces(phi)
        assert faces == [(0, 4, 0)]

    def test_circle_face_count_scales_with_perimeter(self):
        n = 200
        dx = 1.0 / n
        x = (np.arange(n) + 0.5) * dx
        xg, yg = np.meshgrid(x, x, indexing="ij")
        r = 0.3
        phi = np.hypot(xg - 0.5, yg - 0.5) - r
        count = len(detect_faces(phi))
        perimeter_cells = 2.0 * np.pi * r / dx
        assert 0.5 * perimeter_cells < count < 2.0 * perimeter_cells


class TestFlipCells:
    def _tube_field(self, nx=20, x0=0.5):
        grid = Grid(nx=nx, ny=1, dx1=1.0 / nx, dx2=1.0 / nx)
        f = Field2D(grid, [COPPER, AIR])
        x = grid.x_centers()
        ul = prim_to_cons(COPPER, mm.PrimState(8900.0, 1000.0, 100.0, 1e5, I2))
        ur = prim_to_cons(AIR, mm.PrimState(1.0, 1000.0, 0.0, 1e5, I2))
        for i in range(nx):
            f.phi[NG + i, :] = x0 - x[i]
            f.u[NG + i, :, :] = ul if x[i] <= x0 else ur
            f.mat[NG + i, :] = 0 if x[i] <= x0 else 1
        return f

    def _fans_for(self, f):
        nx, ny = f.grid.shape
        fans = dict(
            xm=np.zeros((nx + 1, ny, 8)), xp=np.zeros((nx + 1, ny, 8)),
            xmask=np.zeros((nx + 1, ny), dtype=bool),
            ym=np.zeros((nx, ny + 1, 8)), yp=np.zeros((nx, ny + 1, 8)),
            ymask=np.zeros((nx, ny + 1), dtype=bool))
        return fans

    def test_no_sign_change_is_identity(self):
        f = self._tube_field()
        fans = self._fans_for(f)
        before = f.u.copy()
        n = flip_cells(f.u, f.mat, f.u.copy(), f.phi, fans)
        assert n == 0
        assert np.array_equal(f.u, before)

    def test_rightward_crossing_takes_minus_state(self):
        f = self._tube_field()
        fans = self._fans_for(f)
        # the interface (between cells 9 and 10 at x0 = 0.5) moved right
        # past the center of cell 10
        k = NG + 10
        fans["xmask"][k, :] = True
        minus = np.arange(8.0) + 100.0
        plus = np.arange(8.0) + 200.0
        fans["xm"][k, :, :] = minus
        fans["xp"][k, :, :] = plus
        phi_new = f.phi.copy()
        phi_new[k, :] = +1e-6      # cell joins material 0 (left)
        u0 = f.u.copy()
        n = flip_cells(f.u, f.mat, u0, phi_new, fans)
        assert n == 1
        assert np.array_equal(f.u[k, NG], minus)
        assert f.mat[k, NG] == 0

    def test_leftward_crossing_takes_plus_state(self):
        f = self._tube_field()
        fans = self._fans_for(f)
        k = NG + 10    # face between cells 9 | 10 is the interface
        fans["xmask"][k, :] = True
        minus = np.arange(8.0) + 100.0
        plus = np.arange(8.0) + 200.0
        fans["xm"][k, :, :] = minus
        fans["xp"][k, :, :] = plus
        phi_new = f.phi.copy()
        phi_new[k - 1, :] = -1e-6  # cell 9 joins material 1 (right)
        u0 = f.u.copy()
        u0[..., 1] = -u0[..., 0] * 5.0   # leftward motion
        n = flip_cells(f.u, f.mat, u0, phi_new, fans)
        assert n == 1
        assert np.array_equal(f.u[k - 1, NG], plus)
        assert f.mat[k - 1, NG] == 1

    def test_orphan_flip_raises(self):
        f = self._tube_field()
        fans = self._fans_for(f)
        phi_new = f.phi.copy()
        phi_new[NG + 2, :] = -1.0   # far from any interface
        with pytest.raises(OrphanFlip):
            flip_cells(f.u, f.mat, f.u.copy(), phi_new, fans)

    def test_shallow_nucleation_is_reverted(self):
        # a fresh zero crossing in the middle of one material with no
        # matching neighbor cannot be a physical interface: the cell keeps
        # its material and phi is pulled back to its side
        f = self._tube_field()
        fans = self._fans_for(f)
        phi_new = f.phi.copy()
        k = NG + 2
        phi_new[k, :] = -1e-6      # shallow spurious flip far from interface
        before = f.u.copy()
        n = flip_cells(f.u, f.mat, f.u.copy(), phi_new, fans,
                       dx_min=f.grid.dx1)
        assert n == 0
        assert f.mat[k, NG] == 0
        assert phi_new[k, NG] > 0.0
        assert np.array_equal(f.u, before)

    def test_pinch_off_absorbs_into_neighbor(self):
        # a one-cell island whose zero line vanished: no face fan exists,
        # the cell copies the deepest neighboring cell of its new material
        grid = Grid(nx=12, ny=1, dx1=1.0 / 12, dx2=1.0 / 12)
        f = Field2D(grid, [AIR, AIR])
        base = prim_to_cons(AIR, mm.PrimState(1.0, 5.0, 0.0, 1000.0, I2))
        island = prim_to_cons(AIR, mm.PrimState(0.2, 5.0, 0.0, 900.0, I2))
        f.u[:, :, :] = base
        f.phi[:, :] = 1.0
        f.mat[:, :] = 0
        k = NG + 6
        f.u[k, :, :] = island
        f.phi[k, :] = -1e-4
        f.mat[k, :] = 1
        # mark the neighbors' depth so the copy source is deterministic
        f.phi[k - 1, :] = 0.3
        f.phi[k + 1, :] = 0.8
        fans = dict(
            xm=np.zeros((grid.shape[0] + 1, grid.shape[1], 8)),
            xp=np.zeros((grid.shape[0] + 1, grid.shape[1], 8)),
            xmask=np.zeros((grid.shape[0] + 1, grid.shape[1]), dtype=bool),
            ym=np.zeros((grid.shape[0], grid.shape[1] + 1, 8)),
            yp=np.zeros((grid.shape[0], grid.shape[1] + 1, 8)),
            ymask=np.zeros((grid.shape[0], grid.shape[1] + 1), dtype=bool))
        phi_new = f.phi.copy()
        phi_new[k, :] = +1e-4      # island evaporates
        n = flip_cells(f.u, f.mat, f.u.copy(), phi_new, fans)
        assert n == 1
        assert f.mat[k, NG] == 0
        assert np.array_equal(f.u[k, NG], base)   # deepest neighbor is k+1


class TestInterfaceTransport:
    def test_uniform_advection_tracks_exactly(self):
        # the zero crossing follows x0 + u*t to time-integration accuracy
        nx = 100
        grid = Grid(nx=nx, ny=1, dx1=1.0 / nx, dx2=1.0 / nx)
        f = Field2D(grid, [COPPER, AIR])
        x = grid.x_centers()
        ul = prim_to_cons(COPPER, mm.PrimState(8900.0, 1000.0, 100.0, 1e5, I2))
        ur = prim_to_cons(AIR, mm.PrimState(1.0, 1000.0, 0.0, 1e5, I2))
        for i in range(nx):
            f.phi[NG + i, :] = 0.5 - x[i]
            f.u[NG + i, :, :] = ul if x[i] <= 0.5 else ur
            f.mat[NG + i, :] = 0 if x[i] <= 0.5 else 1
        cfg = SchemeConfig(t_end=1.5e-4)
        t = 0.0
        while t < cfg.t_end * (1 - 1e-12):
            dt = min(compute_dt(f, 0.6), cfg.t_end - t)
            step_rk2(f, cfg, dt)
            t += dt
        phi = f.phi[grid.interior()][:, 0]
        k = np.argmax(np.sign(phi[:-1]) != np.sign(phi[1:]))
        x_zero = x[k] + (x[k + 1] - x[k]) * phi[k] / (phi[k] - phi[k + 1])
        assert abs(x_zero - (0.5 + 1000.0 * cfg.t_end)) < 0.2 / nx

    def test_interface_stays_one_face_wide(self):
        nx = 100
        grid = Grid(nx=nx, ny=1, dx1=1.0 / nx, dx2=1.0 / nx)
        f = Field2D(grid, [AIR, AIR])
        x = grid.x_centers()
        wl = mm.PrimState(1.0, 0.0, 0.0, 1000.0, I2)
        wr = mm.PrimState(1.0, 0.0, 0.0, 0.01, I2)
        ul = prim_to_cons(AIR, wl)
        ur = prim_to_cons(AIR, wr)
        for i in range(nx):
            f.phi[NG + i, :] = 0.5 - x[i]
            f.u[NG + i, :, :] = ul if x[i] <= 0.5 else ur
            f.mat[NG + i, :] = 0 if x[i] <= 0.5 else 1
        cfg = SchemeConfig(t_end=0.012)
        t = 0.0
        while t < cfg.t_end * (1 - 1e-12):
            dt = min(compute_dt(f, 0.6), cfg.t_end - t)
            step_rk2(f, cfg, dt)
            t += dt
            mat = f.mat[grid.interior()][:, 0]
            assert int(np.sum(mat[:-1] != mat[1:])) == 1

    def test_material_ids_match_levelset_sign(self):
        phi = np.linspace(1.0, -1.0, 11)
        assert np.array_equal(material_of_sign(phi),
                              (phi < 0).astype(np.int64))
