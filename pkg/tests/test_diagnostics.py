"""Diagnostics unit tests on synthetic fields and small runs."""

import math

import numpy as np
import pytest

from heleshaw_lab import Field, GrowthLaw, Mesh, SimConfig, max_density, run
from heleshaw_lab.diagnostics import (
    barrier_radius,
    complementarity_residual,
    detect_pressure_jump,
    front_speed_estimate,
    graph_residual,
    mass_bound_margin,
    msweep_convergence,
    records_for_series,
    semiconvexity_lower_bound,
    semiconvexity_slack,
)
from heleshaw_lab.errors import MeshError
from heleshaw_lab.solver import SimState, SnapshotSeries, make_initial_data, state_from_density


LAW = GrowthLaw(a=5.0, p_M=1.0)


def cart(n=200, L=4.0):
    return Mesh(geometry="cartesian1d", n_cells=n, L=L)


class TestComplementarity:
    def test_zero_field(self):
        assert complementarity_residual(Field(cart(), np.zeros(200)), LAW) == 0.0

    def test_no_law_is_minus_gradient_energy(self):
        mesh = cart()
        f = Field(mesh, mesh.centers)
        # dual-cell quadrature misses the two boundary half-cells: 8 - h
        assert complementarity_residual(f, None) == pytest.approx(-(8.0 - f.mesh.h), rel=1e-12)

    def test_second_order_on_grid_aligned_wave(self):
        lam = math.sqrt(5.0)
        vals = []
        for n in (500, 1000, 2000):
            mesh = Mesh(geometry="cartesian1d", n_cells=n, L=10.0)
            x0 = 2.0 + 0.5 * mesh.h  # front on a cell center
            s = mesh.centers - x0
            p = np.where(s < 0, 1.0 - np.exp(lam * s), 0.0)
            vals.append(abs(complementarity_residual(Field(mesh, p), LAW)))
        assert vals[0] / vals[1] == pytest.approx(4.0, rel=0.15)
        assert vals[1] / vals[2] == pytest.approx(4.0, rel=0.15)


class TestGraphResidual:
    def test_zero_pressure(self):
        mesh = cart()
        assert graph_residual(Field(mesh, np.full(200, 0.5)), Field(mesh, np.zeros(200))) == 0.0

    def test_saturated_density(self):
        mesh = cart()
        assert graph_residual(Field(mesh, np.ones(200)), Field(mesh, np.ones(200))) == 0.0

    def test_positive_on_mush(self):
        mesh = cart()
        r = graph_residual(Field(mesh, np.full(200, 0.6)), Field(mesh, np.full(200, 0.5)))
        assert r == pytest.approx(0.2)

    def test_mesh_mismatch(self):
        with pytest.raises(MeshError):
            graph_residual(Field(cart(100), np.zeros(100)), Field(cart(200), np.zeros(200)))


class TestSemiconvexity:
    def test_lower_bound_values(self):
        # W(t) = -r e^{-(m-1) r t} / (1 - e^{-(m-1) r t}), r = a p_M
        m, t = 3.0, 0.1
        r = 5.0
        x = (m - 1.0) * r * t
        expect = -r * math.exp(-x) / (1.0 - math.exp(-x))
        assert semiconvexity_lower_bound(t, m, LAW) == pytest.approx(expect)

    def test_bound_relaxes_to_zero(self):
        assert semiconvexity_lower_bound(1e6, 40.0, LAW) == 0.0
        assert semiconvexity_lower_bound(1.0, 40.0, LAW) > semiconvexity_lower_bound(0.01, 40.0, LAW)

    def test_degenerates_at_origin(self):
        with pytest.raises(ValueError):
            semiconvexity_lower_bound(0.0, 2.0, LAW)

    def test_slack_positive_on_smooth_subsolution(self):
        # parabola p = p_M - x^2 has Lap p + Phi(p) = -2 + 5 x^2 >= W for late t
        mesh = cart(200, 1.0)
        p = Field(mesh, np.clip(1.0 - mesh.centers ** 2, 0.0, None))
        assert semiconvexity_slack(p, 10.0, 40.0, LAW) > -2.1


class TestMassBound:
    def test_margin_nonpositive_without_growth(self):
        mesh = cart(100)
        cfg = SimConfig(m=2.0, mesh=mesh, T=0.05, snapshot_times=(0.0, 0.05),
                        initial={"kind": "indicator", "R": 1.0, "level": 0.5})
        s = run(cfg)
        assert mass_bound_margin(s) <= 1e-12


class TestFrontSpeed:
    def _series(self, speed=2.0, n_snap=11, T=1.0):
        mesh = cart(400, 8.0)
        cfg = SimConfig(m=2.0, mesh=mesh, T=T,
                        snapshot_times=tuple(np.linspace(0.0, T, n_snap)),
                        initial={"kind": "indicator", "R": 1.0, "level": 0.5})
        snaps = []
        for t in cfg.snapshot_times:
            R = 1.0 + speed * t
            p = np.clip(1.0 - np.abs(np.abs(mesh.centers) - R), 0.0, None)
            snaps.append(SimState(t, Field(mesh, p), Field(mesh, p)))
        return SnapshotSeries(cfg, snaps, [])

    def test_recovers_linear_front(self):
        assert front_speed_estimate(self._series(speed=2.0)) == pytest.approx(2.0, abs=0.02)

    def test_needs_enough_snapshots(self):
        with pytest.raises(ValueError):
            front_speed_estimate(self._series(n_snap=4))


class TestPressureJump:
    def _series(self, jumps):
        mesh = cart(100)
        cfg = SimConfig(m=40.0, mesh=mesh, T=1.0, growth=LAW,
                        snapshot_times=tuple(t for t, _ in jumps),
                        initial={"kind": "indicator", "R": 1.0, "level": 0.5})
        snaps = [SimState(t, Field(mesh, np.zeros(100)), Field(mesh, np.full(100, v)))
                 for t, v in jumps]
        return SnapshotSeries(cfg, snaps, [])

    def test_detects_earliest_jump(self):
        s = self._series([(0.0, 0.0), (0.1, 0.05), (0.2, 0.9), (0.3, 0.95)])
        t, size = detect_pressure_jump(s)
        assert t == pytest.approx(0.15)
        assert size == pytest.approx(0.85)

    def test_none_without_jump(self):
        s = self._series([(0.0, 0.0), (0.1, 0.1), (0.2, 0.2)])
        assert detect_pressure_jump(s) is None

    def test_rejects_bad_threshold(self):
        s = self._series([(0.0, 0.0), (0.1, 0.9)])
        with pytest.raises(ValueError):
            detect_pressure_jump(s, delta=0.0)


class TestBarrier:
    def test_monotone_in_time_and_contains_initial_support(self):
        mesh = cart(200)
        cfg = SimConfig(m=5.0, mesh=mesh, T=1.0, growth=LAW,
                        initial={"kind": "indicator", "R": 1.0, "level": 0.5},
                        snapshot_times=(0.0, 1.0))
        rho0, _ = make_initial_data(cfg.initial, mesh, cfg)
        rs = [barrier_radius(t, cfg, rho0) for t in (0.01, 0.1, 0.5, 1.0, 2.0)]
        assert all(b > a for a, b in zip(rs, rs[1:]))
        assert rs[0] > 1.0

    def test_none_without_growth(self):
        mesh = cart(100)
        cfg = SimConfig(m=2.0, mesh=mesh, T=1.0,
                        initial={"kind": "indicator", "R": 1.0, "level": 0.5},
                        snapshot_times=(0.0, 1.0))
        rho0, _ = make_initial_data(cfg.initial, mesh, cfg)
        assert barrier_radius(0.5, cfg, rho0) is None


class TestRecords:
    def test_records_shape_and_finiteness(self):
        mesh = cart(100)
        cfg = SimConfig(m=5.0, mesh=mesh, T=0.05, growth=LAW,
                        snapshot_times=(0.0, 0.025, 0.05),
                        initial={"kind": "indicator", "R": 1.0, "level": max_density(5.0, 1.0)})
        s = run(cfg)
        recs = records_for_series(s)
        assert len(recs) == 3
        assert recs[0].semiconvexity_slack is None  # undefined at t = 0
        for r in recs:
            assert np.isfinite(r.mass) and np.isfinite(r.complementarity_residual)
            assert r.mass_bound_margin <= 1e-6


class TestMsweepConvergence:
    def _mini(self, ms, mesh, times):
        runs = {}
        for m in ms:
            cfg = SimConfig(m=m, mesh=mesh, T=times[-1], growth=LAW,
                            snapshot_times=times,
                            initial={"kind": "indicator", "R": 1.0, "level": max_density(m, 1.0)})
            runs[m] = run(cfg)
        return runs

    def test_monotone_on_short_sweep(self):
        mesh = cart(100, 4.0)
        times = tuple(np.linspace(0.0, 0.1, 3))
        runs = self._mini((5.0, 20.0), mesh, times)
        from heleshaw_lab.sharp import geometric_reference, spheroid_evolve

        traj = spheroid_evolve(1.0, LAW, N=1, T=0.1, dt=0.01)
        ts = [r[0] for r in traj]
        Rs = [r[1] for r in traj]
        ref = geometric_reference([(t, float(np.interp(t, ts, Rs))) for t in times], mesh, LAW, dim=1)
        rep = msweep_convergence(runs, ref)
        assert [r["m"] for r in rep.rows] == [5.0, 20.0]
        assert rep.rows[0]["l1_rho_vs_prev"] is None
        assert rep.rows[1]["l1_rho_vs_prev"] > 0

    def test_rejects_nonuniform_times(self):
        mesh = cart(100, 4.0)
        times = (0.0, 0.02, 0.1)
        runs = self._mini((5.0,), mesh, times)
        ref = [(t, Field(mesh, np.zeros(100)), Field(mesh, np.zeros(100))) for t in times]
        with pytest.raises(MeshError):
            msweep_convergence(runs, ref)

    def test_rejects_mesh_mismatch(self):
        mesh = cart(100, 4.0)
        times = tuple(np.linspace(0.0, 0.1, 3))
        runs = self._mini((5.0,), mesh, times)
        other = cart(128, 4.0)
        ref = [(t, Field(other, np.zeros(128)), Field(other, np.zeros(128))) for t in times]
        with pytest.raises(MeshError):
            msweep_convergence(runs, ref)
