"""Adaptive integrator: accuracy, event localization, controls, and the
problem fields it is used with."""

import math

import numpy as np
import pytest

from schubart import dynamics as dyn
from schubart import odeint as oi
from schubart.dynamics import NEWCOORDS, DEVANEY, State
from schubart.errors import EvaluationError
from schubart.odeint import Controls, EventSpec


def _circle_rhs(s, y):
    # (r, v) rotate; exact solution period 2 pi
    return np.array([-y[1], y[0], 0.0, 0.0])


def _drift_rhs(s, y):
    # angle advances linearly; handy for exact event locations
    return np.array([0.0, 0.0, 1.0, 0.0])


def test_accuracy_tracks_tolerance():
    seed = State(NEWCOORDS, 1.0, 0.0, 0.0, 0.0)
    errs = []
    for rtol in (1e-6, 1e-9, 1e-12):
        traj = oi.integrate(_circle_rhs, seed,
                            controls=Controls(rtol=rtol, atol=1e-14,
                                              max_s=2.0 * math.pi))
        end = traj.end_state
        errs.append(math.hypot(end.r - 1.0, end.v))
    assert errs[0] < 1e-4
    assert errs[1] < 1e-7
    assert errs[2] < 1e-10
    assert errs[2] < errs[0]


def test_dense_sampling_grid():
    seed = State(NEWCOORDS, 1.0, 0.0, 0.0, 0.0)
    traj = oi.integrate(_circle_rhs, seed,
                        controls=Controls(max_s=1.0, sample_ds=0.01))
    s, y = traj.as_arrays()
    assert s[0] == 0.0
    # uniform interior grid at the requested spacing
    assert np.max(np.abs(np.diff(s)[:-1] - 0.01)) < 1e-12
    # interpolant accuracy on the circle
    assert np.max(np.abs(y[:, 0] - np.cos(s))) < 1e-9


def test_event_localization_exact():
    seed = State(NEWCOORDS, 0.0, 0.0, -1.0, 0.0)
    traj = oi.integrate(_drift_rhs, seed,
                        events=[EventSpec.angle(0.25)],
                        controls=Controls(max_s=3.0))
    assert traj.termination == "time-limit"
    assert len(traj.events) == 1
    assert abs(traj.events[0].s - 1.25) < 1e-12
    assert traj.events[0].kind == "angle-crossing"


def test_event_direction_filter():
    seed = State(NEWCOORDS, 1.0, 0.0, 0.0, 0.0)
    # r = cos(s): crosses 0.5 downward at s = pi/3, upward at 5 pi/3
    down = oi.integrate(_circle_rhs, seed,
                        events=[EventSpec.r_below(0.5, action="record")],
                        controls=Controls(max_s=2.0 * math.pi))
    hits = [h for h in down.events if h.kind == "r-below"]
    assert len(hits) == 1
    assert abs(hits[0].s - math.pi / 3.0) < 1e-10


def test_stop_action_truncates():
    seed = State(NEWCOORDS, 0.0, 0.0, -1.0, 0.0)
    traj = oi.integrate(_drift_rhs, seed,
                        events=[EventSpec.angle(0.0, action="stop")],
                        controls=Controls(max_s=10.0))
    assert traj.termination == "event-stop"
    assert abs(traj.end_s - 1.0) < 1e-12
    assert abs(traj.end_state.angle) < 1e-12


def test_simultaneous_events_ordered_by_spec_index():
    seed = State(NEWCOORDS, 0.0, 0.0, -1.0, 0.0)
    evs = [EventSpec.angle(0.5), EventSpec.angle(0.5)]
    traj = oi.integrate(_drift_rhs, seed, events=evs,
                        controls=Controls(max_s=3.0))
    assert len(traj.events) == 2
    assert traj.events[0].s == pytest.approx(traj.events[1].s, abs=1e-13)
    assert traj.events[0].spec is evs[0]
    assert traj.events[1].spec is evs[1]


def test_nan_seed_raises():
    bad = State(NEWCOORDS, float("nan"), 0.0, 0.0, 0.0)
    with pytest.raises(EvaluationError):
        oi.integrate(_circle_rhs, bad)


def test_bit_determinism(pyr2):
    rhs = oi.field_for(pyr2, NEWCOORDS)
    w0 = dyn.solve_w(pyr2, 0.2, 0.1, -0.4)
    seed = State(NEWCOORDS, 0.2, 0.1, -0.4, w0)
    runs = []
    for _ in range(2):
        traj = oi.integrate(rhs, seed, events=[EventSpec.angle(0.3)],
                            controls=Controls(max_s=5.0))
        s, y = traj.as_arrays()
        runs.append((s, y, [h.s for h in traj.events]))
    assert np.array_equal(runs[0][0], runs[1][0])
    assert np.array_equal(runs[0][1], runs[1][1])
    assert runs[0][2] == runs[1][2]


def test_energy_drift_newcoords(all_problems, rng):
    for p in all_problems:
        rhs = oi.field_for(p, NEWCOORDS)
        w0 = dyn.solve_w(p, 0.1, 0.0, -0.35)
        seed = State(NEWCOORDS, 0.1, 0.0, -0.35, w0)
        traj = oi.integrate(rhs, seed,
                            controls=Controls(rtol=1e-12, atol=1e-14,
                                              max_s=10.0, sample_ds=0.25))
        # relative to the magnitude of the energy-relation terms (escaping
        # runs reach large r and v, where the relation cancels large terms)
        drift = max(
            abs(dyn.energy_residual(p, st)) / (1.0 + st.r + st.v * st.v)
            for _, st in traj.samples
        )
        assert drift < 1e-10


def test_energy_drift_devaney(pyr2):
    rhs = oi.field_for(pyr2, DEVANEY)
    # on-shell devaney seed: w^2 = 2 f (1 + (f/W)(r h - v^2/2))
    phi, r, v = -0.3, 0.2, 0.1
    from schubart.problems import potential
    f = potential(pyr2, phi, "f")
    wq = potential(pyr2, phi, "W")
    w = math.sqrt(2.0 * f * (1.0 + (f / wq) * (-r - 0.5 * v * v)))
    seed = State(DEVANEY, r, v, phi, w)
    assert abs(dyn.energy_residual(pyr2, seed)) < 1e-14
    traj = oi.integrate(rhs, seed, controls=Controls(max_s=3.0, sample_ds=0.1))
    # the devaney residual divides by f(phi): ill-conditioned near the arms,
    # so check it on the interior samples only
    drift = max(abs(dyn.energy_residual(pyr2, st))
                for _, st in traj.samples if abs(st.angle) < 1.2)
    assert drift < 1e-9


def test_homothetic_orbit_stays_on_ray(all_problems):
    # brake release at the midpoint critical shape: theta and w stay zero
    for p in all_problems:
        ts = 0.0
        r0 = dyn.v_of_theta(p, ts)
        rhs = oi.field_for(p, NEWCOORDS)
        seed = State(NEWCOORDS, r0, 0.0, ts, 0.0)
        traj = oi.integrate(rhs, seed,
                            controls=Controls(max_s=4.0, sample_ds=0.1))
        for _, st in traj.samples:
            assert abs(st.angle - ts) < 1e-9
            assert abs(st.w) < 1e-9
        # the collapse is monotone: v decreases from 0
        vs = [st.v for _, st in traj.samples]
        assert all(b <= a + 1e-12 for a, b in zip(vs, vs[1:]))


def test_collision_manifold_flow(pyr2, spa3, pla3):
    # r pinned at zero; v is a Lyapunov function (nondecreasing)
    for p in (pyr2, spa3, pla3):
        wc, _ = dyn.curly_w(p, -1.0)
        c = dyn.chart_eval(p.chart, -1.0).c
        w0 = math.sqrt(2.0 * wc / c) * 0.7
        csq = math.cos(-1.0) ** 2
        v0 = -math.sqrt((2.0 * wc - w0 * w0 * c) / csq)
        seed = State(NEWCOORDS, 0.0, v0, -1.0, w0)
        traj = oi.integrate_collision_manifold(
            p, seed, controls=Controls(max_s=6.0, sample_ds=0.2))
        for _, st in traj.samples:
            assert st.r == 0.0
        vs = [st.v for _, st in traj.samples]
        assert all(b >= a - 1e-12 for a, b in zip(vs, vs[1:]))


def test_collision_manifold_rejects_positive_r(pyr2):
    from schubart.errors import DomainError
    with pytest.raises(DomainError):
        oi.integrate_collision_manifold(
            pyr2, State(NEWCOORDS, 0.5, 0.0, -1.0, 0.5))


def test_r_exceeds_stop(pla10):
    # this seed runs into a binary-cluster funnel and r grows without bound
    rhs = oi.field_for(pla10, NEWCOORDS)
    w0 = dyn.solve_w(pla10, 0.1, 0.0, -0.35)
    seed = State(NEWCOORDS, 0.1, 0.0, -0.35, w0)
    traj = oi.integrate(rhs, seed, events=[EventSpec.r_exceeds(5.0)],
                        controls=Controls(max_s=100.0))
    assert traj.termination == "event-stop"
    assert traj.end_state.r == pytest.approx(5.0, abs=1e-8)
