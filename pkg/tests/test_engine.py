import math
from dataclasses import replace

import numpy as np
import pytest

from etseek.config import Scenario
from etseek.engine import NonFiniteStateError, integrate_step, run_simulation
from etseek.field import QuadraticField
from etseek.trigger import TriggerConstants
from etseek.vehicle import DitherParams, VehicleState
from tests.conftest import PAPER_SIV_GAIN


class TestIntegrateStep:
    def test_polynomial_exactness(self):
        assert integrate_step(lambda t, x: 1.0, 0.0, 0.0, 0.1) == pytest.approx(
            0.1, abs=1e-16
        )

    def test_exponential_accuracy(self):
        value = integrate_step(lambda t, x: x, 1.0, 0.0, 0.1)
        assert value == pytest.approx(1.1051708333333333, abs=1e-15)  # RK4 truncation
        assert value == pytest.approx(1.105170917, abs=1e-7)  # against exp(0.1)

    def test_zero_derivative_keeps_state_bitwise(self):
        state = (0.1 + 0.2, -0.7, 1.9)
        out = integrate_step(lambda t, s: (0.0, 0.0, 0.0), state, 3.0, 0.5)
        assert out == state

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            integrate_step(lambda t, x: x, 1.0, 0.0, 0.0)


def equilibrium_scenario():
    # No dithers, starting exactly at the source: nothing can move.
    return Scenario(
        field=QuadraticField(10.0, 5.0, math.pi / 6, 7.0),
        dithers=DitherParams(0.0, 0.0, 0.0, 4.0, 4.0, 2.0),
        gain=PAPER_SIV_GAIN,
        trigger=TriggerConstants(0.5, 0.195, 0.0),
        initial=VehicleState(10.0, 5.0, math.pi / 6),
        dt=1e-3,
        t_final=0.05,
    )


class TestRunSimulation:
    def test_equilibrium_without_excitation(self):
        trace, metrics = run_simulation(equilibrium_scenario())
        assert metrics.num_events == 1
        assert trace.events[0, 0] == 0.0
        assert np.all(trace.x == 10.0)
        assert np.all(trace.y == 5.0)
        assert np.all(trace.theta == math.pi / 6)
        assert metrics.final_error_norm == 0.0

    def test_determinism(self, smallgain_scenario):
        sc = replace(smallgain_scenario, t_final=0.5)
        t1, m1 = run_simulation(sc)
        t2, m2 = run_simulation(sc)
        for name in ("t", "x", "y", "theta", "q", "g1", "u1", "xi", "event"):
            assert np.array_equal(t1.column(name), t2.column(name))
        assert m1.as_dict() == m2.as_dict()

    def test_grid_and_flags(self, smallgain_scenario):
        sc = replace(smallgain_scenario, t_final=0.2)
        trace, metrics = run_simulation(sc)
        assert len(trace) == metrics.num_steps + 1
        assert np.allclose(np.diff(trace.t), sc.dt, rtol=0.0, atol=1e-12)
        # event flags and the event log name the same instants
        assert np.array_equal(trace.t[trace.event == 1], trace.events[:, 0])

    def test_zoh_and_error_reset(self, smallgain_scenario):
        sc = replace(smallgain_scenario, t_final=0.2)
        trace, _ = run_simulation(sc)
        idx = trace.event_indices()
        assert idx.shape[0] >= 2
        # latched gradient equals the trace gradient at each event instant
        assert np.array_equal(trace.events[:, 1], trace.g1[idx])
        assert np.array_equal(trace.events[:, 2], trace.g2[idx])
        assert np.array_equal(trace.events[:, 3], trace.g3[idx])
        # control is bit-constant from one event up to the next
        for a, b in zip(idx[:-1], idx[1:]):
            assert np.unique(trace.u1[a:b]).size == 1
            assert np.unique(trace.u2[a:b]).size == 1
        # the estimate itself keeps moving while the control is held
        a, b = idx[0], idx[1]
        if b - a > 1:
            assert np.unique(trace.g2[a:b]).size > 1

    def test_trigger_sign_convention(self, smallgain_scenario):
        sc = replace(smallgain_scenario, t_final=0.2)
        trace, _ = run_simulation(sc)
        idx = trace.event_indices()
        # after the forced start event, events happen exactly at Xi < 0
        assert np.all(trace.xi[idx[1:]] < 0.0)
        interior = np.setdiff1d(np.arange(idx[0] + 1, idx[-1]), idx)
        assert np.all(trace.xi[interior] >= 0.0)

    def test_continuous_mode_updates_every_step(self, smallgain_scenario):
        sc = replace(
            smallgain_scenario, mode="continuous-control", t_final=0.05
        )
        trace, metrics = run_simulation(sc)
        assert metrics.num_events == metrics.num_steps
        assert metrics.min_inter_event == pytest.approx(sc.dt, rel=1e-9)

    def test_sampled_data_matches_continuous_at_dt(self, smallgain_scenario):
        base = replace(smallgain_scenario, t_final=0.05)
        cont, _ = run_simulation(replace(base, mode="continuous-control"))
        samp, _ = run_simulation(
            replace(base, mode="sampled-data", sample_period=base.dt)
        )
        assert np.array_equal(cont.u1, samp.u1)
        assert np.array_equal(cont.u2, samp.u2)

    def test_sampled_data_period(self, smallgain_scenario):
        sc = replace(
            smallgain_scenario, mode="sampled-data", sample_period=0.01, t_final=0.1
        )
        trace, metrics = run_simulation(sc)
        expected = np.arange(0.0, 0.1, 0.01)
        assert np.allclose(trace.events[:, 0], expected, atol=1e-9)
        assert metrics.min_inter_event == pytest.approx(0.01, rel=1e-6)

    def test_average_mode_shares_grid_with_full(self, smallgain_scenario):
        sc = replace(smallgain_scenario, t_final=0.2)
        full, _ = run_simulation(sc)
        avg, _ = run_simulation(replace(sc, mode="average"))
        assert avg.system == "average"
        assert np.array_equal(full.t, avg.t)
        # the averaged loop starts from the initial estimation error
        d, f = sc.dithers, sc.field
        assert avg.g1[0] == sc.initial.x - f.x_star
        assert avg.g2[0] == pytest.approx(
            sc.initial.y + 0.5 * d.a2 - f.y_star, abs=1e-15
        )

    def test_coarse_grid_warns(self, smallgain_scenario):
        coarse = replace(smallgain_scenario, dt=0.05, t_final=0.2)
        with pytest.warns(RuntimeWarning, match="tau"):
            run_simulation(coarse)

    def test_non_finite_state_aborts(self, siv_scenario):
        # The published gain under continuous updates of the raw demodulated
        # estimate escapes in finite time; the engine must turn the overflow
        # into a diagnostic rather than NaNs.
        sc = replace(siv_scenario, mode="continuous-control", t_final=3.0)
        with pytest.raises(NonFiniteStateError):
            run_simulation(sc)

    def test_smallgain_converges_end_to_end(self, smallgain_scenario):
        """Full-horizon run of the compliant scenario reaches the source.

        The neighborhood radius is set by the dither amplitudes and the
        averaged bias amplification; observed final errors sit near 0.9 m
        (3-norm over position and heading).
        """
        trace, metrics = run_simulation(smallgain_scenario)
        assert metrics.final_error_norm <= 1.5
        assert metrics.num_events >= 2
        assert metrics.min_inter_event is not None and metrics.min_inter_event > 0.0
        start_error = math.hypot(
            smallgain_scenario.initial.x - smallgain_scenario.field.x_star,
            smallgain_scenario.initial.y - smallgain_scenario.field.y_star,
        )
        final_xy = math.hypot(
            trace.x[-1] - smallgain_scenario.field.x_star,
            trace.y[-1] - smallgain_scenario.field.y_star,
        )
        assert final_xy < 2.0 * start_error
