"""Generalized plant assembly checked against brute-force multirate simulation."""

import numpy as np
import pytest
from scipy.signal import lfilter

from conftest import random_stable_ss
from sdabe.audio import Frame
from sdabe.filters import design_fixed_filters
from sdabe.lpc import levinson_lpc
from sdabe.plant import PlantError, build_generalized_plant, closed_loop, open_loop_error
from sdabe.statespace import lift_signal
from sdabe.sysid import SignalModel, prony_fit


def _models(rng):
    """A random stable frame model and an LPC fit of a matching frame."""
    x = rng.standard_normal(400)
    F = prony_fit(
        Frame(samples=x, rate=16000, index=0, hop=200), max_poles=6, max_zeros=4
    )
    nb = Frame(samples=x[::2], rate=8000, index=0, hop=100)
    A_lpc = levinson_lpc(nb)
    return F, A_lpc


def _brute_force_error(F, lpf, A_lpc, ktilde, w):
    """Run the physical multirate chain on a q-sample delayed input.

    Returns the lifted error stream seen by the causalized plant.
    """
    q = lpf.half_delay_q
    wd = np.concatenate([np.zeros(q), w])
    s = lfilter(F.num, F.den, wd)
    v = lpf.apply(s)
    d = v[::2]
    r = lfilter(A_lpc.inverse_poly(), [1.0], d)
    u12 = ktilde.simulate(r.reshape(-1, 1))
    y_fast = np.empty(len(wd))
    y_fast[0::2] = u12[:, 0]
    y_fast[1::2] = u12[:, 1]
    e = s - y_fast
    return lift_signal(e)[: len(w) // 2]


def test_closed_loop_matches_brute_force_simulation(rng):
    lpf, _ = design_fixed_filters()
    for _ in range(4):
        F, A_lpc = _models(rng)
        plant = build_generalized_plant(F, lpf, A_lpc)
        ktilde = random_stable_ss(rng, 3, inputs=1, outputs=2, radius=0.7)
        w = rng.standard_normal(200)
        e_ref = _brute_force_error(F, lpf, A_lpc, ktilde, w)
        e_plant = closed_loop(plant, ktilde).simulate(lift_signal(w))
        assert np.max(np.abs(e_plant - e_ref)) < 1e-8


def test_open_loop_matches_delayed_signal_model(rng):
    lpf, _ = design_fixed_filters()
    F, A_lpc = _models(rng)
    plant = build_generalized_plant(F, lpf, A_lpc)
    q = lpf.half_delay_q
    w = rng.standard_normal(200)
    s = lfilter(F.num, F.den, np.concatenate([np.zeros(q), w]))
    z = open_loop_error(plant).simulate(lift_signal(w))
    assert np.max(np.abs(z - lift_signal(s)[: len(w) // 2])) < 1e-8


def test_plant_dimensions(rng):
    lpf, _ = design_fixed_filters()
    F, A_lpc = _models(rng)
    plant = build_generalized_plant(F, lpf, A_lpc)
    assert plant.n_w == 2
    assert plant.n_z == 2
    assert plant.n_y == 1
    assert plant.half_delay_q == lpf.half_delay_q


def test_rejects_causal_lpf(rng):
    _, hpf = design_fixed_filters()
    F, A_lpc = _models(rng)
    with pytest.raises(PlantError):
        build_generalized_plant(F, hpf, A_lpc)


def test_rejects_unstable_signal_model(rng):
    lpf, _ = design_fixed_filters()
    _, A_lpc = _models(rng)
    F_bad = SignalModel(
        num=np.array([1.0]), den=np.array([1.0, -1.5]),
        excitation="voiced", fit_error=0.0,
    )
    with pytest.raises(PlantError):
        build_generalized_plant(F_bad, lpf, A_lpc)
