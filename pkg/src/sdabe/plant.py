"""Construction of the causal single-rate feedback plant for filter synthesis.

The multirate error chain (signal model F at 16 kHz, zero-phase half-band
low-pass, downsampling, LPC inverse filter at 8 kHz, the synthesis filter
feeding the reconstruction) is lifted by 2 into a single-rate system and made
causal by a q/2-step delay on the reference branch.  The result is in
estimation form: a two-channel reference z, a scalar measurement y, and the
error e = z - u closed by the lifted controller u = K y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FirFilter
from .lpc import LpcModel
from .statespace import StateSpaceModel, delay, lift2, select_outputs, series, tf_to_ss
from .sysid import SignalModel


class PlantError(ValueError):
    pass


@dataclass(frozen=True)
class GeneralizedPlant:
    """Estimation-form plant: x+ = Ax + Bw, z = C1 x + D11 w, y = C2 x + D21 w,
    closed by u = K y with error e = z - u."""

    A: np.ndarray
    B: np.ndarray
    C1: np.ndarray
    D11: np.ndarray
    C2: np.ndarray
    D21: np.ndarray
    half_delay_q: int = 0

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def n_w(self) -> int:
        return self.B.shape[1]

    @property
    def n_z(self) -> int:
        return self.C1.shape[0]

    @property
    def n_y(self) -> int:
        return self.C2.shape[0]

    @property
    def n_u(self) -> int:
        # control subtracts channel-wise from the reference output
        return self.n_z


def plant_from_channels(g_z: StateSpaceModel, g_y: StateSpaceModel, q: int = 0) -> GeneralizedPlant:
    """Stack a reference channel and a measurement channel sharing the input."""
    if g_z.p != g_y.p:
        raise PlantError("reference and measurement channels must share the input")
    nz, ny = g_z.n, g_y.n
    A = np.block(
        [[g_z.A, np.zeros((nz, ny))], [np.zeros((ny, nz)), g_y.A]]
    )
    B = np.vstack([g_z.B, g_y.B])
    C1 = np.hstack([g_z.C, np.zeros((g_z.m, ny))])
    C2 = np.hstack([np.zeros((g_y.m, nz)), g_y.C])
    return GeneralizedPlant(
        A=A, B=B, C1=C1, D11=g_z.D, C2=C2, D21=g_y.D, half_delay_q=q
    )


def build_generalized_plant(
    F: SignalModel, lpf: FirFilter, A_lpc: LpcModel
) -> GeneralizedPlant:
    """Assemble the lifted, causalized plant from a frame's models.

    Reference channel: q/2-step delay in series with the lifted signal model.
    Measurement channel: lifted (causal-LPF cascade of F), first lifted
    component (the downsampled narrowband signal), then the LPC inverse filter
    at the slow rate.
    """
    if lpf.causal or lpf.half_delay_q % 2 != 0:
        raise PlantError("plant needs the zero-phase LPF with even half delay q")
    q = lpf.half_delay_q
    f_ss = tf_to_ss(F.num, F.den)
    if not f_ss.is_stable():
        raise PlantError("signal model F must be stable")
    g_z = series(lift2(f_ss), delay(q // 2, channels=2))
    f_a = tf_to_ss(np.convolve(lpf.taps, F.num), F.den)
    nb_branch = select_outputs(lift2(f_a), [0])
    a_fir = tf_to_ss(A_lpc.inverse_poly(), [1.0])
    g_y = series(nb_branch, a_fir)
    if not g_y.is_stable():
        raise PlantError("measurement channel must be stable")
    return plant_from_channels(g_z, g_y, q=q)


def open_loop_error(plant: GeneralizedPlant) -> StateSpaceModel:
    """The exogenous-to-reference map (error system under K = 0)."""
    return StateSpaceModel(plant.A, plant.B, plant.C1, plant.D11)


def closed_loop(plant: GeneralizedPlant, ctrl: StateSpaceModel) -> StateSpaceModel:
    """Error system e = z - K y for a controller u = K y."""
    if ctrl.p != plant.n_y or ctrl.m != plant.n_z:
        raise PlantError(
            f"controller must map {plant.n_y} measurement(s) to {plant.n_z} output(s)"
        )
    n, nk = plant.n, ctrl.n
    A = np.block(
        [
            [plant.A, np.zeros((n, nk))],
            [ctrl.B @ plant.C2, ctrl.A],
        ]
    )
    B = np.vstack([plant.B, ctrl.B @ plant.D21])
    C = np.hstack([plant.C1 - ctrl.D @ plant.C2, -ctrl.C])
    D = plant.D11 - ctrl.D @ plant.D21
    return StateSpaceModel(A, B, C, D)
