"""De-lift the synthesized controller into the scalar reconstruction filter,
cascade it with the high-pass, and truncate to the 21-tap FIR feature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import FirFilter
from .statespace import StateSpaceModel, expand_z2, series, tf_to_ss

FIR_FEATURE_LEN = 21
TRUNCATION_SPAN = 512


class HbFilterError(ValueError):
    pass


@dataclass(frozen=True)
class SynthesisFilter:
    k_full: StateSpaceModel
    k_hpf: StateSpaceModel
    fir21: np.ndarray
    truncation_ratio: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "fir21", np.asarray(self.fir21, dtype=float).reshape(-1))


def assemble_synthesis_filter(ktilde: StateSpaceModel) -> StateSpaceModel:
    """Scalar fast-rate filter [1, z^-1] applied to ktilde(z^2).

    The impulse response interleaves the two lifted channel responses:
    h[2t] = h1[t], h[2t+1] = h2[t].
    """
    if ktilde.p != 1 or ktilde.m != 2:
        raise HbFilterError("expected a 1-input 2-output lifted controller")
    k2 = expand_z2(ktilde)
    # y[t] = y1[t] + y2[t-1]: share the expanded state, add one memory cell
    # for the delayed second channel instead of duplicating the realization
    n = k2.n
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = k2.A
    A[n, :n] = k2.C[1]
    B = np.vstack([k2.B, k2.D[1:2]])
    C = np.zeros((1, n + 1))
    C[0, :n] = k2.C[0]
    C[0, n] = 1.0
    D = k2.D[0:1].copy()
    return StateSpaceModel(A, B, C, D)


def extract_highband_filter(
    k: StateSpaceModel, hpf: FirFilter, fir_len: int = FIR_FEATURE_LEN
) -> SynthesisFilter:
    """Cascade with the causal HPF and truncate the impulse response.

    The FIR feature is the first fir_len impulse-response samples of the
    cascade; the reported ratio is tail energy over total energy across
    TRUNCATION_SPAN samples.
    """
    if not k.is_stable():
        raise HbFilterError("synthesis filter must be stable")
    hpf_ss = tf_to_ss(hpf.taps, [1.0])
    k_hpf = series(k, hpf_ss)
    h = k_hpf.impulse_response(max(TRUNCATION_SPAN, fir_len))[:, 0]
    total = float(np.dot(h, h))
    tail = float(np.dot(h[fir_len:], h[fir_len:]))
    ratio = tail / total if total > 0 else 0.0
    return SynthesisFilter(
        k_full=k, k_hpf=k_hpf, fir21=h[:fir_len].copy(), truncation_ratio=ratio
    )
