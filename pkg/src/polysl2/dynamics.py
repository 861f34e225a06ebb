"""Time evolution, Rabi signals, collapse/revival detection, mean field.

Quantum evolution is spectral: blocks evolve independently under their own
eigendecompositions, so unitarity is exact up to the eigensolve.  The mean
field side integrates the canonical equations on the (p, q) chart of the
su(2) coherent manifold with the Hamiltonian expectation evaluated
matrix-wise on the block.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import Block, StructureFunction, holstein_primakoff
from .solver import Spectrum, build_hamiltonian, eigensolve
from .three_boson import (
    BlockLabel,
    CoherentInput,
    ThreeBosonParams,
    block_constants,
    build_model_block,
    enumerate_blocks,
    project_coherent,
)

__all__ = [
    "Signal",
    "RabiResult",
    "CollapseReport",
    "IncommensurabilityReport",
    "MeanFieldState",
    "MeanFieldTrajectory",
    "evolve_block",
    "observable_n3",
    "rabi_signal",
    "detect_collapse_revival",
    "incommensurability_measure",
    "meanfield_trajectory",
]

# blocks below this squared-norm weight cannot move any plotted digit
WEIGHT_FLOOR = 1e-18


@dataclass(frozen=True)
class Signal:
    """Real-valued samples on a uniform time grid."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ValueError("times and values must have equal length")

    def __len__(self) -> int:
        return len(self.times)


def evolve_block(spectrum: Spectrum, c0, t: float) -> np.ndarray:
    """Amplitudes at time t under the block spectral propagator (hbar = 1)."""
    c0 = np.asarray(c0, dtype=complex)
    cr = spectrum.amplitudes.conj().T @ c0
    return spectrum.amplitudes @ (np.exp(-1j * spectrum.energies * t) * cr)


def _evolve_grid(spectrum: Spectrum, c0, times: np.ndarray) -> np.ndarray:
    """Amplitudes on a whole time grid at once, shape (d, len(times))."""
    c0 = np.asarray(c0, dtype=complex)
    cr = spectrum.amplitudes.conj().T @ c0
    phases = np.exp(-1j * np.outer(spectrum.energies, times))
    return spectrum.amplitudes @ (phases * cr[:, None])


def observable_n3(label: BlockLabel, amplitudes) -> float:
    """Mode-3 occupation sum_v |c_v|^2 (m - v) on the labeled block."""
    prob = np.abs(np.asarray(amplitudes)) ** 2
    v = np.arange(len(prob))
    return float(np.sum(prob * (label.m - v)))


@dataclass(frozen=True)
class RabiResult:
    signal: Signal
    tail_deficit: float
    deficit_ok: bool
    block_weights: dict


def rabi_signal(
    inp: CoherentInput, params: ThreeBosonParams, times
) -> RabiResult:
    """Total <N_3(t)> of a cube-truncated coherent state.

    Every block intersecting the cube is projected, evolved by its own
    spectrum and summed.  The probability lost to the cube truncation is
    reported as tail_deficit; deficit_ok goes False (with a warning) when
    it exceeds the bound configured on the input.
    """
    times = np.asarray(times, dtype=float)
    values = np.zeros(len(times))
    captured = 0.0
    weights = {}
    for label in enumerate_blocks(inp.ncut):
        c0 = project_coherent(inp, label)
        w = float(np.sum(np.abs(c0) ** 2))
        captured += w
        if w < WEIGHT_FLOOR:
            continue
        weights[label.block_id] = w
        block, psi = build_model_block(label)
        spec = eigensolve(build_hamiltonian(block, psi, block_constants(label, params)))
        amps = _evolve_grid(spec, c0, times)
        occ = label.m - np.arange(block.dim, dtype=float)
        values += occ @ (np.abs(amps) ** 2)
    deficit = max(0.0, 1.0 - captured)
    ok = deficit <= inp.deficit_bound
    if not ok:
        warnings.warn(
            f"coherent tail deficit {deficit:.3e} exceeds bound "
            f"{inp.deficit_bound:.1e}; raise ncut",
            stacklevel=2,
        )
    return RabiResult(
        signal=Signal(times=times, values=values),
        tail_deficit=deficit,
        deficit_ok=ok,
        block_weights=weights,
    )


@dataclass(frozen=True)
class CollapseReport:
    oscillating: bool
    carrier_frequency: float
    window: float
    initial_envelope: float
    collapse_time: float | None
    revival_times: tuple
    envelope: Signal | None


def detect_collapse_revival(
    signal: Signal,
    window_periods: float = 5.0,
    persist: int = 5,
    collapse_frac: float = 0.1,
    revival_frac: float = 0.5,
) -> CollapseReport:
    """Locate collapse and revivals of an oscillating signal.

    The envelope is the sliding RMS of the mean-subtracted signal over a
    window of window_periods carrier periods, the carrier being the
    dominant discrete-spectrum peak.  A collapse is the first time the
    envelope stays below collapse_frac of its initial value for persist
    consecutive window positions; revivals are later envelope peaks above
    revival_frac of the initial value.
    """
    n = len(signal)
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    t = np.asarray(signal.times, dtype=float)
    dt = t[1] - t[0]
    y = np.asarray(signal.values, dtype=float)
    y0 = y - y.mean()
    amp = float(np.max(np.abs(y0)))
    no_osc = CollapseReport(
        oscillating=False,
        carrier_frequency=math.nan,
        window=math.nan,
        initial_envelope=0.0,
        collapse_time=None,
        revival_times=(),
        envelope=None,
    )
    if amp <= 1e-12 * max(1.0, abs(float(y.mean()))):
        return no_osc
    power = np.abs(np.fft.rfft(y0))
    power[0] = 0.0
    kpk = int(np.argmax(power))
    if kpk == 0 or power[kpk] == 0.0:
        return no_osc
    omega = 2.0 * math.pi * kpk / (n * dt)
    period = 2.0 * math.pi / omega
    w = int(round(window_periods * period / dt))
    w = max(w, 2)
    if w >= n:
        return CollapseReport(
            oscillating=True,
            carrier_frequency=omega,
            window=w * dt,
            initial_envelope=float(np.sqrt(np.mean(y0**2))),
            collapse_time=None,
            revival_times=(),
            envelope=None,
        )
    sq = np.concatenate(([0.0], np.cumsum(y0**2)))
    env = np.sqrt((sq[w:] - sq[:-w]) / w)
    env_t = t[: n - w + 1]
    env0 = float(env[0])
    collapse_time = None
    collapse_idx = None
    if env0 > 0.0:
        below = env < collapse_frac * env0
        run = 0
        for i, b in enumerate(below):
            run = run + 1 if b else 0
            if run >= persist:
                collapse_idx = i - persist + 1
                collapse_time = float(env_t[collapse_idx])
                break
    revivals = []
    if collapse_idx is not None:
        high = env > revival_frac * env0
        high[: collapse_idx + 1] = False
        i = collapse_idx + 1
        m = len(env)
        while i < m:
            if not high[i]:
                i += 1
                continue
            k = i
            while k < m and high[k]:
                k += 1
            seg = slice(i, k)
            revivals.append(float(env_t[seg][np.argmax(env[seg])]))
            i = k
    return CollapseReport(
        oscillating=True,
        carrier_frequency=omega,
        window=w * dt,
        initial_envelope=env0,
        collapse_time=collapse_time,
        revival_times=tuple(revivals),
        envelope=Signal(times=env_t, values=env),
    )


@dataclass(frozen=True)
class IncommensurabilityReport:
    min_distance: float
    ratio: float
    pair_index: int
    p: int
    q: int


def incommensurability_measure(energies, qmax: int = 8) -> IncommensurabilityReport:
    """Distance of consecutive-spacing ratios from small rationals.

    A small min_distance means neighbouring Bohr frequencies are nearly
    commensurable (periodic beats); a large one signals the spectral
    anharmonicity responsible for irregular evolution.
    """
    if qmax < 1:
        raise ValueError("qmax must be positive")
    e = np.sort(np.asarray(energies, dtype=float))
    scale = max(e[-1] - e[0], 1.0) if len(e) else 1.0
    keep = [e[0]] if len(e) else []
    for x in e[1:]:
        if x - keep[-1] > 1e-9 * scale:
            keep.append(x)
    if len(keep) < 3:
        raise ValueError("need at least 3 distinct energies")
    sp = np.diff(keep)
    best = None
    for i in range(len(sp) - 1):
        rho = sp[i + 1] / sp[i]
        for q in range(1, qmax + 1):
            p = round(rho * q)
            dist = abs(rho - p / q)
            if best is None or dist < best[0]:
                best = (dist, rho, i, p, q)
    return IncommensurabilityReport(
        min_distance=float(best[0]),
        ratio=float(best[1]),
        pair_index=int(best[2]),
        p=int(best[3]),
        q=int(best[4]),
    )


@dataclass(frozen=True)
class MeanFieldState:
    """Canonical pair on the coherent manifold: p = j cos(theta), q = phi."""

    p: float
    q: float


@dataclass(frozen=True)
class MeanFieldTrajectory:
    times: np.ndarray
    p: np.ndarray
    q: np.ndarray
    energy: np.ndarray
    clamped: bool

    def states(self):
        return tuple(
            MeanFieldState(p=float(a), q=float(b))
            for a, b in zip(self.p, self.q)
        )


class _GcsEnergy:
    """Batched evaluator of H(p, q) = <z(p,q)| H |z(p,q)> on one block."""

    def __init__(self, block: Block, psi: StructureFunction, params):
        self.j = block.j
        self.h = build_hamiltonian(block, psi, params).dense()
        _, yp, ym = holstein_primakoff(block, psi)
        self.yp = yp
        self.ym = ym

    def __call__(self, ps, qs) -> np.ndarray:
        ps = np.asarray(ps, dtype=float)
        qs = np.asarray(qs, dtype=float)
        theta = np.arccos(np.clip(ps / self.j, -1.0, 1.0))
        xi = 0.5 * theta * np.exp(-1j * qs)
        a = xi[:, None, None] * self.yp - np.conj(xi)[:, None, None] * self.ym
        w, vmat = np.linalg.eigh(1j * a)
        low = np.exp(-1j * w) * np.conj(vmat[:, 0, :])
        vecs = np.einsum("bij,bj->bi", vmat, low)
        ham = np.einsum("bi,ij,bj->b", vecs.conj(), self.h, vecs)
        return ham.real


def meanfield_trajectory(
    block: Block,
    psi: StructureFunction,
    params,
    p0: float,
    q0: float,
    tspan: float,
    dt: float,
) -> MeanFieldTrajectory:
    """Classic 4th-order integration of dq/dt = dH/dp, dp/dt = -dH/dq.

    Partial derivatives of the coherent-state energy are central
    differences with step 1e-6 max(1, |p|, |q|).  If |p| leaves the chart
    it is clamped back to the pole with a warning.
    """
    j = block.j
    if abs(p0) > j:
        raise ValueError("initial |p| exceeds j")
    if dt <= 0:
        raise ValueError("dt must be positive")
    energy = _GcsEnergy(block, psi, params)
    nsteps = max(1, int(round(abs(tspan) / dt)))
    step = tspan / nsteps
    ps = np.empty(nsteps + 1)
    qs = np.empty(nsteps + 1)
    es = np.empty(nsteps + 1)
    ps[0], qs[0] = p0, q0
    clamped = False

    def force(p, q):
        h = 1e-6 * max(1.0, abs(p), abs(q))
        vals = energy(
            [p + h, p - h, p, p], [q, q, q + h, q - h]
        )
        dhdp = (vals[0] - vals[1]) / (2 * h)
        dhdq = (vals[2] - vals[3]) / (2 * h)
        return -dhdq, dhdp

    p, q = p0, q0
    es[0] = energy([p], [q])[0]
    for i in range(nsteps):
        k1p, k1q = force(p, q)
        k2p, k2q = force(p + 0.5 * step * k1p, q + 0.5 * step * k1q)
        k3p, k3q = force(p + 0.5 * step * k2p, q + 0.5 * step * k2q)
        k4p, k4q = force(p + step * k3p, q + step * k3q)
        p += step / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        q += step / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q)
        if abs(p) > j:
            p = math.copysign(j, p)
            if not clamped:
                warnings.warn(
                    "mean-field p clamped at the chart boundary |p| = j",
                    stacklevel=2,
                )
            clamped = True
        ps[i + 1], qs[i + 1] = p, q
        es[i + 1] = energy([p], [q])[0]
    times = np.arange(nsteps + 1) * step
    return MeanFieldTrajectory(
        times=times, p=ps, q=qs, energy=es, clamped=clamped
    )
