"""Per-block Hamiltonians, exact spectra and the su(2) reference solution.

The block Hamiltonian a V0 + g V+ + g* V- + C is tridiagonal in the tower
basis.  A diagonal gauge removes the coupling phase, so everything runs on a
real symmetric tridiagonal; amplitudes are transformed back on output.  Two
independent eigenvalue routes are provided: a LAPACK solve and a Sturm-count
bisection on the characteristic recurrence, used as cross-checking oracles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .algebra import Block, BlockError, StructureFunction
from .variational import reg_hyp_2F1

__all__ = [
    "HamiltonianParams",
    "TridiagonalHamiltonian",
    "Spectrum",
    "build_hamiltonian",
    "eigensolve",
    "spectral_polynomial_roots",
    "amplitude_recurrence",
    "sl2_reference_spectrum",
    "gcs_overlaps",
]


@dataclass(frozen=True)
class HamiltonianParams:
    """Detuning a, coupling modulus/phase, additive constant."""

    a: float
    g_mod: float
    g_phase: float = 0.0
    constant: float = 0.0

    def __post_init__(self):
        if self.g_mod < 0:
            raise ValueError("g_mod must be nonnegative")

    @property
    def g(self) -> complex:
        return self.g_mod * cmath.exp(1j * self.g_phase)


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Real symmetric tridiagonal form of the block Hamiltonian.

    diag[v] = C + a (l0 + v); offdiag[v] = |g| sqrt(psi(l0+v+1)).  The
    removed coupling phase is kept for restoring amplitudes to the original
    gauge.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    g_phase: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.diag)

    def norm_bound(self) -> float:
        """Infinity-norm bound, also a spectral radius bound."""
        d = np.abs(self.diag)
        if self.dim == 1:
            return float(d[0])
        e = np.abs(self.offdiag)
        row = d.copy()
        row[:-1] += e
        row[1:] += e
        return float(row.max())

    def gauge(self) -> np.ndarray:
        """Diagonal unitary D with D_v = exp(-i v theta_g)."""
        return np.exp(-1j * self.g_phase * np.arange(self.dim))

    def dense(self) -> np.ndarray:
        """Dense complex matrix in the original gauge."""
        h = np.diag(self.diag.astype(complex))
        if self.dim > 1:
            g = self.offdiag * cmath.exp(1j * self.g_phase)
            h += np.diag(g, -1) + np.diag(g.conj(), 1)
        return h


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenenergies and amplitude matrix Q[v, f] = <v|E_f>."""

    energies: np.ndarray
    amplitudes: np.ndarray


def build_hamiltonian(
    block: Block, psi: StructureFunction, params: HamiltonianParams
) -> TridiagonalHamiltonian:
    d = block.dim
    diag = params.constant + params.a * block.weights()
    vals = psi.values(block.l0 + np.arange(1, d, dtype=float))
    if np.any(vals < 0.0):
        raise BlockError("negative psi value under the ladder square root")
    off = params.g_mod * np.sqrt(vals)
    return TridiagonalHamiltonian(diag=diag, offdiag=off, g_phase=params.g_phase)


def _reorthogonalize_degenerate(e: np.ndarray, q: np.ndarray, scale: float):
    """QR-orthonormalize clusters of eigenvectors closer than 1e-12*scale."""
    tol = 1e-12 * max(scale, 1e-300)
    n = len(e)
    i = 0
    while i < n:
        k = i + 1
        while k < n and e[k] - e[k - 1] < tol:
            k += 1
        if k - i > 1:
            q[:, i:k], _ = np.linalg.qr(q[:, i:k])
        i = k


def eigensolve(tri: TridiagonalHamiltonian) -> Spectrum:
    """Full eigendecomposition with amplitudes in the original gauge."""
    if tri.dim == 1:
        return Spectrum(
            energies=tri.diag.astype(float).copy(),
            amplitudes=np.ones((1, 1), dtype=complex),
        )
    try:
        e, q = eigh_tridiagonal(tri.diag, tri.offdiag)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(f"tridiagonal eigensolve failed: {exc}") from exc
    _reorthogonalize_degenerate(e, q, tri.norm_bound())
    amps = tri.gauge().conj()[:, None] * q
    return Spectrum(energies=e, amplitudes=amps)


def _sturm_counts(tri: TridiagonalHamiltonian, xs: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in xs."""
    e2 = tri.offdiag**2
    tiny = 1e-300
    p = tri.diag[0] - xs
    p = np.where(p == 0.0, tiny, p)
    count = (p < 0.0).astype(np.int64)
    for i in range(1, tri.dim):
        p = (tri.diag[i] - xs) - e2[i - 1] / p
        p = np.where(p == 0.0, tiny, p)
        count += p < 0.0
    return count


def spectral_polynomial_roots(tri: TridiagonalHamiltonian, tol: float = 1e-12):
    """Eigenvalues as roots of the characteristic three-term recurrence.

    Sturm sign counts locate each root inside a Gershgorin bracket and
    bisection refines to absolute tolerance; independent of the LAPACK
    route, so the two may be compared as oracles.
    """
    d = tri.dim
    if d == 1:
        return tri.diag.astype(float).copy()
    e = np.abs(tri.offdiag)
    rad = np.zeros(d)
    rad[:-1] += e
    rad[1:] += e
    lo = np.full(d, float(np.min(tri.diag - rad)))
    hi = np.full(d, float(np.max(tri.diag + rad)))
    want = np.arange(1, d + 1)
    for _ in range(200):
        gap = hi - lo
        if np.all(gap <= tol):
            break
        mid = 0.5 * (lo + hi)
        # float-spacing guard: interval no longer splittable
        stuck = (mid <= lo) | (mid >= hi)
        counts = _sturm_counts(tri, mid)
        below = counts < want
        lo = np.where(~stuck & below, mid, lo)
        hi = np.where(~stuck & ~below, mid, hi)
        if np.all(stuck | (gap <= tol)):
            break
    return 0.5 * (lo + hi)


def amplitude_recurrence(tri: TridiagonalHamiltonian, energy: float):
    """Eigenvector candidate from the three-term amplitude recurrence.

    Seeds Q_0 = 1 and propagates in the real gauge; returns the normalized
    amplitude vector and the closure residual of the final recurrence row
    (small iff energy is an eigenvalue).  Vanishing off-diagonal entries
    split the chain; each segment is seeded separately and the one with the
    smallest residual wins.
    """
    d = tri.dim
    diag = np.asarray(tri.diag, dtype=float)
    off = np.asarray(tri.offdiag, dtype=float)
    bounds = [0] + [i + 1 for i in range(d - 1) if off[i] == 0.0] + [d]
    best = None
    for s, t in zip(bounds[:-1], bounds[1:]):
        q = np.zeros(d)
        q[s] = 1.0
        for v in range(s, t - 1):
            prev = q[v - 1] if v > s else 0.0
            oprev = off[v - 1] if v > s else 0.0
            q[v + 1] = ((energy - diag[v]) * q[v] - oprev * prev) / off[v]
        nrm = float(np.linalg.norm(q))
        tail = off[t - 2] * q[t - 2] if t - s > 1 else 0.0
        closure = abs((energy - diag[t - 1]) * q[t - 1] - tail) / nrm
        if best is None or closure < best[1]:
            best = (q / nrm, closure)
    return best


def sl2_reference_spectrum(block: Block, params: HamiltonianParams) -> Spectrum:
    """Equidistant su(2) approximation of the block spectrum.

    Energies follow the closed form C + a(l0+j) + (-j+v) sqrt(a^2+4|g|^2);
    amplitudes are eigenvectors of the su(2)-shaped tridiagonal with ladder
    elements sqrt((v+1)(2j-v)).
    """
    d = block.dim
    j = block.j
    omega = math.hypot(params.a, 2.0 * params.g_mod)
    base = params.constant + params.a * (block.l0 + j)
    energies = base + (np.arange(d) - j) * omega
    if d == 1:
        return Spectrum(energies=energies, amplitudes=np.ones((1, 1), complex))
    v = np.arange(d - 1, dtype=float)
    off = params.g_mod * np.sqrt((v + 1) * (2 * j - v))
    tri = TridiagonalHamiltonian(
        diag=params.constant + params.a * block.weights(),
        offdiag=off,
        g_phase=params.g_phase,
    )
    spec = eigensolve(tri)
    return Spectrum(energies=energies, amplitudes=spec.amplitudes)


def gcs_overlaps(block: Block, v: int, r: float, theta: float = 0.0) -> np.ndarray:
    """Overlaps <f| of the rotated basis state S_Y |v> on the su(2) level.

    Coefficients combine a terminating regularized hypergeometric with a
    factorial normalization; the result is unit norm by unitarity of the
    rotation.  r = 0 returns the basis vector itself.
    """
    d = block.dim
    twoj = d - 1
    if not 0 <= v < d:
        raise ValueError("v outside block")
    out = np.zeros(d, dtype=complex)
    cr = math.cos(r)
    if abs(cr) < 1e-12:
        raise ValueError("rotation angle too close to pi/2")
    if r == 0.0:
        out[v] = 1.0
        return out
    s2 = math.sin(r) ** 2
    t = math.tan(r)
    phase = -cmath.exp(1j * theta) * t
    cos_pow = (cr * cr) ** (block.j - v)
    for f in range(d):
        hyp = reg_hyp_2F1(v, twoj + 1 - v, f - v + 1, s2)
        if hyp == 0.0 and f < v:
            continue
        ratio = Fraction(
            math.factorial(twoj - v) * math.factorial(f),
            math.factorial(twoj - f) * math.factorial(v),
        )
        out[f] = cos_pow * phase ** (f - v) * hyp * math.sqrt(ratio)
    return out
