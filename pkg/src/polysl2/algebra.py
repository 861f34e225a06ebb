"""Structure functions and irreducible blocks of polynomially deformed sl(2).

A deformed algebra is fixed by a polynomial structure function psi, kept here
in factored form (leading coefficient and real roots).  Finite unitary blocks
are towers l0, l0+1, ..., l0+d-1 on which psi is positive between consecutive
zeros; the ladder matrix elements are square roots of psi values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

__all__ = [
    "StructureFunction",
    "Block",
    "BlockError",
    "falling_product",
    "build_block",
    "block_operators",
    "holstein_primakoff",
]

# relative threshold for root detection and block termination
ROOT_RTOL = 1e-12


class BlockError(ValueError):
    """Raised when a lowest weight does not generate a valid unitary block."""


@dataclass(frozen=True)
class StructureFunction:
    """Polynomial psi(x) = leading * prod_i (x - roots[i]).

    Roots may be floats or exact rationals (fractions.Fraction); evaluation
    preserves the input arithmetic, so rational x with rational roots gives
    an exact rational value.  Root order is fixed and significant only for
    floating point reproducibility.
    """

    leading: object
    roots: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))

    @property
    def degree(self) -> int:
        return len(self.roots)

    def __call__(self, x):
        acc = self.leading
        for r in self.roots:
            acc = acc * (x - r)
        return acc

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation."""
        xs = np.asarray(xs, dtype=float)
        acc = np.full(xs.shape, float(self.leading))
        for r in self.roots:
            acc *= xs - float(r)
        return acc


def falling_product(psi: StructureFunction, x, v: int):
    """prod_{r=0}^{v-1} psi(x - r); the empty product (v=0) is 1."""
    if v < 0:
        raise ValueError("v must be nonnegative")
    acc = 1
    for r in range(v):
        acc = acc * psi(x - r)
    return acc


@dataclass(frozen=True)
class Block:
    """One irreducible tower: lowest weight l0, dimension dim.

    labels carries the model's integrals of motion by name (informational),
    constant is the additive energy offset of the block Hamiltonian.
    truncated marks towers cut at dmax before a terminating zero of psi
    was found; exactness claims do not apply to those.
    """

    l0: float
    dim: int
    labels: Mapping[str, float] = field(default_factory=dict)
    constant: float = 0.0
    truncated: bool = False

    @property
    def j(self) -> float:
        return (self.dim - 1) / 2.0

    def weights(self) -> np.ndarray:
        """V0 eigenvalues l0 + v."""
        return self.l0 + np.arange(self.dim, dtype=float)


def _block_scale(psi: StructureFunction, l0: float, dmax: int) -> float:
    vals = psi.values(l0 + np.arange(dmax + 1, dtype=float))
    return float(np.max(np.abs(vals)))


def build_block(psi, l0, labels=None, constant=0.0, dmax=1000) -> Block:
    """Construct the block generated from lowest weight l0.

    l0 must be a root of psi; the dimension is the first v >= 1 with
    psi(l0+v) below the detection threshold.  Intermediate values must be
    strictly positive, otherwise the tower is not unitary.  If no zero is
    found up to dmax the block is returned truncated at dmax.
    """
    if dmax < 1:
        raise ValueError("dmax must be positive")
    l0 = float(l0)
    tol = ROOT_RTOL * _block_scale(psi, l0, dmax)
    head = float(psi(l0))
    if abs(head) > tol:
        raise BlockError(f"l0={l0} is not a root of psi (psi(l0)={head:.3e})")
    dim = None
    for v in range(1, dmax + 1):
        val = float(psi(l0 + v))
        if val < -tol:
            raise BlockError(
                f"non-unitary block: psi(l0+{v}) = {val:.6g} < 0 before termination"
            )
        if val <= tol:
            dim = v
            break
    truncated = dim is None
    if truncated:
        dim = dmax
    return Block(
        l0=l0,
        dim=dim,
        labels=dict(labels or {}),
        constant=float(constant),
        truncated=truncated,
    )


def block_operators(block: Block, psi: StructureFunction):
    """Matrices of V0, V+, V- on the ordered block basis.

    (V0)_vv = l0 + v, (V+)_{v+1,v} = sqrt(psi(l0+v+1)), V- the adjoint.
    """
    d = block.dim
    v0 = np.diag(block.weights()).astype(complex)
    vp = np.zeros((d, d), dtype=complex)
    for v in range(d - 1):
        val = float(psi(block.l0 + v + 1))
        if val < 0.0:
            raise BlockError(f"negative psi under sqrt at v={v + 1}")
        vp[v + 1, v] = math.sqrt(val)
    return v0, vp, vp.conj().T


def holstein_primakoff(block: Block, psi: StructureFunction):
    """su(2) images Y0, Y+, Y- of the deformed generators on the block.

    Y0 shifts V0 by -(l0+j); Y+ replaces each ladder element by the spin-j
    value sqrt((v+1)(2j-v)).  The result satisfies exact su(2) relations
    regardless of psi.
    """
    d = block.dim
    j = block.j
    y0 = np.diag(np.arange(d, dtype=float) - j).astype(complex)
    yp = np.zeros((d, d), dtype=complex)
    for v in range(d - 1):
        yp[v + 1, v] = math.sqrt((v + 1) * (2 * j - v))
    return y0, yp, yp.conj().T
