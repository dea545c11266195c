"""Negativity of bipartite cuts and the optimal positive/negative split.

The negativity of rho across A|B is the absolute sum of the negative
eigenvalues of the partial transpose rho^{T_A}; equivalently
(||rho^{T_A}||_1 - 1) / 2 for unit-trace input.  For a pure state with
Schmidt coefficients p_i across the cut this closes to
((sum_i sqrt(p_i))^2 - 1) / 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import tensor
from .states import DensityMatrix

# Eigenvalues of a unit-trace partial transpose above -NEG_EIG_CUTOFF are
# treated as roundoff, not genuine negativity.
NEG_EIG_CUTOFF = 1e-12


class PartitionError(ValueError):
    """The requested cut is not a nonempty proper subset of the subsystems."""


@dataclass(frozen=True)
class NegativityResult:
    negativity: float
    log_negativity: float
    negative_eigenvalue_sum: float   # <= 0; negativity == -negative_eigenvalue_sum
    spectrum: np.ndarray             # eigenvalues of rho^{T_part}, descending
    part: tuple[int, ...]            # subsystems that were transposed


def _normalize_part(part, n: int) -> tuple[int, ...]:
    if isinstance(part, (int, np.integer)):
        part = (int(part),)
    out = tuple(sorted({int(i) for i in part}))
    if not out or len(out) >= n:
        raise PartitionError("cut must transpose a nonempty proper subset of subsystems")
    for i in out:
        if not 0 <= i < n:
            raise PartitionError(f"subsystem index {i} out of range for {n} subsystems")
    return out


def negativity(rho: DensityMatrix, part) -> NegativityResult:
    """Negativity of ``rho`` across the cut that isolates ``part``.

    ``part`` is a subsystem index or set of indices; the transpose is
    applied there.  The whole spectrum of the partial transpose comes
    back with the scalar, since callers routinely want to inspect it.
    """
    part = _normalize_part(part, len(rho.dims))
    pt = tensor.partial_transpose(rho.matrix, rho.dims, part)
    spectrum = tensor.eigh(pt).values
    neg_sum = float(spectrum[spectrum < -NEG_EIG_CUTOFF].sum())
    n = abs(neg_sum)  # abs, not unary minus: keeps a PPT state at +0.0
    return NegativityResult(
        negativity=n,
        log_negativity=float(np.log2(1.0 + 2.0 * n)),
        negative_eigenvalue_sum=neg_sum,
        spectrum=spectrum,
        part=part,
    )


def pure_negativity_from_schmidt(coefficients: Sequence[float]) -> float:
    """Negativity of a pure state from its Schmidt coefficients across the cut.

    For spectrum {p_i} the partial transpose has eigenvalues
    {p_i} union {+-sqrt(p_i p_j)}_{i<j}, so the negative part sums to
    sum_{i<j} sqrt(p_i p_j) = ((sum_i sqrt(p_i))^2 - 1) / 2.
    """
    p = np.asarray(coefficients, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("expected a nonempty 1-d coefficient array")
    if p.min() <= 0:
        raise ValueError("Schmidt coefficients must be strictly positive")
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"Schmidt coefficients sum to {total!r}, not 1")
    value = (np.sqrt(p).sum() ** 2 - 1.0) / 2.0
    return float(max(value, 0.0))


@dataclass(frozen=True)
class OptimalDecomposition:
    """Split of a Hermitian matrix A = a_plus * rho_plus - a_minus * rho_minus.

    rho_plus and rho_minus are the normalized positive/negative spectral
    parts (orthogonal density matrices); a side with no spectral weight
    is represented by weight 0.0 and matrix None.  For a unit-trace A,
    a_minus equals the negativity-style negative weight and
    a_plus + a_minus is the trace norm.
    """

    a_plus: float
    a_minus: float
    rho_plus: DensityMatrix | None
    rho_minus: DensityMatrix | None

    @property
    def trace_norm(self) -> float:
        return self.a_plus + self.a_minus


def optimal_decomposition(mat: np.ndarray) -> OptimalDecomposition:
    """Decompose a Hermitian matrix into its weighted spectral parts.

    This is the minimizer of a_plus + a_minus over all decompositions
    A = a_plus rho^+ - a_minus rho^- with rho^+- density matrices: take
    the positive and negative eigenspaces separately and normalize.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise tensor.DimensionError(f"expected a square matrix, got shape {mat.shape}")
    if np.linalg.norm(mat) == 0:
        raise ValueError("zero matrix has no spectral decomposition of this form")
    values, vectors = tensor.eigh(mat)
    d = mat.shape[0]

    def side(mask: np.ndarray, sign: float):
        vals = values[mask]
        if vals.size == 0:
            return 0.0, None
        weight = float(sign * vals.sum())
        vecs = vectors[:, mask]
        rho = (vecs * (sign * vals / weight)) @ vecs.conj().T
        return weight, DensityMatrix(rho, (d,), validate=False)

    a_plus, rho_plus = side(values > NEG_EIG_CUTOFF, 1.0)
    a_minus, rho_minus = side(values < -NEG_EIG_CUTOFF, -1.0)
    return OptimalDecomposition(a_plus, a_minus, rho_plus, rho_minus)
