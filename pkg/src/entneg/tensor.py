"""Dense tensor primitives for finite-dimensional composite systems.

Everything here operates on plain numpy arrays indexed in row-major
(C) order with subsystem 0 most significant: a vector on dims
(d0, d1, d2) stores amplitude <i,j,k|psi> at flat index
(i*d1 + j)*d2 + k.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

# Relative Frobenius tolerance for "is this matrix Hermitian".
EPS_HERM = 1e-10
# Relative tolerance on eigen/singular reconstruction checks in tests.
EPS_EIG = 1e-10


class DimensionError(ValueError):
    """Subsystem dimension list is inconsistent with the array it labels."""


class EigResult(NamedTuple):
    values: np.ndarray    # real, descending
    vectors: np.ndarray   # columns, vectors[:, i] pairs with values[i]


class SvdResult(NamedTuple):
    u: np.ndarray
    s: np.ndarray         # non-negative, descending
    v: np.ndarray         # m == u @ diag(s) @ v.conj().T


def check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    """Validate a subsystem dimension list against a total size.

    Every entry must be a positive integer and their product must equal
    ``size``.  Returns the dims as a tuple.
    """
    out = []
    for d in dims:
        if int(d) != d or d < 1:
            raise DimensionError(f"subsystem dimensions must be positive integers, got {d!r}")
        out.append(int(d))
    prod = 1
    for d in out:
        prod *= d
    if prod != size:
        raise DimensionError(f"dims {tuple(out)} multiply to {prod}, array has size {size}")
    return tuple(out)


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more arrays, leftmost factor most significant."""
    if not ops:
        raise ValueError("kron needs at least one factor")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


def permute_subsystems(vec: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the subsystems of a state vector.

    ``order`` lists old subsystem indices in their new positions, as in
    ``np.transpose``: the subsystem at ``order[i]`` becomes subsystem
    ``i`` of the result.  Returns a new flat vector; the caller is
    responsible for tracking the permuted dims.
    """
    vec = np.asarray(vec)
    dims = check_dims(dims, vec.size)
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(len(dims))):
        raise DimensionError(f"order {order} is not a permutation of 0..{len(dims) - 1}")
    return vec.reshape(dims).transpose(order).reshape(-1)


def _split_axes(part: Sequence[int], n: int) -> tuple[int, ...]:
    part = tuple(sorted({int(i) for i in part}))
    for i in part:
        if not 0 <= i < n:
            raise DimensionError(f"subsystem index {i} out of range for {n} subsystems")
    return part


def partial_trace(mat: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``mat`` is a square matrix on the composite space described by
    ``dims``.  Kept subsystems retain their original relative order.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
    dims = check_dims(dims, mat.shape[0])
    n = len(dims)
    keep = _split_axes(keep, n)
    traced = [i for i in range(n) if i not in keep]

    tens = mat.reshape(dims + dims)
    live = list(dims)
    # Trace the highest-index subsystem first so lower axis numbers stay valid.
    for ax in reversed(traced):
        half = len(live)
        tens = np.trace(tens, axis1=ax, axis2=ax + half)
        live.pop(ax)
    d_keep = int(np.prod(live)) if live else 1
    return tens.reshape(d_keep, d_keep)


def partial_transpose(mat: np.ndarray, dims: Sequence[int], part: Sequence[int]) -> np.ndarray:
    """Transpose the row/column indices of the subsystems in ``part``.

    Pure reindexing: applying the same call twice returns the original
    array exactly.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
    dims = check_dims(dims, mat.shape[0])
    n = len(dims)
    part = _split_axes(part, n)

    axes = list(range(2 * n))
    for i in part:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    d = mat.shape[0]
    return mat.reshape(dims + dims).transpose(axes).reshape(d, d)


def eigh(mat: np.ndarray) -> EigResult:
    """Hermitian eigendecomposition with eigenvalues sorted descending.

    Rejects matrices whose anti-Hermitian part exceeds EPS_HERM in
    relative Frobenius norm; the symmetrized matrix is what gets
    decomposed, so roundoff-level asymmetry never leaks into results.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
    scale = np.linalg.norm(mat)
    if scale > 0 and np.linalg.norm(mat - mat.conj().T) > EPS_HERM * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    herm = (mat + mat.conj().T) / 2
    values, vectors = np.linalg.eigh(herm)
    return EigResult(values[::-1].copy(), vectors[:, ::-1].copy())


def svd(mat: np.ndarray) -> SvdResult:
    """Thin SVD, mat == u @ diag(s) @ v.conj().T with s descending."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {mat.shape}")
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    return SvdResult(u, s, vh.conj().T)


def trace_norm(mat: np.ndarray) -> float:
    """Sum of singular values of a square matrix."""
    mat = np.asarray(mat, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
    return float(np.linalg.svd(mat, compute_uv=False).sum())
