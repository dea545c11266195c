"""States on composite Hilbert spaces: containers, fixtures, Schmidt analysis, JSON I/O.

Subsystem 0 is always the most significant index (row-major layout, see
``tensor``).  Random constructions draw from numpy's default PCG64
generator so that an integer seed pins every amplitude.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from . import tensor
from .tensor import DimensionError

# |norm - 1| above this rejects a PureState outright.
NORM_ATOL = 1e-12
# Singular values at or below SCHMIDT_RTOL * sigma_max are treated as zero.
SCHMIDT_RTOL = 1e-10
# File parsers are more forgiving than constructors; see *_from_json_dict.
JSON_NORM_ATOL = 1e-8

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


@dataclass(frozen=True)
class PureState:
    """Normalized state vector together with its subsystem dimensions."""

    amps: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        dims = tensor.check_dims(self.dims, amps.size)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state vector norm {norm!r} is not 1 within {NORM_ATOL}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "dims", dims)

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    def as_tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem."""
        return self.amps.reshape(self.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Density operator with its subsystem dimensions.

    ``validate=False`` skips the Hermiticity / unit-trace / positivity
    checks; internal code uses it for matrices that hold by construction.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {mat.shape}")
        dims = tensor.check_dims(self.dims, mat.shape[0])
        if self.validate:
            scale = np.linalg.norm(mat)
            if scale == 0 or np.linalg.norm(mat - mat.conj().T) > tensor.EPS_HERM * scale:
                raise ValueError("density matrix is not Hermitian within tolerance")
            tr = mat.trace().real
            if abs(tr - 1.0) > tensor.EPS_HERM:
                raise ValueError(f"density matrix trace {tr!r} is not 1 within {tensor.EPS_HERM}")
            lo = np.linalg.eigvalsh((mat + mat.conj().T) / 2).min()
            if lo < -tensor.EPS_HERM:
                raise ValueError(f"density matrix has eigenvalue {lo} below -{tensor.EPS_HERM}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Result of a bipartite Schmidt decomposition.

    ``coefficients`` are the squared singular values p_i (descending,
    truncated at the relative ``threshold`` on the singular-value
    scale); columns of ``left_vectors`` / ``right_vectors`` are the
    paired orthonormal Schmidt vectors.
    """

    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    threshold: float

    @property
    def rank(self) -> int:
        return self.coefficients.size

    def reconstruct(self) -> np.ndarray:
        """Flat state vector sum_i sqrt(p_i) |L_i>|R_i>."""
        weighted = self.left_vectors * np.sqrt(self.coefficients)
        return np.einsum("ai,bi->ab", weighted, self.right_vectors).reshape(-1)


def to_density(psi: PureState) -> DensityMatrix:
    """Rank-1 projector |psi><psi| (valid by construction, not revalidated)."""
    mat = np.outer(psi.amps, psi.amps.conj())
    return DensityMatrix(mat, psi.dims, validate=False)


def permute_subsystems(psi: PureState, order: Sequence[int]) -> PureState:
    """Reorder subsystems of a pure state; ``order`` as in np.transpose."""
    amps = tensor.permute_subsystems(psi.amps, psi.dims, order)
    dims = tuple(psi.dims[i] for i in order)
    return PureState(amps, dims)


def _resolve_cut(psi: PureState, cut) -> tuple[PureState, int]:
    """Normalize a cut spec to (possibly permuted state, #left subsystems).

    ``cut`` is either an int (number of leading subsystems on the left)
    or an iterable of subsystem indices forming the left block; the
    non-contiguous case is handled by permuting the left block to the
    front (preserving stated order) with the rest behind it in original
    order.
    """
    n = psi.n_subsystems
    if isinstance(cut, (int, np.integer)):
        k = int(cut)
        if not 1 <= k < n:
            raise DimensionError(f"cut must split off 1..{n - 1} subsystems, got {k}")
        return psi, k
    left = [int(i) for i in cut]
    if len(set(left)) != len(left) or not all(0 <= i < n for i in left):
        raise DimensionError(f"cut {cut!r} is not a set of subsystem indices")
    if not 1 <= len(left) < n:
        raise DimensionError("cut must be a nonempty proper subset of subsystems")
    order = left + [i for i in range(n) if i not in left]
    if order == list(range(n)):
        return psi, len(left)
    return permute_subsystems(psi, order), len(left)


def schmidt(psi: PureState, cut) -> SchmidtDecomposition:
    """Schmidt-decompose ``psi`` across a bipartition.

    Parameters
    ----------
    psi : PureState
    cut : int or iterable of int
        Left block: either the number of leading subsystems or an
        explicit set of subsystem indices (any order; permuted up
        front before reshaping).

    The phase convention makes the largest-magnitude component of each
    left vector real positive, pushing the compensating phase onto the
    paired right vector, so equal states decompose identically.
    """
    work, k = _resolve_cut(psi, cut)
    d_left = int(np.prod(work.dims[:k]))
    d_right = int(np.prod(work.dims[k:]))
    u, s, v = tensor.svd(work.amps.reshape(d_left, d_right))
    if s[0] <= 0:
        raise ValueError("zero state has no Schmidt decomposition")
    kept = s > SCHMIDT_RTOL * s[0]
    u = u[:, kept].copy()
    v = v[:, kept].copy()
    s = s[kept]
    # amps = sum_i s_i u_i (x) conj(v_i); rotating u_i and v_i by the same
    # conjugate phase leaves the sum unchanged.
    for i in range(s.size):
        pivot = u[np.abs(u[:, i]).argmax(), i]
        phase = pivot / abs(pivot)
        u[:, i] *= phase.conjugate()
        v[:, i] *= phase.conjugate()
    return SchmidtDecomposition(s**2, u, v.conj(), SCHMIDT_RTOL)


# ---------------------------------------------------------------------------
# Random and named constructions


def _as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_pure(dims: Sequence[int], seed: SeedLike) -> PureState:
    """Haar-random pure state: iid complex Gaussian amplitudes, normalized.

    Real parts are drawn before imaginary parts, so a fixed seed pins
    the exact amplitudes across runs and platforms.
    """
    dims = tuple(int(d) for d in dims)
    size = int(np.prod(dims))
    rng = _as_generator(seed)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    z = re + 1j * im
    return PureState(z / np.linalg.norm(z), dims)


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_isometry(d_out: int, d_in: int, rng: np.random.Generator) -> np.ndarray:
    """First ``d_in`` columns of a Haar unitary on C^d_out (requires d_out >= d_in)."""
    if d_out < d_in:
        raise DimensionError(f"no isometry from dimension {d_in} into {d_out}")
    return haar_random_unitary(d_out, rng)[:, :d_in]


def named_state(name: str, dims: Sequence[int] | None = None, seed: int = 0) -> PureState:
    """Build one of the standard fixture states by name.

    Recognized names: ``bell`` (dims (2,2)), ``ghz`` (equal local
    dimensions, any number of parts), ``w`` (qubits only), ``product``
    (Haar-random product of single-subsystem states), and
    ``embedded_product`` (three parts, B carrying a hidden B1*B2 split
    with dB1 = dA; requires dA * something == dB).
    """
    key = name.strip().lower()
    if key == "bell":
        if dims is None:
            dims = (2, 2)
        dims = tuple(int(d) for d in dims)
        if dims != (2, 2):
            raise DimensionError("bell state is defined on dims (2, 2)")
        amps = np.zeros(4, dtype=complex)
        amps[0] = amps[3] = 1 / np.sqrt(2)
        return PureState(amps, dims)
    if key == "ghz":
        if dims is None:
            dims = (2, 2, 2)
        dims = tuple(int(d) for d in dims)
        d = dims[0]
        if len(dims) < 2 or any(x != d for x in dims):
            raise DimensionError("ghz state needs >= 2 subsystems of equal dimension")
        t = np.zeros(dims, dtype=complex)
        for i in range(d):
            t[(i,) * len(dims)] = 1 / np.sqrt(d)
        return PureState(t.reshape(-1), dims)
    if key == "w":
        if dims is None:
            dims = (2, 2, 2)
        dims = tuple(int(d) for d in dims)
        if len(dims) < 2 or any(x != 2 for x in dims):
            raise DimensionError("w state is defined on >= 2 qubits")
        n = len(dims)
        amps = np.zeros(2**n, dtype=complex)
        for i in range(n):
            amps[1 << (n - 1 - i)] = 1 / np.sqrt(n)
        return PureState(amps, dims)
    if key == "product":
        if dims is None:
            dims = (2, 2)
        rng = np.random.default_rng(seed)
        factors = [haar_random_pure((int(d),), rng).amps for d in dims]
        return PureState(tensor.kron(*factors), tuple(int(d) for d in dims))
    if key == "embedded_product":
        if dims is None:
            dims = (2, 4, 2)
        dims = tuple(int(d) for d in dims)
        if len(dims) != 3:
            raise DimensionError("embedded_product is a three-part state")
        da, db, dc = dims
        if db % da != 0:
            raise DimensionError(
                f"embedded_product picks dB1 = dA = {da}, which must divide dB = {db}"
            )
        return embedded_product(da, da, db // da, dc, d_b=db, seed=seed).state
    raise ValueError(f"unknown state name {name!r}")


@dataclass(frozen=True)
class EmbeddedProductFixture:
    """A three-part state known to factor across its middle subsystem.

    ``state`` lives on (dA, dB, dC); B secretly carries B1 (x) B2 through
    the isometric ``embedding`` (dB x dB1*dB2, columns indexed with B1
    most significant).  The true factors are kept for comparison with
    whatever a solver recovers.
    """

    state: PureState
    psi_ab1: PureState
    psi_b2c: PureState
    embedding: np.ndarray
    dims_b: tuple[int, int]


def embedded_product(
    d_a: int,
    d_b1: int,
    d_b2: int,
    d_c: int,
    d_b: int | None = None,
    seed: SeedLike = 0,
) -> EmbeddedProductFixture:
    """Draw Haar factors on (dA, dB1) and (dB2, dC) and hide the split in B.

    With ``d_b`` larger than dB1*dB2 the product is pushed through a
    random isometry, so the factorization is genuinely non-obvious in
    the computational basis of B.
    """
    if d_b is None:
        d_b = d_b1 * d_b2
    if d_b < d_b1 * d_b2:
        raise DimensionError(f"d_b = {d_b} cannot hold a {d_b1}x{d_b2} split")
    rng = _as_generator(seed)
    psi_ab1 = haar_random_pure((d_a, d_b1), rng)
    psi_b2c = haar_random_pure((d_b2, d_c), rng)
    if d_b == d_b1 * d_b2:
        embedding = haar_random_unitary(d_b, rng)
    else:
        embedding = random_isometry(d_b, d_b1 * d_b2, rng)

    # (a, b1) x (b2, c) -> group (b1 b2) -> embed into B.
    prod = np.einsum(
        "ax,yc->axyc",
        psi_ab1.amps.reshape(d_a, d_b1),
        psi_b2c.amps.reshape(d_b2, d_c),
    ).reshape(d_a, d_b1 * d_b2, d_c)
    amps = np.einsum("bm,amc->abc", embedding, prod).reshape(-1)
    return EmbeddedProductFixture(
        state=PureState(amps, (d_a, d_b, d_c)),
        psi_ab1=psi_ab1,
        psi_b2c=psi_b2c,
        embedding=embedding,
        dims_b=(d_b1, d_b2),
    )


@dataclass(frozen=True)
class ChainProductFixture:
    """An n-part state assembled as a chain of bipartite factors.

    ``factors[k]`` couples the right half of site k to the left half of
    site k+1; middle sites hide their two halves behind the isometries
    in ``embeddings`` (one per middle site, in site order).
    """

    state: PureState
    factors: tuple[PureState, ...]
    embeddings: tuple[np.ndarray, ...]


def chain_product(site_dims: Sequence, seed: SeedLike = 0) -> ChainProductFixture:
    """Build a chain-factorized state.

    ``site_dims`` lists one entry per site: an int for the two end
    sites, an (inner_left, inner_right) pair for each middle site whose
    physical dimension is then inner_left * inner_right (embedded by a
    Haar unitary).  Example: ``[2, (2, 2), (2, 2), 2]`` gives a
    four-party state on dims (2, 4, 4, 2) equal to a product of three
    bipartite factors up to the hidden basis changes.
    """
    if len(site_dims) < 2:
        raise DimensionError("a chain needs at least two sites")
    rng = _as_generator(seed)

    splits: list[tuple[int, int]] = []
    dims: list[int] = []
    for pos, entry in enumerate(site_dims):
        if pos == 0:
            d = int(entry)
            splits.append((1, d))
            dims.append(d)
        elif pos == len(site_dims) - 1:
            d = int(entry)
            splits.append((d, 1))
            dims.append(d)
        else:
            left, right = (int(x) for x in entry)
            splits.append((left, right))
            dims.append(left * right)

    factors = tuple(
        haar_random_pure((splits[k][1], splits[k + 1][0]), rng)
        for k in range(len(site_dims) - 1)
    )
    embeddings = tuple(
        haar_random_unitary(splits[k][0] * splits[k][1], rng)
        for k in range(1, len(site_dims) - 1)
    )

    # Contract the chain left to right: running tensor has shape
    # (built_physical, open_bond).
    running = factors[0].amps.reshape(splits[0][1], splits[1][0])
    for k in range(1, len(site_dims) - 1):
        l, r = splits[k]
        nxt = factors[k].amps.reshape(r, splits[k + 1][0])
        merged = np.einsum("pl,rb->plrb", running, nxt).reshape(running.shape[0], l * r, -1)
        merged = np.einsum("sm,pmb->psb", embeddings[k - 1], merged)
        running = merged.reshape(-1, merged.shape[2])
    amps = running.reshape(-1)
    return ChainProductFixture(
        state=PureState(amps, tuple(dims)),
        factors=factors,
        embeddings=embeddings,
    )


# ---------------------------------------------------------------------------
# JSON interchange
#
# Pure states:     {"dims": [...], "amps": [[re, im], ...]}
# Density inputs:  {"dims": [...], "rho": [[[re, im], ...], ...]}


def _complex_to_pairs(arr: np.ndarray) -> list:
    stacked = np.stack([arr.real, arr.imag], axis=-1)
    return stacked.tolist()


def _pairs_to_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("expected [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_json_dict(psi: PureState) -> dict:
    return {"dims": list(psi.dims), "amps": _complex_to_pairs(psi.amps)}


def state_from_json_dict(obj: dict, renormalize: bool = False) -> PureState:
    amps = _pairs_to_complex(obj["amps"]).reshape(-1)
    dims = obj["dims"]
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("state vector is zero")
    if abs(norm - 1.0) > JSON_NORM_ATOL and not renormalize:
        raise ValueError(
            f"state vector norm is {norm!r}; pass renormalize to accept it"
        )
    if abs(norm - 1.0) > NORM_ATOL:
        # Tolerated drift (or an explicit renormalize) is divided out, but
        # already-normalized amplitudes round-trip bit-exactly.
        amps = amps / norm
    return PureState(amps, tuple(int(d) for d in dims))


def density_from_json_dict(obj: dict, renormalize: bool = False) -> DensityMatrix:
    mat = _pairs_to_complex(obj["rho"])
    dims = tuple(int(d) for d in obj["dims"])
    tr = np.asarray(mat).trace().real
    if tr <= 0:
        raise ValueError(f"density matrix trace {tr!r} cannot be renormalized")
    if abs(tr - 1.0) > JSON_NORM_ATOL and not renormalize:
        raise ValueError(f"density matrix trace is {tr!r}; pass renormalize to accept it")
    if abs(tr - 1.0) > tensor.EPS_HERM:
        # Tolerated drift (or an explicit renormalize) is divided out, but
        # clean inputs round-trip bit-exactly.
        mat = mat / tr
    return DensityMatrix(mat, dims)


def save_state(psi: PureState, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json_dict(psi), fh)
        fh.write("\n")


def load_state_file(path, renormalize: bool = False) -> PureState | DensityMatrix:
    """Read a state JSON file, dispatching on whether it holds amps or rho."""
    with open(path) as fh:
        obj = json.load(fh)
    if "amps" in obj:
        return state_from_json_dict(obj, renormalize=renormalize)
    if "rho" in obj:
        return density_from_json_dict(obj, renormalize=renormalize)
    raise ValueError(f"{path}: neither 'amps' nor 'rho' present")
