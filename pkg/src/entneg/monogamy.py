"""Monogamy of squared negativity: per-state checks, Haar scans, Metropolis sampling.

For a three-part pure state the squared negativities obey

    N(A|BC)^2 >= N(A|B)^2 + N(A|C)^2,

with an n-party generalization summing over all single-partner terms.
The *unsquared* inequality is false: a few percent of Haar-random
three-qubit states violate it, which is what ``violation_search_unsquared``
is for.  Everything here is driven by integer seeds through numpy's
PCG64 generator; scan entries derive per-index seeds, so any single
record can be regenerated without replaying the run.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import io
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .negativity import negativity, pure_negativity_from_schmidt
from .states import DensityMatrix, PureState, haar_random_pure, schmidt
from .tensor import partial_trace

# Slack this far below zero counts as a genuine violation rather than
# eigensolver noise (the noise floor sits near 1e-14 on these sizes).
VIOLATION_TOL = -1e-10

CSV_COLUMNS = (
    "kind",
    "seed",
    "step",
    "m",
    "n_abc_sq",
    "n_ab_sq",
    "n_ac_sq",
    "slack",
    "unsquared_slack",
)

_INT_COLUMNS = {"seed", "step", "m"}


@dataclass(frozen=True)
class MonogamyRecord:
    """One evaluated three-part state.

    ``kind`` tags provenance ("haar" for scan entries, "chain" for
    Metropolis samples); ``seed``/``step`` pin down how to regenerate
    the state; ``m`` is the common local dimension (0 when the
    subsystem dimensions differ).  ``slack`` is the squared-inequality
    margin n_abc_sq - n_ab_sq - n_ac_sq, ``unsquared_slack`` the same
    margin without the squares.
    """

    kind: str
    seed: int
    step: int
    m: int
    n_abc_sq: float
    n_ab_sq: float
    n_ac_sq: float
    slack: float
    unsquared_slack: float

    @property
    def violated(self) -> bool:
        return self.slack < VIOLATION_TOL


def monogamy_check(
    psi: PureState, kind: str = "haar", seed: int = 0, step: int = 0
) -> MonogamyRecord:
    """Evaluate the three negativities of a three-part pure state.

    N(A|BC) comes from the Schmidt coefficients (pure-state route);
    N(A|B) and N(A|C) from partial transposes of the two-party
    marginals.
    """
    if psi.n_subsystems != 3:
        raise ValueError(f"monogamy check needs three subsystems, got {psi.n_subsystems}")
    d_a, d_b, d_c = psi.dims
    tens = psi.as_tensor()

    n_abc = pure_negativity_from_schmidt(schmidt(psi, 1).coefficients)
    rho_ab = np.einsum("abc,dec->abde", tens, tens.conj()).reshape(d_a * d_b, d_a * d_b)
    rho_ac = np.einsum("abc,dbe->acde", tens, tens.conj()).reshape(d_a * d_c, d_a * d_c)
    n_ab = negativity(DensityMatrix(rho_ab, (d_a, d_b), validate=False), part=0).negativity
    n_ac = negativity(DensityMatrix(rho_ac, (d_a, d_c), validate=False), part=0).negativity

    m = d_a if d_a == d_b == d_c else 0
    return MonogamyRecord(
        kind=kind,
        seed=int(seed),
        step=int(step),
        m=m,
        n_abc_sq=n_abc**2,
        n_ab_sq=n_ab**2,
        n_ac_sq=n_ac**2,
        slack=n_abc**2 - n_ab**2 - n_ac**2,
        unsquared_slack=n_abc - n_ab - n_ac,
    )


@dataclass(frozen=True)
class GeneralizedRecord:
    """n-party version: N(A|rest)^2 against the sum of all N(A|B_i)^2."""

    seed: int
    dims: tuple[int, ...]
    n_a_rest_sq: float
    n_a_pair_sq: tuple[float, ...]
    slack: float


def generalized_check(psi: PureState, seed: int = 0) -> GeneralizedRecord:
    """Check the n-party squared inequality with subsystem 0 as the focus."""
    n = psi.n_subsystems
    if n < 2:
        raise ValueError("generalized check needs at least two subsystems")
    n_a_rest = pure_negativity_from_schmidt(schmidt(psi, 1).coefficients)
    rho_full = np.outer(psi.amps, psi.amps.conj())
    pair_sq = []
    for i in range(1, n):
        rho = partial_trace(rho_full, psi.dims, keep=(0, i))
        pair = DensityMatrix(rho, (psi.dims[0], psi.dims[i]), validate=False)
        pair_sq.append(negativity(pair, part=0).negativity ** 2)
    total = float(sum(pair_sq))
    return GeneralizedRecord(
        seed=int(seed),
        dims=psi.dims,
        n_a_rest_sq=n_a_rest**2,
        n_a_pair_sq=tuple(pair_sq),
        slack=n_a_rest**2 - total,
    )


# ---------------------------------------------------------------------------
# Haar scanning


def _scan_state(m: int, seed: int, index: int) -> PureState:
    """State number ``index`` of a scan: seed derived, not sequential draws."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    return haar_random_pure((m, m, m), ss)


def _scan_chunk(m: int, seed: int, start: int, stop: int) -> list[MonogamyRecord]:
    return [
        monogamy_check(_scan_state(m, seed, i), kind="haar", seed=seed, step=i)
        for i in range(start, stop)
    ]


def haar_scan(
    m: int, count: int, seed: int, workers: int = 1
) -> Iterator[MonogamyRecord]:
    """Yield monogamy records for ``count`` Haar states on (m, m, m).

    Record ``step`` is the scan index; each state's generator is seeded
    by (seed, spawn_key=(step,)), so output is identical for any worker
    count and single records can be regenerated directly.
    """
    if m < 2:
        raise ValueError("local dimension must be at least 2")
    if count < 0:
        raise ValueError("count must be non-negative")
    if workers <= 1 or count == 0:
        for i in range(count):
            yield monogamy_check(_scan_state(m, seed, i), kind="haar", seed=seed, step=i)
        return

    bounds = np.linspace(0, count, min(workers, count) + 1).astype(int)
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_scan_chunk, m, seed, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
        ]
        for fut in futures:  # submission order == index order
            yield from fut.result()


def regenerate_state(record: MonogamyRecord) -> PureState:
    """Rebuild the state behind a scan record (haar kind only)."""
    if record.kind != "haar":
        raise ValueError(
            f"only haar records regenerate directly; {record.kind!r} needs its chain replayed"
        )
    if record.m < 2:
        raise ValueError("record does not carry a uniform local dimension")
    return _scan_state(record.m, record.seed, record.step)


def violation_search_unsquared(m: int, count: int, seed: int) -> MonogamyRecord:
    """Scan Haar states and return the record minimizing the unsquared slack.

    The unsquared inequality N(A|BC) >= N(A|B) + N(A|C) fails on a
    positive fraction of Haar states already at m = 2; the returned
    record (negative ``unsquared_slack``) is reproducible via
    ``regenerate_state``.
    """
    best = None
    for rec in haar_scan(m, count, seed):
        if best is None or rec.unsquared_slack < best.unsquared_slack:
            best = rec
    if best is None:
        raise ValueError("search needs count >= 1")
    return best


# ---------------------------------------------------------------------------
# Metropolis sampling toward the saturation manifold


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for the saturation sampler.

    ``steps`` counts Metropolis proposals; records are emitted every
    ``stride`` accepted-or-not steps after ``burn_in``.  The energy is
    the squared-inequality slack, so low temperature walks the chain
    toward the saturation manifold.
    """

    m: int
    steps: int
    seed: int = 0
    sigma: float = 0.05
    temperature: float = 1e-3
    burn_in: int = 1000
    stride: int = 10

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("local dimension must be at least 2")
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if not 0 <= self.burn_in < self.steps:
            raise ValueError("burn_in must lie in [0, steps)")
        if self.stride < 1:
            raise ValueError("stride must be positive")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")


class SaturationSampler:
    """Metropolis chain over pure states on (m, m, m).

    Proposal: add iid complex Gaussian noise of scale sigma to the
    amplitudes and renormalize.  Acceptance: min(1, exp((E_old -
    E_new) / T)) with E the squared-inequality slack by default (an
    ``energy`` callable over records can replace it, e.g. for flat-
    objective sanity checks).  Iterating ``run`` yields records whose
    ``step`` is the chain step at emission.
    """

    def __init__(
        self,
        config: SamplerConfig,
        energy: Callable[[MonogamyRecord], float] | None = None,
    ):
        self.config = config
        self.energy = energy if energy is not None else lambda rec: rec.slack
        self.accepted = 0
        self.steps_run = 0

    @property
    def acceptance_rate(self) -> float:
        if self.steps_run == 0:
            return 0.0
        return self.accepted / self.steps_run

    def run(self) -> Iterator[MonogamyRecord]:
        cfg = self.config
        dims = (cfg.m,) * 3
        size = cfg.m**3
        rng = np.random.default_rng(cfg.seed)

        psi = haar_random_pure(dims, rng)
        current = monogamy_check(psi, kind="chain", seed=cfg.seed, step=0)
        e_cur = self.energy(current)

        for step in range(1, cfg.steps + 1):
            noise = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            amps = psi.amps + cfg.sigma * noise
            candidate = PureState(amps / np.linalg.norm(amps), dims)
            proposed = monogamy_check(candidate, kind="chain", seed=cfg.seed, step=step)
            e_new = self.energy(proposed)

            # Draw the uniform unconditionally so the stream position is
            # independent of the accept/reject pattern.
            u = rng.random()
            if e_new <= e_cur or u < np.exp((e_cur - e_new) / cfg.temperature):
                psi, current, e_cur = candidate, proposed, e_new
                self.accepted += 1
            self.steps_run += 1

            if step > cfg.burn_in and (step - cfg.burn_in) % cfg.stride == 0:
                yield dataclasses.replace(current, step=step)


def saturation_sample(config: SamplerConfig) -> tuple[list[MonogamyRecord], float]:
    """Run a sampler to completion; returns (records, acceptance_rate)."""
    sampler = SaturationSampler(config)
    records = list(sampler.run())
    return records, sampler.acceptance_rate


# ---------------------------------------------------------------------------
# CSV dataset format
#
# Header exactly CSV_COLUMNS, LF line endings, floats at 17 significant
# digits (round-trip exact for doubles).


def _format_value(column: str, value) -> str:
    if column == "kind":
        return str(value)
    if column in _INT_COLUMNS:
        return str(int(value))
    return format(float(value), ".17g")


def write_records_csv(path_or_file, records: Iterable[MonogamyRecord]) -> int:
    """Write records as CSV; returns the number written."""
    if hasattr(path_or_file, "write"):
        return _write_csv(path_or_file, records)
    with open(path_or_file, "w", newline="") as fh:
        return _write_csv(fh, records)


def _write_csv(fh, records: Iterable[MonogamyRecord]) -> int:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    count = 0
    for rec in records:
        writer.writerow(
            [_format_value(col, getattr(rec, col)) for col in CSV_COLUMNS]
        )
        count += 1
    return count


class DatasetFormatError(ValueError):
    """CSV file does not match the monogamy record schema."""


def read_records_csv(path_or_file) -> list[MonogamyRecord]:
    """Read a record CSV produced by write_records_csv (header checked)."""
    if hasattr(path_or_file, "read"):
        return _read_csv(path_or_file)
    with open(path_or_file, newline="") as fh:
        return _read_csv(fh)


def _read_csv(fh) -> list[MonogamyRecord]:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetFormatError("empty file, expected a header row") from None
    if tuple(header) != CSV_COLUMNS:
        raise DatasetFormatError(
            f"header {header!r} does not match expected columns {list(CSV_COLUMNS)}"
        )
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(CSV_COLUMNS):
            raise DatasetFormatError(f"line {lineno}: expected {len(CSV_COLUMNS)} fields")
        fields = dict(zip(CSV_COLUMNS, row))
        try:
            out.append(
                MonogamyRecord(
                    kind=fields["kind"],
                    seed=int(fields["seed"]),
                    step=int(fields["step"]),
                    m=int(fields["m"]),
                    n_abc_sq=float(fields["n_abc_sq"]),
                    n_ab_sq=float(fields["n_ab_sq"]),
                    n_ac_sq=float(fields["n_ac_sq"]),
                    slack=float(fields["slack"]),
                    unsquared_slack=float(fields["unsquared_slack"]),
                )
            )
        except ValueError as exc:
            raise DatasetFormatError(f"line {lineno}: {exc}") from None
    return out


def records_csv_text(records: Iterable[MonogamyRecord]) -> str:
    buf = io.StringIO()
    _write_csv(buf, records)
    return buf.getvalue()


def summarize_records(records: Sequence[MonogamyRecord]) -> dict:
    """Small summary dict used by the CLI after scans and sampling runs."""
    if not records:
        return {
            "count": 0,
            "violations": 0,
            "min_slack": None,
            "min_unsquared_slack": None,
        }
    slacks = [r.slack for r in records]
    unsq = [r.unsquared_slack for r in records]
    return {
        "count": len(records),
        "violations": sum(r.violated for r in records),
        "min_slack": min(slacks),
        "min_unsquared_slack": min(unsq),
    }


def default_workers() -> int:
    """Worker count for scans when the CLI flag is omitted (env override)."""
    env = os.environ.get("ENTNEG_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1
