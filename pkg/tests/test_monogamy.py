import io
import math

import numpy as np
import pytest

from entneg.monogamy import (
    CSV_COLUMNS,
    DatasetFormatError,
    MonogamyRecord,
    SamplerConfig,
    SaturationSampler,
    VIOLATION_TOL,
    generalized_check,
    haar_scan,
    monogamy_check,
    read_records_csv,
    records_csv_text,
    regenerate_state,
    saturation_sample,
    summarize_records,
    violation_search_unsquared,
    write_records_csv,
)
from entneg.states import PureState, haar_random_pure, named_state

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)


# ---------------------------------------------------------------------------
# closed-form fixtures
#
# W state, by hand: the A|BC cut has Schmidt spectrum {2/3, 1/3}, so
# N(A|BC) = sqrt(2)/3.  Each two-qubit marginal is
# (1/3)(|01>+|10>)(<01|+<10|) + (1/3)|00><00|, whose partial transpose
# has minimal eigenvalue (1 - sqrt(5))/6, so N(A|B) = (sqrt(5)-1)/6.

W_N_ABC_SQ = 2.0 / 9.0
W_N_AB_SQ = (3.0 - SQRT5) / 18.0          # ((sqrt(5)-1)/6)^2
W_SLACK = (SQRT5 - 1.0) / 9.0             # 2/9 - 2*(3-sqrt5)/18
W_UNSQUARED = (1.0 + SQRT2 - SQRT5) / 3.0  # sqrt2/3 - 2(sqrt5-1)/6, positive


def test_w_state_closed_forms():
    rec = monogamy_check(named_state("w"))
    assert abs(rec.n_abc_sq - W_N_ABC_SQ) < 1e-12
    assert abs(rec.n_ab_sq - W_N_AB_SQ) < 1e-12
    assert abs(rec.n_ac_sq - W_N_AB_SQ) < 1e-12
    assert abs(rec.slack - W_SLACK) < 1e-12
    assert abs(rec.unsquared_slack - W_UNSQUARED) < 1e-12
    assert rec.unsquared_slack > 0  # the W state does NOT violate the unsquared form
    assert not rec.violated
    assert rec.m == 2


def test_ghz_record():
    rec = monogamy_check(named_state("ghz"))
    assert abs(rec.n_abc_sq - 0.25) < 1e-12
    assert rec.n_ab_sq < 1e-12
    assert rec.n_ac_sq < 1e-12
    assert abs(rec.slack - 0.25) < 1e-12
    assert abs(rec.unsquared_slack - 0.5) < 1e-12


def test_bell_tensor_ancilla_saturates():
    # (|00>+|11>)/sqrt2 on AB, |0> on C: N(A|BC) = N(A|B) = 1/2 exactly
    amps = np.zeros(8, dtype=complex)
    amps[0] = amps[6] = 1 / SQRT2  # |000> + |110>
    rec = monogamy_check(PureState(amps, (2, 2, 2)))
    assert abs(rec.n_abc_sq - 0.25) < 1e-12
    assert abs(rec.n_ab_sq - 0.25) < 1e-12
    assert rec.n_ac_sq < 1e-12
    assert abs(rec.slack) < 1e-12


def test_squared_inequality_holds_on_haar_batches():
    for m, count in ((2, 150), (3, 60)):
        for rec in haar_scan(m, count, seed=123):
            assert rec.slack >= VIOLATION_TOL
            assert rec.m == m
            assert rec.kind == "haar"


def test_unsquared_violations_exist_at_m2():
    records = list(haar_scan(2, 400, seed=0))
    worst = min(r.unsquared_slack for r in records)
    assert worst < -1e-3


def test_monogamy_check_requires_three_parts():
    with pytest.raises(ValueError):
        monogamy_check(haar_random_pure((2, 2), seed=0))


def test_nonuniform_dims_record_m_zero():
    rec = monogamy_check(haar_random_pure((2, 3, 2), seed=1))
    assert rec.m == 0
    assert rec.slack >= VIOLATION_TOL


# ---------------------------------------------------------------------------
# generalized inequality


def test_generalized_ghz4():
    rec = generalized_check(named_state("ghz", (2, 2, 2, 2)))
    assert abs(rec.n_a_rest_sq - 0.25) < 1e-12
    assert all(v < 1e-12 for v in rec.n_a_pair_sq)
    assert abs(rec.slack - 0.25) < 1e-12
    assert len(rec.n_a_pair_sq) == 3


def test_generalized_holds_on_haar_four_qubits():
    for seed in range(100):
        rec = generalized_check(haar_random_pure((2, 2, 2, 2), seed=seed), seed=seed)
        assert rec.slack >= VIOLATION_TOL


def test_generalized_reduces_to_three_party():
    psi = haar_random_pure((2, 2, 2), seed=7)
    gen = generalized_check(psi)
    rec = monogamy_check(psi)
    assert abs(gen.slack - rec.slack) < 1e-12


# ---------------------------------------------------------------------------
# scans


def test_haar_scan_is_deterministic_and_worker_invariant():
    serial = list(haar_scan(2, 40, seed=5))
    parallel = list(haar_scan(2, 40, seed=5, workers=3))
    assert serial == parallel
    again = list(haar_scan(2, 40, seed=5))
    assert serial == again
    assert [r.step for r in serial] == list(range(40))


def test_scan_records_regenerate():
    records = list(haar_scan(3, 10, seed=11))
    for rec in records[::3]:
        redo = monogamy_check(regenerate_state(rec), seed=rec.seed, step=rec.step)
        assert redo == rec


def test_regenerate_rejects_chain_records():
    rec = MonogamyRecord("chain", 0, 5, 2, 0.1, 0.0, 0.0, 0.1, 0.1)
    with pytest.raises(ValueError):
        regenerate_state(rec)


def test_violation_search_returns_minimum():
    records = list(haar_scan(2, 200, seed=3))
    best = violation_search_unsquared(2, 200, seed=3)
    assert best.unsquared_slack == min(r.unsquared_slack for r in records)
    redo = monogamy_check(regenerate_state(best))
    assert abs(redo.unsquared_slack - best.unsquared_slack) < 1e-15


# ---------------------------------------------------------------------------
# sampler


def test_sampler_config_validation():
    SamplerConfig(m=2, steps=10, burn_in=0, stride=1)
    with pytest.raises(ValueError):
        SamplerConfig(m=1, steps=10)
    with pytest.raises(ValueError):
        SamplerConfig(m=2, steps=10, burn_in=10)
    with pytest.raises(ValueError):
        SamplerConfig(m=2, steps=10, burn_in=0, stride=0)
    with pytest.raises(ValueError):
        SamplerConfig(m=2, steps=10, burn_in=0, sigma=0.0)
    with pytest.raises(ValueError):
        SamplerConfig(m=2, steps=10, burn_in=0, temperature=-1.0)


def test_sampler_deterministic():
    cfg = SamplerConfig(m=2, steps=400, burn_in=50, stride=10, seed=8)
    recs1, rate1 = saturation_sample(cfg)
    recs2, rate2 = saturation_sample(cfg)
    assert recs1 == recs2
    assert rate1 == rate2
    assert len(recs1) == (400 - 50) // 10
    assert all(r.kind == "chain" for r in recs1)


def test_sampler_acceptance_rate_strictly_interior():
    cfg = SamplerConfig(m=2, steps=600, burn_in=100, seed=2)
    sampler = SaturationSampler(cfg)
    records = list(sampler.run())
    assert records
    assert 0.0 < sampler.acceptance_rate < 1.0


def test_sampler_concentrates_below_haar():
    cfg = SamplerConfig(m=2, steps=1500, burn_in=300, stride=10, seed=4)
    records, _ = saturation_sample(cfg)
    chain_median = float(np.median([r.slack for r in records]))
    haar_median = float(np.median([r.slack for r in haar_scan(2, 300, seed=4)]))
    assert chain_median < haar_median
    assert all(r.slack >= VIOLATION_TOL for r in records)


def test_sampler_flat_objective_accepts_everything():
    cfg = SamplerConfig(m=2, steps=300, burn_in=50, stride=5, seed=6)
    sampler = SaturationSampler(cfg, energy=lambda rec: 0.0)
    list(sampler.run())
    assert sampler.acceptance_rate == 1.0


def test_sampler_hot_chain_accepts_nearly_everything():
    cfg = SamplerConfig(m=2, steps=300, burn_in=50, temperature=1e9, seed=7)
    sampler = SaturationSampler(cfg)
    list(sampler.run())
    assert sampler.acceptance_rate > 0.999


def test_sampler_flat_objective_marginals_look_haar():
    # with a flat objective the chain is an isotropic random walk on the
    # sphere; its n_abc_sq statistics should track the Haar ensemble at
    # coarse tolerance
    cfg = SamplerConfig(m=2, steps=4000, burn_in=500, stride=10, sigma=0.5, seed=9)
    sampler = SaturationSampler(cfg, energy=lambda rec: 0.0)
    chain_mean = float(np.mean([r.n_abc_sq for r in sampler.run()]))
    haar_mean = float(np.mean([r.n_abc_sq for r in haar_scan(2, 500, seed=9)]))
    assert abs(chain_mean - haar_mean) < 0.3 * haar_mean


# ---------------------------------------------------------------------------
# CSV


def sample_records():
    return list(haar_scan(2, 7, seed=13)) + [
        MonogamyRecord("chain", 3, 120, 2, 0.1, 0.05, 0.04, 0.01, -0.02)
    ]


def test_csv_roundtrip_exact(tmp_path):
    records = sample_records()
    path = tmp_path / "records.csv"
    n = write_records_csv(path, records)
    assert n == len(records)
    back = read_records_csv(path)
    assert back == records  # float fields bit-exact through .17g


def test_csv_text_format():
    text = records_csv_text(sample_records())
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert "\r" not in text
    # 17 significant digits: 0.1 must appear in its full round-trip form
    rec = MonogamyRecord("haar", 0, 0, 2, 0.1, 0.0, 0.0, 0.1, 0.1)
    assert "0.10000000000000001" in records_csv_text([rec])


def test_csv_header_validation():
    with pytest.raises(DatasetFormatError):
        read_records_csv(io.StringIO("a,b,c\n1,2,3\n"))
    with pytest.raises(DatasetFormatError):
        read_records_csv(io.StringIO(""))
    header = ",".join(CSV_COLUMNS)
    with pytest.raises(DatasetFormatError):
        read_records_csv(io.StringIO(header + "\nhaar,1,2\n"))
    with pytest.raises(DatasetFormatError):
        read_records_csv(io.StringIO(header + "\nhaar,x,0,2,0,0,0,0,0\n"))


def test_csv_empty_dataset(tmp_path):
    path = tmp_path / "empty.csv"
    assert write_records_csv(path, []) == 0
    assert read_records_csv(path) == []


def test_summarize_records():
    records = sample_records()
    s = summarize_records(records)
    assert s["count"] == len(records)
    assert s["min_slack"] == min(r.slack for r in records)
    assert s["min_unsquared_slack"] == min(r.unsquared_slack for r in records)
    assert s["violations"] == sum(r.slack < VIOLATION_TOL for r in records)
    empty = summarize_records([])
    assert empty["count"] == 0
    assert empty["min_slack"] is None
