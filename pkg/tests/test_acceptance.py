"""End-to-end acceptance checks.

Each test prints one ``criterion NN: PASS/FAIL`` line (visible with
``pytest -s`` or in the captured output of failures) and then asserts,
so ``pytest -v tests/test_acceptance.py`` gives one verdict per
criterion.  The heavyweight ensembles are module-scoped fixtures shared
across criteria.
"""

import numpy as np
import pytest

from entneg.cli import main
from entneg.disentangle import (
    NotFactorizableError,
    chain_factorize,
    check_disentangling,
    corollary4_check,
    factorize,
)
from entneg.monogamy import (
    SamplerConfig,
    generalized_check,
    haar_scan,
    monogamy_check,
    saturation_sample,
    violation_search_unsquared,
)
from entneg.negativity import negativity, optimal_decomposition
from entneg.states import (
    chain_product,
    embedded_product,
    haar_random_pure,
    named_state,
    schmidt,
    to_density,
)


def _criterion(label: str, desc: str, ok: bool, detail: str = ""):
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'} - {desc}"
    if detail:
        line += f" [{detail}]"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# shared ensembles


@pytest.fixture(scope="module")
def haar_records():
    return {m: list(haar_scan(m, 10_000, seed=1000 + m)) for m in (2, 3, 4)}


@pytest.fixture(scope="module")
def chain_runs():
    out = {}
    for m in (2, 3):
        records, rate = saturation_sample(SamplerConfig(m=m, steps=10_000, seed=2000 + m))
        out[m] = (records, rate)
    return out


@pytest.fixture(scope="module")
def embedded_fixtures():
    combos = [
        (da, db1, db2, dc)
        for da in (2, 3)
        for db1 in (2, 3)
        for db2 in (2, 3)
        for dc in (2, 3)
    ]
    return [
        embedded_product(*combos[i % len(combos)], seed=3000 + i) for i in range(100)
    ]


# ---------------------------------------------------------------------------


def test_criterion_01_pure_state_pt_spectrum():
    worst = 0.0
    for m in (2, 3, 4):
        for i in range(200):
            psi = haar_random_pure((m, m, m), np.random.SeedSequence((m, 41, i)))
            p = schmidt(psi, 1).coefficients
            expected = list(p)
            for a in range(p.size):
                for b in range(a + 1, p.size):
                    root = float(np.sqrt(p[a] * p[b]))
                    expected += [root, -root]
            expected += [0.0] * (m**3 - len(expected))
            spectrum = negativity(to_density(psi), part=0).spectrum
            diff = float(np.max(np.abs(np.sort(spectrum) - np.sort(expected))))
            worst = max(worst, diff)
    _criterion(
        "01",
        "pure-state partial-transpose spectrum matches {p_i} U {+-sqrt(p_i p_j)}",
        worst < 1e-9,
        f"max elementwise deviation {worst:.3e} over 600 states",
    )


def test_criterion_02_optimal_decomposition_equivalences():
    rng = np.random.default_rng(77)
    worst_tn, worst_neg, worst_ov = 0.0, 0.0, 0.0
    for _ in range(100):
        g = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        a = (g + g.conj().T) / 2
        dec = optimal_decomposition(a)
        # independent routes: SVD for the trace norm, eigvalsh for the weight
        tn = float(np.linalg.svd(a, compute_uv=False).sum())
        evals = np.linalg.eigvalsh(a)
        neg = float(-evals[evals < 0].sum())
        worst_tn = max(worst_tn, abs(dec.trace_norm - tn) / tn)
        worst_neg = max(worst_neg, abs(dec.a_minus - neg))
        overlap = abs(np.trace(dec.rho_plus.matrix @ dec.rho_minus.matrix))
        worst_ov = max(worst_ov, float(overlap))
    _criterion(
        "02",
        "optimal decomposition: ||A||_1 = a+ + a-, N = a-, tr(rho+ rho-) = 0",
        worst_tn <= 1e-9 and worst_neg <= 1e-9 and worst_ov <= 1e-10,
        f"rel trace-norm {worst_tn:.2e}, weight {worst_neg:.2e}, overlap {worst_ov:.2e}",
    )


def test_criterion_03_disentangling_forward(embedded_fixtures):
    ok = True
    worst_resid = 0.0
    worst_cond = 0.0
    worst_spec = 0.0
    for fx in embedded_fixtures:
        verdict = check_disentangling(fx.state)
        ok &= verdict.holds
        worst_cond = max(worst_cond, verdict.condition_residual)
        fr = factorize(fx.state)
        worst_resid = max(worst_resid, fr.reconstruction_residual)
        for rec, truth in ((fr.psi_ab1, fx.psi_ab1), (fr.psi_b2c, fx.psi_b2c)):
            p_rec = schmidt(rec, 1).coefficients
            p_true = schmidt(truth, 1).coefficients
            if p_rec.size != p_true.size:
                ok = False
                continue
            worst_spec = max(worst_spec, float(np.max(np.abs(p_rec - p_true))))
    ok &= worst_cond < 1e-9 and worst_resid < 1e-9 and worst_spec < 1e-9
    _criterion(
        "03",
        "100 embedded-product fixtures: holds, residuals < 1e-9, spectra recovered",
        ok,
        f"cond {worst_cond:.2e}, recon {worst_resid:.2e}, spectra {worst_spec:.2e}",
    )


def test_criterion_04_converse_and_negative_controls():
    ghz = named_state("ghz")
    verdict = check_disentangling(ghz)
    gap_ok = abs(verdict.gap - 0.5) <= 1e-10 and not verdict.holds
    raised = False
    try:
        factorize(ghz)
    except NotFactorizableError:
        raised = True
    false_positives = 0
    min_gap = np.inf
    for i in range(1000):
        psi = haar_random_pure((2, 2, 2), np.random.SeedSequence((4, i)))
        v = check_disentangling(psi, tol=1e-9)
        min_gap = min(min_gap, v.gap)
        if v.holds:
            false_positives += 1
    _criterion(
        "04",
        "GHZ gap = 0.5 and not factorizable; 1000 Haar qubit states, no false positives",
        gap_ok and raised and false_positives == 0,
        f"gap {verdict.gap:.12f}, false positives {false_positives}, min gap {min_gap:.3e}",
    )


def test_criterion_05_outer_marginal_decouples(embedded_fixtures):
    worst_n = 0.0
    worst_resid = 0.0
    for fx in embedded_fixtures:
        res = corollary4_check(fx.state)
        worst_n = max(worst_n, res.n_ac)
        worst_resid = max(worst_resid, res.product_residual)
    _criterion(
        "05",
        "every fixture: N(A|C) < 1e-9 and rho_AC = rho_A (x) rho_C within 1e-9",
        worst_n < 1e-9 and worst_resid < 1e-9,
        f"max N(A|C) {worst_n:.2e}, max product residual {worst_resid:.2e}",
    )


def test_criterion_06_chain_factorization():
    ok = True
    worst = 0.0
    for i in range(20):
        fx = chain_product([2, (2, 2), (2, 2), 2], seed=6000 + i)
        res = chain_factorize(fx.state)
        ok &= res.factorized
        worst = max(worst, res.total_residual)
    ghz4 = chain_factorize(named_state("ghz", (2, 2, 2, 2)))
    ok &= worst < 1e-8 and (not ghz4.factorized) and ghz4.failed_cut == 0
    _criterion(
        "06",
        "20 four-party chains factorize (residual < 1e-8); 4-qubit GHZ fails at cut 0",
        ok,
        f"max residual {worst:.2e}, ghz4 failed_cut {ghz4.failed_cut}",
    )


def test_criterion_07_squared_monogamy(haar_records, chain_runs):
    violations = 0
    min_slack = np.inf
    total = 0
    for m, records in haar_records.items():
        for rec in records:
            total += 1
            min_slack = min(min_slack, rec.slack)
            if rec.slack < -1e-10:
                violations += 1
    for m, (records, _) in chain_runs.items():
        for rec in records:
            total += 1
            min_slack = min(min_slack, rec.slack)
            if rec.slack < -1e-10:
                violations += 1
    _criterion(
        "07",
        "squared inequality: no violations over Haar m in {2,3,4} and chains m in {2,3}",
        violations == 0,
        f"{total} records, min slack {min_slack:.3e}",
    )


def test_criterion_08_generalized_monogamy():
    violations = 0
    min_slack = np.inf
    for i in range(10_000):
        psi = haar_random_pure((2, 2, 2, 2), np.random.SeedSequence((8, i)))
        rec = generalized_check(psi, seed=i)
        min_slack = min(min_slack, rec.slack)
        if rec.slack < -1e-10:
            violations += 1
    _criterion(
        "08",
        "four-qubit generalized inequality: no violations over 10^4 Haar states",
        violations == 0,
        f"min slack {min_slack:.3e}",
    )


def test_criterion_09a_w_state_unsquared():
    # Stated expectation: the W state itself has negative unsquared slack.
    # Its actual value is (1 + sqrt(2) - sqrt(5))/3 = +0.0594 (the two-qubit
    # marginals are too weakly entangled: N(A|B) = (sqrt(5)-1)/6), so this
    # check cannot pass as written; it is kept faithful rather than weakened.
    rec = monogamy_check(named_state("w"))
    _criterion(
        "09a",
        "W state exhibits unsquared_slack < 0",
        rec.unsquared_slack < 0,
        f"unsquared_slack {rec.unsquared_slack:+.6f}",
    )


def test_criterion_09b_unsquared_search():
    best = violation_search_unsquared(2, 1000, seed=0)
    _criterion(
        "09b",
        "10^3-state qubit search exhibits unsquared_slack < 0",
        best.unsquared_slack < 0,
        f"min unsquared_slack {best.unsquared_slack:+.6f} at step {best.step}",
    )


def test_criterion_10_sampler_concentration(haar_records, chain_runs):
    chain_median = float(np.median([r.slack for r in chain_runs[3][0]]))
    haar_p10 = float(np.percentile([r.slack for r in haar_records[3]], 10))
    _criterion(
        "10",
        "m=3 chain median slack below Haar scan 10th percentile",
        chain_median < haar_p10,
        f"chain median {chain_median:.4f} vs Haar p10 {haar_p10:.4f}",
    )


def test_criterion_11_reproducibility(tmp_path):
    pairs = []
    for tag in ("x", "y"):
        csv_scan = tmp_path / f"scan_{tag}.csv"
        svg = tmp_path / f"scan_{tag}.svg"
        code = main([
            "monogamy", "scan", "--m", "2", "--count", "200", "--seed", "5",
            "--out", str(csv_scan), "--svg", str(svg),
        ])
        assert code == 0
        csv_chain = tmp_path / f"chain_{tag}.csv"
        code = main([
            "monogamy", "sample", "--m", "2", "--steps", "800", "--burn-in", "100",
            "--seed", "6", "--out", str(csv_chain),
        ])
        assert code == 0
        pairs.append((csv_scan.read_bytes(), svg.read_bytes(), csv_chain.read_bytes()))
    ok = pairs[0] == pairs[1]
    _criterion(
        "11",
        "identical seeds give byte-identical CSVs and SVGs across two runs",
        ok,
        f"scan csv {len(pairs[0][0])} B, svg {len(pairs[0][1])} B, chain csv {len(pairs[0][2])} B",
    )
