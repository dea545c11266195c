"""Command-line front end.

Subcommands
-----------
negativity   negativity of a density matrix or pure state across a cut
disentangle  check N(A|BC) == N(A|B); factorize (or chain-factorize) on success
monogamy     scan / sample / search datasets of squared-negativity records
report       render a dataset CSV to an SVG scatter

Exit codes: 0 success, 1 error (bad input, bad usage, missing file),
2 negative-but-valid verdict (condition fails, chain breaks, search
finds nothing).  Every command that writes an output dataset also
writes ``<output>.manifest.json`` recording the command line, seeds,
package version, and SHA-256 digests of file inputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .disentangle import (
    chain_factorize,
    check_disentangling,
    factorization_to_json_dict,
    factorize,
)
from .monogamy import (
    SamplerConfig,
    SaturationSampler,
    haar_scan,
    read_records_csv,
    summarize_records,
    violation_search_unsquared,
    write_records_csv,
    default_workers,
    VIOLATION_TOL,
)
from .negativity import negativity
from .report import render_scatter
from .states import (
    PureState,
    load_state_file,
    named_state,
    save_state,
    to_density,
)

_NAMED_STATES = ("bell", "ghz", "w", "product", "embedded_product")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for
    # negative verdicts here, so remap usage problems to plain errors.
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.replace(" ", "").split(",") if part)
    except ValueError:
        raise ValueError(f"cannot parse dims {text!r}; expected e.g. 2,2,2") from None
    if not dims:
        raise ValueError("dims list is empty")
    return dims


def _parse_cut(text: str, n: int) -> tuple[int, ...]:
    """Parse a bipartition like '0|12' or '0,3|1,2'; returns the left block."""
    sides = text.split("|")
    if len(sides) != 2:
        raise ValueError(f"cut {text!r} must contain exactly one '|'")

    def side(s: str) -> list[int]:
        s = s.replace(" ", "")
        if not s:
            return []
        if "," in s:
            return [int(tok) for tok in s.split(",") if tok]
        return [int(ch) for ch in s]

    left, right = side(sides[0]), side(sides[1])
    if sorted(left + right) != list(range(n)):
        raise ValueError(
            f"cut {text!r} is not a partition of the {n} subsystems 0..{n - 1}"
        )
    if not left or not right:
        raise ValueError("both sides of the cut must be nonempty")
    return tuple(left)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _load_state(args):
    """Resolve --state into a state object plus a manifest input stanza."""
    spec = args.state
    renorm = getattr(args, "renormalize", False)
    path = Path(spec)
    if path.exists():
        return load_state_file(path, renormalize=renorm), {
            "source": str(path),
            "sha256": _sha256(path),
        }
    if spec.lower() in _NAMED_STATES:
        dims = _parse_dims(args.dims) if getattr(args, "dims", None) else None
        seed = getattr(args, "seed", 0)
        state = named_state(spec, dims=dims, seed=seed)
        return state, {
            "source": spec.lower(),
            "dims": list(state.dims),
            "seed": seed,
        }
    raise FileNotFoundError(
        f"--state {spec!r} is neither a file nor one of {', '.join(_NAMED_STATES)}"
    )


def _require_pure(state) -> PureState:
    if isinstance(state, PureState):
        return state
    raise ValueError("this command needs a pure state (JSON with 'amps'), not a density matrix")


def _write_manifest(primary_output, command: str, args_list, seeds, inputs, outputs):
    manifest = {
        "command": command,
        "argv": list(args_list),
        "package": f"entneg {__version__}",
        "seeds": list(seeds),
        "inputs": inputs,
        "outputs": [str(p) for p in outputs],
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    path = Path(str(primary_output) + ".manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# negativity


def _cmd_negativity(args, argv) -> int:
    state, input_info = _load_state(args)
    if isinstance(state, PureState):
        rho = to_density(state)
    else:
        rho = state
    part = _parse_cut(args.cut, len(rho.dims))
    res = negativity(rho, part)
    if args.json:
        payload = {
            "dims": list(rho.dims),
            "part": list(res.part),
            "negativity": res.negativity,
            "log_negativity": res.log_negativity,
            "negative_eigenvalue_sum": res.negative_eigenvalue_sum,
            "spectrum": [float(x) for x in res.spectrum],
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"dims: {','.join(str(d) for d in rho.dims)}")
        print(f"part: {','.join(str(i) for i in res.part)}")
        print(f"negativity: {_fmt(res.negativity)}")
        print(f"log_negativity: {_fmt(res.log_negativity)}")
        print(f"negative_eigenvalue_sum: {_fmt(res.negative_eigenvalue_sum)}")
        print("spectrum: " + " ".join(_fmt(x) for x in res.spectrum))
    return 0


# ---------------------------------------------------------------------------
# disentangle


def _print_verdict(v, prefix: str = "") -> None:
    print(f"{prefix}n_abc: {_fmt(v.n_abc)}")
    print(f"{prefix}n_ab: {_fmt(v.n_ab)}")
    print(f"{prefix}gap: {_fmt(v.gap)}")
    print(f"{prefix}condition_residual: {_fmt(v.condition_residual)}")
    print(f"{prefix}holds: {'true' if v.holds else 'false'}")


def _cmd_disentangle(args, argv) -> int:
    state, input_info = _load_state(args)
    psi = _require_pure(state)
    out_dir = Path(args.out_dir)

    if args.chain:
        result = chain_factorize(psi, tol=args.tol)
        for i, v in enumerate(result.verdicts):
            print(f"cut {i}:")
            _print_verdict(v, prefix="  ")
        print(f"factorized: {'true' if result.factorized else 'false'}")
        if result.failed_cut is not None:
            print(f"failed_cut: {result.failed_cut}")
        print(f"total_residual: {_fmt(result.total_residual)}")
        if not result.factorized:
            return 2
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = []
        for i, factor in enumerate(result.factors):
            p = out_dir / f"factor_{i:02d}.json"
            save_state(factor, p)
            outputs.append(p)
        chain_path = out_dir / "chain.json"
        payload = {
            "factor_dims": [list(f.dims) for f in result.factors],
            "embeddings": [
                np.stack([e.real, e.imag], axis=-1).tolist() for e in result.embeddings
            ],
            "total_residual": result.total_residual,
            "gaps": [v.gap for v in result.verdicts],
        }
        with open(chain_path, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
        outputs.append(chain_path)
        _write_manifest(
            chain_path, "disentangle --chain", argv,
            seeds=_seeds_of(args), inputs={"state": input_info}, outputs=outputs,
        )
        for p in outputs:
            print(f"wrote: {p}")
        return 0

    verdict = check_disentangling(psi, tol=args.tol)
    _print_verdict(verdict)
    if not verdict.holds:
        return 2
    fr = factorize(psi, tol=args.tol)
    print(f"b1_dim: {fr.b1_dim}")
    print(f"b2_dim: {fr.b2_dim}")
    print(f"reconstruction_residual: {_fmt(fr.reconstruction_residual)}")
    out_dir.mkdir(parents=True, exist_ok=True)
    ab1_path = out_dir / "psi_ab1.json"
    b2c_path = out_dir / "psi_b2c.json"
    fact_path = out_dir / "factorization.json"
    save_state(fr.psi_ab1, ab1_path)
    save_state(fr.psi_b2c, b2c_path)
    with open(fact_path, "w") as fh:
        json.dump(factorization_to_json_dict(fr), fh)
        fh.write("\n")
    outputs = [ab1_path, b2c_path, fact_path]
    _write_manifest(
        fact_path, "disentangle", argv,
        seeds=_seeds_of(args), inputs={"state": input_info}, outputs=outputs,
    )
    for p in outputs:
        print(f"wrote: {p}")
    return 0


def _seeds_of(args) -> list:
    seed = getattr(args, "seed", None)
    return [seed] if seed is not None else []


# ---------------------------------------------------------------------------
# monogamy


def _print_summary(summary: dict) -> None:
    print(f"records: {summary['count']}")
    print(f"violations: {summary['violations']}")
    if summary["count"]:
        print(f"min_slack: {_fmt(summary['min_slack'])}")
        print(f"min_unsquared_slack: {_fmt(summary['min_unsquared_slack'])}")


def _finish_dataset(records, args, argv, command: str, seeds) -> list:
    """Write CSV (+ optional SVG) with manifest; returns output paths."""
    outputs = []
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_records_csv(out, records)
    outputs.append(out)
    if getattr(args, "svg", None):
        svg = Path(args.svg)
        render_scatter(records, svg)
        outputs.append(svg)
    _write_manifest(out, command, argv, seeds=seeds, inputs={}, outputs=outputs)
    return outputs


def _cmd_scan(args, argv) -> int:
    workers = args.workers if args.workers is not None else default_workers()
    records = list(haar_scan(args.m, args.count, args.seed, workers=workers))
    outputs = _finish_dataset(records, args, argv, "monogamy scan", [args.seed])
    _print_summary(summarize_records(records))
    for p in outputs:
        print(f"wrote: {p}")
    return 0


def _cmd_sample(args, argv) -> int:
    config = SamplerConfig(
        m=args.m,
        steps=args.steps,
        seed=args.seed,
        sigma=args.sigma,
        temperature=args.temperature,
        burn_in=args.burn_in,
        stride=args.stride,
    )
    sampler = SaturationSampler(config)
    records = list(sampler.run())
    outputs = _finish_dataset(records, args, argv, "monogamy sample", [args.seed])
    _print_summary(summarize_records(records))
    print(f"acceptance_rate: {_fmt(sampler.acceptance_rate)}")
    for p in outputs:
        print(f"wrote: {p}")
    return 0


def _cmd_search(args, argv) -> int:
    best = violation_search_unsquared(args.m, args.count, args.seed)
    for col in ("kind", "seed", "step", "m"):
        print(f"{col}: {getattr(best, col)}")
    print(f"unsquared_slack: {_fmt(best.unsquared_slack)}")
    print(f"slack: {_fmt(best.slack)}")
    found = best.unsquared_slack < VIOLATION_TOL
    print(f"violation_found: {'true' if found else 'false'}")
    if args.out:
        outputs = _finish_dataset([best], args, argv, "monogamy search", [args.seed])
        for p in outputs:
            print(f"wrote: {p}")
    return 0 if found else 2


# ---------------------------------------------------------------------------
# report


def _cmd_report(args, argv) -> int:
    records = read_records_csv(args.dataset)
    svg = Path(args.svg)
    if svg.parent != Path(""):
        svg.parent.mkdir(parents=True, exist_ok=True)
    render_scatter(records, svg, title=args.title)
    _write_manifest(
        svg, "report", argv,
        seeds=[],
        inputs={"dataset": {"source": str(args.dataset), "sha256": _sha256(args.dataset)}},
        outputs=[svg],
    )
    print(f"points: {len(records)}")
    print(f"wrote: {svg}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="entneg",
        description="Negativity, disentangling checks, and monogamy datasets "
        "for multipartite pure states.",
    )
    parser.add_argument("--version", action="version", version=f"entneg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_state_options(p, with_cut=False):
        p.add_argument(
            "--state",
            required=True,
            help=f"state JSON file, or one of: {', '.join(_NAMED_STATES)}",
        )
        p.add_argument("--dims", help="subsystem dimensions for named states, e.g. 2,2,2")
        p.add_argument("--seed", type=int, default=0, help="seed for random named states")
        p.add_argument(
            "--renormalize",
            action="store_true",
            help="accept and renormalize state files whose norm is off by more than 1e-8",
        )
        if with_cut:
            p.add_argument(
                "--cut",
                required=True,
                help="bipartition, e.g. '0|12' or '0,3|1,2'; the left block is transposed",
            )

    p_neg = sub.add_parser("negativity", help="negativity across a cut")
    add_state_options(p_neg, with_cut=True)
    p_neg.add_argument("--json", action="store_true", help="machine-readable output")
    p_neg.set_defaults(func=_cmd_negativity)

    p_dis = sub.add_parser(
        "disentangle",
        help="check the negativity gap across the middle subsystem; factorize if it closes",
    )
    add_state_options(p_dis)
    p_dis.add_argument("--tol", type=float, default=1e-9, help="gap tolerance")
    p_dis.add_argument(
        "--chain", action="store_true", help="factor an n-part state cut by cut"
    )
    p_dis.add_argument("--out-dir", default=".", help="directory for factor files")
    p_dis.set_defaults(func=_cmd_disentangle)

    p_mono = sub.add_parser("monogamy", help="squared-negativity datasets")
    mono_sub = p_mono.add_subparsers(dest="subcommand", required=True)

    p_scan = mono_sub.add_parser("scan", help="Haar-random scan")
    p_scan.add_argument("--m", type=int, required=True, help="local dimension")
    p_scan.add_argument("--count", type=int, required=True, help="number of states")
    p_scan.add_argument("--seed", type=int, default=0)
    p_scan.add_argument("--out", required=True, help="output CSV path")
    p_scan.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel workers (default: ENTNEG_WORKERS or 1); output is identical",
    )
    p_scan.add_argument("--svg", help="also render the scatter to this SVG path")
    p_scan.set_defaults(func=_cmd_scan)

    p_sample = mono_sub.add_parser("sample", help="Metropolis chain toward saturation")
    p_sample.add_argument("--m", type=int, required=True)
    p_sample.add_argument("--steps", type=int, required=True)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--sigma", type=float, default=0.05)
    p_sample.add_argument("--temperature", type=float, default=1e-3)
    p_sample.add_argument("--burn-in", type=int, default=1000, dest="burn_in")
    p_sample.add_argument("--stride", type=int, default=10)
    p_sample.add_argument("--out", required=True, help="output CSV path")
    p_sample.add_argument("--svg", help="also render the scatter to this SVG path")
    p_sample.set_defaults(func=_cmd_sample)

    p_search = mono_sub.add_parser(
        "search", help="find a state violating the unsquared inequality"
    )
    p_search.add_argument("--m", type=int, required=True)
    p_search.add_argument("--count", type=int, required=True)
    p_search.add_argument("--seed", type=int, default=0)
    p_search.add_argument("--out", help="write the minimizing record as CSV")
    p_search.set_defaults(func=_cmd_search)

    p_rep = sub.add_parser("report", help="render a dataset CSV to SVG")
    p_rep.add_argument("dataset", help="record CSV produced by the monogamy commands")
    p_rep.add_argument("--svg", required=True, help="output SVG path")
    p_rep.add_argument("--title", default=None)
    p_rep.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, list(argv))
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
