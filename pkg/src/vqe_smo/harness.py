"""Experiment configuration, seeded benchmark execution, aggregation,
and the command-line interface.

Outputs per experiment directory:
  effective_config.json   the fully defaulted config actually used
  seed_<s>.csv            per-seed records, written incrementally
  runs.csv                merged records, fixed column contract
  aggregate.json          percentile curves and final-step statistics

CSV columns: seed,algorithm,measurements,believed_energy,true_energy,
fidelity,total_shots.  Floats are serialized with repr so identical runs
produce byte-identical files.
"""

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, MitigationError
from .hamiltonian import Hamiltonian, build_heisenberg, ground_state
from .measurement import MitigationConfig
from .noise import NoiseModel
from .optimize import (ALGORITHMS, Problem, RunConfig, RunRecord,
                       build_problem, run)

CSV_HEADER = "seed,algorithm,measurements,believed_energy,true_energy,fidelity,total_shots"

_TOP_KEYS = {"qubits", "layers", "couplings", "algorithm", "budget", "shots",
             "seeds", "noise", "mitigation", "optimizer", "exact_expectation",
             "output_dir"}
_OPTIMIZER_KEYS = {"alpha", "grid_size", "mc_samples", "kappa_factor",
                   "warmup_steps", "gamma_grid", "stabilize_every"}
_REQUIRED_KEYS = ("qubits", "layers", "algorithm", "budget", "shots", "seeds")

DEFAULT_COUPLINGS = ((-1.0, 0.0, 0.0), (0.0, 0.0, -1.0))


@dataclass(frozen=True)
class ExperimentConfig:
    qubits: int
    layers: int
    j: tuple
    h: tuple
    algorithm: str
    budget: int
    seeds: tuple
    run_config: RunConfig
    output_dir: str


@dataclass(frozen=True)
class AggregateCurve:
    """Cross-seed percentile curves plus final-step mean and std."""

    checkpoints: tuple
    energy_p25: tuple
    energy_p50: tuple
    energy_p75: tuple
    fidelity_p25: tuple
    fidelity_p50: tuple
    fidelity_p75: tuple
    final_energy_mean: float
    final_energy_std: float
    final_fidelity_mean: float
    final_fidelity_std: float
    seed_count: int

    def to_dict(self) -> dict:
        return {
            "checkpoints": list(self.checkpoints),
            "true_energy": {"p25": list(self.energy_p25),
                            "p50": list(self.energy_p50),
                            "p75": list(self.energy_p75)},
            "fidelity": {"p25": list(self.fidelity_p25),
                         "p50": list(self.fidelity_p50),
                         "p75": list(self.fidelity_p75)},
            "final": {"true_energy_mean": self.final_energy_mean,
                      "true_energy_std": self.final_energy_std,
                      "fidelity_mean": self.final_fidelity_mean,
                      "fidelity_std": self.final_fidelity_std},
            "seed_count": self.seed_count,
        }


@dataclass(frozen=True)
class ExperimentResult:
    records: dict
    failures: dict
    curve: AggregateCurve
    config: ExperimentConfig


def _expect_int(data, key, minimum=None):
    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"field {key!r} must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"field {key!r} must be >= {minimum}")
    return value


def _expect_number(data, key):
    value = data[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"field {key!r} must be a number")
    return float(value)


def _parse_seeds(value):
    if isinstance(value, str):
        parts = value.split("..")
        if len(parts) != 2:
            raise ConfigError("seed range must look like \"0..9\"")
        try:
            lo, hi = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ConfigError("seed range endpoints must be integers") from exc
        if hi < lo:
            raise ConfigError("seed range is empty")
        return tuple(range(lo, hi + 1))
    if not isinstance(value, list) or not value:
        raise ConfigError("field 'seeds' must be a non-empty list or \"A..B\" range")
    seeds = []
    for s in value:
        if not isinstance(s, int) or isinstance(s, bool):
            raise ConfigError("seeds must be integers")
        seeds.append(s)
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds must be distinct")
    return tuple(seeds)


def _parse_triple(block, key):
    value = block[key]
    if (not isinstance(value, list) or len(value) != 3
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise ConfigError(f"couplings field {key!r} must be a list of 3 numbers")
    return tuple(float(v) for v in value)


def parse_config(data: dict) -> ExperimentConfig:
    """Validate a raw config dict; unknown fields are an error."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
    missing = [k for k in _REQUIRED_KEYS if k not in data]
    if missing:
        raise ConfigError(f"missing required field(s): {', '.join(missing)}")

    qubits = _expect_int(data, "qubits", minimum=2)
    layers = _expect_int(data, "layers", minimum=0)
    budget = _expect_int(data, "budget", minimum=2)
    shots = _expect_int(data, "shots", minimum=1)
    algorithm = data["algorithm"]
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"field 'algorithm' must be one of {ALGORITHMS}")
    seeds = _parse_seeds(data["seeds"])

    j, h = DEFAULT_COUPLINGS
    if "couplings" in data:
        block = data["couplings"]
        if not isinstance(block, dict):
            raise ConfigError("field 'couplings' must be an object")
        unknown = set(block) - {"j", "h"}
        if unknown:
            raise ConfigError(f"unknown couplings field(s): {', '.join(sorted(unknown))}")
        if "j" in block:
            j = _parse_triple(block, "j")
        if "h" in block:
            h = _parse_triple(block, "h")

    noise = NoiseModel()
    if "noise" in data:
        block = data["noise"]
        if block == "preset":
            noise = NoiseModel.preset()
        elif isinstance(block, dict):
            noise = NoiseModel.from_dict(block)
        else:
            raise ConfigError("field 'noise' must be an object or \"preset\"")

    mitigation = MitigationConfig()
    if "mitigation" in data:
        block = data["mitigation"]
        if not isinstance(block, dict):
            raise ConfigError("field 'mitigation' must be an object")
        if "zne_scales" in block:
            scales = block["zne_scales"]
            if not isinstance(scales, list):
                raise ConfigError("mitigation field 'zne_scales' must be a list")
        mitigation = MitigationConfig.from_dict(block)

    optimizer_kwargs = {}
    if "optimizer" in data:
        block = data["optimizer"]
        if not isinstance(block, dict):
            raise ConfigError("field 'optimizer' must be an object")
        unknown = set(block) - _OPTIMIZER_KEYS
        if unknown:
            raise ConfigError(f"unknown optimizer field(s): {', '.join(sorted(unknown))}")
        if "alpha" in block:
            optimizer_kwargs["alpha"] = _expect_number(block, "alpha")
        if "kappa_factor" in block:
            optimizer_kwargs["kappa_factor"] = _expect_number(block, "kappa_factor")
        for key in ("grid_size", "mc_samples", "stabilize_every"):
            if key in block:
                optimizer_kwargs[key] = _expect_int(block, key, minimum=0)
        if "warmup_steps" in block and block["warmup_steps"] is not None:
            optimizer_kwargs["warmup_steps"] = _expect_int(block, "warmup_steps", minimum=0)
        if "gamma_grid" in block:
            grid = block["gamma_grid"]
            if (not isinstance(grid, list) or not grid
                    or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in grid)):
                raise ConfigError("optimizer field 'gamma_grid' must be a non-empty number list")
            optimizer_kwargs["gamma_grid"] = tuple(float(v) for v in grid)

    exact = data.get("exact_expectation", False)
    if not isinstance(exact, bool):
        raise ConfigError("field 'exact_expectation' must be a boolean")

    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise ConfigError("field 'output_dir' must be a non-empty string")

    try:
        run_config = RunConfig(shots_per_group=shots, noise=noise,
                               mitigation=mitigation, exact_expectation=exact,
                               **optimizer_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(qubits, layers, j, h, algorithm, budget, seeds,
                            run_config, output_dir)


def effective_config(config: ExperimentConfig) -> dict:
    """Fully materialized config dict, reparseable by parse_config."""
    rc = config.run_config
    return {
        "qubits": config.qubits,
        "layers": config.layers,
        "couplings": {"j": list(config.j), "h": list(config.h)},
        "algorithm": config.algorithm,
        "budget": config.budget,
        "shots": rc.shots_per_group,
        "seeds": list(config.seeds),
        "noise": rc.noise.to_dict(),
        "mitigation": rc.mitigation.to_dict(),
        "optimizer": {
            "alpha": rc.alpha,
            "grid_size": rc.grid_size,
            "mc_samples": rc.mc_samples,
            "kappa_factor": rc.kappa_factor,
            "warmup_steps": rc.warmup_steps,
            "gamma_grid": list(rc.gamma_grid),
            "stabilize_every": rc.stabilize_every,
        },
        "exact_expectation": rc.exact_expectation,
        "output_dir": config.output_dir,
    }


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def build_hamiltonian(config: ExperimentConfig) -> Hamiltonian:
    return build_heisenberg(config.qubits, config.j, config.h)


def _format_row(record: RunRecord) -> str:
    return (f"{record.seed},{record.algorithm},{record.measurements},"
            f"{record.believed_energy!r},{record.true_energy!r},"
            f"{record.fidelity!r},{record.total_shots}")


def _seed_worker(payload):
    """Run one seed, streaming records to its CSV; returns the outcome."""
    effective, seed, csv_path = payload
    try:
        config = parse_config(effective)
        problem = build_problem(build_hamiltonian(config), config.layers)
        with open(csv_path, "w") as handle:
            handle.write(CSV_HEADER + "\n")

            def on_record(record):
                handle.write(_format_row(record) + "\n")
                handle.flush()

            records = run(config.algorithm, problem, config.budget,
                          config=config.run_config, seed=seed,
                          on_record=on_record)
        return seed, records, None
    except Exception as exc:  # noqa: BLE001 - seed failures must not kill siblings
        return seed, None, f"{type(exc).__name__}: {exc}"


def _worker_count(n_seeds: int) -> int:
    raw = os.environ.get("VQE_SMO_THREADS")
    if raw is None:
        limit = os.cpu_count() or 1
    else:
        try:
            limit = int(raw)
        except ValueError as exc:
            raise ConfigError("VQE_SMO_THREADS must be an integer") from exc
        if limit < 1:
            raise ConfigError("VQE_SMO_THREADS must be >= 1")
    return max(1, min(limit, n_seeds))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Execute all seeds (parallel when allowed) and write all outputs."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    effective = effective_config(config)
    (out / "effective_config.json").write_text(
        json.dumps(effective, indent=2, sort_keys=True) + "\n")

    payloads = [(effective, seed, str(out / f"seed_{seed}.csv"))
                for seed in config.seeds]
    workers = _worker_count(len(config.seeds))
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_seed_worker, payloads))
    else:
        outcomes = [_seed_worker(p) for p in payloads]

    records = {}
    failures = {}
    for seed, recs, error in outcomes:
        if error is None:
            records[seed] = recs
        else:
            failures[seed] = error

    with open(out / "runs.csv", "w") as handle:
        handle.write(CSV_HEADER + "\n")
        for seed in config.seeds:
            for record in records.get(seed, ()):
                handle.write(_format_row(record) + "\n")

    if not records:
        detail = "; ".join(f"seed {s}: {m}" for s, m in failures.items())
        raise RuntimeError(f"all seeds failed: {detail}")
    curve = aggregate([records[s] for s in config.seeds if s in records])
    payload = {"config": effective,
               "seeds_completed": [s for s in config.seeds if s in records],
               "failures": {str(s): m for s, m in failures.items()},
               "aggregate": curve.to_dict()}
    (out / "aggregate.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return ExperimentResult(records, failures, curve, config)


def aggregate(records) -> AggregateCurve:
    """Percentile curves across seeds at shared measurement checkpoints."""
    streams = [list(stream) for stream in records]
    if not streams or any(not s for s in streams):
        raise ValueError("aggregate needs at least one non-empty record stream")
    by_count = [{r.measurements: r for r in stream} for stream in streams]
    common = set(by_count[0])
    for mapping in by_count[1:]:
        common &= set(mapping)
    checkpoints = sorted(common)
    if not checkpoints:
        raise ValueError("record streams share no measurement checkpoints")
    e_p25, e_p50, e_p75 = [], [], []
    f_p25, f_p50, f_p75 = [], [], []
    for count in checkpoints:
        energies = np.array([m[count].true_energy for m in by_count])
        fids = np.array([m[count].fidelity for m in by_count])
        lo, mid, hi = np.percentile(energies, [25.0, 50.0, 75.0])
        e_p25.append(float(lo))
        e_p50.append(float(mid))
        e_p75.append(float(hi))
        lo, mid, hi = np.percentile(fids, [25.0, 50.0, 75.0])
        f_p25.append(float(lo))
        f_p50.append(float(mid))
        f_p75.append(float(hi))
    finals_e = np.array([stream[-1].true_energy for stream in streams])
    finals_f = np.array([stream[-1].fidelity for stream in streams])
    n = len(streams)
    std_e = float(finals_e.std(ddof=1)) if n > 1 else 0.0
    std_f = float(finals_f.std(ddof=1)) if n > 1 else 0.0
    return AggregateCurve(tuple(checkpoints),
                          tuple(e_p25), tuple(e_p50), tuple(e_p75),
                          tuple(f_p25), tuple(f_p50), tuple(f_p75),
                          float(finals_e.mean()), std_e,
                          float(finals_f.mean()), std_f, n)


def load_records_csv(path) -> list:
    """Read a records CSV back into per-seed streams (wall_ms zeroed)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} does not carry the expected CSV header")
    streams = {}
    order = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 7:
            raise ValueError(f"malformed CSV row: {line!r}")
        seed = int(parts[0])
        record = RunRecord(seed, parts[1], int(parts[2]), float(parts[3]),
                           float(parts[4]), float(parts[5]), int(parts[6]), 0.0)
        if seed not in streams:
            streams[seed] = []
            order.append(seed)
        streams[seed].append(record)
    return [streams[s] for s in order]


def _apply_overrides(data: dict, args) -> dict:
    if getattr(args, "output_dir", None):
        data["output_dir"] = args.output_dir
    if getattr(args, "algorithm", None):
        data["algorithm"] = args.algorithm
    if getattr(args, "budget", None) is not None:
        data["budget"] = args.budget
    if getattr(args, "shots", None) is not None:
        data["shots"] = args.shots
    if getattr(args, "seeds", None):
        text = args.seeds
        if ".." in text:
            data["seeds"] = text
        else:
            try:
                data["seeds"] = [int(p) for p in text.split(",")]
            except ValueError as exc:
                raise ConfigError("--seeds must be \"A..B\" or comma-separated integers") from exc
    if getattr(args, "mitigation", None):
        block = data.get("mitigation")
        if not isinstance(block, dict):
            block = {}
        block["mode"] = args.mitigation
        data["mitigation"] = block
    return data


def _load_with_overrides(path, args) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(_apply_overrides(data, args))


def _cmd_exact(args) -> int:
    config = _load_with_overrides(args.config, args)
    hamiltonian = build_hamiltonian(config)
    truth = ground_state(hamiltonian)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": effective_config(config),
        "energy": truth.energy,
        "state_re": [float(v) for v in truth.state.real],
        "state_im": [float(v) for v in truth.state.imag],
    }
    (out / "ground_truth.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"ground_energy {truth.energy!r}")
    return 0


def _cmd_run(args) -> int:
    config = _load_with_overrides(args.config, args)
    result = run_experiment(config)
    curve = result.curve
    print(f"completed {curve.seed_count}/{len(config.seeds)} seeds -> {config.output_dir}")
    print(f"final true_energy {curve.final_energy_mean!r} +/- {curve.final_energy_std!r}")
    print(f"final fidelity {curve.final_fidelity_mean!r} +/- {curve.final_fidelity_std!r}")
    for seed, message in sorted(result.failures.items()):
        print(f"seed {seed} failed: {message}", file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    base = Path(args.output_dir) if args.output_dir else Path("compare_out")

    class _NoOverrides:
        output_dir = None
        algorithm = None
        budget = None
        shots = None
        seeds = None
        mitigation = None

    sides = {}
    for tag, path in (("a", args.config_a), ("b", args.config_b)):
        override = _NoOverrides()
        override.output_dir = str(base / tag)
        config = _load_with_overrides(path, override)
        result = run_experiment(config)
        sides[tag] = {"config": effective_config(config),
                      "aggregate": result.curve.to_dict()}
        print(f"{tag}: final true_energy {result.curve.final_energy_mean!r} "
              f"+/- {result.curve.final_energy_std!r}")
    base.mkdir(parents=True, exist_ok=True)
    (base / "compare.json").write_text(
        json.dumps(sides, indent=2, sort_keys=True) + "\n")
    print(f"comparison written to {base / 'compare.json'}")
    return 0


def _selftest_checks():
    """Fast end-to-end property checks; each returns None or raises."""
    from . import gp as gp_mod
    from .hamiltonian import critical_ising, state_energy, to_dense
    from .measurement import measure_energy
    from .optimize import (build_problem, cosine_fit, cosine_value, run as run_opt)
    from .simulator import build_ansatz, prepare_state

    def kernel_feature_consistency():
        rng = np.random.default_rng(7)
        params = gp_mod.KernelParams(1.3, 2.0, 0.0)
        for _ in range(20):
            a, b = rng.uniform(0, 2 * np.pi, (2, 4))
            direct = gp_mod.vqe_kernel(a, b, params)
            via_features = float(gp_mod.feature_map(a, params)
                                 @ gp_mod.feature_map(b, params))
            assert abs(direct - via_features) < 1e-10

    def cosine_roundtrip():
        rng = np.random.default_rng(11)
        for _ in range(20):
            a1, a2, a3 = rng.uniform(0.1, 2), rng.uniform(0, 2 * np.pi), rng.uniform(-3, 3)
            angles = rng.uniform(0, 2 * np.pi) + np.array([0, 2 * np.pi / 3, 4 * np.pi / 3])
            values = a1 * np.cos(angles - a2) + a3
            fit = cosine_fit(zip(angles, values))
            for phi in rng.uniform(0, 2 * np.pi, 5):
                assert abs(cosine_value(fit, phi) - (a1 * np.cos(phi - a2) + a3)) < 1e-9

    def dense_energy_match():
        rng = np.random.default_rng(3)
        hamiltonian = critical_ising(3)
        ansatz = build_ansatz(3, 1)
        dense = to_dense(hamiltonian)
        for _ in range(5):
            theta = rng.uniform(0, 2 * np.pi, ansatz.param_count)
            state = prepare_state(ansatz, theta)
            direct = state_energy(hamiltonian, state)
            via_dense = float(np.real(np.vdot(state, dense @ state)))
            assert abs(direct - via_dense) < 1e-10

    def small_ground_energy():
        truth = ground_state(critical_ising(2))
        assert abs(truth.energy - (-np.sqrt(5))) < 1e-10

    def gp_extend_matches_refit():
        rng = np.random.default_rng(5)
        params = gp_mod.KernelParams(1.0, 2.0, 0.01)
        x = rng.uniform(0, 2 * np.pi, (6, 3))
        y = rng.normal(size=6)
        full = gp_mod.fit(x, y, params)
        grown = gp_mod.extend(gp_mod.fit(x[:4], y[:4], params), x[4:], y[4:])
        test = rng.uniform(0, 2 * np.pi, (4, 3))
        assert np.allclose(gp_mod.posterior_mean(full, test),
                           gp_mod.posterior_mean(grown, test), atol=1e-8)

    def exact_mode_agrees():
        rng = np.random.default_rng(9)
        hamiltonian = critical_ising(2)
        ansatz = build_ansatz(2, 0)
        theta = rng.uniform(0, 2 * np.pi, ansatz.param_count)
        est = measure_energy(ansatz, theta, hamiltonian, 16, NoiseModel(),
                             np.random.default_rng(0), exact=True)
        state = prepare_state(ansatz, theta)
        assert abs(est.value - state_energy(hamiltonian, state)) < 1e-12

    def tiny_run_deterministic():
        problem = build_problem(critical_ising(2), 0)
        config = RunConfig(shots_per_group=32, warmup_steps=2, mc_samples=20,
                           grid_size=8)
        first = run_opt("emicore", problem, 16, config=config, seed=4)
        second = run_opt("emicore", problem, 16, config=config, seed=4)
        assert [r.believed_energy for r in first] == [r.believed_energy for r in second]
        assert [r.true_energy for r in first] == [r.true_energy for r in second]

    return [
        ("kernel_feature_consistency", kernel_feature_consistency),
        ("cosine_roundtrip", cosine_roundtrip),
        ("dense_energy_match", dense_energy_match),
        ("small_ground_energy", small_ground_energy),
        ("gp_extend_matches_refit", gp_extend_matches_refit),
        ("exact_mode_agrees", exact_mode_agrees),
        ("tiny_run_deterministic", tiny_run_deterministic),
    ]


def _cmd_selftest(_args) -> int:
    failed = 0
    for name, check in _selftest_checks():
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report and continue
            failed += 1
            print(f"FAIL {name}: {type(exc).__name__}: {exc}")
        else:
            print(f"PASS {name}")
    if failed:
        print(f"{failed} selftest check(s) failed")
        return 2
    print("all selftest checks passed")
    return 0


def _add_override_args(parser):
    parser.add_argument("--output-dir", default=None)
    parser.add_argument("--mitigation", choices=["none", "trex", "zne"], default=None)
    parser.add_argument("--algorithm", choices=list(ALGORITHMS), default=None)
    parser.add_argument("--seeds", default=None,
                        help="\"A..B\" range or comma-separated integers")
    parser.add_argument("--budget", type=int, default=None)
    parser.add_argument("--shots", type=int, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqe-smo",
        description="Sequential-minimal-optimization VQE benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)
    p_exact = sub.add_parser("exact", help="write the exact ground-truth fixture")
    p_exact.add_argument("config")
    _add_override_args(p_exact)
    p_exact.set_defaults(func=_cmd_exact)
    p_run = sub.add_parser("run", help="run the configured experiment")
    p_run.add_argument("config")
    _add_override_args(p_run)
    p_run.set_defaults(func=_cmd_run)
    p_cmp = sub.add_parser("compare", help="run two configs and emit a side-by-side aggregate")
    p_cmp.add_argument("config_a")
    p_cmp.add_argument("config_b")
    p_cmp.add_argument("--output-dir", default=None)
    p_cmp.set_defaults(func=_cmd_compare)
    p_self = sub.add_parser("selftest", help="run the fast property checks")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def cli(argv) -> int:
    """Entry point returning the process exit code (0/1/2)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except MitigationError as exc:
        print(f"mitigation error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
