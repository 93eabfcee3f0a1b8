"""Command-line front end.

Subcommands: qpe (build/simulate/sample a phase-estimation circuit), train
(fit a variational circuit to a target distribution), compile (the full
replacement pass), bench (layer/entangler/environment sweeps with CSV + SVG
output), chi2 (score two distribution files).

Every artifact embeds the resolved configuration, so a run can be reproduced
byte-for-byte (modulo wall times) from its own output. VQC_SEED overrides the
default --seed. Exit codes: 0 success, 1 usage or I/O error, 2 compile
do-no-harm pass-through.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .ansatz import AnsatzSpec, Entangler
from .charts import depth_score_svg, histogram_svg, sweep_panels_svg
from .circuits import CircuitError, ParseError, decompose_to_basis, depth, emit_circuit, parse_circuit
from .compiler import CompileRequest, compile as compile_pass
from .metrics import chi_squared, leakage
from .optimize import OptimizerConfig
from .qpe import PhaseSpec, analytic_qpe_distribution, build_qpe, phase_estimate
from .simulator import Distribution, NoiseModel, run_ideal, run_noisy, sample_shots
from .training import train

CSV_COLUMNS = ["entangler", "p", "env", "seed", "chi2", "basis_depth", "evaluations", "wall_time_s"]


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        raise CliError(message)


def _default_seed() -> int:
    return int(os.environ.get("VQC_SEED", "1"))


def parse_theta(text: str) -> float:
    """Decimal or exact fraction 'a/b' in [0, 1)."""
    try:
        value = float(Fraction(text)) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise CliError(f"cannot parse phase {text!r}") from None
    if not (0.0 <= value < 1.0):
        raise CliError(f"phase must be in [0, 1), got {text!r}")
    return value


def _parse_int_list(text: str) -> list[int]:
    """'0..5' or '1,2,7'."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok]


def _parse_entanglers(text: str) -> list[Entangler]:
    return [Entangler.parse(tok) for tok in text.split(",") if tok]


def _load_noise(path: str | None) -> NoiseModel | None:
    if path is None:
        return None
    if path == "default":
        return NoiseModel.default()
    return NoiseModel.load(path)


def _write_json(path: str, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        print(f"wrote {path}")


def _grid_specs(n_qubits: int, clauses: list[str] | None) -> tuple[AnsatzSpec, ...]:
    layers = list(range(0, 6))
    entanglers = [Entangler.LINEAR, Entangler.FULL]
    for clause in clauses or []:
        if "=" not in clause:
            raise CliError(f"bad --grid clause {clause!r} (expected key=value)")
        key, value = clause.split("=", 1)
        key = key.strip().lower()
        if key == "p":
            layers = _parse_int_list(value)
        elif key in ("e", "entangler", "entanglers"):
            entanglers = _parse_entanglers(value)
        else:
            raise CliError(f"unknown --grid key {key!r}")
    specs: dict[AnsatzSpec, None] = {}
    for p in layers:
        for ent in entanglers if p > 0 else [Entangler.NONE]:
            specs[AnsatzSpec(n_qubits, p, ent)] = None
    return tuple(specs)


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(rho_begin=args.rho_begin, rho_end=args.rho_end, max_evals=args.max_evals)


def _add_optimizer_flags(sub):
    sub.add_argument("--rho-begin", type=float, default=0.5, help="initial trust radius (rad)")
    sub.add_argument("--rho-end", type=float, default=1e-4, help="final trust radius / stop tolerance")
    sub.add_argument("--max-evals", type=int, default=2000, help="objective evaluation budget")


# -- qpe ------------------------------------------------------------------------


def cmd_qpe(args) -> int:
    theta = parse_theta(args.theta)
    if not (1 <= args.t <= 20):
        raise CliError("t must be in 1..20")
    noise = _load_noise(args.noise)
    config = {
        "command": "qpe", "theta": args.theta, "t": args.t, "shots": args.shots,
        "seed": args.seed, "noise": None if noise is None else noise.to_dict(),
    }
    instance = build_qpe(PhaseSpec(theta), args.t)
    dist = run_ideal(instance.circuit) if noise is None else run_noisy(
        decompose_to_basis(instance.circuit), noise)
    if args.shots > 0:
        dist = sample_shots(dist, args.shots, args.seed)
    top = dist.argmax()
    payload = dist.to_dict()
    payload["config"] = config
    payload["argmax"] = top
    payload["theta_estimate"] = phase_estimate(top)
    _write_json(args.out, payload)
    if args.svg:
        Path(args.svg).write_text(histogram_svg(dist, title=f"phase readout, t={args.t}", config=config))
        print(f"wrote {args.svg}")
    if args.circuit_out:
        Path(args.circuit_out).write_text(emit_circuit(instance.circuit))
        print(f"wrote {args.circuit_out}")
    return 0


# -- train ----------------------------------------------------------------------


def cmd_train(args) -> int:
    gt = Distribution.load(args.target)
    if args.qubits is not None and gt.n_bits != args.qubits:
        raise CliError(f"target width {gt.n_bits} does not match --qubits {args.qubits}")
    entangler = Entangler.parse(args.entangler)
    spec = AnsatzSpec(gt.n_bits, args.p, entangler)
    noise = _load_noise(args.noise) or NoiseModel.default() if args.env == "noisy" else None
    config = {
        "command": "train", "target": args.target, "p": args.p, "entangler": args.entangler,
        "env": args.env, "noise": None if noise is None else noise.to_dict(), "seed": args.seed,
        "restarts": args.restarts, "shots": args.shots,
        "rho_begin": args.rho_begin, "rho_end": args.rho_end, "max_evals": args.max_evals,
    }
    report = train(
        spec, gt, noise=noise, config=_optimizer_config(args), seed=args.seed,
        restarts=args.restarts, eval_shots=args.shots or None,
    )
    payload = report.to_dict(history_stride=args.history_stride)
    payload["config"] = config
    _write_json(args.out, payload)
    history_csv = args.history_csv or (str(Path(args.out).with_suffix("")) + "_history.csv"
                                       if args.out != "-" else None)
    if history_csv:
        rows = [f"# config: {json.dumps(config, sort_keys=True)}", "evaluation,cost"]
        rows += [f"{i},{c!r}" for i, c in enumerate(report.cost_history)]
        Path(history_csv).write_text("\n".join(rows) + "\n")
        print(f"wrote {history_csv}")
    print(f"final_cost {report.final_cost:.6f}")
    print(f"chi2_ideal {report.chi2_ideal_eval:.6f}")
    print(f"chi2_noisy {report.chi2_noisy_eval:.6f}")
    return 0


# -- compile ----------------------------------------------------------------------


def cmd_compile(args) -> int:
    try:
        circuit = parse_circuit(Path(args.circuit).read_text())
    except OSError as exc:
        raise CliError(f"cannot read {args.circuit}: {exc}") from None
    if not circuit.measured_qubits:
        raise CliError("circuit has no measurement statement")
    noise = _load_noise(args.noise) or NoiseModel.default()
    if args.hw_noise == "none":
        hw = None
    elif args.hw_noise == "2x":
        hw = noise.scaled(2.0)
    else:
        hw = _load_noise(args.hw_noise)
    seeds = tuple(_parse_int_list(args.seeds)) if args.seeds else tuple(range(1, args.num_seeds + 1))
    specs = _grid_specs(len(circuit.measured_qubits), args.grid)
    config = {
        "command": "compile", "circuit": args.circuit, "region": args.region,
        "noise": noise.to_dict(), "hw_noise": None if hw is None else hw.to_dict(),
        "seeds": list(seeds), "shots": args.shots, "grid": args.grid,
        "rho_begin": args.rho_begin, "rho_end": args.rho_end, "max_evals": args.max_evals,
    }
    request = CompileRequest(
        circuit=circuit, noise=noise, search_space=specs, seeds=seeds, region=args.region,
        shots=args.shots, hardware_noise=hw, optimizer=_optimizer_config(args),
    )
    report = compile_pass(request)
    payload = report.to_dict()
    payload["config"] = config
    _write_json(args.out, payload)
    Path(args.out_circuit).write_text(emit_circuit(report.compiled_circuit))
    print(f"wrote {args.out_circuit}")
    if report.substituted:
        print(f"substituted {report.chosen_spec.label()}: depth {report.original_depth} -> "
              f"{report.compiled_depth}, chi2 {report.chi2_original_noisy.median:.3f} -> "
              f"{report.chi2_compiled_noisy.median:.3f}")
        return 0
    print("do-no-harm: no candidate beat the original circuit; passed through unchanged")
    return 2


# -- bench ------------------------------------------------------------------------


def _bench_cell(cell_args: tuple) -> dict:
    (entangler, p, env, seed, theta, t, shots, noise_dict, opt_dict) = cell_args
    gt = run_ideal(build_qpe(PhaseSpec(theta), t).circuit)
    noise = NoiseModel.from_dict(noise_dict)
    spec = AnsatzSpec(t, p, Entangler(entangler))
    started = time.perf_counter()
    report = train(
        spec, gt, noise=noise if env == "noisy" else None,
        config=OptimizerConfig(**opt_dict), seed=seed, eval_shots=shots, eval_noise=noise,
    )
    chi2 = report.chi2_noisy_eval if env == "noisy" else report.chi2_ideal_eval
    return {
        "entangler": spec.entangler.value, "p": p, "env": env, "seed": seed,
        "chi2": chi2, "basis_depth": depth(decompose_to_basis(report.circuit)),
        "evaluations": report.evaluations, "wall_time_s": time.perf_counter() - started,
    }


def cmd_bench(args) -> int:
    theta = parse_theta(args.theta)
    noise = _load_noise(args.noise) or NoiseModel.default()
    seeds = _parse_int_list(args.seeds) if args.seeds else list(range(1, args.num_seeds + 1))
    layers = _parse_int_list(args.layers)
    entanglers = _parse_entanglers(args.entanglers)
    envs = [tok.strip() for tok in args.envs.split(",") if tok]
    for env in envs:
        if env not in ("ideal", "noisy"):
            raise CliError(f"unknown env {env!r}")
    config = {
        "command": "bench", "theta": args.theta, "t": args.t, "layers": args.layers,
        "entanglers": args.entanglers, "envs": args.envs, "seeds": seeds, "shots": args.shots,
        "noise": noise.to_dict(), "jobs": args.jobs,
        "rho_begin": args.rho_begin, "rho_end": args.rho_end, "max_evals": args.max_evals,
    }
    opt_dict = {"rho_begin": args.rho_begin, "rho_end": args.rho_end, "max_evals": args.max_evals}
    cells = []
    for env in envs:
        for p in layers:
            for ent in entanglers if p > 0 else [Entangler.NONE]:
                for seed in seeds:
                    cells.append((ent.value, p, env, seed, theta, args.t, args.shots,
                                  noise.to_dict(), opt_dict))
    cells = list(dict.fromkeys(cells))  # p=0 collapses entanglers

    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(cell) for cell in cells]
    rows.sort(key=lambda r: (r["env"], r["entangler"], r["p"], r["seed"]))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_lines = [f"# config: {json.dumps(config, sort_keys=True)}", ",".join(CSV_COLUMNS)]
    for row in rows:
        csv_lines.append(",".join([
            row["entangler"], str(row["p"]), row["env"], str(row["seed"]),
            f"{row['chi2']!r}", str(row["basis_depth"]), str(row["evaluations"]),
            f"{row['wall_time_s']:.3f}",
        ]))
    (out_dir / "sweep.csv").write_text("\n".join(csv_lines) + "\n")
    print(f"wrote {out_dir / 'sweep.csv'}")

    def stats(env, ent):
        by_p: dict[int, list[float]] = {}
        depth_by_p: dict[int, int] = {}
        for row in rows:
            if row["env"] == env and row["entangler"] in (ent.value, Entangler.NONE.value):
                by_p.setdefault(row["p"], []).append(row["chi2"])
                depth_by_p[row["p"]] = row["basis_depth"]
        ps = sorted(by_p)
        med = [float(np.median(by_p[p])) for p in ps]
        iqr = [float(np.subtract(*np.percentile(by_p[p], [75, 25]))) for p in ps]
        return ps, med, iqr, [depth_by_p[p] for p in ps]

    panels = []
    colors = {"full": "#4878cf", "linear": "#d65f5f"}
    for env in envs:
        for ent in entanglers:
            ps, med, iqr, _ = stats(env, ent)
            panels.append({
                "title": f"{env} simulation, {ent.value} entangler",
                "labels": [f"p={p}" for p in ps], "values": med,
                "errors": [v / 2 for v in iqr], "color": colors.get(ent.value, "#4878cf"),
            })
    (out_dir / "sweep_panels.svg").write_text(sweep_panels_svg(panels, config=config))
    print(f"wrote {out_dir / 'sweep_panels.svg'}")

    if "noisy" in envs:
        series = []
        for ent in entanglers:
            ps, med, _, depths = stats("noisy", ent)
            series.append({"label": ent.value, "color": colors.get(ent.value, "#4878cf"),
                           "points": list(zip(depths, med))})
        (out_dir / "depth_chi2.svg").write_text(
            depth_score_svg(series, "score vs depth under noisy simulation", config=config))
        print(f"wrote {out_dir / 'depth_chi2.svg'}")
    return 0


# -- chi2 -------------------------------------------------------------------------


def cmd_chi2(args) -> int:
    measured = Distribution.load(args.dist)
    gt = Distribution.load(args.ground_truth)
    print(f"chi2 {chi_squared(measured, gt)!r}")
    print(f"leakage {leakage(measured, gt)!r}")
    return 0


# -- entry ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vqc", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    qpe = subs.add_parser("qpe", help="build and run a phase-estimation circuit")
    qpe.add_argument("--theta", required=True, help="phase as decimal or fraction a/b")
    qpe.add_argument("--t", type=int, default=5, help="counting qubits")
    qpe.add_argument("--shots", type=int, default=4096, help="0 for the exact distribution")
    qpe.add_argument("--seed", type=int, default=_default_seed())
    qpe.add_argument("--noise", help="noise model JSON ('default' for stock model); omits for ideal")
    qpe.add_argument("--out", default="-", help="distribution JSON path, '-' for stdout")
    qpe.add_argument("--svg", help="also write a histogram SVG")
    qpe.add_argument("--circuit-out", help="also write the circuit text (.qc)")
    qpe.set_defaults(func=cmd_qpe)

    tr = subs.add_parser("train", help="train an ansatz against a target distribution file")
    tr.add_argument("target", help="target distribution JSON")
    tr.add_argument("--p", type=int, default=1, help="entangler layer count")
    tr.add_argument("--entangler", default="linear", help="none | linear | full")
    tr.add_argument("--env", choices=("ideal", "noisy"), default="ideal", help="training objective backend")
    tr.add_argument("--noise", help="noise model JSON for the noisy env (default: stock model)")
    tr.add_argument("--qubits", type=int, help="expected target width (sanity check)")
    tr.add_argument("--seed", type=int, default=_default_seed())
    tr.add_argument("--restarts", type=int, default=1)
    tr.add_argument("--shots", type=int, default=4096, help="evaluation shots (0 = exact)")
    tr.add_argument("--history-stride", type=int, default=1)
    tr.add_argument("--history-csv", help="cost history CSV path")
    tr.add_argument("--out", default="train_report.json")
    _add_optimizer_flags(tr)
    tr.set_defaults(func=cmd_train)

    co = subs.add_parser("compile", help="replace a deep circuit with a trained shallow one")
    co.add_argument("circuit", help="circuit text file (.qc)")
    co.add_argument("--region", help="named region to replace (default: whole circuit)")
    co.add_argument("--noise", help="noise model JSON (default: stock model)")
    co.add_argument("--hw-noise", default="2x",
                    help="harsher model standing in for hardware: '2x', 'none', or a JSON path")
    co.add_argument("--grid", action="append",
                    help="search-space clause, e.g. 'p=0..5' or 'e=linear,full'; repeatable")
    co.add_argument("--seeds", help="comma list or a..b range of training seeds")
    co.add_argument("--num-seeds", type=int, default=5, help="use seeds 1..N when --seeds absent")
    co.add_argument("--shots", type=int, default=4096)
    co.add_argument("--out", default="compile_report.json")
    co.add_argument("--out-circuit", default="compiled.qc")
    _add_optimizer_flags(co)
    co.set_defaults(func=cmd_compile)

    be = subs.add_parser("bench", help="layer/entangler/environment sweep")
    be.add_argument("--theta", default="1/3")
    be.add_argument("--t", type=int, default=5)
    be.add_argument("--layers", default="0..5")
    be.add_argument("--entanglers", default="linear,full")
    be.add_argument("--envs", default="ideal,noisy")
    be.add_argument("--seeds", help="comma list or a..b range")
    be.add_argument("--num-seeds", type=int, default=10)
    be.add_argument("--shots", type=int, default=4096)
    be.add_argument("--noise", help="noise model JSON (default: stock model)")
    be.add_argument("--jobs", type=int, default=1, help="parallel grid cells")
    be.add_argument("--out-dir", default="bench_out")
    _add_optimizer_flags(be)
    be.set_defaults(func=cmd_bench)

    ch = subs.add_parser("chi2", help="chi-squared of a distribution against a ground truth")
    ch.add_argument("dist", help="measured distribution JSON")
    ch.add_argument("ground_truth", help="ground-truth distribution JSON")
    ch.set_defaults(func=cmd_chi2)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, CircuitError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
