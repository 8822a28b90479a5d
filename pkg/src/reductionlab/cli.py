"""Command-line front end.

Every command accepts ``--config FILE`` (JSON). Keys match the option names
with underscores; flags given on the command line win over the file. A
report's embedded ``config`` block is itself a valid config file, so any
run can be reproduced from its report.

Exit codes: 0 success, 2 invalid configuration, 1 internal error.
"""

from __future__ import annotations

import json
import math
import os
import sys
import tempfile
from pathlib import Path

import click
import numpy as np
from click.core import ParameterSource

from reductionlab import streams
from reductionlab.bias import BiasModel, Variant, apply_bias, strength_for_shift
from reductionlab.errors import LabError
from reductionlab.evolution import Association, Genotype, LineageConfig, Mode, run_lineages
from reductionlab.peptide import peptide_report
from reductionlab.quantum import EXTERNAL, Amplitude, Branch, CMInternal, Superposition, born_probabilities, normalize, reduce
from reductionlab.replication import paper_check, replicate, stats_payload
from reductionlab.selector import ApparatusConfig, trial_log_csv
from reductionlab.stats import detection_power, required_trials, trials_for_power

CONFIG_ERRORS = (LabError, ValueError, TypeError, KeyError)


class ConfigFail(click.ClickException):
    exit_code = 2

    def show(self, file=None):
        click.echo(f"config error: {self.format_message()}", err=True)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigFail(f"cannot read config {path}: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("config"), dict):
        data = data["config"]
    if not isinstance(data, dict):
        raise ConfigFail(f"config {path} must hold a JSON object")
    return data


def _resolve(ctx: click.Context, keys: list[str]) -> dict:
    """Merge command-line params over the config file for ``keys``."""
    file_cfg = _load_config(ctx.params.get("config"))
    unknown = set(file_cfg) - set(keys) - {"command"}
    if unknown:
        raise ConfigFail(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key in keys:
        given = ctx.get_parameter_source(key) is ParameterSource.COMMANDLINE
        out[key] = ctx.params[key] if given or key not in file_cfg else file_cfg[key]
    return out


def _json_value(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, np.generic):
        return _json_value(value.item())
    return value


def _dump(obj: dict) -> str:
    return json.dumps(_json_value(obj), indent=2, allow_nan=False) + "\n"


def _write_outputs(out_dir: str | None, files: dict[str, str]) -> None:
    """Write all files or none: stage into temporaries, then rename."""
    if not out_dir:
        return
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=target, prefix=f".{name}.")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, target / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _bias(variant, beta) -> BiasModel:
    return BiasModel(Variant(str(variant).lower()), float(beta))


config_option = click.option("--config", type=click.Path(dir_okay=False), help="JSON config file.")
seed_option = click.option("--seed", type=int, default=0, show_default=True, help="Master seed (u64).")
workers_option = click.option("--workers", type=int, default=1, show_default=True, help="Worker threads.")
out_option = click.option("--out", type=click.Path(file_okay=False), help="Directory for output files.")


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Quantum-reduction model laboratory."""


REPLICATE_KEYS = [
    "seed", "trials", "bias_variant", "beta", "shift", "origin",
    "rate_left", "rate_right", "p0", "threshold",
]


@cli.command("replicate")
@config_option
@seed_option
@click.option("--trials", type=int, default=2500, show_default=True)
@click.option("--bias-variant", type=click.Choice(["original", "modified"]), default="modified", show_default=True)
@click.option("--beta", default="0", show_default=True, help="Bias strength, real or 'inf'.")
@click.option("--shift", type=float, default=None, help="Set beta so the shock probability drops by this much.")
@click.option("--origin", type=click.Choice(["external", "cm"]), default="external", show_default=True)
@click.option("--rate-left", type=float, default=1.0, show_default=True)
@click.option("--rate-right", type=float, default=1.0, show_default=True)
@click.option("--p0", type=float, default=None, help="Null-model p0; default is the plug-in N_L/N.")
@click.option("--threshold", type=float, default=1.0, show_default=True, help="Flag level in sigma units.")
@workers_option
@out_option
@click.option("--format", "fmt", type=click.Choice(["csv", "json-report"]), default="json-report", show_default=True)
@click.pass_context
def replicate_cmd(ctx, **_):
    """Run the two-part selector experiment and its trinomial analysis."""
    p = _resolve(ctx, REPLICATE_KEYS)
    try:
        seed = streams.check_seed(p["seed"])
        trials = int(p["trials"])
        if trials < 1:
            raise ValueError(f"--trials must be >= 1, got {trials}")
        config = ApparatusConfig(
            rate_left=float(p["rate_left"]),
            rate_right=float(p["rate_right"]),
            origin_mode=p["origin"],
        )
        beta = float(p["beta"])
        if p["shift"] is not None:
            beta = strength_for_shift(config.p_left, float(p["shift"]))
        config = ApparatusConfig(config.rate_left, config.rate_right, _bias(p["bias_variant"], beta), config.origin_mode)
        p0 = None if p["p0"] is None else float(p["p0"])
        threshold = float(p["threshold"])
        workers = int(ctx.params["workers"])
        if workers < 1:
            raise ValueError("--workers must be >= 1")
    except CONFIG_ERRORS as exc:
        raise ConfigFail(str(exc)) from exc

    try:
        sim, report, source = replicate(config, trials, seed, p0, threshold, workers)
    except CONFIG_ERRORS as exc:
        raise ConfigFail(str(exc)) from exc
    embedded = dict(p, command="replicate", seed=seed, trials=trials, beta=beta, shift=p["shift"])
    payload = {
        "command": "replicate",
        "config": embedded,
        "shock_probability": config.shock_probability,
        "p_left": config.p_left,
        **stats_payload(sim.tally(), report, source),
    }
    log = trial_log_csv(sim)
    report_text = _dump(payload)
    _write_outputs(ctx.params["out"], {"report.json": report_text, "trials.csv": log})
    click.echo(log if ctx.params["fmt"] == "csv" else report_text, nl=False)


@cli.command("paper-check")
@click.option("--n", "n_trials", type=int, default=2500, show_default=True)
@click.option("--n-s", type=int, default=1244, show_default=True)
@click.option("--n-l", type=int, default=1261, show_default=True)
@click.option("--u", type=int, default=632, show_default=True)
@click.option("--d", type=int, default=615, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json-report"]), default="text", show_default=True)
def paper_check_cmd(n_trials, n_s, n_l, u, d, fmt):
    """Recompute the published statistics from the published counts."""
    checks = paper_check(n_trials, n_s, n_l, u, d)
    ok = all(c.passed for c in checks)
    if fmt == "json-report":
        click.echo(_dump({
            "command": "paper-check",
            "config": {"n": n_trials, "n_s": n_s, "n_l": n_l, "u": u, "d": d},
            "checks": [{"name": c.name, "expected": c.expected, "observed": c.observed, "passed": c.passed} for c in checks],
            "all_passed": ok,
        }), nl=False)
    else:
        for c in checks:
            click.echo(c.line())
        click.echo(f"{'ALL PASS' if ok else 'SOME CHECKS FAILED'} ({sum(c.passed for c in checks)}/{len(checks)})")


@cli.command("power")
@click.option("--delta", type=float, required=True, help="Drop in shock probability.")
@click.option("--k", type=float, default=3.0, show_default=True, help="Detection threshold in sigma units.")
@click.option("--power", "target", type=float, default=0.95, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json-report"]), default="text", show_default=True)
def power_cmd(delta, k, target, fmt):
    """Trials needed to detect a bias of a given size."""
    try:
        n = required_trials(delta, k)
        n_power = trials_for_power(delta, k, target)
        at_n = detection_power(delta, k, n)
    except CONFIG_ERRORS as exc:
        raise ConfigFail(str(exc)) from exc
    result = {
        "command": "power",
        "config": {"delta": delta, "k": k, "power": target},
        "required_trials": n,
        "power_at_required_trials": at_n,
        "trials_for_power": n_power,
    }
    if fmt == "json-report":
        click.echo(_dump(result), nl=False)
    else:
        click.echo(f"required_trials(delta={delta:g}, k={k:g}) = {n}")
        click.echo(f"  P(|z| > {k:g}) at that N ~ {at_n:.3f}")
        click.echo(f"  N for P(|z| > {k:g}) >= {target:g}: {n_power}")


@cli.command("peptide")
@click.option("--mass", type=float, default=10_000.0, show_default=True, help="Mass in u.")
@click.option("--dx", type=float, default=10e-9, show_default=True, help="Position uncertainty in m.")
@click.option("--t", "t", type=float, default=0.1, show_default=True, help="Elapsed time in s.")
@click.option("--format", "fmt", type=click.Choice(["text", "json-report"]), default="text", show_default=True)
def peptide_cmd(mass, dx, t, fmt):
    """Heisenberg velocity and position spread of a peptide."""
    try:
        rep = peptide_report(mass, dx, t)
    except CONFIG_ERRORS as exc:
        raise ConfigFail(str(exc)) from exc
    if fmt == "json-report":
        click.echo(_dump({"command": "peptide", "config": {"mass": mass, "dx": dx, "t": t}, **rep.to_dict()}), nl=False)
    else:
        click.echo(rep.to_text(), nl=False)


EVOLVE_KEYS = [
    "seed", "bias_variant", "beta", "bonus", "hazard", "population", "generations",
    "genotype", "replications", "reproduce", "wrong_fraction", "origin",
]


@cli.command("evolve")
@config_option
@seed_option
@click.option("--bias-variant", type=click.Choice(["original", "modified"]), default="modified", show_default=True)
@click.option("--beta", default="2", show_default=True, help="Bias strength, real or 'inf'.")
@click.option("--bonus", type=float, default=0.1, show_default=True, help="Autonomic escape bonus.")
@click.option("--hazard", type=float, default=1.0, show_default=True)
@click.option("--population", type=int, default=10_000, show_default=True)
@click.option("--generations", type=int, default=50, show_default=True)
@click.option("--genotype", type=click.Choice(["correct", "wrong"]), default="correct", show_default=True)
@click.option("--replications", type=int, default=1, show_default=True)
@click.option("--reproduce/--no-reproduce", default=False, show_default=True)
@click.option("--wrong-fraction", type=float, default=None, help="Seed a mixed population.")
@click.option("--origin", type=click.Choice(["external", "cm"]), default="cm", show_default=True)
@workers_option
@out_option
@click.option("--format", "fmt", type=click.Choice(["csv", "json-report"]), default="csv", show_default=True)
@click.pass_context
def evolve_cmd(ctx, **_):
    """Survival curves for conscious, autonomic and tandem escape."""
    p = _resolve(ctx, EVOLVE_KEYS)
    try:
        seed = streams.check_seed(p["seed"])
        cfg = LineageConfig(
            bias=_bias(p["bias_variant"], p["beta"]),
            population=int(p["population"]),
            hazard_per_encounter=float(p["hazard"]),
            generations=int(p["generations"]),
            origin=p["origin"],
            reproduce=bool(p["reproduce"]),
            wrong_fraction=None if p["wrong_fraction"] is None else float(p["wrong_fraction"]),
        )
        genotype = Genotype(Association(p["genotype"]), float(p["bonus"]))
        curves = run_lineages(cfg, genotype, seed, int(p["replications"]), int(ctx.params["workers"]))
    except CONFIG_ERRORS as exc:
        raise ConfigFail(str(exc)) from exc
    payload = {
        "command": "evolve",
        "config": dict(p, command="evolve", seed=seed, beta=float(p["beta"])),
        "final_fraction_alive": {m.value: float(curves.fraction_alive[m][-1]) for m in Mode},
        "fraction_alive": {m.value: curves.fraction_alive[m].tolist() for m in Mode},
        "correct_share": {m.value: curves.correct_share[m].tolist() for m in Mode},
    }
    csv_text = curves.to_csv()
    report_text = _dump(payload)
    _write_outputs(ctx.params["out"], {"report.json": report_text, "survival.csv": csv_text})
    click.echo(csv_text if ctx.params["fmt"] == "csv" else report_text, nl=False)


def parse_superposition(spec) -> Superposition:
    """Build a superposition from a JSON list of branch objects.

    Each branch: ``label``, one of ``probability``/``modulus``, optional
    ``phase``, ``valence`` and ``origin`` (``"external"``, ``"cm:i:j"`` or
    ``{"cm": i, "group": j}``). Moduli are normalized.
    """
    if isinstance(spec, str):
        path = Path(spec)
        spec = json.loads(path.read_text() if path.is_file() else spec)
    branches = []
    for item in spec:
        if "modulus" in item:
            amp = Amplitude(float(item["modulus"]), float(item.get("phase", 0.0)))
        else:
            amp = Amplitude.from_probability(float(item["probability"]), float(item.get("phase", 0.0)))
        origin = item.get("origin", "external")
        if origin == "external":
            origin = EXTERNAL
        elif isinstance(origin, dict):
            origin = CMInternal(int(origin.get("cm", 0)), int(origin.get("group", 0)))
        elif isinstance(origin, str) and origin.startswith("cm:") and origin.count(":") == 2:
            origin = CMInternal(*(int(x) for x in origin.split(":")[1:]))
        else:
            raise ValueError(f"bad origin {origin!r}")
        branches.append(Branch(str(item["label"]), amp, float(item.get("valence", 0.0)), origin))
    return normalize(Superposition(tuple(branches)))


@cli.command("reduce")
@click.option("--spec", "spec", required=True, help="JSON branch list, or a path to one.")
@seed_option
@click.option("--bias-variant", type=click.Choice(["original", "modified"]), default="modified", show_default=True)
@click.option("--beta", default="0", show_default=True)
@click.option("--samples", type=int, default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json-report"]), default="text", show_default=True)
def reduce_cmd(spec, seed, bias_variant, beta, samples, fmt):
    """Apply the bias model to a superposition and reduce it."""
    try:
        seed = streams.check_seed(seed)
        s = parse_superposition(spec)
        model = _bias(bias_variant, beta)
        biased = apply_bias(s, model)
        if samples < 1:
            raise ValueError("--samples must be >= 1")
    except (*CONFIG_ERRORS, json.JSONDecodeError) as exc:
        raise ConfigFail(str(exc)) from exc
    rng = np.random.default_rng(seed)
    picks = [reduce(biased, rng).label for _ in range(samples)]
    counts = {b.label: picks.count(b.label) for b in biased}
    result = {
        "command": "reduce",
        "config": {"seed": seed, "bias_variant": bias_variant, "beta": model.strength, "samples": samples},
        "born": dict(born_probabilities(s)),
        "biased": dict(born_probabilities(biased)),
        "first_outcome": picks[0],
        "counts": counts,
    }
    if fmt == "json-report":
        click.echo(_dump(result), nl=False)
    else:
        for label, p in born_probabilities(biased):
            click.echo(f"{label:>12}  before {dict(born_probabilities(s))[label]:.6f}  after {p:.6f}  drawn {counts[label]}")
        click.echo(f"outcome: {picks[0]}")


def main(argv=None):
    try:
        cli.main(args=argv, prog_name="reductionlab")
    except Exception as exc:  # noqa: BLE001
        click.echo(f"internal error: {exc!r}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
