"""Command line front end: ``wpmix <command> --config cfg.json``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 inconclusive Monte Carlo oracle, 4 a verification criterion failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from .concomitants import ConcomitantExperiment, run_concomitant_experiment, thread_count
from .conditional import make_conditional, cond_sample
from .config import build_model, load_experiment, load_schema
from .errors import ConfigurationError, InconclusiveOracleError, NumericalError
from .harness import convergence_sweep, lemma1a_ratio, lemma1b_ratio, lemma1c_checks
from .laws import FRECHET, GUMBEL, WEIBULL
from .limits import frechet_limit, frechet_sequence, gumbel_sequence, kotz_limit, weibull_limit, weibull_sequence
from .mixture import BivariateModel, WpMixtureModel, sample_bivariate, sample_mixture
from .rng import substream

__all__ = ["main", "run", "COMMANDS", "CHUNK_ROWS"]

COMMANDS = ("sample", "cond", "limit", "concomitants", "lemma", "verify")
# rows per random substream; fixed so output does not depend on thread count
CHUNK_ROWS = 65_536
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_ORACLE, EXIT_FAILED = 0, 1, 2, 3, 4


class Table:
    """Column names, rows and an optional summary mapping."""

    def __init__(self, columns, rows, summary=None, message=""):
        self.columns = list(columns)
        self.rows = rows
        self.summary = summary
        self.message = message


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(x) for x in v]
    return v


def render_json(table: Table, command: str, seed: int) -> str:
    doc = {
        "schema": 1,
        "command": command,
        "seed": int(seed),
        "columns": table.columns,
        "rows": _json_value(table.rows),
    }
    if table.summary is not None:
        doc["summary"] = _json_value(table.summary)
    jsonschema.validate(doc, load_schema("output"))
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _chunked(n: int, seed: int, tag: str, draw):
    """Run ``draw(size, rng)`` over fixed-size chunks with per-chunk streams."""
    sizes = [min(CHUNK_ROWS, n - start) for start in range(0, n, CHUNK_ROWS)]
    threads = min(thread_count(), len(sizes))

    def one(i):
        return draw(sizes[i], substream(seed, tag, i))

    if threads <= 1:
        parts = [one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    return np.concatenate(parts)


def cmd_sample(cfg: dict, seed: int) -> Table:
    model = build_model(cfg.get("model"))
    n = int(cfg.get("sample", {}).get("n", 1000))
    if isinstance(model, BivariateModel):
        X = _chunked(n, seed, "sample", lambda size, rng: sample_bivariate(model, size, rng))
    else:
        X = _chunked(n, seed, "sample", lambda size, rng: sample_mixture(model, size, rng))
    cols = [f"x{i + 1}" for i in range(X.shape[1])]
    return Table(cols, X.tolist(), message=f"sample: {n} rows of dimension {X.shape[1]}")


def _mixture_of(model) -> WpMixtureModel:
    return model.to_mixture() if isinstance(model, BivariateModel) else model


def cmd_cond(cfg: dict, seed: int) -> Table:
    model = _mixture_of(build_model(cfg.get("model")))
    block = cfg.get("cond")
    if block is None:
        raise ConfigurationError("cond needs a 'cond' block with a_J")
    a_J = block["a_J"]
    law = make_conditional(model, a_J)
    if block.get("mode", "grid") == "sample":
        n = int(block.get("n", 1000))
        law.sample(1, substream(seed, "cond-table"))  # builds the shared table once
        X = _chunked(n, seed, "cond", lambda size, rng: cond_sample(model, a_J, size, rng, law=law))
        cols = [f"x{i}" for i in model.partition.I]
        return Table(cols, X.tolist(), message=f"cond: {n} conditional draws at tau={law.tau!r}")
    k = int(block.get("grid", 101))
    top = law.upper if math.isfinite(law.upper) else law.quantile(1.0 - 1e-6)
    z = np.linspace(0.0, top, k)
    F, f = law.cdf(z), law.pdf(z)
    rows = [[zi, Fi, fi] for zi, Fi, fi in zip(z, F, f)]
    summary = {"tau": law.tau, "norm_const": law.norm_const}
    return Table(["z", "cdf", "pdf"], rows, summary, message=f"cond: {k}-point grid at tau={law.tau!r}")


def cmd_limit(cfg: dict, seed: int) -> Table:
    model = _mixture_of(build_model(cfg.get("model")))
    block = cfg.get("limit")
    if block is None:
        raise ConfigurationError("limit needs a 'limit' block with levels")
    radial, mixing, p = model.radial, model.mixing, model.p
    alpha = mixing.alpha
    if alpha is None:
        raise ConfigurationError("limit sweeps need a mixing law with a density")
    if radial.mda == GUMBEL:
        limit, seq = kotz_limit(alpha, p), gumbel_sequence(radial, p)
    elif radial.mda == WEIBULL:
        if radial.upper != 1.0:
            raise ConfigurationError("the Weibull sweep assumes x_F = 1")
        limit, seq = weibull_limit(alpha, radial.tail_index, p), weibull_sequence(p)
    else:
        c = float(block.get("c", 1.0))
        limit, seq = frechet_limit(c, radial.tail_index, mixing, p), frechet_sequence(c, p)
    rows = convergence_sweep(model, block["levels"], limit, seq, grid_size=int(block.get("grid_size", 200)))
    out = [[radial.mda, r.level, r.tau, r.scale, r.sup_gap] for r in rows]
    return Table(["regime", "level", "tau", "scale", "sup_gap"], out,
                 message=f"limit: {len(out)} levels, last sup-gap {rows[-1].sup_gap!r}")


def cmd_concomitants(cfg: dict, seed: int) -> Table:
    model = build_model(cfg.get("model"))
    if not isinstance(model, BivariateModel):
        raise ConfigurationError("concomitants need the bivariate model (give rho)")
    block = cfg.get("concomitants", {})
    exp = ConcomitantExperiment(model, int(block.get("n", 10_000)), int(block.get("k", 2)),
                                int(block.get("reps", 1000)), seed)
    rep = run_concomitant_experiment(exp)
    rows = [[r, i + 1, rep.eta[r, i], rep.xi[r, i]] for r in range(exp.reps) for i in range(exp.k)]
    summary = rep.summary()
    msg = f"concomitants: {exp.reps} reps, marginal KS {max(summary['marginal_ks']):.4f}"
    return Table(["rep", "position", "eta", "xi"], rows, summary, message=msg)


_LEMMA_DEFAULTS = {
    "a": {"y": 1.0, "z": 1.0, "levels": [10.0, 100.0, 1000.0], "tolerance": 0.02},
    "b": {"y": 0.0, "z": 1.0, "beta": 0.0, "levels": [1e-2, 1e-3, 1e-4], "tolerance": 0.02},
    "c": {"beta": 0.0, "mu": 2.0, "z": 0.0, "levels": [20.0, 50.0, 100.0], "tolerance": 0.05},
}
_LEMMA_FOR = {FRECHET: "a", WEIBULL: "b", GUMBEL: "c"}


def cmd_lemma(cfg: dict, seed: int) -> Table:
    model = _mixture_of(build_model(cfg.get("model")))
    block = cfg.get("lemma") or {_LEMMA_FOR[model.radial.mda]: {}}
    rows = []
    for part in sorted(block):
        spec = {**_LEMMA_DEFAULTS[part], **block[part]}
        tol = float(spec["tolerance"])
        for u in spec["levels"]:
            if part == "a":
                ratio = lemma1a_ratio(model.radial, model.mixing, spec["y"], spec["z"], u)
            elif part == "b":
                ratio = lemma1b_ratio(model.radial, model.mixing, spec["y"], spec["z"], spec["beta"], u)
            else:
                vanish, ratio = lemma1c_checks(model.radial, model.mixing, spec["beta"], spec["mu"],
                                               spec["z"], u)
                rows.append([part, u, "vanish", vanish, 1e-6, vanish <= 1e-6])
            dev = abs(ratio - 1.0)
            rows.append([part, u, "ratio_deviation", dev, tol, dev <= tol])
    return Table(["check", "level", "statistic", "value", "threshold", "pass"], rows,
                 message=f"lemma: {len(rows)} rows, {sum(r[-1] for r in rows)} within threshold")


def cmd_verify(cfg: dict, seed: int) -> Table:
    from .acceptance import run_acceptance

    wanted = cfg.get("verify", {}).get("criteria")
    results = run_acceptance(wanted, seed=seed)
    rows = []
    for res in results:
        for chk in res.checks:
            rows.append([res.number, chk.name, chk.value, chk.threshold, chk.passed])
    ok = sum(r.passed for r in results)
    table = Table(["criterion", "statistic", "value", "threshold", "pass"], rows,
                  message=f"verify: {ok}/{len(results)} criteria passed")
    table.all_passed = ok == len(results)
    return table


HANDLERS = {
    "sample": cmd_sample,
    "cond": cmd_cond,
    "limit": cmd_limit,
    "concomitants": cmd_concomitants,
    "lemma": cmd_lemma,
    "verify": cmd_verify,
}


HELP = {
    "sample": "draw rows of X from the model",
    "cond": "conditional CDF/density grid or conditional draws given X_J = a_J",
    "limit": "sup-gap between rescaled conditional and limit CDFs per level",
    "concomitants": "normalized top-k concomitants over many replications",
    "lemma": "tail integral ratio checks",
    "verify": "run the numbered acceptance criteria",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpmix", description="W_p scale mixture experiments")
    parser.add_argument("--version", action="version", version=f"wpmix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name])
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        exp = load_experiment(args.config)
        seed = exp.seed if args.seed is None else args.seed
        if not 0 <= seed < 2**64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
        fmt = args.format or exp.fmt
        path = args.out or exp.output_path
        table = HANDLERS[args.command](exp.raw, seed)
        if fmt == "json":
            _write(render_json(table, args.command, seed), path)
        else:
            _write(render_csv(table), path)
            if table.summary is not None and path not in (None, "-"):
                summary = Table([], [], table.summary)
                _write(render_json(summary, args.command, seed), path + ".summary.json")
    except ConfigurationError as exc:
        print(f"wpmix: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"wpmix: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InconclusiveOracleError as exc:
        print(f"wpmix: inconclusive oracle: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    print(f"wpmix {table.message}", file=sys.stderr)
    if getattr(table, "all_passed", True) is False:
        return EXIT_FAILED
    return EXIT_OK


def main() -> None:
    sys.exit(run())
