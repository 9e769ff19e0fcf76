"""Command line front end.

Usage::

    maxrep verify --rep diagonal --n 2 --seed 7 --out runs/verify
    maxrep toledo --rep irreducible --n 2
    maxrep trlen  --rep diagonal --n 2 --word a1,b1
    maxrep qi     --rep irreducible --n 2 --budget 50
    maxrep orbit  --rep diagonal --n 2 --twist a1 --kmax 10
    maxrep causal --n 3 --count 1000
    maxrep info

Flags override the configuration file, which overrides the defaults.  The
seed may also come from the ``MAXREP_SEED`` environment variable.  Each run
writes into a fresh directory ``<out>/<run_id>`` (``--out`` defaults to
``maxrep-runs``), so earlier runs are never touched.  ``run.json`` there lists
the SHA-256 checksums of the outputs; identical configuration and seed give
identical checksums whatever the number of workers.  ``info`` writes nothing.

Exit codes: 0 success, 1 a check failed (outputs are still written),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import platform
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from maxrep import __version__, config, properness
from maxrep.hyperbolic import octagon_hyperbolization, translation_length_h
from maxrep.max_reps import (
    MaximalRep,
    compose_rep,
    embedding_from_tag,
    load_rep,
    milnor_wood_bound,
    toledo_details,
    translation_length_sp,
)
from maxrep.surface_group import (
    UnsupportedGenus,
    Word,
    builtin_twist,
    curve_system,
    identity_automorphism,
    load_automorphism,
    load_curve_system,
)

SEED_ENV = "MAXREP_SEED"
SOFT_BUDGET_SECONDS = 600
DEFAULT_OUT = "maxrep-runs"


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ arguments


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file")
    common.add_argument("--seed", type=int, help=f"64-bit seed (default: ${SEED_ENV}, then the config)")
    common.add_argument("--genus", type=int, default=2)
    common.add_argument("--n", type=int, help="half dimension of the symplectic space (default 2; causal: config)")
    common.add_argument("--rep", default="diagonal", help="diagonal | irreducible | file:PATH")
    common.add_argument("--out", default=DEFAULT_OUT, help=f"base output directory (default {DEFAULT_OUT})")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--json-errors", action="store_true", help="report errors as JSON on stderr")

    parser = argparse.ArgumentParser(prog="maxrep", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the full comparison suite")
    sub.add_parser("toledo", parents=[common], help="Toledo invariant and Milnor-Wood bound")
    p = sub.add_parser("trlen", parents=[common], help="translation lengths of words")
    p.add_argument("--word", action="append", help="word such as a1,-b2 (repeatable; default: curve system)")
    p = sub.add_parser("qi", parents=[common], help="fit quasi-isometry constants")
    p.add_argument("--budget", type=int, help="number of sampled words")
    p = sub.add_parser("orbit", parents=[common], help="length sums along a twist orbit")
    p.add_argument("--twist", default="a1", help="a1 | b1 | a2 | b2 | sep | identity | file:PATH | config label")
    p.add_argument("--kmax", type=int, help="largest power")
    p = sub.add_parser("causal", parents=[common], help="causal length bound on random curves")
    p.add_argument("--count", type=int, help="number of curves")
    sub.add_parser("info", parents=[common], help="show configuration and versions")
    return parser


# ---------------------------------------------------------------- environment


@dataclasses.dataclass
class Context:
    args: argparse.Namespace
    cfg: config.Config
    sampling: config.Sampling
    seed: int
    out: Path | None
    outputs: dict
    run_id: str


def _resolve(args) -> Context:
    try:
        cfg = config.load_config(args.config)
    except config.ConfigError as exc:
        raise UsageError(str(exc)) from None
    config.set_tolerances(cfg.tolerances)
    sampling = cfg.sampling
    seed = sampling.seed
    if os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    if args.seed is not None:
        seed = args.seed
    if not 0 <= seed < 2**64:
        raise UsageError("seed must be an unsigned 64-bit integer")
    overrides = {"seed": seed}
    if args.workers is not None:
        overrides["workers"] = args.workers
    if getattr(args, "kmax", None) is not None:
        overrides["k_max"] = args.kmax
    sampling = dataclasses.replace(sampling, **overrides)
    if args.n is not None and args.n < 1:
        raise UsageError("--n must be positive")
    run_id = _run_id(cfg, sampling, args)
    out = None
    if args.command != "info":
        out = _fresh_dir(Path(args.out), run_id)
    return Context(args, cfg, sampling, seed, out, {}, run_id)


def _argument_record(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("json_errors", "workers", "out")}


def _run_id(cfg: config.Config, sampling: config.Sampling, args) -> str:
    snapshot = cfg.as_dict()
    snapshot["sampling"] = dataclasses.asdict(dataclasses.replace(sampling, workers=1))
    digest = hashlib.sha256(json.dumps([snapshot, _argument_record(args)], sort_keys=True,
                                       default=str).encode()).hexdigest()
    return datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%SZ") + "-" + digest[:12]


def _fresh_dir(base: Path, run_id: str) -> Path:
    """``base/run_id``, with a numeric suffix when that directory already exists."""
    base.mkdir(parents=True, exist_ok=True)
    path, k = base / run_id, 1
    while True:
        try:
            path.mkdir()
            return path
        except FileExistsError:
            k += 1
            path = base / f"{run_id}.{k}"


def _representation(ctx: Context) -> tuple[MaximalRep, object]:
    args = ctx.args
    if args.genus != 2:
        raise UsageError(f"genus {args.genus}: only genus 2 has built-in data")
    h = octagon_hyperbolization()
    if args.rep.startswith("file:"):
        path = args.rep[5:]
        if not Path(path).exists():
            raise UsageError(f"representation file {path} not found")
        rep = load_rep(path)
        if rep.genus != args.genus:
            raise UsageError("representation genus does not match --genus")
        return rep, h
    try:
        emb = embedding_from_tag(args.rep, args.n or 2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return compose_rep(h, emb), h


def _curves(ctx: Context):
    path = ctx.cfg.curves.get("file")
    return load_curve_system(path) if path else curve_system(ctx.args.genus)


def _twist(ctx: Context, label: str):
    genus = ctx.args.genus
    if label == "identity":
        return identity_automorphism(genus)
    if label.startswith("file:"):
        return load_automorphism(label[5:], genus)
    source = ctx.cfg.twists.get(label, "builtin")
    if source != "builtin":
        return load_automorphism(source, genus)
    try:
        return builtin_twist(label, genus)
    except UnsupportedGenus as exc:
        raise UsageError(str(exc)) from None


def _emit(ctx: Context, name: str, writer) -> None:
    if ctx.out is None:
        return
    path = ctx.out / name
    writer(path)
    ctx.outputs[name] = hashlib.sha256(path.read_bytes()).hexdigest()


def _write_run_record(ctx: Context, status: str) -> None:
    if ctx.out is None:
        return
    snapshot = ctx.cfg.as_dict()
    snapshot["sampling"] = dataclasses.asdict(ctx.sampling)
    record = {
        "run_id": ctx.run_id,
        "command": ctx.args.command,
        "arguments": _argument_record(ctx.args),
        "config": snapshot,
        "seed": ctx.seed,
        "versions": {"maxrep": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
        "outputs": dict(sorted(ctx.outputs.items())),
        "status": status,
    }
    (ctx.out / "run.json").write_text(json.dumps(record, indent=2, sort_keys=True, default=str) + "\n")
    print(f"output {ctx.out}")


# ------------------------------------------------------------------- commands


def cmd_verify(ctx: Context) -> bool:
    rep, h = _representation(ctx)
    start = time.monotonic()
    report = properness.lemma_suite(rep, h, seed=ctx.seed, sampling=ctx.sampling)
    elapsed = time.monotonic() - start
    if elapsed > SOFT_BUDGET_SECONDS:
        print(f"warning: verify took {elapsed:.0f} s, over the {SOFT_BUDGET_SECONDS} s budget", file=sys.stderr)
    _emit(ctx, "lemma_suite.json", lambda p: properness.write_json(report, p))
    print(f"checks passed: {report['checks_passed']}/{report['checks_total']}")
    for key in ("cone", "equivariance", "displacement", "causal", "attainment"):
        print(f"  {key}: {'pass' if report[key]['pass'] else 'FAIL'}")
    return bool(report["pass"])


def cmd_toledo(ctx: Context) -> bool:
    rep, _ = _representation(ctx)
    res = toledo_details(rep)
    bound = milnor_wood_bound(rep.n, rep.genus)
    print(f"toledo {res.value}")
    print(f"milnor_wood_bound {bound}")
    print(f"maximal {abs(res.value) == bound}")
    data = dataclasses.asdict(res)
    data["maximal"] = abs(res.value) == bound
    _emit(ctx, "toledo.json", lambda p: properness.write_json(data, p))
    return True


def cmd_trlen(ctx: Context) -> bool:
    rep, h = _representation(ctx)
    if ctx.args.word:
        items = [(w, Word.parse(w, ctx.args.genus)) for w in ctx.args.word]
    else:
        items = list(_curves(ctx))
    rows = []
    for i, (label, w) in enumerate(items):
        tl = translation_length_sp(rep, w, properness.task_rng(ctx.seed, properness.STREAM_TRLEN, i))
        tr_h = translation_length_h(h(w))
        rows.append((label, str(w), tr_h, tl.value, tl.lower_bound))
        print(f"{label}\t{tl.value:.12g}\t(tr_h {tr_h:.12g}, lower bound {tl.lower_bound:.12g})")

    def write(path):
        with open(path, "w") as fh:
            fh.write("label,word,tr_h,tr_rho,lower_bound\n")
            for label, w, a, b, c in rows:
                fh.write(f'{label},"{w}",{a!r},{b!r},{c!r}\n')

    _emit(ctx, "trlen.csv", write)
    return True


def cmd_qi(ctx: Context) -> bool:
    rep, h = _representation(ctx)
    budget = ctx.args.budget or ctx.sampling.word_count
    est = properness.qi_estimate(rep, h, budget, ctx.sampling.max_word_length, ctx.seed, ctx.sampling.workers)
    print(f"A {est.A!r}")
    print(f"B {est.B!r}")
    print(f"samples {est.samples} skipped {est.skipped}")
    _emit(ctx, "qi_scatter.csv", lambda p: properness.write_qi_csv(est, p))
    _emit(ctx, "qi.json", lambda p: properness.write_json(properness.qi_summary(est), p))
    return est.max_lower_violation <= 0 and est.max_upper_violation <= 0


def cmd_orbit(ctx: Context) -> bool:
    rep, _ = _representation(ctx)
    psi = _twist(ctx, ctx.args.twist)
    probe = properness.orbit_probe(rep, psi, _curves(ctx), ctx.sampling.k_max, ctx.seed, ctx.sampling.workers)
    for k, s in zip(probe.ks, probe.sums):
        print(f"{k}\t{s:.12g}")
    print(f"increasing_from {probe.k0}")
    print(f"diverges {probe.diverges}")
    _emit(ctx, "orbit_probe.csv", lambda p: properness.write_orbit_csv(probe, p))
    return True


def cmd_causal(ctx: Context) -> bool:
    count = ctx.args.count or ctx.sampling.causal_curves
    n = ctx.args.n or ctx.sampling.causal_n
    report = properness.causal_suite(count, n, ctx.sampling.causal_max_samples, ctx.seed, ctx.sampling.workers)
    for metric in ("d_y", "d_proof"):
        r = report[metric]
        print(f"{metric}: {r['passed']}/{count} within bound, worst margin {r['worst_margin']:.3e}")
    _emit(ctx, "causal.json", lambda p: properness.write_json(report, p))
    return bool(report["pass"])


def cmd_info(ctx: Context) -> bool:
    data = {
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "config": ctx.cfg.as_dict(),
        "seed": ctx.seed,
        "builtin_twists": ["a1", "b1", "a2", "b2", "sep"],
        "curves": [f"{lab}: {w}" for lab, w in curve_system(2)],
    }
    print(json.dumps(data, indent=2, default=str))
    return True


COMMANDS = {
    "verify": cmd_verify,
    "toledo": cmd_toledo,
    "trlen": cmd_trlen,
    "qi": cmd_qi,
    "orbit": cmd_orbit,
    "causal": cmd_causal,
    "info": cmd_info,
}


def _fail(args, code: int, exc: BaseException) -> int:
    if args is not None and getattr(args, "json_errors", False):
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        print(json.dumps(payload), file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)
    return code


def cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    saved = config.get_tolerances()
    ctx = None
    try:
        ctx = _resolve(args)
        ok = COMMANDS[args.command](ctx)
        _write_run_record(ctx, "pass" if ok else "fail")
        return 0 if ok else 1
    except UsageError as exc:
        return _fail(args, 2, exc)
    except Exception as exc:  # computational failures are reported, not raised
        if ctx is not None:
            _write_run_record(ctx, "error")
        return _fail(args, 1, exc)
    finally:
        config.set_tolerances(saved)


def main() -> None:
    sys.exit(cli())
