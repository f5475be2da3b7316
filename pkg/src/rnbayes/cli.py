"""Command-line front end: ``simulate | infer | price | compare | diagnose``.

Settings come from flags, then the matching section of an optional YAML
config file (``--config``), then its top-level keys, then built-in defaults.
Every run prints a JSON record with the resolved configuration (seed
included) to stdout.  JSON is written with sorted keys and ``repr`` floats,
so repeated runs with the same inputs are byte identical.

Exit status: 0 success, 2 usage or invalid input, 3 data or file error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import yaml

from .errors import DataError, InvalidInputError, NumericError, RNBayesError
from .inference import (
    GibbsConfig,
    PosteriorDraws,
    consistency_diagnostic,
    gibbs_run,
    merging_diagnostic,
    posterior_summary,
)
from .model_selection import GbmModel, JumpDiffusionModel, ModelSpec, marginal_likelihood, model_posterior
from .paths import (
    JumpDist,
    dump_price_series,
    interval_returns,
    load_price_series,
    log_return,
    realized_variance,
    simulate_gbm,
    simulate_jump_diffusion,
)
from .pricing import OptionSpec, price_model_averaged, price_posterior
from .priors import FlatPrior, NormalPrior, PointMass, PriorSpec, format_prior, parse_prior
from .rng import make_stream

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

WORKERS_ENV = "RNBAYES_WORKERS"

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "simulate": {
        "s0": 100.0, "mu": 0.05, "sigma": 0.2, "t": 1.0, "steps": 252, "seed": 0,
        "jump_intensity": 0.0, "jumps": None, "out": None,
    },
    "infer": {
        "data": None, "r": 0.0, "prior_mu": "flat", "prior_sigma2": "flat",
        "draws": 5000, "burn_in": 1000, "thin": 1, "seed": 0,
        "init_mu": 0.0, "init_sigma2": None, "out": None,
    },
    "price": {
        "data": None, "posterior": None, "strike": None, "maturity": None, "r": None, "out": None,
    },
    "compare": {
        "data": None, "r": 0.0, "model": None, "mc": 10000, "seed": 0,
        "strike": None, "maturity": None, "draws": 5000, "burn_in": 1000, "thin": 1,
        "workers": None, "out": None,
    },
    "diagnose": {
        "data": None, "r": 0.0, "prior_mu": "flat", "prior_sigma2": "flat",
        "checkpoints": None, "sigma2": None, "merge_prior_a": None, "merge_prior_b": None,
        "grid": None, "out_consistency": None, "out_merging": None,
    },
}

REQUIRED = {
    "simulate": ("out",),
    "infer": ("data",),
    "price": ("data", "posterior", "strike", "maturity"),
    "compare": ("data", "model"),
    "diagnose": ("data", "out_consistency"),
}


class UsageError(InvalidInputError):
    """Bad command line or config file."""


# ---------------------------------------------------------------- parsing


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rnbayes", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="YAML file with top-level keys and per-command sections")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate a GBM or jump-diffusion path to CSV")
    s.add_argument("--s0", type=float)
    s.add_argument("--mu", type=float)
    s.add_argument("--sigma", type=float)
    s.add_argument("--t", type=float, help="horizon")
    s.add_argument("--steps", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--jump-intensity", type=float)
    s.add_argument("--jumps", help="log jump sizes and probabilities, e.g. -0.1@0.5/0.05@0.5")
    s.add_argument("--out")

    i = sub.add_parser("infer", help="Gibbs posterior of (mu, sigma2) from a price CSV")
    i.add_argument("--data")
    i.add_argument("--r", type=float)
    i.add_argument("--prior-mu")
    i.add_argument("--prior-sigma2")
    i.add_argument("--draws", type=int)
    i.add_argument("--burn-in", type=int)
    i.add_argument("--thin", type=int)
    i.add_argument("--seed", type=int)
    i.add_argument("--init-mu", type=float)
    i.add_argument("--init-sigma2", type=float)
    i.add_argument("--out")

    c = sub.add_parser("price", help="posterior-integrated call price")
    c.add_argument("--data")
    c.add_argument("--posterior")
    c.add_argument("--strike", type=float)
    c.add_argument("--maturity", type=float, help="absolute expiry time on the data's clock")
    c.add_argument("--r", type=float, help="defaults to the rate recorded in the posterior file")
    c.add_argument("--out")

    m = sub.add_parser("compare", help="marginal likelihoods, model posteriors and the averaged price")
    m.add_argument("--data")
    m.add_argument("--r", type=float)
    m.add_argument("--model", action="append",
                   help="kind=gbm|jump,prob=P,mu=PRIOR,sigma2=PRIOR[,r=R,intensity=L,jumps=x@p/x@p]")
    m.add_argument("--mc", type=int, help="prior Monte Carlo draws per model")
    m.add_argument("--seed", type=int)
    m.add_argument("--strike", type=float)
    m.add_argument("--maturity", type=float)
    m.add_argument("--draws", type=int)
    m.add_argument("--burn-in", type=int)
    m.add_argument("--thin", type=int)
    m.add_argument("--workers", type=int, help=f"threads (default ${WORKERS_ENV} or 1)")
    m.add_argument("--out")

    d = sub.add_parser("diagnose", help="consistency and merging curves as CSV")
    d.add_argument("--data")
    d.add_argument("--r", type=float)
    d.add_argument("--prior-mu")
    d.add_argument("--prior-sigma2")
    d.add_argument("--checkpoints", help="comma-separated grid times")
    d.add_argument("--sigma2", type=float, help="known variance (default: realised variance)")
    d.add_argument("--merge-prior-a")
    d.add_argument("--merge-prior-b")
    d.add_argument("--grid", help="mu grid as lo:hi:n")
    d.add_argument("--out-consistency")
    d.add_argument("--out-merging")
    return p


def _load_config(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = yaml.safe_load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise UsageError(f"config {path} is not valid YAML: {exc}") from None
    if cfg is None:
        return {}
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must be a mapping")
    return cfg


def _norm(key: str) -> str:
    return str(key).replace("-", "_")


def resolve(command: str, flags: Dict[str, Any], config: Dict[str, Any]) -> Dict[str, Any]:
    """Merge flags over config section over config top level over defaults."""
    defaults = DEFAULTS[command]
    section = config.get(command) or {}
    if not isinstance(section, dict):
        raise UsageError(f"config section {command!r} must be a mapping")
    top = {_norm(k): v for k, v in config.items() if _norm(k) not in DEFAULTS}
    sect = {_norm(k): v for k, v in section.items()}
    if "models" in sect and "model" not in sect:
        sect["model"] = sect.pop("models")
    unknown = sorted(set(sect) - set(defaults))
    if unknown:
        raise UsageError(f"unknown key(s) in config section {command!r}: {', '.join(unknown)}")
    out = {}
    for key, default in defaults.items():
        if flags.get(key) is not None:
            out[key] = flags[key]
        elif key in sect:
            out[key] = sect[key]
        elif key in top:
            out[key] = top[key]
        else:
            out[key] = default
    missing = [k for k in REQUIRED[command] if out[k] is None]
    if missing:
        raise UsageError(f"{command}: missing required setting(s): "
                         + ", ".join("--" + k.replace("_", "-") for k in missing))
    return out


# ---------------------------------------------------------------- helpers


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror}") from None


def _read_bytes(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _load_path(path: str):
    return load_price_series(_read_bytes(path))


def _parse_jumps(text: str) -> JumpDist:
    try:
        pairs = [item.split("@") for item in str(text).split("/") if item.strip()]
        support = [float(x) for x, _ in pairs]
        probs = [float(q) for _, q in pairs]
    except ValueError:
        raise UsageError(f"bad jump law {text!r}; expected x@p/x@p") from None
    return JumpDist(support, probs)


def _format_jumps(jd: JumpDist) -> str:
    return "/".join(f"{x!r}@{p!r}" for x, p in zip(jd.support.tolist(), jd.probs.tolist()))


def _parse_model(block, default_r: float, index: int):
    """Return ``(model, prior_prob or None, name)`` from a key=value block or mapping."""
    if isinstance(block, dict):
        fields = {_norm(k): v for k, v in block.items()}
    else:
        fields = {}
        for part in str(block).split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise UsageError(f"model block item {part!r} is not key=value")
            k, v = part.split("=", 1)
            fields[_norm(k.strip())] = v.strip()
    allowed = {"kind", "prob", "mu", "sigma2", "r", "intensity", "jumps", "name"}
    extra = sorted(set(fields) - allowed)
    if extra:
        raise UsageError(f"unknown model field(s): {', '.join(extra)}")
    kind = str(fields.get("kind", "gbm")).lower()
    try:
        prob = None if fields.get("prob") is None else float(fields["prob"])
        r = float(fields.get("r", default_r))
    except (TypeError, ValueError):
        raise UsageError(f"bad number in model block {block!r}") from None
    priors = PriorSpec(
        parse_prior(fields.get("mu", "flat"), "mu"),
        parse_prior(fields.get("sigma2", "flat"), "sigma2"),
    )
    name = str(fields.get("name", f"m{index}"))
    if kind == "gbm":
        model = GbmModel(priors, r)
    elif kind == "jump":
        if "jumps" not in fields:
            raise UsageError("jump model needs jumps=x@p/x@p")
        try:
            intensity = float(fields.get("intensity", 0.0))
        except (TypeError, ValueError):
            raise UsageError(f"bad intensity in model block {block!r}") from None
        model = JumpDiffusionModel(priors, r, intensity, _parse_jumps(fields["jumps"]))
    else:
        raise UsageError(f"unknown model kind {kind!r}")
    return model, prob, name


def _describe_model(spec: ModelSpec) -> Dict[str, Any]:
    m = spec.kind
    out = {
        "name": spec.name, "prob": spec.prior_prob, "r": m.r,
        "mu": format_prior(m.priors.mu), "sigma2": format_prior(m.priors.sigma2),
    }
    if isinstance(m, JumpDiffusionModel):
        out.update(kind="jump", intensity=m.jump_intensity, jumps=_format_jumps(m.jump_dist))
    else:
        out["kind"] = "gbm"
    return out


def _summary_dict(s) -> Dict[str, Any]:
    return {
        "mean": s.mean, "variance": s.variance, "interval_90": list(s.interval),
        "ess": s.ess, "mcse": s.mcse,
    }


def _price_dict(p) -> Dict[str, Any]:
    return {"mean": p.mean, "std_error": p.std_error, "n_draws": p.n_draws}


def _finite_or_none(x: float):
    # linear-scale evidence can overflow; log_marginal always carries the value
    return x if math.isfinite(x) else None


def _workers(value) -> int:
    if value is None:
        env = os.environ.get(WORKERS_ENV)
        if env is None or not env.strip():
            return 1
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    value = int(value)
    if value < 1:
        raise UsageError("workers must be >= 1")
    return value


def _gibbs_config(cfg, seed, stream_id, init_sigma2) -> GibbsConfig:
    return GibbsConfig(
        n_draws=int(cfg["draws"]), burn_in=int(cfg["burn_in"]), thin=int(cfg["thin"]),
        seed=int(seed), init_mu=float(cfg.get("init_mu", 0.0)),
        init_sigma2=float(init_sigma2), stream_id=stream_id,
    )


# ---------------------------------------------------------------- commands


def cmd_simulate(cfg) -> Dict[str, Any]:
    steps = int(cfg["steps"])
    if steps < 1:
        raise UsageError("steps must be >= 1")
    grid = np.linspace(0.0, float(cfg["t"]), steps + 1)
    intensity = float(cfg["jump_intensity"])
    if cfg["jumps"] is not None or intensity > 0:
        if cfg["jumps"] is None:
            raise UsageError("--jump-intensity > 0 needs --jumps")
        jd = _parse_jumps(cfg["jumps"])
        path = simulate_jump_diffusion(
            float(cfg["s0"]), float(cfg["mu"]), float(cfg["sigma"]), intensity, jd, grid, int(cfg["seed"])
        )
        cfg = dict(cfg, jumps=_format_jumps(jd))
    else:
        path = simulate_gbm(float(cfg["s0"]), float(cfg["mu"]), float(cfg["sigma"]), grid, int(cfg["seed"]))
    _write(cfg["out"], dump_price_series(path))
    return {"config": cfg, "outputs": {"path": cfg["out"]}, "n_obs": len(path),
            "final_price": float(path.prices[-1])}


def cmd_infer(cfg) -> Dict[str, Any]:
    path = _load_path(cfg["data"])
    stat = log_return(path)
    priors = PriorSpec(parse_prior(cfg["prior_mu"], "mu"), parse_prior(cfg["prior_sigma2"], "sigma2"))
    init_s2 = cfg["init_sigma2"]
    if init_s2 is None:
        init_s2 = realized_variance(path) if len(path) > 2 else 0.04
    cfg = dict(cfg, prior_mu=format_prior(priors.mu), prior_sigma2=format_prior(priors.sigma2),
               init_sigma2=float(init_s2))
    gcfg = _gibbs_config(cfg, cfg["seed"], 0, init_s2)
    draws = gibbs_run(stat, float(cfg["r"]), priors, gcfg)
    summ = posterior_summary(draws)
    warnings = []
    if isinstance(priors.sigma2, FlatPrior):
        warnings.append("flat sigma2 prior: the joint posterior is improper and the sigma2 chain "
                        "does not settle; use a gig:lam:delta:gamma or point:v prior")
    doc = {
        "command": "infer",
        "config": cfg,
        "seed": int(cfg["seed"]),
        "n_draws": len(draws),
        "data": {"ln_ratio": stat.ln_ratio, "horizon": stat.horizon, "n_obs": len(path),
                 "last_price": float(path.prices[-1])},
        "summary": {k: _summary_dict(v) for k, v in summ.items()},
        "draws": {"mu": draws.mu.tolist(), "sigma2": draws.sigma2.tolist()},
        "warnings": warnings,
    }
    if cfg["out"] is not None:
        _write(cfg["out"], _json(doc))
        record = {k: v for k, v in doc.items() if k != "draws"}
        record["outputs"] = {"posterior": cfg["out"]}
        return record
    return doc


def _load_posterior(path: str):
    raw = _read_bytes(path)
    try:
        doc = json.loads(raw.decode("utf-8"))
        mu = doc["draws"]["mu"]
        s2 = doc["draws"]["sigma2"]
        pcfg = doc["config"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError):
        raise DataError(f"{path} is not a posterior file written by 'infer'") from None
    try:
        gcfg = GibbsConfig(
            n_draws=len(mu), burn_in=int(pcfg.get("burn_in", 0)), thin=int(pcfg.get("thin", 1)),
            seed=int(pcfg.get("seed", 0)),
        )
        draws = PosteriorDraws(mu, s2, gcfg)
    except (InvalidInputError, TypeError, ValueError) as exc:
        raise DataError(f"{path}: invalid draws ({exc})") from None
    return doc, draws


def cmd_price(cfg) -> Dict[str, Any]:
    path = _load_path(cfg["data"])
    doc, draws = _load_posterior(cfg["posterior"])
    r = cfg["r"]
    if r is None:
        r = doc["config"].get("r", 0.0)
    cfg = dict(cfg, r=float(r))
    opt = OptionSpec(float(cfg["strike"]), float(cfg["maturity"]), valuation_time=path.horizon)
    est = price_posterior(path, opt, float(r), draws)
    out = {
        "command": "price",
        "config": cfg,
        "posterior": {"seed": draws.config.seed, "n_draws": len(draws)},
        "option": {"strike": opt.strike, "maturity": opt.maturity, "valuation_time": opt.valuation_time,
                   "tau": opt.tau, "spot": float(path.prices[-1])},
        "price": _price_dict(est),
    }
    if cfg["out"] is not None:
        _write(cfg["out"], _json(out))
        out = dict(out, outputs={"price": cfg["out"]})
    return out


def cmd_compare(cfg) -> Dict[str, Any]:
    path = _load_path(cfg["data"])
    stat = log_return(path)
    blocks = cfg["model"]
    if isinstance(blocks, (str, dict)):
        blocks = [blocks]
    if len(blocks) < 2:
        raise UsageError("compare needs at least two --model blocks")
    parsed = [_parse_model(b, float(cfg["r"]), i) for i, b in enumerate(blocks)]
    given = [p for _, p, _ in parsed if p is not None]
    if not given:
        probs = [1.0 / len(parsed)] * len(parsed)
    elif len(given) == len(parsed) and all(p > 0 for p in given) and abs(sum(given) - 1.0) <= 1e-12:
        probs = given
    else:
        raise UsageError("model prob= values must be given for all models or none, be > 0 and sum to 1")
    specs = [ModelSpec(m, p, name) for (m, _, name), p in zip(parsed, probs)]
    seed = int(cfg["seed"])
    n_mc = int(cfg["mc"])
    workers = _workers(cfg["workers"])
    want_price = cfg["strike"] is not None or cfg["maturity"] is not None
    if want_price and (cfg["strike"] is None or cfg["maturity"] is None):
        raise UsageError("pricing in compare needs both --strike and --maturity")
    if want_price and any(isinstance(s.kind, JumpDiffusionModel) for s in specs):
        raise UsageError("the averaged price is only available when every model is GBM")
    opt = OptionSpec(float(cfg["strike"]), float(cfg["maturity"]), path.horizon) if want_price else None
    init_s2 = realized_variance(path) if len(path) > 2 else 0.04

    # model i uses stream (seed, i, 2) for its evidence and (seed, i) for its chain
    def evaluate(i):
        spec = specs[i]
        ml = marginal_likelihood(spec, stat, n_mc, make_stream(seed, i, 2))
        price = None
        if opt is not None:
            gcfg = _gibbs_config(cfg, seed, i, init_s2)
            draws = gibbs_run(stat, spec.kind.r, spec.kind.priors, gcfg)
            price = price_posterior(path, opt, spec.kind.r, draws)
        return ml, price

    if workers == 1:
        results = [evaluate(i) for i in range(len(specs))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, range(len(specs))))

    logs = [ml.log_estimate for ml, _ in results]
    post = model_posterior(logs, [s.prior_prob for s in specs], log=True)
    models = []
    for spec, (ml, price), p in zip(specs, results, post):
        entry = _describe_model(spec)
        entry.update(marginal=_finite_or_none(ml.estimate), marginal_std_error=_finite_or_none(ml.std_error),
                     log_marginal=ml.log_estimate, posterior=float(p), n_mc=n_mc)
        if price is not None:
            entry["price"] = _price_dict(price)
        models.append(entry)
    cfg = dict(cfg, model=[_describe_model(s) for s in specs], workers=workers)
    out = {"command": "compare", "config": cfg, "seed": seed, "models": models}
    if opt is not None:
        bma = price_model_averaged([pr for _, pr in results], post)
        out["bma_price"] = _price_dict(bma)
        out["option"] = {"strike": opt.strike, "maturity": opt.maturity,
                         "valuation_time": opt.valuation_time, "spot": float(path.prices[-1])}
    if cfg["out"] is not None:
        _write(cfg["out"], _json(out))
        out = dict(out, outputs={"comparison": cfg["out"]})
    return out


def _default_checkpoints(path) -> List[float]:
    n = len(path) - 1
    idx = sorted({max(1, n // 100), max(1, n // 10), n})
    return [float(path.times[i]) for i in idx]


def _snap_checkpoints(path, requested) -> List[float]:
    """Move each requested time down to the last grid time at or before it."""
    out = []
    for t in requested:
        i = int(np.searchsorted(path.times, t * (1 + 1e-12), side="right")) - 1
        if i < 1:
            raise UsageError(f"checkpoint {t!r} precedes the first observation after time 0")
        out.append(float(path.times[i]))
    return sorted(set(out))


def _parse_floats(text, what) -> List[float]:
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [v for v in str(text).split(",") if v.strip()]
    try:
        return [float(v) for v in items]
    except (TypeError, ValueError):
        raise UsageError(f"bad {what} {text!r}") from None


def _default_grid(path, returns, s2, interval, priors) -> np.ndarray:
    centre = float(np.mean(returns)) / interval + 0.5 * s2
    half = 8.0 * math.sqrt(s2 / (returns.size * interval))
    for p in priors:
        if isinstance(p, NormalPrior):
            half = max(half, abs(p.mean - centre) + 8.0 * math.sqrt(p.variance))
    return np.linspace(centre - half, centre + half, 4001)


def cmd_diagnose(cfg) -> Dict[str, Any]:
    path = _load_path(cfg["data"])
    r = float(cfg["r"])
    priors = PriorSpec(parse_prior(cfg["prior_mu"], "mu"), parse_prior(cfg["prior_sigma2"], "sigma2"))
    if cfg["checkpoints"] is None:
        cps = _default_checkpoints(path)
    else:
        cps = _snap_checkpoints(path, _parse_floats(cfg["checkpoints"], "checkpoints"))
    sigma2 = None if cfg["sigma2"] is None else float(cfg["sigma2"])
    rows = consistency_diagnostic(path, r, priors, cps, sigma2=sigma2)
    lines = ["t,var_mu,var_sigma2,sigma2,mu"]
    lines += [f"{row.t!r},{row.var_mu!r},{row.var_sigma2!r},{row.sigma2!r},{row.mu!r}" for row in rows]
    _write(cfg["out_consistency"], "\n".join(lines) + "\n")
    outputs = {"consistency": cfg["out_consistency"]}
    cfg = dict(cfg, checkpoints=cps, prior_mu=format_prior(priors.mu), prior_sigma2=format_prior(priors.sigma2))

    merge = None
    if cfg["out_merging"] is not None:
        if cfg["merge_prior_a"] is None or cfg["merge_prior_b"] is None:
            raise UsageError("--out-merging needs --merge-prior-a and --merge-prior-b")
        returns, interval = interval_returns(path)
        s2 = realized_variance(path) if sigma2 is None else sigma2
        pa = PriorSpec(parse_prior(cfg["merge_prior_a"], "mu"), PointMass(s2))
        pb = PriorSpec(parse_prior(cfg["merge_prior_b"], "mu"), PointMass(s2))
        if cfg["grid"] is None:
            grid = _default_grid(path, returns, s2, interval, (pa.mu, pb.mu))
        else:
            parts = str(cfg["grid"]).split(":")
            if len(parts) != 3:
                raise UsageError("grid must be lo:hi:n")
            try:
                grid = np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
            except ValueError:
                raise UsageError(f"bad grid {cfg['grid']!r}") from None
        dist = merging_diagnostic(returns, r, pa, pb, grid, sigma2=s2, interval=interval)
        lines = ["n,l1_distance"] + [f"{n},{d!r}" for n, d in enumerate(dist.tolist(), start=1)]
        _write(cfg["out_merging"], "\n".join(lines) + "\n")
        outputs["merging"] = cfg["out_merging"]
        cfg = dict(cfg, merge_prior_a=format_prior(pa.mu), merge_prior_b=format_prior(pb.mu),
                   grid=f"{grid[0]!r}:{grid[-1]!r}:{grid.size}")
        merge = {"n_returns": int(dist.size), "sigma2": s2, "interval": interval,
                 "first": float(dist[0]), "last": float(dist[-1])}

    out = {"command": "diagnose", "config": cfg, "outputs": outputs,
           "consistency": [row._asdict() for row in rows]}
    if merge is not None:
        out["merging"] = merge
    return out


COMMANDS = {
    "simulate": cmd_simulate,
    "infer": cmd_infer,
    "price": cmd_price,
    "compare": cmd_compare,
    "diagnose": cmd_diagnose,
}


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, dispatch, print the JSON record; return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config")}
    try:
        config = _load_config(ns.config)
        cfg = resolve(ns.command, flags, config)
        record = COMMANDS[ns.command](cfg)
        record.setdefault("command", ns.command)
        for w in record.get("warnings", ()):
            print(f"rnbayes: warning: {w}", file=stderr)
        stdout.write(_json(record))
        return EXIT_OK
    except (DataError, OSError) as exc:
        print(f"rnbayes: data error: {exc}", file=stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"rnbayes: numeric error: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (RNBayesError, ValueError, TypeError) as exc:
        print(f"rnbayes: error: {exc}", file=stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
