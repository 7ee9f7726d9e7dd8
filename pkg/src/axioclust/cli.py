"""Batch command line front end.

Usage::

    axioclust run      --data d4.csv --view features --algo c_means --c 2 --indices
    axioclust classify --data d4.csv --view features --partition U.csv --kind hard
    axioclust indices  --data d4.csv --partition U.csv --kind soft --variant standard
    axioclust verify thm4 --data d4.csv --algo c_means --c 2 --trials 1000
    axioclust sweep    --data d4.csv --algo fuzzy_c_means --c-min 2 --c-max 4

Every command writes one JSON report (to ``--out`` or stdout).  Exit status
is 0 on success, 2 when the clustering result is improper, 1 on errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import algorithms as algos
from .algorithms import ALGORITHMS, VIEWS, AlgoConfig, similarity_from_features
from .axiom_lab import result_with_map, verify_thm4, verify_thm5
from .categorization import (
    DISSIMILARITY,
    ClusteringResult,
    Exemplar,
    GaussianModel,
    Multinomial,
    Prototype,
    axiom_report,
    gaussian,
    max_link,
    multinomial,
    sq_euclidean,
)
from .criteria import CRITERIA, cml_loglik, cut, decomposition_check, ics, mixture_loglik, sse
from .data import TIE_TOL, DataSet, Partition, classify_partition, validate_partition
from .exceptions import AxioclustError, ConfigurationError
from .io import SCHEMA, VIEW_KINDS, dumps, ingest, read_partition
from .validity import DIRECTIONS, INDEX_NAMES, is_better, validity_report

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_IMPROPER = 2


@dataclass
class RunSpec:
    data: str
    view: str = "features"
    header: bool = False
    algo: str = "c_means"
    config: AlgoConfig = None
    tol: float = TIE_TOL
    indices: bool = False
    theorems: tuple = ()
    trials: int = 1000
    sweep: Optional[tuple] = None
    variant: str = "paper"
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)


# --- helpers -----------------------------------------------------------------

def _prepare(data: DataSet, algo: str, view: str) -> DataSet:
    """Give an algorithm the view it needs, deriving similarities from features."""
    need = VIEWS[algo]
    if data.has(need):
        return data
    if need == "similarity" and data.has("features"):
        return DataSet(features=data.features,
                       similarity=similarity_from_features(data.features))
    raise ConfigurationError(f"{algo} needs the {need} view; input gave {view}")


def _describe_model(model) -> dict:
    if isinstance(model, GaussianModel):
        return {"type": "gaussian", "V": model.V, "sigma": model.sigma, "kappa": model.kappa}
    if isinstance(model, Prototype):
        out = {"type": "prototype", "V": model.V}
        if model.alpha is not None:
            out["alpha"] = model.alpha
        return out
    if isinstance(model, Exemplar):
        return {"type": "exemplar", "members": [sorted(s) for s in model.members]}
    if isinstance(model, Multinomial):
        out = {"type": "multinomial", "theta": model.theta}
        if model.alpha is not None:
            out["alpha"] = model.alpha
        return out
    return {"type": type(model).__name__}


def _result_block(R: ClusteringResult) -> dict:
    meta = {k: v for k, v in R.meta.items() if k != "algorithm" and not k.startswith("_")}
    return {
        "iterations": R.iterations,
        "converged": R.converged,
        "trace": list(R.trace),
        "model": _describe_model(R.model),
        "partition": {"kind": R.partition.kind, "U": R.partition.U},
        "labels": R.labels,
        "affinity": R.affinity.describe(),
        "meta": meta,
    }


def _criterion(name, value):
    return {"value": value, "direction": CRITERIA[name].direction}


def _criteria_block(R: ClusteringResult, cfg: AlgoConfig) -> dict:
    data, model, P = R.data, R.model, R.partition
    out = {}
    hard_ok = P.kind == "hard" and validate_partition(P).ok
    if isinstance(model, Prototype) and data.has("features"):
        out["sse"] = _criterion("sse", sse(data, model, P))
        out["ics"] = _criterion("ics", ics(data, model, P, m=cfg.m, gamma=1.0))
        out["ics"]["parameters"] = {"m": cfg.m, "gamma": 1.0}
        if hard_ok and np.all(P.U.sum(axis=1) > 0):
            d = decomposition_check(data, P)
            out["decomposition"] = {"within": d.within, "between": d.between,
                                    "total": d.total, "residual": d.residual}
    if isinstance(model, GaussianModel):
        out["cml_loglik"] = _criterion("cml_loglik", cml_loglik(data, model, P))
        alpha = np.bincount(R.labels, minlength=model.c) / data.n
        out["mixture_loglik"] = _criterion("mixture_loglik", mixture_loglik(data, model, alpha))
    if data.has("similarity") and P.c == 2 and hard_ok:
        out["cut"] = _criterion("cut", cut(data, P))
    if R.meta.get("algorithm", "").startswith("sample_weighted") and R.trace:
        out["sample_weighted_objective"] = _criterion("sample_weighted_objective", R.trace[-1])
        out["sample_weighted_objective"]["scale"] = "log"
    return out


def _theorem_result(R: ClusteringResult, theorem: str, beta: float) -> ClusteringResult:
    """The result judged under a similarity (thm4) or dissimilarity (thm5) map."""
    mode = R.affinity.mode
    if theorem == "thm4":
        if mode != DISSIMILARITY:
            return R
        if isinstance(R.model, Prototype):
            return result_with_map(R, gaussian(beta))
    else:
        if mode == DISSIMILARITY:
            return R
        if isinstance(R.model, Prototype):
            return result_with_map(R, sq_euclidean())
    raise ConfigurationError(f"no {'similarity' if theorem == 'thm4' else 'dissimilarity'} "
                             f"map available for a {type(R.model).__name__} model")


def _verify(R, theorem, trials, seed, tol, beta):
    target = _theorem_result(R, theorem, beta)
    fn = verify_thm4 if theorem == "thm4" else verify_thm5
    report = fn(target, trials=trials, seed=seed, tol=tol).to_dict()
    report["affinity"] = target.affinity.describe()
    # keep reports small: list at most the first 20 breaches
    report["violation_count"] = len(report["violations"])
    report["violations"] = report["violations"][:20]
    return report


def _index_block(R: ClusteringResult, variant, m):
    return {name: iv.to_dict() for name, iv in
            validity_report(R.data, R.model, R.partition, variant=variant, m=m).items()}


def _header(command, spec: RunSpec):
    return {"schema": SCHEMA, "command": command,
            "input": {"path": str(spec.data), "view": spec.view, "header": spec.header}}


# --- pipeline ----------------------------------------------------------------

def run_pipeline(spec: RunSpec):
    """Run, classify, optionally verify and validate.  Returns ``(report, exit_code)``."""
    raw = ingest(spec.data, spec.view, spec.header)
    data = _prepare(raw, spec.algo, spec.view)
    cfg = spec.config
    report = _header("run", spec)
    report.update({"algorithm": spec.algo, "config": cfg.as_dict(), "seed": cfg.seed})
    R = algos.run(spec.algo, data, cfg)
    axioms = axiom_report(R, spec.tol)
    report["result"] = _result_block(R)
    report["axioms"] = axioms
    report["class"] = axioms["class"]
    report["flags"] = axioms["flags"]
    report["criteria"] = _criteria_block(R, cfg)
    if spec.indices:
        report["indices"] = _index_block(R, spec.variant, cfg.m)
    if spec.theorems:
        report["theorems"] = {t: _verify(R, t, spec.trials, cfg.seed, spec.tol, cfg.beta)
                              for t in spec.theorems}
    if spec.sweep:
        report["sweep"] = _sweep(data, spec)
    code = EXIT_IMPROPER if axioms["class"] == "improper" else EXIT_OK
    return report, code


def _sweep(data: DataSet, spec: RunSpec):
    lo, hi = spec.sweep
    if lo < 2 or hi > data.n or lo > hi:
        raise ConfigurationError(f"sweep range [{lo}, {hi}] must be nonempty and within [2, n={data.n}]")
    base = spec.config
    entries = []
    for c in range(lo, hi + 1):
        cfg = AlgoConfig(**{**base.as_dict(), "c": c, "seed": base.seed + c})
        R = algos.run(spec.algo, data, cfg)
        axioms = axiom_report(R, spec.tol)
        entries.append({"c": c, "seed": cfg.seed, "class": axioms["class"],
                        "flags": axioms["flags"], "iterations": R.iterations,
                        "indices": _index_block(R, spec.variant, cfg.m)})
    best = {}
    for name in INDEX_NAMES:
        scored = [(e["c"], e["indices"][name]["value"]) for e in entries if name in e["indices"]]
        scored = [(c, v) for c, v in scored if not isinstance(v, str)]
        if not scored:
            continue
        pick = scored[0]
        for c, v in scored[1:]:
            if is_better(v, pick[1], DIRECTIONS[name]):
                pick = (c, v)
        best[name] = pick[0]
    return {"range": [lo, hi], "seed_rule": "seed + c", "entries": entries, "optimal_c": best}


# --- partition-file commands ---------------------------------------------------

def _model_for_partition(data: DataSet, P: Partition, m: float, prototypes=None):
    if prototypes is not None:
        return Prototype(read_partition(prototypes)), sq_euclidean()
    if data.has("features"):
        W = P.U ** m
        s = W.sum(axis=1)
        if np.any(s <= 0):
            raise ConfigurationError("a cluster has no members; pass --prototypes")
        return Prototype((W @ data.features) / s[:, None]), sq_euclidean()
    if data.has("similarity"):
        labels = np.argmax(P.U, axis=0)
        groups = [tuple(np.flatnonzero(labels == i)) for i in range(P.c)]
        if any(len(g) == 0 for g in groups):
            raise ConfigurationError("a cluster has no members under argmax")
        return Exemplar(tuple(groups)), max_link()
    A = data.adjacency
    num = P.U @ A
    theta = num / num.sum(axis=1, keepdims=True)
    return Multinomial(theta), multinomial()


def _load_partition(spec: RunSpec):
    raw = ingest(spec.data, spec.view, spec.header)
    U = read_partition(spec.extra["partition"])
    P = Partition(U, spec.extra["kind"])
    if P.n != raw.n:
        raise ConfigurationError(f"partition has {P.n} columns, data has {raw.n} objects")
    return raw, P


def classify_command(spec: RunSpec):
    data, P = _load_partition(spec)
    report = _header("classify", spec)
    validation = validate_partition(P)
    report["partition"] = {"kind": P.kind, "valid": validation.ok,
                           "violation": None if validation.ok else validation.describe()}
    if validation.ok:
        pc = classify_partition(P, tol=spec.tol)
        report["partition"].update({
            "class": pc.top, "flags": sorted(pc.flags),
            "witnesses": {str(i): k for i, k in pc.witnesses.items()},
            "violations": pc.violations})
    model, amap = _model_for_partition(data, P, spec.config.m, spec.extra.get("prototypes"))
    R = ClusteringResult(data, model, P, amap)
    axioms = axiom_report(R, spec.tol)
    report.update({"model": _describe_model(model), "axioms": axioms,
                   "class": axioms["class"], "flags": axioms["flags"]})
    return report, EXIT_IMPROPER if axioms["class"] == "improper" else EXIT_OK


def indices_command(spec: RunSpec):
    data, P = _load_partition(spec)
    model, amap = _model_for_partition(data, P, spec.config.m, spec.extra.get("prototypes"))
    report = _header("indices", spec)
    report["model"] = _describe_model(model)
    report["indices"] = {name: iv.to_dict() for name, iv in
                         validity_report(data, model, P, variant=spec.variant,
                                         m=spec.config.m).items()}
    return report, EXIT_OK


def verify_command(spec: RunSpec):
    raw = ingest(spec.data, spec.view, spec.header)
    data = _prepare(raw, spec.algo, spec.view)
    cfg = spec.config
    R = algos.run(spec.algo, data, cfg)
    report = _header("verify", spec)
    report.update({"algorithm": spec.algo, "config": cfg.as_dict(), "seed": cfg.seed})
    axioms = axiom_report(R, spec.tol)
    report["class"] = axioms["class"]
    report["flags"] = axioms["flags"]
    report["theorems"] = {t: _verify(R, t, spec.trials, cfg.seed, spec.tol, cfg.beta)
                          for t in spec.theorems}
    return report, EXIT_OK


def sweep_command(spec: RunSpec):
    raw = ingest(spec.data, spec.view, spec.header)
    data = _prepare(raw, spec.algo, spec.view)
    report = _header("sweep", spec)
    report.update({"algorithm": spec.algo, "config": spec.config.as_dict(),
                   "seed": spec.config.seed, "sweep": _sweep(data, spec)})
    return report, EXIT_OK


# --- argument parsing ----------------------------------------------------------

def _add_data(p, partition=False):
    p.add_argument("--data", required=True, help="input file")
    p.add_argument("--view", choices=VIEW_KINDS, default="features")
    p.add_argument("--header", action="store_true", help="skip the first CSV line")
    p.add_argument("--tol", type=float, default=TIE_TOL, help="tie tolerance for the axiom checks")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    if partition:
        p.add_argument("--partition", required=True, help="c x n membership CSV")
        p.add_argument("--kind", choices=("hard", "soft", "possibilistic"), default="soft")
        p.add_argument("--prototypes", help="c x r prototype CSV (default: weighted means)")
        p.add_argument("--m", type=float, default=2.0, help="membership exponent")
        p.add_argument("--variant", choices=("paper", "standard"), default="paper")


def _add_algo(p):
    p.add_argument("--algo", choices=sorted(ALGORITHMS), default="c_means")
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--conv-tol", type=float, default=1e-9,
                   help="stop when the objective changes by at most this much")
    p.add_argument("--init", choices=algos.INITS, default=None)
    p.add_argument("--variant", choices=("paper", "standard"), default="paper")


def build_parser():
    parser = argparse.ArgumentParser(prog="axioclust", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="cluster, classify, and optionally validate/verify")
    _add_data(p)
    _add_algo(p)
    p.add_argument("--indices", action="store_true", help="add validity indices")
    p.add_argument("--theorems", nargs="*", choices=("thm4", "thm5"), default=None,
                   help="verify the similarity (thm4) and/or dissimilarity (thm5) inequalities")
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("classify", help="taxonomy and axioms of a given partition")
    _add_data(p, partition=True)

    p = sub.add_parser("indices", help="validity indices of a given partition")
    _add_data(p, partition=True)

    p = sub.add_parser("verify", help="check the clustering-result inequalities")
    p.add_argument("theorem", choices=("thm4", "thm5"))
    _add_data(p)
    _add_algo(p)
    p.add_argument("--trials", type=int, default=1000)

    p = sub.add_parser("sweep", help="re-run an algorithm for a range of c")
    _add_data(p)
    _add_algo(p)
    p.add_argument("--c-min", type=int, default=2)
    p.add_argument("--c-max", type=int, required=True)
    return parser


def spec_from_args(args) -> RunSpec:
    cfg = AlgoConfig(
        c=getattr(args, "c", 2), m=args.m, beta=getattr(args, "beta", 1.0),
        sigma=getattr(args, "sigma", 1.0), kappa=getattr(args, "kappa", 1.0),
        seed=getattr(args, "seed", 0), max_iter=getattr(args, "max_iter", 300),
        tol=getattr(args, "conv_tol", 1e-9), init=getattr(args, "init", None))
    spec = RunSpec(data=args.data, view=args.view, header=args.header,
                   algo=getattr(args, "algo", "c_means"), config=cfg, tol=args.tol,
                   variant=args.variant, out=args.out,
                   trials=getattr(args, "trials", 1000))
    if args.command == "run":
        spec.indices = args.indices
        spec.theorems = tuple(args.theorems or ())
    elif args.command == "verify":
        spec.theorems = (args.theorem,)
    elif args.command == "sweep":
        spec.sweep = (args.c_min, args.c_max)
    if args.command in ("classify", "indices"):
        spec.extra = {"partition": args.partition, "kind": args.kind,
                      "prototypes": args.prototypes}
    return spec


COMMANDS = {
    "run": run_pipeline,
    "classify": classify_command,
    "indices": indices_command,
    "verify": verify_command,
    "sweep": sweep_command,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        report, code = COMMANDS[args.command](spec)
    except AxioclustError as exc:
        print(f"axioclust: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = dumps(report)
    if spec.out:
        with open(spec.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
