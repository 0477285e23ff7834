"""Command-line interface: ``hardyverify {verify,identity,sharpness,stability}``.

Exit status: 0 when everything passes, 1 when something was evaluated and
failed, 2 for configuration or hypothesis errors.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import asdict, dataclass, field

from .catalog import (CASE_IDS, AdmissibilityError, HypothesisError, ParamSet, UnknownCaseError,
                      admissible, corpus_support, default_support, get_case, identity_terms,
                      resolve_params, run_case)
from .functionals import CRITICAL, SUBCRITICAL
from .manifold import ManifoldModel, ModelError, parse_model
from .prober import (DEFAULT_LADDER, SWEEP_CASES, CorpusSpec, generate_corpus, open_problem_value,
                     sharpness_sweep)
from .quadrature import QuadratureError, QuadratureSpec
from .radial import SmoothnessError
from .report import dumps, make_report, to_csv, validate_report

log = logging.getLogger("hardyverify")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
DEFAULT_CORPUS_COUNT = 10

# CLI flag -> ParamSet field
PARAM_FLAGS = {
    "p": "p", "gamma": "gamma", "beta": "beta", "a": "a", "b": "b", "c": "c", "bigR": "R",
    "k": "k", "q": "q", "eta": "eta_exp", "delta": "delta_interp", "alpha": "alpha_ckn",
    "b_curv": "b_curv",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    cases: list[str] = field(default_factory=list)
    models: list[str] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    corpus_count: int = DEFAULT_CORPUS_COUNT
    seed: int = 0
    value_field: str = "real"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    out: str | None = None
    format: str = "json"
    bound: float | None = None
    kind: str = SUBCRITICAL
    values: list[float] | None = None

    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                              max_subdivisions=self.max_subdivisions)

    def param_set(self) -> ParamSet:
        return ParamSet(**self.params)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


# ---------------------------------------------------------------- parsing


def _corpus_count(text: str) -> int:
    if text == "default":
        return DEFAULT_CORPUS_COUNT
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--corpus expects 'default' or an integer, got {text!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", action="append", default=None,
                        help="euclidean:N, hyperbolic:N[:b] or warped:N:<profile>; repeatable")
    for flag, dest in PARAM_FLAGS.items():
        kind = int if flag == "k" else float
        name = "--b-curv" if flag == "b_curv" else f"--{flag}"
        common.add_argument(name, dest=flag, type=kind, default=None)
    common.add_argument("--corpus", type=_corpus_count, default=DEFAULT_CORPUS_COUNT,
                        help="'default' (10 functions) or a count")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--complex", action="store_true", help="complex-valued corpus")
    common.add_argument("--rel-tol", type=float, default=1e-10)
    common.add_argument("--abs-tol", type=float, default=1e-14)
    common.add_argument("--max-subdiv", type=int, default=2000)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="hardyverify",
                                 description="Numerical verification of Hardy-type inequalities "
                                             "on rotationally symmetric Cartan-Hadamard models.")
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="check inequalities on a corpus")
    v.add_argument("--case", action="append", default=None, help=f"one of {', '.join(CASE_IDS)}")
    i = sub.add_parser("identity", parents=[common], help="residual of the critical identity")
    i.add_argument("--bound", type=float, default=1e-6)
    s = sub.add_parser("sharpness", parents=[common], help="extremal-family sweep")
    s.add_argument("--case", action="append", default=None, help=f"one of {', '.join(SWEEP_CASES)}")
    s.add_argument("--values", type=float, nargs="+", default=None,
                   help="sweep values, positive and decreasing")
    s.add_argument("--bound", type=float, default=0.02, help="allowed relative gap")
    st = sub.add_parser("stability", parents=[common], help="stability margins and E(f)")
    st.add_argument("--kind", choices=(SUBCRITICAL, CRITICAL), default=SUBCRITICAL)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {dest: getattr(ns, flag) for flag, dest in PARAM_FLAGS.items() if getattr(ns, flag) is not None}
    cfg = RunConfig(
        command=ns.command,
        cases=list(getattr(ns, "case", None) or []),
        models=list(ns.model or []),
        params=params,
        corpus_count=ns.corpus,
        seed=ns.seed,
        value_field="complex" if ns.complex else "real",
        rel_tol=ns.rel_tol,
        abs_tol=ns.abs_tol,
        max_subdivisions=ns.max_subdiv,
        out=ns.out,
        format=ns.format,
        bound=getattr(ns, "bound", None),
        kind=getattr(ns, "kind", SUBCRITICAL),
        values=getattr(ns, "values", None),
    )
    return cfg


def _models(cfg: RunConfig, default: str) -> list[ManifoldModel]:
    names = cfg.models or [default]
    try:
        return [parse_model(m) for m in names]
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc


def _check_common(cfg: RunConfig):
    if cfg.corpus_count < 1:
        raise ConfigError("corpus count must be at least 1")
    if not (cfg.rel_tol > 0 and cfg.abs_tol > 0 and cfg.max_subdivisions >= 1):
        raise ConfigError("quadrature tolerances must be positive")


def _corpus_for(case_id: str, cfg: RunConfig, model: ManifoldModel, ps: ParamSet):
    support = corpus_support(case_id, model, ps)
    return generate_corpus(CorpusSpec(cfg.seed, cfg.corpus_count, support, 4, cfg.value_field))


def _error_row(case_id, ps_dict, model, label, exc) -> dict:
    nan = math.nan
    return {"case": case_id, "params": ps_dict, "model": model, "function": label,
            "lhs": nan, "rhs": nan, "ratio": nan, "constant": nan, "deficit": nan, "margin": nan,
            "slack": nan, "error_estimates": {"lhs": nan, "rhs": nan}, "pass": False,
            "notes": [f"{type(exc).__name__}: {exc}"]}


_EVAL_ERRORS = (QuadratureError, SmoothnessError, ModelError, FloatingPointError, ValueError)


# ---------------------------------------------------------------- commands


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    _check_common(cfg)
    if not cfg.cases:
        raise ConfigError("no --case given")
    models = _models(cfg, "euclidean:3")
    plan = []
    for cid in sorted(set(cfg.cases)):
        try:
            get_case(cid)
        except UnknownCaseError as exc:
            raise ConfigError(str(exc.args[0])) from exc
        for m in models:
            try:
                ps = resolve_params(cid, cfg.param_set(), m)
            except HypothesisError as exc:
                raise ConfigError(str(exc)) from exc
            ok, why = admissible(cid, ps, m)
            if not ok:
                raise ConfigError(f"{cid} on {m.name}: {why}")
            plan.append((cid, m, ps))
    spec = cfg.quadrature()
    results = []
    for cid, m, ps in plan:
        for f in _corpus_for(cid, cfg, m, ps):
            log.info("verify %s %s %s", cid, m.name, f.label)
            try:
                results += [r.to_dict() for r in run_case(cid, ps, m, f, spec)]
            except (AdmissibilityError,) as exc:
                raise ConfigError(str(exc)) from exc
            except _EVAL_ERRORS as exc:
                results.append(_error_row(cid, ps.as_dict(get_case(cid).uses), m.name, f.label, exc))
    doc = make_report("verify", cfg.echo(), results)
    return (EXIT_PASS if doc["pass"] else EXIT_FAIL), doc


def cmd_identity(cfg: RunConfig) -> tuple[int, dict]:
    _check_common(cfg)
    p = cfg.params.get("p", 2.0)
    if not p > 1:
        raise ConfigError(f"the identity needs 1 < p (p={p:g})")
    bound = 1e-6 if cfg.bound is None else cfg.bound
    models = _models(cfg, "euclidean:3")
    spec = cfg.quadrature()
    ps = ParamSet(p=p)
    results = []
    corpus = generate_corpus(CorpusSpec(cfg.seed, cfg.corpus_count, default_support("CRIT_IDENTITY"),
                                        4, cfg.value_field))
    for m in models:
        for f in corpus:
            try:
                t = identity_terms(ps, m, f, spec)
            except _EVAL_ERRORS as exc:
                results.append(_error_row("CRIT_IDENTITY_RESIDUAL", {"p": p}, m.name, f.label, exc))
                continue
            rhs = t.t1 - t.t2 - t.t3
            results.append({
                "case": "CRIT_IDENTITY_RESIDUAL", "params": {"p": p, "N": m.N}, "model": m.name,
                "function": f.label, "lhs": t.lhs, "rhs": rhs,
                "ratio": rhs / t.lhs if t.lhs else math.nan, "constant": 1.0,
                "deficit": rhs - t.lhs, "margin": bound - t.residual, "residual": t.residual,
                "slack": 0.0, "error_estimates": {"lhs": t.error_estimate, "rhs": t.error_estimate},
                "pass": bool(t.residual <= bound),
                "notes": [f"T1={t.t1:.17g}", f"T2={t.t2:.17g}", f"T3={t.t3:.17g}"],
            })
    doc = make_report("identity", cfg.echo(), results)
    return (EXIT_PASS if doc["pass"] else EXIT_FAIL), doc


def cmd_sharpness(cfg: RunConfig) -> tuple[int, dict]:
    _check_common(cfg)
    if not cfg.cases:
        raise ConfigError("no --case given")
    bad = [c for c in cfg.cases if c not in SWEEP_CASES]
    if bad:
        raise ConfigError(f"no sharpness sweep for {', '.join(bad)}; available: {', '.join(SWEEP_CASES)}")
    models = _models(cfg, "euclidean:3")
    values = tuple(cfg.values) if cfg.values else DEFAULT_LADDER
    gap = 0.02 if cfg.bound is None else cfg.bound
    sweeps, results = [], []
    for cid in sorted(set(cfg.cases)):
        for m in models:
            try:
                sw = sharpness_sweep(cid, cfg.param_set(), m, values, cfg.quadrature(), max_gap=gap)
            except (HypothesisError, AdmissibilityError) as exc:
                raise ConfigError(str(exc)) from exc
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            sweeps.append(sw.to_dict())
            results += sw.point_results()
    doc = make_report("sharpness", cfg.echo(), results, sweeps)
    return (EXIT_PASS if doc["pass"] else EXIT_FAIL), doc


def cmd_stability(cfg: RunConfig) -> tuple[int, dict]:
    _check_common(cfg)
    case_id = "STAB_SUBCRIT" if cfg.kind == SUBCRITICAL else "STAB_CRIT"
    models = _models(cfg, "euclidean:4")
    plan = []
    for m in models:
        try:
            ps = resolve_params(case_id, cfg.param_set(), m)
        except HypothesisError as exc:
            raise ConfigError(str(exc)) from exc
        ok, why = admissible(case_id, ps, m)
        if not ok:
            raise ConfigError(f"{case_id} on {m.name}: {why}")
        plan.append((m, ps))
    spec = cfg.quadrature()
    results = []
    for m, ps in plan:
        for f in _corpus_for(case_id, cfg, m, ps):
            try:
                rep = run_case(case_id, ps, m, f, spec)[0]
                row = rep.to_dict()
                if case_id == "STAB_SUBCRIT":
                    ev = open_problem_value(f, ps, m, spec)
                    row["open_problem_E"] = ev.E
                    row["notes"] = row["notes"] + [
                        f"E(f) = {ev.E:.10g} >= c_p((p-1)/p)^p = {ev.lower_bound:.10g}"]
                    if ev.E < ev.lower_bound - ev.slack:
                        row["pass"] = False
                results.append(row)
            except _EVAL_ERRORS as exc:
                results.append(_error_row(case_id, ps.as_dict(get_case(case_id).uses), m.name, f.label, exc))
    doc = make_report("stability", cfg.echo(), results)
    return (EXIT_PASS if doc["pass"] else EXIT_FAIL), doc


COMMANDS = {"verify": cmd_verify, "identity": cmd_identity,
            "sharpness": cmd_sharpness, "stability": cmd_stability}


def run(cfg: RunConfig) -> tuple[int, dict | None]:
    try:
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG, None


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors already
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    cfg = config_from_args(ns)
    status, doc = run(cfg)
    if doc is None:
        return status
    validate_report(doc)
    text = to_csv(doc) if cfg.format == "csv" else dumps(doc)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
