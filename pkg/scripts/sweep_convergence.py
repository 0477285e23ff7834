"""Ratio of each extremal family along a sweep ladder, with the fitted limit.

    python scripts/sweep_convergence.py --models euclidean:3 hyperbolic:3:1
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from hardyverify.catalog import ParamSet
from hardyverify.manifold import parse_model
from hardyverify.prober import DEFAULT_LADDER, sharpness_sweep


@dataclass
class SweepConfig:
    models: list[str] = field(default_factory=lambda: ["euclidean:3"])
    ladder: tuple[float, ...] = DEFAULT_LADDER + (1e-3, 5e-4)
    runs: list[tuple[str, dict]] = field(default_factory=lambda: [
        ("CRIT_LOG_GENERAL", {"p": 2.0, "gamma": 2.0, "R": 1.0}),
        ("CRIT_LOG_GENERAL", {"p": 3.0, "gamma": 3.0, "R": 1.0}),
        ("CRIT_LOG_GENERAL", {"p": 2.5, "gamma": 2.0, "R": 2.0}),
        ("CRIT_DUAL_LOG", {"p": 2.0}),
        ("DOUBLE_WEIGHT", {"p": 2.0, "a": 2.0, "b": 2.0, "c": 3.0}),
        ("DOUBLE_WEIGHT", {"p": 3.0, "a": 1.0, "b": 1.5, "c": 2.0}),
    ])


def run(cfg: SweepConfig) -> None:
    for name in cfg.models:
        m = parse_model(name)
        for cid, params in cfg.runs:
            if cid == "CRIT_DUAL_LOG" and not m.is_euclidean:
                continue
            if cid == "DOUBLE_WEIGHT" and params["a"] > m.N - (params["b"] - 1) * params["c"]:
                continue
            sw = sharpness_sweep(cid, ParamSet(**params), m, cfg.ladder)
            print(f"\n{cid} {params} on {m.name}: target {sw.target:.6g}, limit {sw.limit:.6g}, "
                  f"gap {sw.gap:.2e}, pass {sw.passed}")
            print(f"  {'value':>10} {'ratio':>12} {'ratio/target - 1':>18}")
            for v, r in zip(sw.values, sw.ratios):
                print(f"  {v:10.4g} {r:12.6g} {r / sw.target - 1:18.3e}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", nargs="+", default=SweepConfig().models)
    ns = ap.parse_args()
    run(SweepConfig(models=ns.models))


if __name__ == "__main__":
    main()
