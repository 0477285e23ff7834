"""Distribution of E(f) = deficit / sup_R d_H(f,R)^p over a random corpus.

Compares the smallest observed E(f) with the proven lower bound
c_p((p-1)/p)^p; whether that bound is the infimum is open.

    python scripts/stability_scan.py --count 40 --p 2 3
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

import numpy as np

from hardyverify.catalog import ParamSet
from hardyverify.manifold import Region, euclidean
from hardyverify.prober import CorpusSpec, generate_corpus, open_problem_value


@dataclass
class ScanConfig:
    N: int = 4
    ps: list[float] = field(default_factory=lambda: [2.0, 3.0])
    beta: float = 0.0
    count: int = 40
    seed: int = 0
    support: tuple[float, float] = (0.2, 3.0)


def run(cfg: ScanConfig) -> None:
    m = euclidean(cfg.N)
    fs = generate_corpus(CorpusSpec(cfg.seed, cfg.count, Region.annulus(*cfg.support)))
    for p in cfg.ps:
        vals = [open_problem_value(f, ParamSet(p=p, beta=cfg.beta), m) for f in fs]
        E = np.array([v.E for v in vals])
        bound = vals[0].lower_bound
        i = int(np.argmin(E))
        print(f"p={p:g} beta={cfg.beta:g} N={cfg.N}: bound {bound:.6g}; E min {E.min():.6g} "
              f"({fs[i].label}, R*={vals[i].R_star:.4g}), median {np.median(E):.6g}, max {E.max():.6g}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=4)
    ap.add_argument("--p", type=float, nargs="+", default=[2.0, 3.0])
    ap.add_argument("--beta", type=float, default=0.0)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ns = ap.parse_args()
    run(ScanConfig(N=ns.N, ps=ns.p, beta=ns.beta, count=ns.count, seed=ns.seed))


if __name__ == "__main__":
    main()
