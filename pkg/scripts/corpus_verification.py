"""Every registry case at its default parameters over a seeded corpus.

Prints, per (case, model), the smallest normalized deficit
(rhs - constant*lhs) / rhs and whether every link passed.

    python scripts/corpus_verification.py --count 20
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from hardyverify.catalog import CASE_IDS, admissible, corpus_support, resolve_params, run_case
from hardyverify.manifold import parse_model
from hardyverify.prober import CorpusSpec, generate_corpus


@dataclass
class CorpusConfig:
    models: list[str] = field(default_factory=lambda: ["euclidean:3", "euclidean:4", "euclidean:5",
                                                       "hyperbolic:3:1"])
    count: int = 20
    seed: int = 0
    value_field: str = "real"


def run(cfg: CorpusConfig) -> bool:
    all_ok = True
    print(f"{'case':<20} {'model':<16} {'n':>4} {'min rel deficit':>16} pass")
    for cid in CASE_IDS:
        for name in cfg.models:
            m = parse_model(name)
            ok, why = admissible(cid, None, m)
            if not ok:
                continue
            ps = resolve_params(cid, None, m)
            fs = generate_corpus(CorpusSpec(cfg.seed, cfg.count, corpus_support(cid, m, ps), 4, cfg.value_field))
            t0 = time.perf_counter()
            reps = [r for f in fs for r in run_case(cid, None, m, f)]
            rel = min(r.deficit / abs(r.rhs) if r.rhs else r.deficit for r in reps)
            passed = all(r.passed for r in reps)
            all_ok &= passed
            print(f"{cid:<20} {m.name:<16} {len(fs):>4} {rel:16.4e} {passed}  ({time.perf_counter() - t0:.1f} s)")
    return all_ok


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--models", nargs="+", default=CorpusConfig().models)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--complex", action="store_true")
    ns = ap.parse_args()
    cfg = CorpusConfig(ns.models, ns.count, ns.seed, "complex" if ns.complex else "real")
    return 0 if run(cfg) else 1


if __name__ == "__main__":
    raise SystemExit(main())
