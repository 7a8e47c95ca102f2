"""Compare every rewritability decider with the brute-force oracle on a
generated TBox suite.

    python3 scripts/oracle_sweep.py --count 200
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from dlkit.rewrite import INVARIANT, PRESERVED, REWRITABLE, alc_to_el, alci_to_alc, equisim_invariant, product_preserved  # noqa: E402
from dlkit.syntax import TBox  # noqa: E402
from gen import random_tboxes  # noqa: E402
from oracle import oracle_alci, oracle_equisim, oracle_product, universe  # noqa: E402


@dataclass
class SweepConfig:
    count: int = 200
    inverse_seed: int = 1
    alc_seed: int = 2
    max_clos: int = 6
    max_rank: int = 2
    verbose: bool = False


def _show(T: TBox) -> str:
    from dlkit.syntax import render

    return " ; ".join(f"{render(l)} [= {render(r)}" for l, r in T.axioms)


def run(cfg: SweepConfig) -> int:
    U = universe(("A", "B"))
    tally = {}
    bad = 0

    def record(name, got, want, T):
        nonlocal bad
        agree, pos = tally.get(name, (0, 0))
        tally[name] = (agree + (got == want), pos + want)
        if got != want:
            bad += 1
            print(f"MISMATCH {name}: decider={got} oracle={want}  {_show(T)}")
        elif cfg.verbose:
            print(f"{name}: {got}  {_show(T)}")

    t0 = time.perf_counter()
    for T in random_tboxes(cfg.count, cfg.inverse_seed, True, cfg.max_clos, cfg.max_rank):
        record("alci-alc", alci_to_alc(T).answer == REWRITABLE, oracle_alci(T, U), T)
    for T in random_tboxes(cfg.count, cfg.alc_seed, False, cfg.max_clos, cfg.max_rank):
        eq, pr = oracle_equisim(T, U), oracle_product(T, U)
        record("equisim", equisim_invariant(T).answer == INVARIANT, eq, T)
        record("product", product_preserved(T).answer == PRESERVED, pr, T)
        record("alc-el", alc_to_el(T).answer == REWRITABLE, eq and pr, T)
    for name, (agree, pos) in tally.items():
        print(f"{name:9s} agree {agree}/{cfg.count}  positive {pos}")
    print(f"mismatches: {bad}  time: {time.perf_counter() - t0:.1f}s")
    return 1 if bad else 0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in fields(SweepConfig):
        if f.type in (bool, "bool"):
            ap.add_argument(f"--{f.name.replace('_', '-')}", action="store_true")
        else:
            ap.add_argument(f"--{f.name.replace('_', '-')}", type=int, default=f.default)
    return run(SweepConfig(**vars(ap.parse_args(argv))))


if __name__ == "__main__":
    sys.exit(main())
