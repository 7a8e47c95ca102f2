"""Sizes of the three minimal companions on the named fixtures and on
random interpretations.

    python3 scripts/minimize_demo.py --random 50 --max-n 6
"""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from dlkit.minimize import KINDS, companion_ok, minimal_companion  # noqa: E402
import fixtures as fx  # noqa: E402


@dataclass
class DemoConfig:
    random: int = 50
    max_n: int = 6
    seed: int = 0


def run(cfg: DemoConfig) -> None:
    print(f"{'input':16s} {'size':>4s} " + " ".join(f"{k:>10s}" for k in KINDS))
    for name, I in fx.NAMED.items():
        sizes = [len(minimal_companion(I, k)) for k in KINDS]
        print(f"{name:16s} {len(I):4d} " + " ".join(f"{s:10d}" for s in sizes))
    rng = random.Random(cfg.seed)
    shrink = {k: 0 for k in KINDS}
    for _ in range(cfg.random):
        I = fx.random_interp(rng, rng.randint(1, cfg.max_n))
        for k in KINDS:
            J = minimal_companion(I, k).interpretation
            assert companion_ok(I, J, k)
            shrink[k] += len(I) - len(J)
    print(f"random inputs: {cfg.random}; elements removed in total: "
          + ", ".join(f"{k}={v}" for k, v in shrink.items()))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--random", type=int, default=50)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    run(DemoConfig(**vars(ap.parse_args(argv))))


if __name__ == "__main__":
    main()
