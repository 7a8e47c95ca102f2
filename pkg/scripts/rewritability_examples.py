"""Run the deciders on the worked example TBoxes and print verdicts,
timings and witness summaries.

    python3 scripts/rewritability_examples.py [--witness-dir out/]
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

from dlkit.model import render_interpretation
from dlkit.rewrite import alc_to_el, alci_to_alc, equisim_invariant, product_preserved
from dlkit.syntax import parse_tbox

DECIDERS = {
    "alci-alc": alci_to_alc,
    "equisim": equisim_invariant,
    "product": product_preserved,
    "alc-el": alc_to_el,
}


@dataclass
class ExamplesConfig:
    cases: List[Tuple[str, str]] = field(default_factory=lambda: [
        ("alci-alc", "some inv(r).top [= some r.top"),
        ("alci-alc", "some inv(r).some inv(r).top [= some r.some r.top"),
        ("alci-alc", "some r.top [= some inv(r).top"),
        ("equisim", "top [= (A or B)"),
        ("equisim", "top [= all r.A"),
        ("product", "top [= (A or B)"),
        ("product", "top [= all r.A"),
        ("alc-el", "some r.A [= B"),
        ("alc-el", "top [= (A or B)"),
        ("alc-el", "top [= all r.A"),
    ])
    witness_dir: Optional[Path] = None


def run(cfg: ExamplesConfig) -> None:
    for i, (name, text) in enumerate(cfg.cases):
        t0 = time.perf_counter()
        v = DECIDERS[name](parse_tbox(text))
        dt = time.perf_counter() - t0
        line = f"{name:9s} {v.answer:15s} {dt:6.2f}s  {text}"
        w = v.witness
        if w is not None:
            sizes = [len(F) for F in w.factors] if w.factors else [len(w.model), len(w.countermodel)]
            line += f"  [{w.relation} witness, sizes {sizes}]"
            if cfg.witness_dir is not None:
                cfg.witness_dir.mkdir(parents=True, exist_ok=True)
                (cfg.witness_dir / f"case{i}.model.int").write_text(render_interpretation(w.model))
                (cfg.witness_dir / f"case{i}.countermodel.int").write_text(render_interpretation(w.countermodel))
        print(line)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--witness-dir", type=Path, default=None)
    args = ap.parse_args(argv)
    run(ExamplesConfig(witness_dir=args.witness_dir))


if __name__ == "__main__":
    main()
