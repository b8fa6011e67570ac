"""Build oscillating points for several seeds and growth factors; log the Birkhoff-average gaps."""

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

from thermopress.measures import LocallyConstantPotential
from thermopress.symbolic import NAMED_SYSTEMS, mixing_gap
from thermopress.synthesis import SynthesisSchedule, irregular_witness


@dataclass
class Config:
    system: str = "full2"
    seeds: int = 5
    first_block: int = 4096
    blocks: int = 3
    out: str = "results/irregular_witness.json"


def main(cfg: Config):
    sft = NAMED_SYSTEMS[cfg.system]()
    phi = LocallyConstantPotential.from_symbols(sft, [float(a > 0) for a in range(sft.alphabet_size)])
    rows = []
    # at small growth factors the earlier blocks keep too much weight at each checkpoint
    for growth in (2.0, 8.0, 32.0):
        sched = SynthesisSchedule.geometric(cfg.first_block, cfg.blocks, mixing_gap(sft), growth)
        for seed in range(cfg.seeds):
            _, cert = irregular_witness(sft, phi, seed, sched)
            rows.append({"growth": growth, "seed": seed, "gap": cert.gap, "distances": cert.distances})
            print("growth %4.0f seed %d gap %.4f max distance %.4f" % (growth, seed, cert.gap, max(cert.distances)))
    Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
    Path(cfg.out).write_text(json.dumps(rows, indent=1, sort_keys=True))


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    for k, v in vars(Config()).items():
        p.add_argument("--" + k, type=type(v), default=v)
    main(Config(**vars(p.parse_args())))
