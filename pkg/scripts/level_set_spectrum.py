"""Sweep the level-set spectrum of a range-1 potential and compare both solvers."""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from thermopress.classic import edge_system, integral_range
from thermopress.measures import LocallyConstantPotential
from thermopress.star import level_set_pressure_primal, level_set_spectrum
from thermopress.symbolic import NAMED_SYSTEMS


@dataclass
class Config:
    system: str = "golden"
    phi: str = "0,1"
    psi: str = "0"
    points: int = 41
    out: str = "results/level_set_spectrum.csv"


def main(cfg: Config):
    sft = NAMED_SYSTEMS[cfg.system]()
    phi = LocallyConstantPotential.parse(sft, cfg.phi)
    psi = LocallyConstantPotential.parse(sft, cfg.psi)
    lo, hi = integral_range(sft, edge_system(sft, phi).weights[0])
    alphas = np.linspace(lo, hi, cfg.points)
    curve = level_set_spectrum(sft, phi, psi, alphas)
    gaps = [abs(level_set_pressure_primal(sft, phi, psi, a).value - v)
            for a, v in zip(alphas[1:-1], curve.value[1:-1])]
    Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
    Path(cfg.out).write_text(curve.to_csv())
    print("interval [%.6f, %.6f], peak %.6f at alpha=%.4f" % (lo, hi, curve.value.max(), alphas[curve.value.argmax()]))
    print("concave: %s, worst primal/dual gap %.2e" % (curve.is_concave(), max(gaps)))


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    for k, v in vars(Config()).items():
        p.add_argument("--" + k, type=type(v), default=v)
    main(Config(**vars(p.parse_args())))
