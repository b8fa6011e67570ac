"""Manneville-Pomeau pressure curves at increasing depth, with the detected interval I."""

import argparse
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from thermopress.manneville import MPMap, acip_lyapunov, default_t_grid, mp_lyapunov_spectrum


@dataclass
class Config:
    s: float = 0.5
    depths: str = "12,16,20"
    out: str = "results/mp_spectrum.csv"


def main(cfg: Config):
    mp = MPMap(cfg.s)
    acip = acip_lyapunov(mp)
    print("acip Lyapunov exponent %.4f (spread %.4f)" % (acip.lyapunov, acip.spread))
    alphas = np.linspace(0.02, acip.lyapunov, 25)
    lines = ["depth,alpha,value,inside"]
    for depth in (int(d) for d in cfg.depths.split(",")):
        sp = mp_lyapunov_spectrum(mp, alphas, depth, t_grid=default_t_grid())
        lo, hi = sp.interval
        err = np.abs(sp.curve.value - alphas).max()
        print("depth %2d root %.4f I=(%.4f, %.4f) max |h(a) - a| %.3f distortion %.3f"
              % (depth, sp.pressure.root(), lo, hi, err, sp.pressure.distortion))
        lines += ["%d,%.6f,%.6f,%d" % (depth, a, v, i) for a, v, i in zip(alphas, sp.curve.value, sp.inside)]
    Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
    Path(cfg.out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    for k, v in vars(Config()).items():
        p.add_argument("--" + k, type=type(v), default=v)
    main(Config(**vars(p.parse_args())))
