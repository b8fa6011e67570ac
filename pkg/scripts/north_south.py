"""Birkhoff averages of the distance to N along North-South orbits started near N."""

import argparse
from dataclasses import dataclass

import numpy as np

from thermopress.northsouth import NORTH, NS_SETS, distance_to_north, ns_orbit_stats, ns_star_pressure


@dataclass
class Config:
    n: int = 10**4
    starts: int = 6


def main(cfg: Config):
    for eps in np.logspace(-1, -12, cfg.starts):
        avg = ns_orbit_stats(NORTH - eps, cfg.n, [distance_to_north])[0]
        print("start N - %.0e: average %.6f" % (eps, avg))
    for name in sorted(NS_SETS):
        r = ns_star_pressure(name, distance_to_north)
        print("%-16s value %.3f  non-wandering part %.3f" % (name, r.value, r.nonwandering))


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    for k, v in vars(Config()).items():
        p.add_argument("--" + k, type=type(v), default=v)
    main(Config(**vars(p.parse_args())))
