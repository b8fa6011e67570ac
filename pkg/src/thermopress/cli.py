"""Command-line front end: ``thermopress <experiment> [flags]``.

Exit codes: 0 success, 1 domain error, 2 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import classic, star
from .errors import ThermoError
from .measures import LocallyConstantPotential, MarkovMeasure
from .symbolic import NAMED_SYSTEMS, PointSpec, Sft, beta_count, beta_expansion_of_one, parse_word

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise UsageError(message)


# ---------------------------------------------------------------------------
# helpers


def load_system(spec: str) -> Sft:
    """Named shift (``full2``, ``golden``, ...), a JSON file, or inline JSON."""
    if spec in NAMED_SYSTEMS:
        return NAMED_SYSTEMS[spec]()
    path = Path(spec)
    text = spec if spec.lstrip().startswith("{") else path.read_text() if path.exists() else None
    if text is not None:
        try:
            return Sft.from_json(text)
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ThermoError("malformed system description (%s); expected keys alphabet, transition" % exc) from exc
    raise ThermoError("unknown system %r (named: %s)" % (spec, ", ".join(sorted(NAMED_SYSTEMS))))


def _floats(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _potential(sft: Sft, text: str | None, default: float = 0.0) -> LocallyConstantPotential:
    if text is None:
        return LocallyConstantPotential.constant(sft, default)
    return LocallyConstantPotential.parse(sft, str(text))


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(type(o).__name__)


class Output:
    """Collects machine-readable artifacts and a human summary."""

    def __init__(self, prefix: str | None):
        self.prefix = prefix
        self.lines: list[str] = []

    def say(self, line: str) -> None:
        self.lines.append(line)

    def emit(self, suffix: str, text: str) -> None:
        if self.prefix:
            path = Path(self.prefix + suffix)
            write_atomic(path, text)
            self.say("wrote %s" % path)
        else:
            sys.stdout.write(text)

    def flush(self) -> None:
        stream = sys.stderr if not self.prefix else sys.stdout
        for line in self.lines:
            stream.write(line + "\n")


# ---------------------------------------------------------------------------
# experiments


def cmd_pressure(args, out: Output) -> int:
    sft = load_system(args.system)
    phi = _potential(sft, args.phi)
    res = classic.classical_pressure(sft, phi, decompose=args.decompose)
    out.emit(".json", _dumps(res.to_json()))
    out.say("pressure = %.12f (residual %.2e)" % (res.value, res.eigen_residual))
    return EXIT_OK


def cmd_star(args, out: Output) -> int:
    sft = load_system(args.system)
    psi = _potential(sft, args.psi if args.psi is not None else args.phi if args.alpha is None else None)
    if args.alpha is not None:
        phi = _potential(sft, args.phi)
        fam = star.MeasureFamily.level_set(sft, phi, _floats(args.alpha)[0])
    elif args.family == "bernoulli":
        fam = star.MeasureFamily.single(MarkovMeasure.bernoulli(_floats(args.probs)), sft)
    elif args.family == "empty":
        fam = star.MeasureFamily.empty(sft)
    else:
        fam = star.MeasureFamily.all_invariant(sft)
    res = star.star_equilibrium(fam, psi) if fam.kind != "empty" else star.star_pressure(fam, psi)
    out.emit(".json", _dumps(res.to_json()))
    out.say("star pressure (%s) = %.12f" % (fam.kind, res.value))
    return EXIT_OK


def cmd_spectrum(args, out: Output) -> int:
    if args.system.startswith("mp:"):
        from .manneville import MPMap, default_t_grid, mp_lyapunov_spectrum

        mp = MPMap(float(args.system[3:]))
        ts = np.asarray(_floats(args.q_grid)) if args.q_grid else default_t_grid()
        depth = int(args.depth or 16)
        alphas = _floats(args.alpha) if args.alpha else list(np.linspace(0.05, 0.7, 14))
        sp = mp_lyapunov_spectrum(mp, alphas, depth, t_grid=ts)
        out.emit(".csv", sp.curve.to_csv())
        out.say("detected interval I = (%.4f, %.4f) at depth %d" % (sp.interval + (depth,)))
        return EXIT_OK
    sft = load_system(args.system)
    phi = _potential(sft, args.phi)
    psi = _potential(sft, args.psi)
    if args.alpha:
        alphas = _floats(args.alpha)
    else:
        lo, hi = star.MeasureFamily.level_set(sft, phi, 0.0).interval
        alphas = list(np.linspace(lo, hi, 13)[1:-1])
    curve = star.level_set_spectrum(sft, phi, psi, alphas)
    out.emit(".csv", curve.to_csv())
    out.say("%d samples, concave=%s" % (len(alphas), curve.is_concave()))
    return EXIT_OK


def cmd_bowen_root(args, out: Output) -> int:
    sft = load_system(args.system)
    phi = _potential(sft, args.phi, default=-math.log(2))
    r = star.bowen_root(star.classical_curve(sft, phi), phi)
    out.emit(".json", _dumps({"root": r.value, "residual": r.residual, "unique": r.unique,
                              "bracket": list(r.bracket), "flags": sorted(r.flags)}))
    out.say("root t* = %.12f" % r.value)
    return EXIT_OK


def cmd_pp(args, out: Output) -> int:
    from .pesin_pitskel import DEFAULT_DEPTHS, point_pressure_oracle, pp_critical

    sft = load_system(args.system)
    phi = _potential(sft, args.phi)
    words = [w for w in (args.points or "0").split(",") if w]
    pts = [PointSpec.periodic(parse_word(w)) for w in words]
    for x in pts:
        x.check_admissible(sft, 64)
    depths = tuple(int(d) for d in _floats(args.depth)) if args.depth else DEFAULT_DEPTHS
    est = pp_critical(pts, phi, depths=depths)
    out.emit(".csv", est.to_csv())
    oracle = [point_pressure_oracle(x, phi, range(1, 4097)) for x in pts]
    out.say("critical = %.6f, bracket [%.6f, %.6f]; oracle liminf per point %s"
            % (est.critical, *est.bracket, [round(o[0], 6) for o in oracle]))
    return EXIT_OK


def cmd_synthesize(args, out: Output) -> int:
    from .synthesis import irregular_witness

    sft = load_system(args.system)
    if args.phi is None:
        phi = LocallyConstantPotential.from_symbols(sft, [float(a > 0) for a in range(sft.alphabet_size)])
    else:
        phi = _potential(sft, args.phi)
    _, cert = irregular_witness(sft, phi, args.seed)
    out.emit(".json", json.dumps(json.loads(cert.to_json()), sort_keys=True, indent=2) + "\n")
    out.say("Birkhoff averages oscillate: liminf %.4f, limsup %.4f, gap %.4f" % (cert.liminf, cert.limsup, cert.gap))
    return EXIT_OK


def cmd_ns(args, out: Output) -> int:
    from .northsouth import NORTH, NS_SETS, distance_to_north, ns_orbit_stats, ns_star_pressure

    n = int(args.depth or 10**4)
    stats = ns_orbit_stats(NORTH - 1e-3, n, [distance_to_north])
    table = {name: {"value": r.value, "nonwandering": r.nonwandering}
             for name, r in ((k, ns_star_pressure(k, distance_to_north)) for k in sorted(NS_SETS))}
    out.emit(".json", _dumps({"potential": "distance_to_north", "orbit_average": float(stats[0]), "n": n,
                              "star_pressure": table}))
    out.say("orbit average %.6f (value at S is 2)" % stats[0])
    return EXIT_OK


def cmd_betashift(args, out: Output) -> int:
    beta = args.beta or "golden"
    n = int(args.depth or 20)
    count = beta_count(beta, n)
    est = math.log(count) / n
    out.emit(".json", _dumps({"beta": beta, "n": n, "count": count, "entropy_estimate": est,
                              "expansion_of_one": beta_expansion_of_one(beta, 16)}))
    out.say("beta=%s: (1/%d) log #words = %.6f" % (beta, n, est))
    return EXIT_OK


def cmd_truncate(args, out: Output) -> int:
    rules = {"full": classic.countable_full_shift, "renewal": classic.renewal_shift,
             "single": lambda i, j: i == j == 1}
    rule = rules.get(args.rule or "full")
    if rule is None:
        raise ThermoError("unknown countable rule %r (choose from %s)" % (args.rule, ", ".join(sorted(rules))))
    sizes = [int(v) for v in _floats(args.sizes or "2,4,8")]
    c = _floats(args.phi)[0] if args.phi else 0.0
    vals = classic.truncation_pressure(rule, lambda i: c, sizes)
    out.emit(".json", _dumps({"rule": args.rule or "full", "sizes": sizes, "pressures": vals}))
    out.say("truncation pressures: %s" % ", ".join("%.6f" % v for v in vals))
    return EXIT_OK


def cmd_verify(args, out: Output) -> int:
    from .suite import property_suite

    seeds = [int(s) for s in _floats(args.seed_list)] if args.seed_list else [args.seed]
    reports = []
    for s in seeds:
        for name in ("full2", "golden"):
            rep = property_suite(NAMED_SYSTEMS[name](), seed=s, system=name)
            reports.append(json.loads(rep.to_json()))
            failed = [c.name for c in rep.checks if not c.passed]
            out.say("seed %d %-6s %d checks, %s" % (s, name, len(rep.checks), "all pass" if not failed else "FAILED: " + ", ".join(failed)))
    out.emit(".json", _dumps({"reports": reports}))
    return EXIT_OK if all(r["ok"] for r in reports) else EXIT_VERIFY


COMMANDS = {
    "pressure": cmd_pressure,
    "star": cmd_star,
    "spectrum": cmd_spectrum,
    "bowen-root": cmd_bowen_root,
    "pp": cmd_pp,
    "synthesize": cmd_synthesize,
    "ns": cmd_ns,
    "betashift": cmd_betashift,
    "truncate": cmd_truncate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="thermopress", description="Topological pressure experiments.")
    sub = p.add_subparsers(dest="experiment", parser_class=_Parser)
    for name in list(COMMANDS) + ["job"]:
        sp = sub.add_parser(name)
        sp.add_argument("--system", default=None)
        sp.add_argument("--phi", default=None)
        sp.add_argument("--psi", default=None)
        sp.add_argument("--alpha", default=None)
        sp.add_argument("--q-grid", dest="q_grid", default=None)
        sp.add_argument("--depth", default=None)
        sp.add_argument("--seed", dest="seed_list", default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--job", default=None)
        if name == "pressure":
            sp.add_argument("--decompose", action="store_true")
        if name == "star":
            sp.add_argument("--family", choices=("all", "bernoulli", "empty"), default="all")
            sp.add_argument("--probs", default="0.5,0.5")
        if name == "pp":
            sp.add_argument("--points", default=None)
        if name == "betashift":
            sp.add_argument("--beta", default=None)
        if name == "truncate":
            sp.add_argument("--rule", default=None)
            sp.add_argument("--sizes", default=None)
    return p


def _merge_job(args) -> None:
    data = json.loads(Path(args.job).read_text())
    if args.experiment == "job":
        if data.get("experiment") not in COMMANDS:
            raise UsageError("job file must name an experiment from: %s" % ", ".join(COMMANDS))
        args.experiment = data["experiment"]
    aliases = {"seed": "seed_list", "q-grid": "q_grid", "output": "out"}
    for key, val in data.items():
        if key == "experiment":
            continue
        attr = aliases.get(key, key.replace("-", "_"))
        if getattr(args, attr, None) is None:
            setattr(args, attr, val if not isinstance(val, list) else ",".join(str(v) for v in val))
    for key, val in vars(build_parser().parse_args([args.experiment])).items():
        if not hasattr(args, key):
            setattr(args, key, val)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.experiment is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        if args.job:
            _merge_job(args)
        elif args.experiment == "job":
            raise UsageError("the job experiment needs --job FILE")
    except UsageError:
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write("thermopress: cannot read job file: %s\n" % exc)
        return EXIT_USAGE
    args.system = args.system or "full2"
    args.seed = int(str(args.seed_list).split(",")[0]) if args.seed_list else 0
    out = Output(args.out)
    try:
        code = COMMANDS[args.experiment](args, out)
    except (ThermoError, ValueError) as exc:
        out.flush()
        sys.stderr.write("thermopress: %s\n" % exc)
        return EXIT_DOMAIN
    out.flush()
    return code


def main() -> None:
    sys.exit(run())
