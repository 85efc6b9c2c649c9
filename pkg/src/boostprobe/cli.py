"""Command-line entry point.

    boostprobe run CONFIG [--out DIR]
    boostprobe preset NAME [--out DIR]
    boostprobe list-presets
    boostprobe gradiometer --species rb87 --gradient 9.8 --target-phase pi/2

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
``BOOSTPROBE_THREADS`` caps the BLAS thread pool.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from threadpoolctl import threadpool_limits

from .config import ConfigError, load_config, parse_config, parse_number
from .errors import NumericalError, ZeroCouplingError
from .metrology import SPECIES, required_tilt_product
from .presets import PRESETS, list_presets
from .scenarios import run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
THREADS_ENV = "BOOSTPROBE_THREADS"


def _number(text):
    try:
        return parse_number(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    p = argparse.ArgumentParser(prog="boostprobe", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config file")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (default: [scenario] output or ./out/<name>)")
    pr = sub.add_parser("preset", help="run a shipped preset")
    pr.add_argument("name")
    pr.add_argument("--out")
    sub.add_parser("list-presets", help="list shipped presets")
    g = sub.add_parser("gradiometer", help="tilt product sin(theta) T for a target phase step")
    g.add_argument("--species", choices=sorted(SPECIES), required=True)
    g.add_argument("--gradient", type=_number, required=True,
                   help="m/s^2 for rb87 (gravity), T/m for cr52 (magnetic)")
    g.add_argument("--target-phase", type=_number, default=math.pi / 2)
    g.add_argument("--lattice-constant", type=_number)
    return p


def _out_dir(cfg, requested, fallback):
    if requested:
        return requested
    return cfg.get("scenario", "output") or os.path.join("out", cfg.get("scenario", "name", fallback))


def _execute(cfg, out):
    manifest = run_scenario(cfg, out)
    for name in manifest.checksums:
        print(os.path.join(out, name))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    threads = os.environ.get(THREADS_ENV)
    limits = int(threads) if threads and threads.isdigit() and int(threads) > 0 else None
    with threadpool_limits(limits=limits):
        try:
            if args.command == "list-presets":
                sys.stdout.write(list_presets())
                return EXIT_OK
            if args.command == "gradiometer":
                info = SPECIES[args.species]
                a = args.lattice_constant or info["lattice_constant"]
                product = required_tilt_product(info["charge"], args.gradient, a, args.target_phase)
                print(f"species={args.species} gradient={args.gradient!r} lattice_constant={a!r} "
                      f"target_phase={args.target_phase!r}")
                print(f"required sin(theta)*T = {product!r} s")
                return EXIT_OK
            if args.command == "preset":
                if args.name not in PRESETS:
                    raise ConfigError(f"unknown preset {args.name!r}; see list-presets")
                cfg = parse_config(PRESETS[args.name], source=f"preset:{args.name}")
                return _execute(cfg, _out_dir(cfg, args.out, args.name))
            cfg = load_config(args.config)
            stem = os.path.splitext(os.path.basename(args.config))[0]
            return _execute(cfg, _out_dir(cfg, args.out, stem))
        except (ConfigError, ZeroCouplingError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except NumericalError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
