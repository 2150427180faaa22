"""``radon`` command line: transforms, norms and verification scenarios."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .. import grassmann as gr
from .. import hyperbolic as hy
from .. import sphere as sp
from ..curves import write_curve_csv
from ..errors import ConfigError, RadonError
from ..lorentz import LorentzIndex, lorentz_norm
from ..profiles import RadialProfile, StepProfile, load_profile, quantize
from .report import emit_report
from .scenarios import SCENARIOS, ScenarioConfig, run_scenario

log = logging.getLogger("radon")

EXIT_FAIL = 1
EXIT_ERROR = 2


def _geometry(args):
    try:
        if args.geometry == "grassmann":
            return gr.GrassmannGeometry(args.n, args.d, args.k)
        if args.geometry == "hyperbolic":
            return hy.HyperbolicGeometry(args.n, args.d)
        return sp.SphereGeometry(args.n, args.d)
    except RadonError as exc:
        raise ConfigError(str(exc)) from exc


def _as_steps(profile, lower=0.0):
    if isinstance(profile, StepProfile):
        return profile
    return quantize(profile, lower=lower)


def _transform(args) -> int:
    geom = _geometry(args)
    profile = load_profile(args.profile)
    m = args.grid
    if m < 2:
        raise ConfigError("--grid needs at least 2 points")
    step = isinstance(profile, StepProfile)
    if args.geometry == "grassmann":
        grid = np.linspace(0.0, profile.support_upper, m)
        curve = (gr.closed_curve(geom, profile, grid) if step and args.method == "closed"
                 else gr.abel_numeric(geom, profile, grid))
    elif args.geometry == "hyperbolic":
        top = profile.support_upper
        if not math.isfinite(top):
            raise ConfigError("hyperbolic profiles need bounded support for a default grid")
        grid = np.linspace(0.0, math.acosh(top), m)
        curve = (hy.closed_curve(geom, profile, grid) if step and args.method == "closed"
                 else hy.abel_numeric(geom, profile, grid))
    else:
        grid = np.linspace(0.0, 0.5 * math.pi, m)
        curve = (sp.closed_curve(geom, profile, grid) if step and args.method == "closed"
                 else sp.abel_numeric(geom, profile, grid))
    write_curve_csv(curve, args.out)
    log.info("wrote %d samples to %s", len(curve), args.out)
    return 0


def _norm(args) -> int:
    geom = _geometry(args)
    profile = load_profile(args.profile)
    index = LorentzIndex(args.p, args.q)
    if args.geometry == "grassmann":
        value = lorentz_norm(_as_steps(profile), geom.domain_measure, index)
    elif args.geometry == "hyperbolic":
        value = hy.hn_lorentz_norm(_as_steps(profile, lower=1.0), geom, index)
    else:
        value = sp.sphere_lorentz_norm(_as_steps(profile), geom, index)
    print(f"{value:.17g}")
    return 0


def _verify(args) -> int:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: invalid JSON ({exc})") from exc
    if args.scenario:
        if data.get("scenario", args.scenario) != args.scenario:
            raise ConfigError(f"--scenario {args.scenario} conflicts with the config file")
        data["scenario"] = args.scenario
    if args.seed is not None:
        data["seed"] = args.seed
    if args.threads is not None:
        data["threads"] = args.threads
    if args.out:
        data["report_out"] = args.out
    config = ScenarioConfig.from_dict(data)
    report, curve = run_scenario(config, deterministic=args.deterministic)
    if config.report_out:
        emit_report(report, config.report_out, curve, config.curve_out)
    for name, ok in sorted(report.passes.items()):
        print(f"{'PASS' if ok else 'FAIL'} {report.scenario} {name}")
    if report.failures:
        log.warning("%d samples failed: %s", len(report.failures),
                    ", ".join(f"#{f['index']} {f['error']}" for f in report.failures[:5]))
    return 0 if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radon", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def geometry_args(p):
        p.add_argument("--geometry", required=True, choices=["grassmann", "hyperbolic", "sphere"])
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--k", type=int, default=0, help="grassmann only")
        p.add_argument("--profile", required=True, help="JSON profile file")

    t = sub.add_parser("transform", help="sample the Abel transform of a profile")
    geometry_args(t)
    t.add_argument("--grid", type=int, default=257, help="number of sample points")
    t.add_argument("--method", choices=["closed", "numeric"], default="closed",
                   help="closed form for step profiles, or quadrature")
    t.add_argument("--out", required=True, help="output CSV")
    t.set_defaults(func=_transform)

    n = sub.add_parser("norm", help="Lorentz norm of a profile")
    geometry_args(n)
    n.add_argument("--p", type=float, required=True)
    n.add_argument("--q", type=float, default=1.0, help="use inf for the weak norm")
    n.set_defaults(func=_norm)

    v = sub.add_parser("verify", help="run a verification scenario")
    v.add_argument("--scenario", choices=SCENARIOS)
    v.add_argument("--config", help="JSON file mirroring ScenarioConfig")
    v.add_argument("--seed", type=int)
    v.add_argument("--threads", type=int)
    v.add_argument("--out", help="report JSON path")
    v.add_argument("--deterministic", action="store_true",
                   help="omit wall time so repeated runs are byte-identical")
    v.set_defaults(func=_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "verify" and not (args.scenario or args.config):
        parser.error("verify needs --scenario or --config")
    try:
        return args.func(args)
    except (RadonError, ValueError) as exc:
        print(f"radon: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"radon: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
