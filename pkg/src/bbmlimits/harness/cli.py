"""Command line entry point.

Exit codes: 0 pass, 1 negative verdict, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..energy import QuadratureConfig, density_estimate, inner_integral, ks, nonlocal_energy, pou_smooth
from ..maps import UnsupportedTargetError
from ..mollifiers import FAMILIES, MollifierFamily, check_admissibility
from ..space import DomainError, dimension_at, estimate_doubling
from .config import NAMED_MAPS, NAMED_SPACES, ConfigError, build_map, build_space, build_target, load_config
from .emit import emit
from .runner import run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _setup(args):
    space = build_space(args.space)
    fmap = build_map(getattr(args, "map", "identity"), space.dim)
    target = build_target(getattr(args, "target", "euclidean"))
    return space, fmap, target


def _point(space, text):
    x = np.array(_floats(text))
    if x.shape != (space.dim,):
        raise DomainError(f"--x needs {space.dim} coordinate(s)")
    return x


def cmd_run(args):
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.workers is not None:
        config.quadrature = {**config.quadrature, "workers": args.workers}
    out_dir = args.out_dir or config.output_dir
    if out_dir is None:
        raise ConfigError("no output directory (use --out-dir)")
    report = run_scenario(config)
    emit(report, out_dir)
    s = report.summary()
    print(f"predicted={s['predicted']} extrapolated={s['extrapolated']} rel_dev={s['rel_dev']} "
          f"verdict={s['verdict']}")
    if report.error is not None:
        print(f"error: {report.error['type']}: {report.error['message']}", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_check(args):
    space = build_space(args.space)
    family = MollifierFamily(args.family, args.p, space)
    report = check_admissibility(family, workers=args.workers)
    for name, res in report.conditions.items():
        print(f"condition {name}: {'PASS' if res.verdict else 'FAIL'} margin={res.margin:.6g}")
    print(f"C_M bracket: [{report.cm_bracket[0]:.6g}, {report.cm_bracket[1]:.6g}]")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "admissibility.json").write_text(json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n")
    return EXIT_PASS if report.passed() else EXIT_FAIL


def cmd_ks(args):
    space, fmap, target = _setup(args)
    x = _point(space, args.x)
    radii = _floats(args.radii)
    print("radius,ks")
    for r in radii:
        print(f"{r!r},{ks(space, fmap, target, args.p, None, x, r)!r}")
    if len(radii) >= 3:
        prof = density_estimate(space, fmap, target, args.p, x, radii)
        print(f"# density={prof.density!r} residual={prof.residual!r} converged={prof.converged}")
    return EXIT_PASS


def cmd_doubling(args):
    space = build_space(args.space)
    rep = estimate_doubling(space, None, _floats(args.radii))
    print(f"C_D={rep.constant!r} worst_center={list(rep.worst_center)} worst_radius={rep.worst_radius!r}")
    return EXIT_PASS


def cmd_dimension(args):
    space = build_space(args.space)
    est = dimension_at(space, _point(space, args.x), h=args.h)
    print(f"dimension={est.value!r} converged={est.converged}")
    return EXIT_PASS if est.converged else EXIT_FAIL


def cmd_inner(args):
    space, fmap, target = _setup(args)
    family = MollifierFamily(args.family, args.p, space)
    print(repr(inner_integral(space, fmap, target, args.p, family, args.delta, _point(space, args.x))))
    return EXIT_PASS


def cmd_energy(args):
    space, fmap, target = _setup(args)
    family = MollifierFamily(args.family, args.p, space)
    quad = QuadratureConfig(method=args.method, n_outer=args.n_outer, workers=args.workers)
    est = nonlocal_energy(space, fmap, target, args.p, family, args.delta, quad, seed=args.seed)
    print("delta,value,stderr,n_samples")
    print(f"{args.delta!r},{est.value!r},{est.stderr!r},{est.n_samples}")
    return EXIT_PASS


def cmd_smooth(args):
    space, fmap, _ = _setup(args)
    smooth = pou_smooth(space, lambda pts: fmap(pts)[..., 0], args.r)
    lo, hi = space.lower, space.upper
    grid = np.linspace(lo[0], hi[0], args.points)
    pts = np.repeat(grid[:, None], space.dim, axis=1) if space.dim > 1 else grid[:, None]
    dev = float(np.max(np.abs(smooth(pts) - fmap(pts)[..., 0])))
    part = smooth.partition_sum(pts)
    print(f"centers={len(smooth.centers)} sup_deviation={dev!r} "
          f"partition_error={float(np.max(np.abs(part - 1))):.3g}")
    return EXIT_PASS


def build_parser():
    parser = argparse.ArgumentParser(prog="bbmlimits", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_map=False):
        p.add_argument("--space", required=True, choices=sorted(NAMED_SPACES))
        if need_map:
            p.add_argument("--map", default="identity", choices=NAMED_MAPS)
            p.add_argument("--target", default="euclidean", choices=("euclidean", "circle"))

    p = sub.add_parser("run", help="run a scenario config and write reports")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="certify mollifier admissibility")
    p.add_argument("--family", required=True, choices=FAMILIES + ("annulus",))
    common(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--out-dir")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ks", help="Korevaar-Schoen values and density fit")
    common(p, need_map=True)
    p.add_argument("--x", required=True)
    p.add_argument("--radii", default="0.1 0.05 0.025 0.0125")
    p.add_argument("--p", type=float, default=2.0)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("doubling", help="sampled doubling constant")
    common(p)
    p.add_argument("--radii", default="0.1 0.05 0.02 0.01")
    p.set_defaults(func=cmd_doubling)

    p = sub.add_parser("dimension", help="local dimension estimate")
    common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--h", type=float, default=2.0)
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("inner", help="inner integral at one point")
    common(p, need_map=True)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--x", required=True)
    p.set_defaults(func=cmd_inner)

    p = sub.add_parser("energy", help="nonlocal energy at one delta")
    common(p, need_map=True)
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--method", default="auto", choices=("auto", "quadrature", "monte-carlo"))
    p.add_argument("--n-outer", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("smooth", help="partition-of-unity smoothing diagnostic")
    common(p, need_map=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_smooth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, UnsupportedTargetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
