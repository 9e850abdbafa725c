"""Command-line entry point: region dumps, gap maps, GDoF curves, MIMO and
DMC evaluations, and the figure-reproduction runs."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dmc, experiments, gaps, gdof, mimo, scalar
from .channel import MimoChannel, ScalarChannel, scalar_channel_from_dict
from .experiments import FIG_MAP_POINTS
from .regions import region_to_csv


def _load_json(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def _write_out(text: str, out: str | None):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _channel_from_args(args) -> ScalarChannel:
    if args.channel:
        return scalar_channel_from_dict(_load_json(args.channel))
    return scalar_channel_from_dict({"link_budget": {
        "bs_user_distance_km": 0.3, "user_user_distance_km": 0.3}})


def cmd_region(args) -> int:
    ch = _channel_from_args(args)
    grid = gaps.GridConfig(scheme=args.grid)
    if args.scheme == "capacity-vs":
        region = scalar.capacity_very_strong(ch)
        if region is None:
            print("very strong interference condition not met; no exact capacity box",
                  file=sys.stderr)
            return 1
    elif args.scheme == "outer-relaxed":
        region = scalar.outer_relaxed(ch)
    elif args.model == "d2d":
        region = experiments.scheme_region_3d(ch, args.scheme, grid)
    else:
        region = experiments.scheme_region_2d(ch, args.scheme, grid)
    if args.hull == "on":
        region = region.with_hull(True)
    _write_out(region_to_csv(region), args.out)
    return 0


def cmd_gap_map(args) -> int:
    lo, hi = (float(x) for x in args.snr_range.split(","))
    ilo, ihi = (float(x) for x in args.inr_range.split(","))
    snr = np.linspace(lo, hi, args.grid)
    inr = np.linspace(ilo, ihi, args.grid)
    cells = gaps.gap_map(snr, inr, ratio=args.ratio, with_d2d=args.d2d == "on")
    lines = ["snr_db,inr_db,gap_bits,scheme_selector"]
    for c in cells:
        lines.append(f"{c.snr_db:.6g},{c.inr_db:.6g},{c.gap_bits:.6g},{c.scheme_selector}")
    _write_out("\n".join(lines) + "\n", args.out)
    if args.check:
        worst = max(c.gap_bits for c in cells)
        print(f"check gap<=1.02: {'PASS' if worst <= 1.02 else 'FAIL'} (max {worst:.4f})",
              file=sys.stderr)
        return 0 if worst <= 1.02 else 1
    return 0


def cmd_gdof(args) -> int:
    schemes = args.schemes.split(",")
    kappas = np.linspace(0.0, args.kappa_max, args.samples)
    lines = ["kappa,scheme,d_sym"]
    for s in schemes:
        for k in kappas:
            p = gdof.symmetric_gdof(s, float(k), args.snr_db)
            lines.append(f"{p.kappa:.6g},{s},{p.d_sym:.6g}")
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_mimo(args) -> int:
    if args.channel:
        data = _load_json(args.channel)
        g = {k: np.asarray(data[k]["re"]) + 1j * np.asarray(data[k]["im"])
             for k in ("g21", "g31", "g32")}
        ch = MimoChannel(g21=g["g21"], g31=g["g31"], g32=g["g32"],
                         p1=data.get("p1", 1.0), p2=data.get("p2", 1.0),
                         sigma2=data.get("sigma2", 1.0))
    else:
        l1, l2r, l2t, l3 = (int(x) for x in args.antennas.split(","))
        rng = np.random.default_rng(args.seed)
        draw = lambda m, n: (rng.standard_normal((m, n))
                             + 1j * rng.standard_normal((m, n))) / np.sqrt(2)
        ch = MimoChannel(g21=draw(l2r, l1), g31=draw(l3, l1), g32=draw(l3, l2t),
                         p1=1.0, p2=1.0, sigma2=1.0)
    variant = args.variant if args.variant == "union" else int(args.variant)
    cov, region, history = mimo.covariance_search(ch, variant, budget=args.budget,
                                                  seed=args.seed)
    _write_out(region_to_csv(region), args.out)
    best = {s: {"re": cov.lam(s).real.tolist(), "im": cov.lam(s).imag.tolist()}
            for s in mimo.CovarianceSet.SLOTS}
    print(json.dumps({"objective": history[-1], "evaluations": len(history),
                      "beamformers": best}), file=sys.stderr)
    return 0


def cmd_dmc(args) -> int:
    cdata = _load_json(args.channel)
    ch = dmc.ChannelPmf(np.asarray(cdata["p"], dtype=float))
    idata = _load_json(args.input) if args.input else None
    if args.theorem in ("1", "3", "prop2"):
        f = dmc.InputFactorization(
            np.asarray(idata["p_u"], dtype=float),
            np.asarray(idata["p_vw1w3x1_u"], dtype=float),
            np.asarray(idata["p_x2_u"], dtype=float))
        if args.theorem == "1":
            region = dmc.region_thm1(ch, f)
        elif args.theorem == "3":
            region = dmc.region_thm3(ch, f)
        else:
            report = dmc.check_prop2(ch, f)
            print(f"prop2 check: {report.status} {report.detail}")
            return 0 if report.status != "fail" else 1
    elif args.theorem == "2":
        region = dmc.region_thm2_outer(ch, np.asarray(idata["p_x1x2"], dtype=float))
    elif args.theorem == "5":
        region = dmc.region_thm5_outer(ch, np.asarray(idata["p_uvx1x2"], dtype=float))
    else:
        raise ValueError(f"unknown theorem {args.theorem}")
    _write_out(region_to_csv(region), args.out)
    return 0


def cmd_fig(args) -> int:
    cfg = experiments.ExperimentConfig(experiment=f"fig{args.number}",
                                       seed=args.seed, check=args.check)
    if args.config:
        for k, v in _load_json(args.config).items():
            if k == "grid":
                cfg.grid = gaps.GridConfig(**v)
            elif hasattr(cfg, k):
                setattr(cfg, k, tuple(v) if isinstance(v, list) else v)
            else:
                raise ValueError(f"unknown config key {k!r}")
    table = experiments.run_experiment(cfg)
    _write_out(table.to_csv(), args.out)
    for c in table.checks:
        print(f"check {c.name}: {'PASS' if c.passed else 'FAIL'} ({c.detail})",
              file=sys.stderr)
    return 0 if table.all_checks_passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdcap",
                                description="Full-duplex cellular network capacity toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("region", help="dump a rate region as vertex CSV")
    r.add_argument("--model", choices=["no-d2d", "d2d"], default="no-d2d")
    r.add_argument("--scheme", default="proposed",
                   choices=["proposed", "hd", "tin", "split-norelay", "df", "outer",
                            "outer-relaxed", "cutset", "capacity-vs"])
    r.add_argument("--channel", help="channel JSON file")
    r.add_argument("--grid", type=int, default=scalar.DEFAULT_SCHEME_GRID)
    r.add_argument("--hull", choices=["on", "off"], default="off")
    r.set_defaults(func=cmd_region)

    g = sub.add_parser("gap-map", help="optimized constant-gap heat map")
    g.add_argument("--d2d", choices=["on", "off"], default="off")
    g.add_argument("--ratio", default="1:1")
    g.add_argument("--snr-range", default="0,30")
    g.add_argument("--inr-range", default="0,30")
    g.add_argument("--grid", type=int, default=FIG_MAP_POINTS)
    g.set_defaults(func=cmd_gap_map)

    d = sub.add_parser("gdof", help="symmetric GDoF curves")
    d.add_argument("--schemes", default="proposed,cutset")
    d.add_argument("--kappa-max", type=float, default=gdof.DEFAULT_KAPPA_MAX)
    d.add_argument("--samples", type=int, default=gdof.DEFAULT_SAMPLES)
    d.add_argument("--snr-db", type=float, default=gdof.DEFAULT_SNR_DB)
    d.set_defaults(func=cmd_gdof)

    m = sub.add_parser("mimo", help="dirty-paper-coding region search")
    m.add_argument("--antennas", default="2,2,2,2",
                   help="L1_tx,L2_rx,L2_tx,L3_rx for a random channel draw")
    m.add_argument("--variant", default="1", choices=["1", "2", "3", "union"])
    m.add_argument("--budget", type=int, default=200)
    m.add_argument("--channel", help="matrix channel JSON file")
    m.set_defaults(func=cmd_mimo)

    c = sub.add_parser("dmc", help="discrete-memoryless region evaluation")
    c.add_argument("--channel", required=True)
    c.add_argument("--input")
    c.add_argument("--theorem", default="1", choices=["1", "2", "3", "5", "prop2"])
    c.set_defaults(func=cmd_dmc)

    f = sub.add_parser("fig", help="reproduce a figure")
    f.add_argument("number", choices=["3", "4", "5", "6", "7", "8"])
    f.add_argument("--config", help="JSON overriding ExperimentConfig fields")
    f.set_defaults(func=cmd_fig)

    for s in (r, g, d, m, c, f):
        s.add_argument("--out", help="output CSV path (default stdout)")
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--check", action="store_true",
                       help="assert the published-figure expectations")
    return p



def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
