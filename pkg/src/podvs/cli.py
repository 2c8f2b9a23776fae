"""Command-line surface.

Subcommands:
  run      frames -> saliency map archive (reference or hardware mode)
  eval     map archives + fixation CSV -> shuffled AUC-ROC / KLD report
  compare  two map archives -> per-frame PCC / NSS lines and averages
  profile  hardware cycle/memory ledger as text and JSON
  synth    emit the built-in synthetic test videos as PPM directories

Exit codes: 0 success, 1 data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import EngineConfig, Resolution, hw_variant, load_config
from .errors import PodvsError
from .hwmodel import HwProfile, resource_report, run_hw_pipeline
from .io import (
    read_fixations,
    read_frames,
    read_maps,
    write_maps,
)
from .metrics import MetricConfig, auc_roc, kld, nss, pcc
from .pipeline import run_sequence
from .synth import all_videos

MODES = ("reference", "hw112", "hw80")
_MODE_RESOLUTION = {
    "reference": Resolution.REFERENCE,
    "hw112": Resolution.HW_112,
    "hw80": Resolution.HW_80,
}


def _config_for(args) -> EngineConfig:
    cfg = load_config(args.config) if args.config else EngineConfig()
    return hw_variant(cfg, _MODE_RESOLUTION[args.mode])


def _cmd_run(args) -> int:
    cfg = _config_for(args)
    frames = read_frames(args.inp)
    if args.mode == "reference" or args.real:
        maps, timing = run_sequence(frames, cfg)
        write_maps(maps, args.out, cfg, args.mode, raw=args.raw)
        print(f"{len(maps)} maps written to {args.out}")
        print(f"mean rate: {timing.mean_fps:.3f} frames/s")
    else:
        maps, profile = run_hw_pipeline(frames, cfg)
        write_maps(maps, args.out, cfg, args.mode, raw=args.raw)
        print(f"{len(maps)} maps written to {args.out}")
        sys.stdout.write(profile.to_text())
        Path(args.out, "profile.json").write_text(profile.to_json(), encoding="utf-8")
    return 0


def _cmd_eval(args) -> int:
    fixations = read_fixations(args.fixations)
    if len(fixations) == 0:
        raise PodvsError("no fixations in the CSV")
    cfg = MetricConfig(seed=args.seed)
    maps_root = Path(args.maps)
    videos = [v for v in fixations.videos if (maps_root / v).is_dir()]
    if not videos:
        raise PodvsError(
            f"no video directories under {maps_root} match the CSV video ids"
        )
    auc_scores, kld_scores = [], []
    for video in videos:
        maps = read_maps(maps_root / video)
        pool = fixations.pool_excluding(video)
        a = auc_roc(maps, fixations, pool, video, cfg)
        k = kld(maps, fixations, pool, video, cfg)
        auc_scores.append(a.score)
        kld_scores.append(k.score)
        print(
            f"{video}: AUC-ROC {a.score:.4f}  KLD {k.score:.4f}"
            f"  ({a.frames_scored} frames, {a.frames_skipped} skipped)"
        )
    print(f"mean: AUC-ROC {np.mean(auc_scores):.4f}  KLD {np.mean(kld_scores):.4f}")
    return 0


def _cmd_compare(args) -> int:
    maps_a = read_maps(args.a)
    maps_b = read_maps(args.b)
    if len(maps_a) != len(maps_b):
        raise PodvsError(f"archives differ in length: {len(maps_a)} vs {len(maps_b)}")
    pccs, nsss = [], []
    for i, (a, b) in enumerate(zip(maps_a, maps_b)):
        p = pcc(a, b)
        n = nss(a, b, args.threshold)
        pccs.append(p)
        nsss.append(n)
        print(f"frame {i:4d}: PCC {p:.4f}  NSS {n:.4f}")
    print(f"average: PCC {np.mean(pccs):.4f}  NSS {np.mean(nsss):.4f}")
    return 0


def _cmd_profile(args) -> int:
    cfg = _config_for(args)
    profile = HwProfile(cfg, channels_parallel=args.channels)
    sys.stdout.write(profile.to_text())
    sys.stdout.write(resource_report(cfg, channels_parallel=args.channels).to_text())
    if args.json:
        Path(args.json).write_text(profile.to_json(), encoding="utf-8")
        print(f"JSON profile written to {args.json}")
    return 0


def _cmd_synth(args) -> int:
    out_root = Path(args.out)
    videos = all_videos(args.width, args.height)
    for name, frames in videos.items():
        vdir = out_root / name
        vdir.mkdir(parents=True, exist_ok=True)
        for i, frame in enumerate(frames):
            _write_ppm(frame, vdir / f"{i:06d}.ppm")
        print(f"{name}: {len(frames)} frames -> {vdir}")
    return 0


def _write_ppm(frame, path) -> None:
    rgb = np.stack([frame.r, frame.g, frame.b], axis=-1)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="podvs",
        description="Proto-object based dynamic visual saliency engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="compute saliency maps for a frame sequence")
    p.add_argument("--mode", choices=MODES, default="reference")
    p.add_argument("--in", dest="inp", required=True, help="frame directory or list file")
    p.add_argument("--out", required=True, help="output archive directory")
    p.add_argument("--config", help="engine config file")
    p.add_argument("--raw", action="store_true", help="also write raw float32 planes")
    p.add_argument(
        "--real", action="store_true",
        help="force floating-point arithmetic in the reduced modes",
    )
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("eval", help="score map archives against fixations")
    p.add_argument("--maps", required=True, help="directory of per-video archives")
    p.add_argument("--fixations", required=True, help="fixation CSV")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("compare", help="PCC/NSS between two archives")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--threshold", type=float, default=0.7)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("profile", help="hardware cycle and memory ledger")
    p.add_argument("--mode", choices=("hw112", "hw80"), default="hw112")
    p.add_argument("--config", help="engine config file")
    p.add_argument("--channels", type=int, default=None, help="channels in parallel")
    p.add_argument("--json", help="also write the profile as JSON here")
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("synth", help="emit the synthetic test videos")
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=112)
    p.add_argument("--height", type=int, default=84)
    p.set_defaults(func=_cmd_synth)

    return parser


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        return args.func(args)
    except PodvsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli())
