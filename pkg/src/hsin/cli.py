"""Command-line front end for the codec pipeline.

Exit codes: 0 success, 1 usage error, 2 unreadable/malformed input or
output I/O failure, 3 numeric failure (divergence, quantization overflow).
Reports go to stdout as key=value lines; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .adam import TrainingDiverged
from .codec import (
    BitstreamError,
    HalfRangeError,
    decompress,
    deserialize,
    encoded_size,
    serialize,
)
from .cube import CubeFormatError, normalize, open_cube, save_cube, synth_cube
from .encoder import DEFAULT_PROBE_ITERATIONS, TrainConfig, architecture_search, compress
from .metrics import QualityReport, bpppb, mse, psnr, ssim_mean
from .sampling import SampleConfig
from .siren import SirenSpec, param_count

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse normally calls sys.exit(2); route through our exit-code map
    def error(self, message):
        raise _UsageError(message)


def _parse_dims(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise _UsageError(f"--dims expects WxHxC, got {text!r}")
    try:
        w, h, c = (int(p) for p in parts)
    except ValueError:
        raise _UsageError(f"--dims expects integers, got {text!r}") from None
    if min(w, h, c) < 1:
        raise _UsageError("--dims values must be >= 1")
    return w, h, c


def _build_parser() -> _Parser:
    parser = _Parser(prog="hsin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="train on a cube and write a .hsin file")
    p.add_argument("--input", required=True, help="raw BSQ float32 cube (.hdr sidecar)")
    p.add_argument("--out", required=True, help="output .hsin path")
    p.add_argument("--layers", type=int, help="hidden layer count (with --width)")
    p.add_argument("--width", type=int, help="hidden layer width (with --layers)")
    p.add_argument("--budget-bpppb", type=float, help="rate budget; triggers architecture search")
    p.add_argument("--iters", type=int, default=10000, help="training iterations (default 10000)")
    p.add_argument("--half", action="store_true", help="store weights as float16")
    p.add_argument("--sample-window", type=int, help="sampling block side length")
    p.add_argument("--sample-rate", type=float, help="fraction of pixels per block")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eval-every", type=int, default=100, help="epochs between PSNR checks")
    p.add_argument("--history-csv", help="optional epoch,psnr CSV output")
    p.set_defaults(func=_cmd_compress)

    p = sub.add_parser("decompress", help="reconstruct a cube from a .hsin file")
    p.add_argument("--in", dest="input", required=True, help="input .hsin path")
    p.add_argument("--out", required=True, help="output raw cube path (.hdr written beside)")
    p.set_defaults(func=_cmd_decompress)

    p = sub.add_parser("metrics", help="compare two cubes")
    p.add_argument("--orig", required=True)
    p.add_argument("--recon", required=True)
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("search", help="pick an architecture under a bpppb budget")
    p.add_argument("--input", required=True)
    p.add_argument("--budget-bpppb", type=float, required=True)
    p.add_argument("--probe-iters", type=int, default=DEFAULT_PROBE_ITERATIONS)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("synth", help="write a synthetic test cube")
    p.add_argument("--kind", required=True, choices=("smooth-gradient", "band-sinusoid", "random"))
    p.add_argument("--dims", required=True, help="WxHxC, e.g. 32x32x8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output raw cube path (.hdr written beside)")
    p.set_defaults(func=_cmd_synth)

    return parser


def _cmd_compress(args) -> int:
    explicit = args.layers is not None or args.width is not None
    if explicit and args.budget_bpppb is not None:
        raise _UsageError("--layers/--width and --budget-bpppb are mutually exclusive")
    if explicit and (args.layers is None or args.width is None):
        raise _UsageError("--layers and --width must be given together")
    if not explicit and args.budget_bpppb is None:
        raise _UsageError("either --layers/--width or --budget-bpppb is required")
    if (args.sample_window is None) != (args.sample_rate is None):
        raise _UsageError("--sample-window and --sample-rate must be given together")

    cube = open_cube(args.input)
    sample = None
    if args.sample_window is not None:
        sample = SampleConfig(window=args.sample_window, rate=args.sample_rate, seed=args.seed)
    cfg = TrainConfig(
        iterations=args.iters,
        eval_every=args.eval_every,
        sample=sample,
        seed=args.seed,
        precision="half16" if args.half else "full32",
    )
    if explicit:
        spec_or_budget = SirenSpec(n_hidden=args.layers, hidden_width=args.width, out_dim=cube.bands)
    else:
        spec_or_budget = args.budget_bpppb
    enc, report = compress(cube, spec_or_budget, cfg, history_csv=args.history_csv)
    Path(args.out).write_bytes(serialize(enc))
    print(report.to_text())
    print(f"n_hidden={enc.n_hidden}")
    print(f"hidden_width={enc.hidden_width}")
    print(f"n_params={enc.params.size}")
    print(f"file_bytes={encoded_size(enc)}")
    print(f"out={args.out}")
    return 0


def _cmd_decompress(args) -> int:
    try:
        blob = Path(args.input).read_bytes()
    except OSError as exc:
        raise BitstreamError(f"cannot read {args.input}: {exc}") from exc
    cube = decompress(deserialize(blob))
    save_cube(cube, args.out)
    print(f"width={cube.width}")
    print(f"height={cube.height}")
    print(f"bands={cube.bands}")
    print(f"out={args.out}")
    return 0


def _cmd_metrics(args) -> int:
    orig = open_cube(args.orig)
    recon = open_cube(args.recon)
    lo, hi = orig.value_range
    peak = hi - lo if hi > lo else 1.0
    report = QualityReport(
        mse=mse(orig, recon),
        psnr=psnr(orig, recon, peak=peak),
        ssim_mean=ssim_mean(orig, recon, dynamic_range=peak),
    )
    print(report.to_text())
    return 0


def _cmd_search(args) -> int:
    cube = open_cube(args.input)
    normalized, _ = normalize(cube)
    probe_cfg = TrainConfig(iterations=args.probe_iters, seed=args.seed)
    spec = architecture_search(normalized, args.budget_bpppb, probe_cfg=probe_cfg)
    n = param_count(spec)
    print(f"n_hidden={spec.n_hidden}")
    print(f"hidden_width={spec.hidden_width}")
    print(f"n_params={n}")
    print(f"bpppb={bpppb(n, 32, cube.width, cube.height, cube.bands)!r}")
    return 0


def _cmd_synth(args) -> int:
    w, h, c = _parse_dims(args.dims)
    cube = synth_cube(args.kind, w, h, c, seed=args.seed)
    save_cube(cube, args.out)
    print(f"out={args.out}")
    return 0


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TrainingDiverged, HalfRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CubeFormatError, BitstreamError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # bad argument values that slipped past argparse (e.g. no feasible
        # candidate under the requested budget)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))
