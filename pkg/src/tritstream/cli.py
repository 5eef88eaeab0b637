"""Command-line surface: gen, encode, decode, truncate, rd-curve, compare.

Exit codes: 0 success, 2 usage, 3 I/O, 4 stream/tensor format or digest.
Report commands write a PNG next to their CSV unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .codec import (
    DecodeResult,
    EncoderOptions,
    GaussianModel,
    StrategyId,
    decode,
    encode,
    rd_sweep,
)
from .container import load_tensors, read_stream, save_tensors, truncate_stream
from .errors import TritstreamError
from .harness import CSV_FIELDS, EvalRecord, SyntheticSpec, evaluate, generate, write_csv


def _planes_arg(text: str) -> int | None:
    if text == "auto":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("--planes must be >= 1 or 'auto'")
    return value


def _bytes_arg(text: str) -> int | None:
    if text == "full":
        return None
    return int(text)


def _strategy_arg(text: str) -> StrategyId:
    try:
        return StrategyId.from_token(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load_model(path: str) -> GaussianModel:
    tensors = load_tensors(path)
    if len(tensors) != 2:
        raise TritstreamError(f"model file must hold mu and sigma, found {len(tensors)} tensors")
    return GaussianModel(mu=tensors[0], sigma=tensors[1])


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _write_bytes(path: str, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def _cmd_gen(args: argparse.Namespace) -> int:
    spec = SyntheticSpec.from_json(args.spec)
    y, model = generate(spec)
    save_tensors(args.out_latent, [y])
    save_tensors(args.out_model, [model.mu, model.sigma])
    print(f"generated latent {y.shape} (seed {spec.seed}) -> {args.out_latent}, {args.out_model}")
    return 0


def _cmd_encode(args: argparse.Namespace) -> int:
    y = load_tensors(args.latent)[0]
    model = _load_model(args.model)
    sideinfo = _read_bytes(args.sideinfo) if args.sideinfo else b""
    options = EncoderOptions(
        num_planes=args.planes,
        clip_pct=args.clip_pct,
        strategy=args.strategy,
    )
    result = encode(np.asarray(y, dtype=np.float64), model, options, sideinfo)
    _write_bytes(args.out, result.stream)
    h = result.header
    print(
        f"encoded {h.shape} with {h.num_planes} planes ({args.strategy.token}): "
        f"{len(result.stream)} bytes ({result.payload_bytes} payload, "
        f"ideal {result.total_bits / 8:.1f})"
    )
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    stream = _read_bytes(args.infile)
    model = _load_model(args.model)
    result: DecodeResult = decode(stream, model, budget_bytes=args.bytes)
    save_tensors(args.out, [result.reconstruction])
    print(
        f"decoded {result.trits_consumed} trits "
        f"({result.planes_completed:.2f} planes) -> {args.out}"
    )
    return 0


def _cmd_truncate(args: argparse.Namespace) -> int:
    stream = _read_bytes(args.infile)
    _write_bytes(args.out, truncate_stream(stream, args.bytes))
    print(f"truncated to {min(args.bytes, len(stream))} bytes -> {args.out}")
    return 0


def _maybe_plot(rows: list[EvalRecord], args: argparse.Namespace, title: str) -> None:
    if args.no_plot:
        return
    path = args.plot or (args.csv + ".png")
    from .plots import render_rd_curves

    render_rd_curves(rows, path, title=title)
    print(f"figure -> {path}")


def _cmd_rd_curve(args: argparse.Namespace) -> int:
    stream = _read_bytes(args.infile)
    model = _load_model(args.model)
    y_ref = np.asarray(load_tensors(args.ref)[0], dtype=np.float64)
    header, _, _ = read_stream(stream)
    records = rd_sweep(stream, model, y_ref, args.points)
    rows = [
        EvalRecord(
            strategy=r.strategy.token,
            bytes=r.payload_bytes,
            bpp=r.bits_per_pixel,
            mse=r.mse,
            seed=-1,
        )
        for r in records
    ]
    write_csv(rows, args.csv, descriptor={"source": args.infile, "points": args.points})
    _maybe_plot(rows, args, title=f"RD sweep ({StrategyId(header.strategy_id).token})")
    print(f"{len(rows)} records -> {args.csv}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    spec = SyntheticSpec.from_json(args.spec)
    strategies = [StrategyId.from_token(t) for t in args.strategies.split(",") if t]
    specs = [spec.with_seed(s) for s in spec.seeds()]
    rows = evaluate(strategies, specs, spec.points)
    descriptor = {
        "spec": spec.to_dict(),
        "seeds": spec.seeds(),
        "strategies": [s.token for s in strategies],
        "points": spec.points,
        "schema": list(CSV_FIELDS),
    }
    write_csv(rows, args.csv, descriptor=descriptor)
    _maybe_plot(rows, args, title=f"Strategy comparison ({spec.count} tensors)")
    print(f"{len(rows)} records -> {args.csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritstream",
        description="Fine-granular-scalable trit-plane codec for Gaussian latents",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic latent + model pair")
    p.add_argument("--spec", required=True, help="JSON synthetic spec")
    p.add_argument("--out-latent", required=True)
    p.add_argument("--out-model", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("encode", help="encode a latent tensor into a .dpts stream")
    p.add_argument("--latent", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--planes", type=_planes_arg, default=None, metavar="L|auto")
    p.add_argument("--clip-pct", type=float, default=100.0)
    p.add_argument(
        "--strategy",
        type=_strategy_arg,
        default=StrategyId.TRIT_PLANE_PRIORITY,
        metavar="|".join(s.token for s in StrategyId),
    )
    p.add_argument("--sideinfo", default=None, help="opaque side-info bytes to embed")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode a stream (optionally a byte prefix)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bytes", type=_bytes_arg, default=None, metavar="B|full")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("truncate", help="truncate a stream to a byte budget")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bytes", type=int, required=True)
    p.set_defaults(func=_cmd_truncate)

    p = sub.add_parser("rd-curve", help="sweep byte prefixes of one stream")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--ref", required=True, help="reference centered latent tensor")
    p.add_argument("--points", type=int, default=164)
    p.add_argument("--csv", required=True)
    p.add_argument("--plot", default=None, help="figure path (default: CSV path + .png)")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_rd_curve)

    p = sub.add_parser("compare", help="evaluate strategies on synthetic tensors")
    p.add_argument("--spec", required=True, help="JSON synthetic spec (count, points)")
    p.add_argument("--strategies", required=True, help="comma-separated strategy tokens")
    p.add_argument("--csv", required=True)
    p.add_argument("--plot", default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except (TritstreamError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
