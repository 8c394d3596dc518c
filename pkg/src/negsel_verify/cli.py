"""Command line entry point.

Exit status: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .geometry import Box, PartitionSpec, boxes_from_json, boxes_to_csv, boxes_to_json, partition
from .network import describe, load_nnet
from .nsa import DetectorSet, NsaParams, generate_detectors
from .harness import (
    ConfigError,
    ExperimentConfig,
    GroundTruth,
    Label,
    PropertySpec,
    label_ground_truth,
    render_region_map,
    run_experiment,
    validate_detectors,
)
from .verifier import serve_query_file

log = logging.getLogger("negsel_verify")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_config(args) -> ExperimentConfig:
    if not args.config:
        raise UsageError("--config is required")
    cfg = ExperimentConfig.load(args.config)
    return cfg.with_overrides(
        seed=args.seed,
        workers=args.workers,
        backend=args.backend,
        timeout_s=args.timeout_s,
        output_dir=Path(args.output_dir) if getattr(args, "output_dir", None) else None,
    )


def cmd_partition(args) -> int:
    prop = PropertySpec.load(args.property)
    spec = prop.partition
    if args.n is not None or args.split_dims is not None:
        spec = PartitionSpec(
            tuple(args.split_dims) if args.split_dims is not None else spec.split_dims,
            args.n if args.n is not None else spec.n,
        )
    cells = partition(prop.box, spec)
    _emit(boxes_to_csv(cells) if args.format == "csv" else boxes_to_json(cells), args.output)
    log.info("%d sub-requirements", len(cells))
    return 0


def cmd_label(args) -> int:
    cfg = _load_config(args)
    gt = label_ground_truth(cfg)
    _emit(gt.to_json(), args.output)
    print(json.dumps(gt.summary()), file=sys.stderr)
    return 0


def cmd_nsa(args) -> int:
    if not args.ground_truth and not args.cells:
        raise UsageError("give --ground-truth, or --cells with --self")
    selves: list[Box] = []
    if args.ground_truth:
        gt = GroundTruth.from_json(Path(args.ground_truth).read_text())
        pool = gt.cells
        selves = gt.cells_with(Label.SAFE)
    if args.cells:
        pool = boxes_from_json(Path(args.cells).read_text())
    if args.self_cells:
        selves = boxes_from_json(Path(args.self_cells).read_text())
    params = NsaParams(r_s=args.radius, N=args.detectors, seed=args.seed if args.seed is not None else 0,
                       max_attempts=args.max_attempts)
    ds = generate_detectors(pool, selves, params)
    _emit(ds.to_json(), args.output)
    return 0


def cmd_validate(args) -> int:
    ds = DetectorSet.from_json(Path(args.detectors).read_text())
    gt = GroundTruth.from_json(Path(args.ground_truth).read_text())
    _emit(json.dumps(validate_detectors(ds, gt).to_dict(), indent=1), args.output)
    return 0


def cmd_experiment(args) -> int:
    cfg = _load_config(args)
    report = run_experiment(cfg)
    if cfg.output_dir is None:
        _emit(report.to_json(), None)
    else:
        for agg in report.aggregates():
            print(json.dumps(agg))
        print(f"outputs written to {cfg.output_dir}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    gt = GroundTruth.from_json(Path(args.ground_truth).read_text())
    ds = DetectorSet.from_json(Path(args.detectors).read_text()) if args.detectors else None
    try:
        svg = render_region_map(gt, ds, tuple(args.dims))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(svg, args.output)
    return 0


def cmd_inspect(args) -> int:
    print(describe(load_nnet(args.file)))
    return 0


def cmd_verify_query(args) -> int:
    v = serve_query_file(args.query, args.verdict)
    print(v.status.value)
    return 0


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subparser from resetting flags given before the subcommand
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="experiment config (JSON)")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--workers", type=int, help="worker processes for labeling")
    common.add_argument("--backend", choices=["builtin", "sampler", "external"])
    common.add_argument("--timeout-s", type=float, dest="timeout_s", help="per-query timeout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="negsel-verify", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("partition", parents=[common], help="split a property box into sub-requirements")
    s.add_argument("--property", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--split-dims", type=int, nargs="+")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("label", parents=[common], help="verify every sub-requirement")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("nsa", parents=[common], help="generate detectors")
    s.add_argument("--ground-truth", help="pool = all cells, self = SAFE cells")
    s.add_argument("--cells", help="candidate pool (sub-requirement JSON)")
    s.add_argument("--self", dest="self_cells", help="self set (sub-requirement JSON)")
    s.add_argument("-N", "--detectors", type=int, required=True)
    s.add_argument("--radius", type=float, default=0.05)
    s.add_argument("--max-attempts", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_nsa)

    s = sub.add_parser("validate", parents=[common], help="score detectors against ground truth")
    s.add_argument("--detectors", required=True)
    s.add_argument("--ground-truth", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("experiment", parents=[common], help="label, sweep NSA, report")
    s.add_argument("--output-dir")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("plot", parents=[common], help="SVG region map")
    s.add_argument("--ground-truth", required=True)
    s.add_argument("--detectors")
    s.add_argument("--dims", type=int, nargs=2, default=[0, 1])
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_plot)

    s = sub.add_parser("inspect", parents=[common], help="print network dimensions")
    s.add_argument("file")
    s.set_defaults(func=cmd_inspect)

    s = sub.add_parser("verify-query", parents=[common],
                       help="answer an adapter query file with the builtin verifier")
    s.add_argument("query")
    s.add_argument("verdict")
    s.set_defaults(func=cmd_verify_query)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("config", "seed", "workers", "backend", "timeout_s"):
        if not hasattr(args, name):
            setattr(args, name, None)
    args.verbose = getattr(args, "verbose", False)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"negsel-verify: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"negsel-verify: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
