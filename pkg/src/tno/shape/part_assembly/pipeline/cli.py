"""
Command-line interface `part-assembly`.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path

from tno.shape.part_assembly.decomposer import ScheduleConfig
from tno.shape.part_assembly.harness import ablation_run, bank_size_run, library_size_run, retrieval_budget_run
from tno.shape.part_assembly.partvae import VaeParams, load_weights, save_weights, train_vae
from tno.shape.part_assembly.pipeline.bank import load_training_bank
from tno.shape.part_assembly.pipeline.collection import run_collection_sync
from tno.shape.part_assembly.pipeline.config import RunConfig
from tno.shape.part_assembly.pipeline.dataset import Dataset, IngestConfig, ingest, stream_seed
from tno.shape.part_assembly.pipeline.export import export_assembly
from tno.shape.part_assembly.pipeline.inference import amortized_infer
from tno.shape.part_assembly.retrieval import Assembly, FitConfig, assemble

logger = logging.getLogger(__name__)

INPUT_SUFFIXES = (".ply", ".pts", ".obj", ".off", ".stl", ".glb")
STUDIES = ("ablation", "retrieval-budget", "bank-size", "library-size")


def _inputs(directory: str | None) -> list[Path]:
    if directory is None:
        return []
    return sorted(path for path in Path(directory).iterdir() if path.suffix.lower() in INPUT_SUFFIXES)


def _int_list(value: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in value.split(","))
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from error


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run configuration")
    group.add_argument("--config", help="run configuration JSON file; the options below override it")
    group.add_argument("--desk", action="store_true", help="start from the desk-scale configuration")
    group.add_argument("--k-set", type=_int_list, help="comma-separated part counts, e.g. 2,4,6,8,10")
    group.add_argument("--alpha", type=float, help="price of one part in the choice of the part count")
    group.add_argument("--n1", type=int, help="gradient steps per run")
    group.add_argument("--n2", type=int, help="shift rounds per borrow round")
    group.add_argument("--n3", type=int, help="borrow rounds")
    group.add_argument("--seed", type=int, help="master seed")
    group.add_argument("--workers", type=int, help="parallel tasks")
    group.add_argument("--candidates", choices=("all", "25%", "5%"), help="retrieval candidate preset")
    group.add_argument("--format", dest="output_format", choices=("segment", "direct"), help="retrieval format")
    group.add_argument("--no-phase2", action="store_true", help="disable part shift")
    group.add_argument("--no-phase3", action="store_true", help="disable part borrowing")
    group.add_argument("--no-symmetry", action="store_true", help="disable symmetry detection")


def run_config(args: argparse.Namespace) -> RunConfig:
    """
    Build the run configuration from a configuration file and the command-line overrides.

    :param args: parsed arguments
    :return: the configuration
    """
    if args.config:
        config = RunConfig.load(args.config)
    else:
        config = RunConfig.desk() if args.desk else RunConfig()
    schedule: ScheduleConfig = config.schedule
    schedule_overrides = {name: getattr(args, name) for name in ("n1", "n2", "n3") if getattr(args, name) is not None}
    if args.no_phase2:
        schedule_overrides["phase2"] = False
    if args.no_phase3:
        schedule_overrides["phase3"] = False
    overrides = {
        name: getattr(args, name)
        for name in ("k_set", "alpha", "seed", "workers", "output_format")
        if getattr(args, name) is not None
    }
    if args.candidates is not None:
        overrides["fit"] = replace(config.fit, candidate_frac=FitConfig.preset(args.candidates).candidate_frac)
    if args.no_symmetry:
        overrides["symmetry"] = False
    return replace(config, schedule=replace(schedule, **schedule_overrides), **overrides)


def _params(path: str) -> VaeParams:
    params = load_weights(path)
    return params if params.frozen else params.freeze()


def _ingest(args: argparse.Namespace) -> int:
    config = IngestConfig(args.target_points, args.part_points, args.test_frac, args.seed)
    dataset = ingest(_inputs(args.targets), _inputs(args.parts), config)
    dataset.save(args.out)
    print(f"{len(dataset.targets)} targets and {len(dataset.library)} parts written to {args.out}")
    return 0


def _train_vae(args: argparse.Namespace) -> int:
    config = run_config(args)
    if args.epochs is not None:
        config = replace(config, train=replace(config.train, epochs=args.epochs))
    dataset = Dataset.load(args.bundle)
    params = train_vae(dataset.library, config.train, config.vae, seed=config.seed)
    save_weights(params, args.out)
    print(f"weights written to {args.out}, final loss {params.history[-1]:.6f}")
    return 0


def _optimize(args: argparse.Namespace) -> int:
    config = run_config(args)
    dataset = Dataset.load(args.bundle)
    params = _params(args.weights)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config.save(out / "run.json")
    if args.target:
        assembly, _ = assemble(
            dataset.target(args.target),
            dataset.library,
            params,
            config.schedule,
            config.k_set,
            config.alpha,
            config.fit,
            stream_seed(config.seed, args.target),
            args.target,
            "detect" if config.symmetry else None,
            config.config_hash(),
            workers=config.workers,
        )
        (out / "assemblies").mkdir(exist_ok=True)
        assembly.save(out / "assemblies" / f"{args.target}.json")
        print(f"{args.target}: k={assembly.k}, {assembly.part_count} parts, VCD {assembly.vcd:.6f}")
        return 0
    results = run_collection_sync(dataset.split("train"), params, config, out)
    failed = [result.target_id for result in results if not result.ok]
    print(f"{len(results) - len(failed)} of {len(results)} targets assembled, results in {out}")
    for target_id in failed:
        print(f"failed: {target_id}", file=sys.stderr)
    return 0 if not failed else 1


def _infer(args: argparse.Namespace) -> int:
    config = run_config(args)
    dataset = Dataset.load(args.bundle)
    params = _params(args.weights)
    bank = load_training_bank(args.bank)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ids = args.target or dataset.split("test").ids
    for target_id in ids:
        result = amortized_infer(dataset.target(target_id), bank, dataset.library, params, config, target_id)
        result.assembly.save(out / f"{target_id}.json")
        origin = "from scratch" if result.fallback else f"from {result.neighbor}"
        print(f"{target_id}: {origin}, {result.steps} steps, VCD {result.assembly.vcd:.6f}")
    return 0


def _eval(args: argparse.Namespace) -> int:
    config = run_config(args)
    dataset = Dataset.load(args.bundle)
    params = _params(args.weights)
    if args.study == "ablation":
        report = ablation_run(dataset, params, config, seeds=args.seeds, baseline=not args.no_baseline)
    elif args.study == "retrieval-budget":
        report = retrieval_budget_run(dataset, params, config)
    elif args.study == "bank-size":
        report = bank_size_run(dataset, params, config)
    else:
        report = library_size_run(dataset, params, config)
    report.save(args.out)
    print(report.table())
    return 0


def _export(args: argparse.Namespace) -> int:
    dataset = Dataset.load(args.bundle)
    for manifest in args.manifest:
        assembly = Assembly.load(manifest)
        paths = export_assembly(assembly, dataset.target(assembly.target_id), dataset.library, args.out, not args.ascii)
        print(f"{assembly.target_id}: {', '.join(str(path) for path in paths)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    """
    :return: the parser of all sub-commands
    """
    parser = argparse.ArgumentParser(prog="part-assembly", description="Assemble shapes from a library of parts.")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings only")
    commands = parser.add_subparsers(dest="command", required=True)

    command = commands.add_parser("ingest", help="sample meshes and clouds into a dataset bundle")
    command.add_argument("--targets", required=True, help="directory of target meshes or clouds")
    command.add_argument("--parts", help="directory of part meshes or clouds")
    command.add_argument("--out", required=True, help="bundle directory")
    command.add_argument("--target-points", type=int, default=IngestConfig.target_points)
    command.add_argument("--part-points", type=int, default=IngestConfig.part_points)
    command.add_argument("--test-frac", type=float, default=IngestConfig.test_frac)
    command.add_argument("--seed", type=int, default=0)
    command.set_defaults(handler=_ingest)

    command = commands.add_parser("train-vae", help="train the part autoencoder on the bundle library")
    command.add_argument("--bundle", required=True)
    command.add_argument("--out", required=True, help="weight file")
    command.add_argument("--epochs", type=int)
    _add_run_options(command)
    command.set_defaults(handler=_train_vae)

    command = commands.add_parser("optimize", help="assemble one target or the whole train split")
    command.add_argument("--bundle", required=True)
    command.add_argument("--weights", required=True)
    command.add_argument("--out", required=True, help="output directory")
    command.add_argument("--target", help="a single target id; the train split when omitted")
    _add_run_options(command)
    command.set_defaults(handler=_optimize)

    command = commands.add_parser("infer", help="assemble targets starting from a training bank")
    command.add_argument("--bundle", required=True)
    command.add_argument("--weights", required=True)
    command.add_argument("--bank", required=True, help="training bank directory")
    command.add_argument("--out", required=True, help="output directory")
    command.add_argument("--target", action="append", help="target id, repeatable; the test split when omitted")
    _add_run_options(command)
    command.set_defaults(handler=_infer)

    command = commands.add_parser("eval", help="run an evaluation study")
    command.add_argument("--bundle", required=True)
    command.add_argument("--weights", required=True)
    command.add_argument("--out", required=True, help="report directory")
    command.add_argument("--study", choices=STUDIES, default="ablation")
    command.add_argument("--seeds", type=_int_list, default=(0,), help="comma-separated seeds of the ablation")
    command.add_argument("--no-baseline", action="store_true", help="skip the brute-force baseline")
    _add_run_options(command)
    command.set_defaults(handler=_eval)

    command = commands.add_parser("export", help="write colored point clouds of assemblies")
    command.add_argument("--bundle", required=True)
    command.add_argument("--manifest", required=True, nargs="+", help="assembly manifests")
    command.add_argument("--out", required=True, help="output directory")
    command.add_argument("--ascii", action="store_true", help="write ASCII instead of binary PLY")
    command.set_defaults(handler=_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run the command line.

    :param argv: arguments without the program name, `sys.argv[1:]` when None
    :return: the exit status
    """
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    return int(args.handler(args))
