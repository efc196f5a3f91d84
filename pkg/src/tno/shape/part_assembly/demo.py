"""
Demonstration module.
"""

from __future__ import annotations

import asyncio
from dataclasses import replace

from tno.shape.part_assembly.harness import (
    EvalReport,
    SyntheticSpec,
    SyntheticTarget,
    ablation_run,
    segment_purity,
    synthetic_dataset,
)
from tno.shape.part_assembly.partvae import VaeParams, train_vae
from tno.shape.part_assembly.pipeline import (
    Dataset,
    InferenceResult,
    RunConfig,
    TargetResult,
    TrainingBank,
    amortized_infer,
    run_collection,
)

DEMO_SPEC = SyntheticSpec(parts_per_target=(2, 3), symmetry_prob=0.5, seed=0)


def demo_setup(
    config: RunConfig | None = None, n_parts: int = 12, n_targets: int = 6
) -> tuple[Dataset, dict[str, SyntheticTarget], VaeParams, RunConfig]:
    config = config if config is not None else replace(RunConfig.desk(), target_points=512)
    dataset, truths = synthetic_dataset(
        DEMO_SPEC,
        n_parts,
        n_targets,
        seed=config.seed,
        test_frac=0.34,
        part_points=config.vae.n_points,
        target_points=config.target_points,
    )
    params = train_vae(dataset.library, config.train, config.vae, seed=config.seed)
    return dataset, truths, params, config


async def demo_collection(
    config: RunConfig | None = None, n_parts: int = 12, n_targets: int = 6
) -> list[TargetResult]:
    # Setup
    dataset, truths, params, config = demo_setup(config, n_parts, n_targets)
    train = dataset.split("train")

    # Decompose and assemble the train split
    results = await run_collection(train, params, config)
    for result in results:
        if result.assembly is None:
            print(f"{result.target_id}: failed ({'; '.join(result.errors)})")
            continue
        truth = truths[result.target_id]
        purity = segment_purity(result.assembly, truth.truth, train.target(result.target_id), dataset.library)
        print(
            f"{result.target_id}: k={result.assembly.k}, {result.assembly.part_count} parts "
            f"(truth {truth.truth.part_count}), VCD {result.assembly.vcd:.5f}, purity {purity:.2f}"
        )
    return results


async def demo_amortized_inference(
    config: RunConfig | None = None, n_parts: int = 12, n_targets: int = 6
) -> list[InferenceResult]:
    # Setup
    dataset, _, params, config = demo_setup(config, n_parts, n_targets)

    # Fill the bank from the train split
    bank = TrainingBank.from_results(await run_collection(dataset.split("train"), params, config))

    # Start every test target from its nearest training target
    inferred = []
    for target_id, cloud in dataset.split("test").targets:
        result = await asyncio.to_thread(amortized_infer, cloud, bank, dataset.library, params, config, target_id)
        origin = "from scratch" if result.fallback else f"from {result.neighbor} (distance {result.distance:.5f})"
        print(f"{target_id}: {origin}, {result.steps} steps, VCD {result.assembly.vcd:.5f}")
        inferred.append(result)
    return inferred


def demo_ablation(config: RunConfig | None = None, n_parts: int = 12, n_targets: int = 6) -> EvalReport:
    dataset, truths, params, config = demo_setup(config, n_parts, n_targets)
    report = ablation_run(dataset, params, config, truths)
    print(report.table())
    return report


if __name__ == "__main__":
    asyncio.run(demo_collection())
    # asyncio.run(demo_amortized_inference())
    # demo_ablation()
