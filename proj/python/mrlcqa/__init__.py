"""Question answering over a typed knowledge base by neural program induction."""

from ._core import (
    Dataset,
    Error,
    ExperimentConfig,
    GeneratorConfig,
    Model,
    OuterUpdate,
    TrainingConfig,
    annotate,
    evaluate,
    execute,
    infer,
    meta_train,
    pg_train,
    pretrain,
    retrieve,
    reward,
    run_ablation,
)

__all__ = [
    "Dataset",
    "Error",
    "ExperimentConfig",
    "GeneratorConfig",
    "Model",
    "OuterUpdate",
    "TrainingConfig",
    "annotate",
    "evaluate",
    "execute",
    "infer",
    "meta_train",
    "pg_train",
    "pretrain",
    "retrieve",
    "reward",
    "run_ablation",
]
