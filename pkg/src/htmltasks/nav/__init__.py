from .env import (
    EnvState,
    EpisodeFinished,
    EpisodeRecord,
    Outcome,
    TaskInstance,
    TaskSpec,
    Transition,
    UnknownTask,
    apply_action,
    demos_to_training_tuples,
    get_task,
    parse_error_counts,
    register_task,
    reset,
    run_episode,
    skip_step,
    step,
    success_rate,
    task_names,
)
from .tasks import SHIPPED_TASKS

__all__ = [
    "EnvState",
    "EpisodeFinished",
    "EpisodeRecord",
    "Outcome",
    "SHIPPED_TASKS",
    "TaskInstance",
    "TaskSpec",
    "Transition",
    "UnknownTask",
    "apply_action",
    "demos_to_training_tuples",
    "get_task",
    "parse_error_counts",
    "register_task",
    "reset",
    "run_episode",
    "skip_step",
    "step",
    "success_rate",
    "task_names",
]
