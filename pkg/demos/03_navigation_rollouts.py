"""Roll out scripted and random policies on the simulated websites.

    python demos/03_navigation_rollouts.py
"""

from __future__ import annotations

from htmltasks.codec import encode_action
from htmltasks.models import RandomActionModel, ScriptedOracleModel
from htmltasks.nav import SHIPPED_TASKS, demos_to_training_tuples, reset, run_episode, success_rate

EPISODES = 100


def main() -> None:
    print(f"{'task':18s} {'oracle':>7s} {'random':>7s}")
    for task in SHIPPED_TASKS:
        oracle = [run_episode(task, s, ScriptedOracleModel(task)) for s in range(EPISODES)]
        rand = [run_episode(task, s, RandomActionModel(s)) for s in range(EPISODES)]
        print(f"{task.name:18s} {success_rate(oracle):6.1f}% {success_rate(rand):6.1f}%")

    # what the model is asked, step by step, in one login episode
    record = run_episode("login-user", 7, ScriptedOracleModel("login-user"))
    print(f"\nlogin-user seed 7: {reset('login-user', 7).instruction}")
    for s in demos_to_training_tuples([record]):
        history = " ".join(encode_action(a) for a in s.action_history) or "(none)"
        print(f"  history: {history[:70]:70s} -> {encode_action(s.action)}")


if __name__ == "__main__":
    main()
