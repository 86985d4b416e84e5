#!/usr/bin/env python3
"""Generate the bundled synthetic task trajectories (data/tasks/*.csv).

Three single-cycle gait-flavored ankle trajectories: level walking, ramp
ascent, and a lateral weight shift. Poses stay well inside the default
operational region; torques are sized for the bundled actuator catalog.
Deterministic: running this script twice produces identical files.
"""

import argparse
from pathlib import Path

import numpy as np

from ankleopt.io import write_task_csv
from ankleopt.optimizer import TaskTrajectory

CYCLE_S = 1.2


def _trajectory(task_id, t, roll_deg, pitch_deg, tau_roll, tau_pitch):
    dt = t[1] - t[0]
    roll = np.radians(roll_deg)
    pitch = np.radians(pitch_deg)
    return TaskTrajectory(
        task_id=task_id, t=t, roll=roll, pitch=pitch,
        roll_rate=np.gradient(roll, dt), pitch_rate=np.gradient(pitch, dt),
        tau_roll=tau_roll, tau_pitch=tau_pitch,
    )


def level_walk(n=61):
    t = np.linspace(0.0, CYCLE_S, n)
    s = 2.0 * np.pi * t / CYCLE_S
    pitch_deg = -6.0 + 9.0 * np.sin(s) - 4.0 * np.sin(2.0 * s + 0.8)
    roll_deg = 3.5 * np.sin(s + 0.4)
    # push-off dominated sagittal torque, small frontal stabilization
    tau_pitch = -30.0 * np.clip(np.sin(s + 0.25), 0.0, None) ** 2 + 4.0
    tau_roll = 7.0 * np.sin(s + 1.2)
    return _trajectory("level_walk", t, roll_deg, pitch_deg, tau_roll, tau_pitch)


def ramp_ascent(n=61):
    t = np.linspace(0.0, CYCLE_S, n)
    s = 2.0 * np.pi * t / CYCLE_S
    pitch_deg = -12.0 + 11.0 * np.sin(s - 0.3)
    roll_deg = 2.0 * np.sin(s)
    tau_pitch = -40.0 * np.clip(np.sin(s + 0.15), 0.0, None) ** 2 + 3.0
    tau_roll = 5.0 * np.sin(s + 0.9)
    return _trajectory("ramp_ascent", t, roll_deg, pitch_deg, tau_roll, tau_pitch)


def side_step(n=49):
    t = np.linspace(0.0, CYCLE_S, n)
    s = 2.0 * np.pi * t / CYCLE_S
    roll_deg = 10.0 * np.sin(s) - 2.0 * np.sin(2.0 * s)
    pitch_deg = -5.0 + 4.0 * np.sin(s + 0.7)
    tau_roll = 16.0 * np.sin(s + 0.3)
    tau_pitch = -12.0 + 8.0 * np.cos(s)
    return _trajectory("side_step", t, roll_deg, pitch_deg, tau_roll, tau_pitch)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=Path(__file__).parent.parent
                        / "data" / "tasks", type=Path)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for task in (level_walk(), ramp_ascent(), side_step()):
        path = args.out / f"{task.task_id}.csv"
        write_task_csv(task, path)
        print(f"wrote {path} ({task.n_samples} samples, "
              f"roll {np.degrees(task.roll).min():.1f}..{np.degrees(task.roll).max():.1f} deg, "
              f"pitch {np.degrees(task.pitch).min():.1f}..{np.degrees(task.pitch).max():.1f} deg)")


if __name__ == "__main__":
    main()
