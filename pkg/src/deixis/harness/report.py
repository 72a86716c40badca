"""Metrics aggregation and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from ..config import Config
from .episodes import Episode
from .replay import ReplayResult, replay

PROXY_NOTE = (
    "sensor-free proxy: upstream perception is abstracted to recorded events; "
    "robustness sweeps vary synthetic ray noise instead of physical conditions"
)


@dataclass
class TaskStats:
    trials: int = 0
    executed: int = 0
    intent_total: int = 0
    intent_correct: int = 0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "executed": self.executed,
            "intent_total": self.intent_total,
            "intent_correct": self.intent_correct,
        }


@dataclass
class MetricsReport:
    n_trials: int = 0
    n_executed: int = 0
    n_total: int = 0
    n_correct: int = 0
    per_task: dict[str, TaskStats] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    note: str = PROXY_NOTE

    @property
    def accuracy(self) -> float:
        return 100.0 * self.n_executed / self.n_trials if self.n_trials else 0.0

    @property
    def robustness(self) -> float:
        return 100.0 * self.n_correct / self.n_total if self.n_total else 0.0

    def noise_curve(self) -> list[tuple[float, float]]:
        """(sigma_deg, correct-intent rate) pairs from clutter-tagged tasks."""
        curve = []
        for task, stats in self.per_task.items():
            if task.startswith("clutter-") and task.endswith("deg") and stats.intent_total:
                sigma = float(task[len("clutter-"):-len("deg")])
                curve.append((sigma, 100.0 * stats.intent_correct / stats.intent_total))
        return sorted(curve)

    def as_dict(self, include_timing: bool = True) -> dict:
        out = {
            "note": self.note,
            "n_trials": self.n_trials,
            "n_executed": self.n_executed,
            "n_total": self.n_total,
            "n_correct": self.n_correct,
            "accuracy_pct": self.accuracy,
            "robustness_pct": self.robustness,
            "per_task": {k: v.as_dict() for k, v in sorted(self.per_task.items())},
            "failures": self.failures,
            "noise_curve": [{"sigma_deg": s, "rate_pct": r} for s, r in self.noise_curve()],
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.as_dict(include_timing=include_timing), indent=2, sort_keys=True)

    def text_table(self) -> str:
        lines = [
            f"# {self.note}",
            f"trials: {self.n_trials}   executed: {self.n_executed}   "
            f"accuracy: {self.accuracy:.1f}%",
            f"intents: {self.n_total}   correct: {self.n_correct}   "
            f"robustness: {self.robustness:.1f}%",
            "",
            f"{'task':<28} {'trials':>6} {'executed':>8} {'correct':>8}",
        ]
        for task, stats in sorted(self.per_task.items()):
            lines.append(
                f"{task:<28} {stats.trials:>6} {stats.executed:>8} {stats.intent_correct:>8}"
            )
        curve = self.noise_curve()
        if curve:
            lines.append("")
            lines.append("selection rate vs ray noise:")
            for sigma, rate in curve:
                bar = "#" * int(round(rate / 2))
                lines.append(f"  sigma={sigma:4.1f} deg  {rate:6.2f}%  {bar}")
        if self.failures:
            lines.append("")
            lines.append("failures:")
            for f in self.failures:
                lines.append(f"  {f['episode']}: [{f['stage']}] {f['error']}: {f['message']}")
        return "\n".join(lines)


def evaluate(episodes: Iterable[Episode], config: Config) -> tuple[MetricsReport, list[ReplayResult]]:
    """Replay every episode and aggregate the metrics."""
    report = MetricsReport()
    results = []
    for episode in sorted(episodes, key=lambda e: e.name):
        result = replay(episode, config)
        results.append(result)
        stats = report.per_task.setdefault(result.task, TaskStats())
        report.n_trials += 1
        stats.trials += 1
        executed = result.ok and result.final_match is not False
        if executed:
            report.n_executed += 1
            stats.executed += 1
        if result.intent_match is not None:
            report.n_total += 1
            stats.intent_total += 1
            if result.intent_match:
                report.n_correct += 1
                stats.intent_correct += 1
        for verdict in result.hard_errors:
            report.failures.append(
                {
                    "episode": result.episode,
                    "stage": verdict["stage"],
                    "error": verdict["error"],
                    "message": verdict["message"],
                }
            )
        for key, value in result.timings.as_dict().items():
            report.timing[key] = report.timing.get(key, 0.0) + value
    return report, results
