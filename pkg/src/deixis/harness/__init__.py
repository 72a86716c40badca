"""Episode replay, metrics, and synthetic fixture generation."""

from .episodes import Episode, load_episode, load_episode_dir, save_episode
from .replay import ReplayResult, SceneBuilder, replay
from .report import MetricsReport, evaluate
from .synth import clutter_curve, clutter_rate, make_clutter_episode

__all__ = [
    "Episode",
    "MetricsReport",
    "ReplayResult",
    "SceneBuilder",
    "clutter_curve",
    "clutter_rate",
    "evaluate",
    "load_episode",
    "load_episode_dir",
    "make_clutter_episode",
    "replay",
    "save_episode",
]
