"""Temporal fusion of verbal command tokens and pointing rays.

One encoder per session consumes command tokens and rays in timestamp order
and emits a complete intention when the finish token arrives.  Binding is
eager: a pronoun resolves its object the moment it is heard, using the most
recent ray inside the alignment window, so rays arriving later can never
change an utterance that already happened.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Optional

if TYPE_CHECKING:
    from .config import FusionConfig, SelectionConfig

from .errors import (
    CommandOutOfOrder,
    GeometryError,
    IncompleteIntention,
    NoRecentRay,
    ObjectBindingFailed,
    OutOfOrderEvent,
    PronounBeforeClass,
    TooManySubcommands,
)
from .geometry.ops import select_object
from .geometry.types import DeicticRay, ObjectRecord, Scene
from .grammar import CommandToken, Metric, TokenKind

log = logging.getLogger(__name__)

MAX_SUBCOMMANDS = 2


class Phase(enum.Enum):
    AWAIT_ACTION = "await-action"
    AWAIT_CLASS = "await-class"
    AWAIT_PRONOUN = "await-pronoun"
    AWAIT_METRIC_OR_NEXT = "await-metric-or-next"


@dataclass
class SubCommand:
    """One (action, object, metric) unit of an intention."""

    action: str
    object_dependent: bool
    class_filter: Optional[str] = None
    obj: Optional[ObjectRecord] = None
    metric: Optional[Metric] = None

    def complete(self) -> bool:
        return not self.object_dependent or self.obj is not None

    def as_dict(self) -> dict:
        return {
            "action": self.action,
            "object_id": self.obj.id if self.obj else None,
            "class": self.class_filter,
            "metric": self.metric.as_dict() if self.metric else None,
        }


@dataclass(frozen=True)
class Intention:
    """A fully bound human intention, ready for planning."""

    subcommands: tuple[SubCommand, ...]
    omega: Optional[Metric]  # flattened metric slot, last metric wins
    scene: Scene  # snapshot frozen at encoding time
    t_emitted: float

    def __post_init__(self):
        if not 1 <= len(self.subcommands) <= MAX_SUBCOMMANDS:
            raise ValueError("an intention carries one or two subcommands")

    def as_dict(self) -> dict:
        return {
            "subcommands": [sc.as_dict() for sc in self.subcommands],
            "omega": self.omega.as_dict() if self.omega else None,
        }


@dataclass
class _RayBuffer:
    """Recent rays, newest last; pruned against the look-back horizon."""

    horizon_s: float
    rays: list[DeicticRay] = field(default_factory=list)

    def push(self, ray: DeicticRay):
        self.rays.append(ray)
        self.rays.sort(key=lambda r: r.timestamp)
        newest = self.rays[-1].timestamp
        self.rays = [r for r in self.rays if r.timestamp >= newest - self.horizon_s]

    def latest(self) -> Optional[DeicticRay]:
        return self.rays[-1] if self.rays else None

    def latest_in_window(self, t_lo: float, t_hi: float) -> Optional[DeicticRay]:
        for ray in reversed(self.rays):
            if t_lo <= ray.timestamp <= t_hi:
                return ray
            if ray.timestamp < t_lo:
                break
        return None


class IntentEncoder:
    """The per-session fusion state machine.

    Single-writer: callers must serialize feed_* calls per encoder instance.
    """

    def __init__(
        self,
        fusion_cfg: FusionConfig,
        selection_cfg: SelectionConfig,
        object_dependent: Callable[[str], bool],
    ):
        self.cfg = fusion_cfg
        self.selection = selection_cfg
        self._object_dependent = object_dependent
        horizon = fusion_cfg.alignment_window_s + fusion_cfg.reorder_tolerance_s + 2.0
        self._rays = _RayBuffer(horizon_s=horizon)
        self._last_ray_t: Optional[float] = None
        self._last_word_t: Optional[float] = None
        self.phase = Phase.AWAIT_ACTION
        self.pending: list[SubCommand] = []
        self._bind_scene: Optional[Scene] = None
        self.events: list[dict] = []  # rebinds, ignored tokens; for audit

    # -- ray stream -----------------------------------------------------

    def feed_ray(self, ray: DeicticRay):
        if self._last_ray_t is not None and ray.timestamp < self._last_ray_t - self.cfg.reorder_tolerance_s:
            raise OutOfOrderEvent(
                f"ray at t={ray.timestamp:.3f} after t={self._last_ray_t:.3f} "
                f"(tolerance {self.cfg.reorder_tolerance_s:.3f}s)"
            )
        self._last_ray_t = max(self._last_ray_t or ray.timestamp, ray.timestamp)
        self._rays.push(ray)

    @property
    def latest_ray(self) -> Optional[DeicticRay]:
        return self._rays.latest()

    # -- command stream ---------------------------------------------------

    def feed_command(self, cmd: CommandToken, scene: Scene) -> Optional[Intention]:
        """Advance the protocol; returns an Intention exactly on finish."""
        if cmd.kind is TokenKind.UNKNOWN:
            self.events.append({"kind": "ignored", "word": cmd.source[0].text})
            return None
        t = cmd.t_end
        if self._last_word_t is not None and t < self._last_word_t - self.cfg.reorder_tolerance_s:
            raise OutOfOrderEvent(
                f"word at t={t:.3f} after t={self._last_word_t:.3f} "
                f"(tolerance {self.cfg.reorder_tolerance_s:.3f}s)"
            )
        self._last_word_t = max(self._last_word_t or t, t)

        if cmd.kind is TokenKind.ACTION:
            return self._on_action(cmd)
        if cmd.kind is TokenKind.CLASS:
            return self._on_class(cmd)
        if cmd.kind is TokenKind.PRONOUN:
            return self._on_pronoun(cmd, scene)
        if cmd.kind is TokenKind.METRIC:
            return self._on_metric(cmd)
        if cmd.kind is TokenKind.FINISH:
            return self._on_finish(cmd, scene)
        raise CommandOutOfOrder(f"unhandled token kind {cmd.kind}")

    def _on_action(self, cmd: CommandToken) -> None:
        if self.pending and not self.pending[-1].complete():
            raise CommandOutOfOrder(
                f"action {cmd.action!r} before the open {self.pending[-1].action!r} "
                "subcommand was bound to an object"
            )
        if len(self.pending) >= MAX_SUBCOMMANDS:
            raise TooManySubcommands(
                f"action {cmd.action!r} would start a third subcommand"
            )
        dep = self._object_dependent(cmd.action)
        self.pending.append(SubCommand(action=cmd.action, object_dependent=dep))
        self.phase = Phase.AWAIT_CLASS if dep else Phase.AWAIT_METRIC_OR_NEXT
        return None

    def _on_class(self, cmd: CommandToken) -> None:
        if not self.pending:
            raise CommandOutOfOrder(f"class {cmd.class_label!r} before any action")
        sub = self.pending[-1]
        if not sub.object_dependent:
            raise CommandOutOfOrder(
                f"class {cmd.class_label!r} after object-independent action {sub.action!r}"
            )
        if sub.class_filter is not None:
            self.events.append(
                {"kind": "class-rerecord", "old": sub.class_filter, "new": cmd.class_label}
            )
        sub.class_filter = cmd.class_label
        sub.obj = None  # a new class always requires a fresh binding
        self.phase = Phase.AWAIT_PRONOUN
        return None

    def _on_pronoun(self, cmd: CommandToken, scene: Scene) -> None:
        if not self.pending or self.pending[-1].class_filter is None:
            raise PronounBeforeClass("pronoun spoken before any class command")
        sub = self.pending[-1]
        t_hi = cmd.t_end
        t_lo = t_hi - self.cfg.alignment_window_s
        ray = self._rays.latest_in_window(t_lo, t_hi)
        if ray is None:
            raise NoRecentRay(
                f"no pointing ray in [{t_lo:.3f}, {t_hi:.3f}] at pronoun time"
            )
        try:
            record, distance = select_object(
                ray, scene, sub.class_filter, self.selection.radius_m
            )
        except GeometryError as exc:
            raise ObjectBindingFailed(str(exc)) from exc
        if sub.obj is not None and sub.obj.id != record.id:
            self.events.append({"kind": "rebind", "old": sub.obj.id, "new": record.id})
            log.info("pronoun rebound %s -> %s", sub.obj.id, record.id)
        sub.obj = record
        self._bind_scene = scene
        self.events.append(
            {"kind": "bind", "object_id": record.id, "distance": distance, "t": t_hi}
        )
        self.phase = Phase.AWAIT_METRIC_OR_NEXT
        return None

    def _on_metric(self, cmd: CommandToken) -> None:
        if not self.pending:
            raise CommandOutOfOrder(f"metric {cmd.metric} before any action")
        self.pending[-1].metric = cmd.metric
        return None

    def _on_finish(self, cmd: CommandToken, scene: Scene) -> Intention:
        if not self.pending:
            raise IncompleteIntention("finish with no subcommands")
        for sub in self.pending:
            if not sub.complete():
                raise IncompleteIntention(
                    f"finish while {sub.action!r} still lacks an object binding"
                )
        metrics = [sub.metric for sub in self.pending if sub.metric is not None]
        intention = Intention(
            subcommands=tuple(self.pending),
            omega=metrics[-1] if metrics else None,
            scene=self._bind_scene if self._bind_scene is not None else scene,
            t_emitted=cmd.t_end,
        )
        self.reset()
        return intention

    # -- lifecycle --------------------------------------------------------

    def reset(self):
        """Back to a pristine protocol state; ray history survives."""
        self.phase = Phase.AWAIT_ACTION
        self.pending = []
        self._bind_scene = None

    def state_summary(self) -> dict:
        return {
            "phase": self.phase.value,
            "pending": [sc.as_dict() for sc in self.pending],
        }
