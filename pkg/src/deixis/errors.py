"""Exception hierarchy for the whole pipeline.

Every stage raises a subclass of :class:`DeixisError`; the replay harness and
the gateway convert them into verdicts instead of letting them crash a
session.
"""


class DeixisError(Exception):
    """Base class for all pipeline errors."""


# --- scene geometry ---------------------------------------------------------

class GeometryError(DeixisError):
    pass


class NonPositiveDepth(GeometryError):
    pass


class DegenerateBBox(GeometryError):
    pass


class LowConfidence(GeometryError):
    pass


class DegenerateForearm(GeometryError):
    pass


class DegenerateRay(GeometryError):
    pass


class NoMatchingClass(GeometryError):
    """No object in the scene carries the requested class label."""


class OutOfRange(GeometryError):
    """The nearest class match lies beyond the selection radius."""


# --- command grammar --------------------------------------------------------

class GrammarError(DeixisError):
    pass


class LexiconError(GrammarError):
    """Invalid lexicon configuration (overlapping word sets, unknown action)."""


class MalformedMetric(GrammarError):
    """Number without a unit, or a unit word without a number."""


# --- fusion engine ----------------------------------------------------------

class FusionError(DeixisError):
    pass


class OutOfOrderEvent(FusionError):
    """Timestamp regressed beyond the configured reorder tolerance."""


class CommandOutOfOrder(FusionError):
    """A command token arrived in a position the protocol does not allow."""


class PronounBeforeClass(CommandOutOfOrder):
    pass


class NoRecentRay(FusionError):
    """No pointing ray fell inside the alignment window of the pronoun."""


class ObjectBindingFailed(FusionError):
    """select_object failed at pronoun time (wraps the geometry error)."""


class IncompleteIntention(FusionError):
    """finish arrived while a required piece of the intention was missing."""


class TooManySubcommands(FusionError):
    pass


# --- planner ----------------------------------------------------------------

class PlannerError(DeixisError):
    pass


class UnknownAction(PlannerError):
    pass


class PreconditionViolated(PlannerError):
    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class Unreachable(PlannerError):
    """A target pose lies outside the configured workspace box."""


class PlanSyntaxError(PlannerError):
    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class UnknownPrimitive(PlannerError):
    pass


class UnknownApiCall(PlannerError):
    pass


class ArgumentSchemaMismatch(PlannerError):
    pass


class CollisionPredicted(PlannerError):
    def __init__(self, message, step_index=None, object_id=None):
        super().__init__(message)
        self.step_index = step_index
        self.object_id = object_id


class LlmTimeout(PlannerError):
    pass


class TransportFailure(PlannerError):
    pass


class EmptyResponse(PlannerError):
    pass


# --- workcell ---------------------------------------------------------------

class WorkcellError(DeixisError):
    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class GraspMissed(WorkcellError):
    pass


class ReleaseOverVoid(WorkcellError):
    pass


# --- gateway / config -------------------------------------------------------

class ConfigError(DeixisError):
    pass


class UnknownScenePreset(DeixisError):
    pass


class SessionClosed(DeixisError):
    pass


class MalformedMessage(DeixisError):
    pass
