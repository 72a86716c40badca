"""The strict line-oriented plan grammar.

One call per line: ``name(key=value, ...)`` with plain decimal numbers.
``#`` starts a comment line; blank lines are allowed.  Anything else is an
error, never a guess — this is the first gate against model hallucination.
"""

from __future__ import annotations

import re

from ..errors import PlanSyntaxError, UnknownPrimitive
from .types import ActionSequence, ActionStep, ApiSpec

_CALL_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*(.*?)\s*\)\s*$")
_ARG_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?(?:\d+\.\d+|\d+|\.\d+))$")


def parse_plan(text: str, api: ApiSpec, provenance: str = "llm") -> ActionSequence:
    """Parse plan text into a typed, range-checked sequence."""
    steps: list[ActionStep] = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        m = _CALL_RE.match(line)
        if m is None:
            raise PlanSyntaxError(f"line {line_no}: not a call: {raw_line!r}", line_no=line_no)
        name, arg_blob = m.group(1), m.group(2)
        if name not in api:
            raise UnknownPrimitive(f"line {line_no}: unknown primitive {name!r}")
        args: dict[str, float] = {}
        if arg_blob:
            for part in arg_blob.split(","):
                am = _ARG_RE.match(part.strip())
                if am is None:
                    raise PlanSyntaxError(
                        f"line {line_no}: bad argument {part.strip()!r}", line_no=line_no
                    )
                key = am.group(1)
                if key in args:
                    raise PlanSyntaxError(
                        f"line {line_no}: duplicate argument {key!r}", line_no=line_no
                    )
                args[key] = float(am.group(2))
        step = ActionStep(primitive=name, args=args)
        step.check_against(api)  # arg names + declared ranges
        steps.append(step)
    if not steps:
        raise PlanSyntaxError("plan contains no calls")
    return ActionSequence(steps=tuple(steps), provenance=provenance)


def serialize_plan(seq: ActionSequence) -> str:
    """Sequence back to grammar text. Float args quantize to 6 decimals."""
    lines = []
    for step in seq:
        args = ", ".join(f"{k}={v:.6f}" for k, v in step.args.items())
        lines.append(f"{step.primitive}({args})")
    return "\n".join(lines)
