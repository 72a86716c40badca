"""Verbal command grammar: word classification and metric parsing.

The vocabulary is data, not code: the lexicon is loaded from the config file
so new action or class words never require a code change.  Words fall into
five categories (action, class, pronoun, metric, finish); anything else is
Unknown and is ignored downstream, never fatal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import LexiconError, MalformedMetric


class TokenKind(enum.Enum):
    ACTION = "action"
    CLASS = "class"
    PRONOUN = "pronoun"
    METRIC = "metric"
    FINISH = "finish"
    UNKNOWN = "unknown"


class MetricUnit(enum.Enum):
    DEGREES = "degrees"
    SPEED_LEVEL = "speed-level"
    SPATIAL = "spatial-qualifier"


@dataclass(frozen=True)
class WordToken:
    """One transcribed word with its utterance interval."""

    text: str
    t_start: float
    t_end: float
    confidence: float = 1.0

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty word")
        if self.t_end < self.t_start:
            raise ValueError("t_end must be >= t_start")
        object.__setattr__(self, "text", self.text.lower())


@dataclass(frozen=True)
class Metric:
    value: float | str
    unit: MetricUnit

    def as_dict(self) -> dict:
        return {"value": self.value, "unit": self.unit.value}


@dataclass(frozen=True)
class CommandToken:
    """A classified word (or word pair, for number+unit metrics).

    ``fragment`` marks a bare number or unit word that still needs its
    partner; the stream assembler never emits fragments downstream.
    """

    kind: TokenKind
    source: tuple[WordToken, ...]
    action: Optional[str] = None
    class_label: Optional[str] = None
    metric: Optional[Metric] = None
    fragment: bool = False

    @property
    def t_end(self) -> float:
        return max(w.t_end for w in self.source)

    @property
    def t_start(self) -> float:
        return min(w.t_start for w in self.source)


@dataclass(frozen=True)
class Lexicon:
    """Word -> category tables. The five sets must be pairwise disjoint."""

    action_words: dict[str, str] = field(default_factory=dict)  # word -> action name
    class_words: dict[str, str] = field(default_factory=dict)  # word -> class label
    pronoun_words: frozenset[str] = frozenset()
    metric_units: dict[str, MetricUnit] = field(default_factory=dict)
    finish_words: frozenset[str] = frozenset()
    number_words: dict[str, float] = field(default_factory=dict)  # "ninety" -> 90

    def __post_init__(self):
        sets = {
            "actions": set(self.action_words),
            "classes": set(self.class_words),
            "pronouns": set(self.pronoun_words),
            "metric_units": set(self.metric_units),
            "finish": set(self.finish_words),
            "numbers": set(self.number_words),
        }
        names = list(sets)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                overlap = sets[a] & sets[b]
                if overlap:
                    raise LexiconError(
                        f"word sets {a!r} and {b!r} overlap: {sorted(overlap)}"
                    )

    def actions(self) -> set[str]:
        return set(self.action_words.values())


def _number_value(text: str, lex: Lexicon) -> Optional[float]:
    if text in lex.number_words:
        return float(lex.number_words[text])
    try:
        return float(text)
    except ValueError:
        return None


def classify(token: WordToken, lex: Lexicon) -> CommandToken:
    """Map one word to its command category (case-insensitive).

    Bare numbers and non-spatial unit words come back as metric *fragments*;
    pair them via :func:`parse_metric` or a :class:`TokenAssembler`.  Words in
    no table are Unknown, which is a value, not an error.
    """
    text = token.text
    src = (token,)
    if text in lex.action_words:
        return CommandToken(TokenKind.ACTION, src, action=lex.action_words[text])
    if text in lex.class_words:
        return CommandToken(TokenKind.CLASS, src, class_label=lex.class_words[text])
    if text in lex.pronoun_words:
        return CommandToken(TokenKind.PRONOUN, src)
    if text in lex.finish_words:
        return CommandToken(TokenKind.FINISH, src)
    if text in lex.metric_units:
        unit = lex.metric_units[text]
        if unit in (MetricUnit.SPATIAL, MetricUnit.SPEED_LEVEL):
            # qualifiers are self-contained: the word is the value
            return CommandToken(TokenKind.METRIC, src, metric=Metric(text, unit))
        return CommandToken(TokenKind.METRIC, src, fragment=True)
    value = _number_value(text, lex)
    if value is not None:
        return CommandToken(TokenKind.METRIC, src, fragment=True)
    return CommandToken(TokenKind.UNKNOWN, src)


def parse_metric(tokens: Sequence[WordToken], lex: Lexicon) -> CommandToken:
    """Parse a metric phrase: number word(s) + unit, or a lone qualifier."""
    if not tokens:
        raise MalformedMetric("empty metric phrase")
    if len(tokens) == 1:
        word = tokens[0]
        if word.text in lex.metric_units:
            unit = lex.metric_units[word.text]
            if unit in (MetricUnit.SPATIAL, MetricUnit.SPEED_LEVEL):
                return CommandToken(
                    TokenKind.METRIC, tuple(tokens), metric=Metric(word.text, unit)
                )
            raise MalformedMetric(f"unit {word.text!r} without a number")
        if _number_value(word.text, lex) is not None:
            raise MalformedMetric(f"number {word.text!r} without a unit")
        raise MalformedMetric(f"{word.text!r} is not a metric phrase")
    if len(tokens) == 2:
        num, unit_word = tokens
        value = _number_value(num.text, lex)
        unit = lex.metric_units.get(unit_word.text)
        if value is None or unit is None or unit in (MetricUnit.SPATIAL,):
            raise MalformedMetric(f"cannot parse metric phrase {[t.text for t in tokens]}")
        return CommandToken(TokenKind.METRIC, tuple(tokens), metric=Metric(value, unit))
    raise MalformedMetric(f"metric phrase too long: {[t.text for t in tokens]}")


class TokenAssembler:
    """Turns a word stream into complete command tokens.

    Holds a pending number word until its unit arrives; everything else
    passes straight through `classify`.
    """

    def __init__(self, lex: Lexicon):
        self.lex = lex
        self._pending_number: Optional[WordToken] = None

    def feed(self, word: WordToken) -> list[CommandToken]:
        tok = classify(word, self.lex)
        if self._pending_number is not None:
            pending, self._pending_number = self._pending_number, None
            if tok.fragment and word.text in self.lex.metric_units:
                return [parse_metric([pending, word], self.lex)]
            raise MalformedMetric(f"number {pending.text!r} without a unit")
        if tok.fragment:
            if word.text in self.lex.metric_units:
                # unit with no number in front of it
                raise MalformedMetric(f"unit {word.text!r} without a number")
            self._pending_number = word
            return []
        return [tok]

    def reset(self):
        self._pending_number = None
