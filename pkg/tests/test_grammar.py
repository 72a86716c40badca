"""Word classification, metric parsing, and the stream assembler."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deixis.config import load_config
from deixis.errors import LexiconError, MalformedMetric
from deixis.grammar import (
    Lexicon,
    Metric,
    MetricUnit,
    TokenAssembler,
    TokenKind,
    WordToken,
    classify,
    parse_metric,
)


@pytest.fixture(scope="module")
def lex():
    return load_config().lexicon


def word(text, t0=0.0, t1=0.2):
    return WordToken(text=text, t_start=t0, t_end=t1)


class TestClassify:
    def test_action(self, lex):
        tok = classify(word("pick"), lex)
        assert tok.kind is TokenKind.ACTION
        assert tok.action == "pick"

    def test_pronoun(self, lex):
        assert classify(word("this"), lex).kind is TokenKind.PRONOUN
        assert classify(word("that"), lex).kind is TokenKind.PRONOUN
        assert classify(word("there"), lex).kind is TokenKind.PRONOUN

    def test_class_label(self, lex):
        tok = classify(word("cup"), lex)
        assert tok.kind is TokenKind.CLASS
        assert tok.class_label == "cup"

    def test_synonyms_map_to_canonical(self, lex):
        assert classify(word("grab"), lex).action == "pick"
        assert classify(word("mug"), lex).class_label == "cup"

    def test_unknown(self, lex):
        assert classify(word("banana"), lex).kind is TokenKind.UNKNOWN

    def test_case_insensitive(self, lex):
        assert classify(word("PICK"), lex).kind is TokenKind.ACTION

    def test_spatial_qualifier_is_complete_metric(self, lex):
        tok = classify(word("near"), lex)
        assert tok.kind is TokenKind.METRIC
        assert not tok.fragment
        assert tok.metric == Metric("near", MetricUnit.SPATIAL)

    def test_number_and_unit_are_fragments(self, lex):
        assert classify(word("90"), lex).fragment
        assert classify(word("ninety"), lex).fragment
        assert classify(word("degrees"), lex).fragment

    @given(st.sampled_from(["pick", "cup", "this", "finish", "near", "banana"]))
    @settings(max_examples=20, deadline=None)
    def test_deterministic_and_idempotent(self, text):
        lex = load_config().lexicon
        a = classify(word(text), lex)
        b = classify(word(text), lex)
        assert a.kind == b.kind and a.action == b.action and a.metric == b.metric


class TestParseMetric:
    def test_number_then_unit(self, lex):
        tok = parse_metric([word("90"), word("degrees", 0.3, 0.5)], lex)
        assert tok.metric == Metric(90.0, MetricUnit.DEGREES)

    def test_number_word_then_unit(self, lex):
        tok = parse_metric([word("ninety"), word("degrees", 0.3, 0.5)], lex)
        assert tok.metric == Metric(90.0, MetricUnit.DEGREES)

    def test_standalone_qualifier(self, lex):
        tok = parse_metric([word("near")], lex)
        assert tok.metric == Metric("near", MetricUnit.SPATIAL)

    def test_unit_without_number(self, lex):
        with pytest.raises(MalformedMetric):
            parse_metric([word("degrees")], lex)

    def test_number_without_unit(self, lex):
        with pytest.raises(MalformedMetric):
            parse_metric([word("90")], lex)


class TestAssembler:
    def test_pairs_number_with_unit(self, lex):
        asm = TokenAssembler(lex)
        assert asm.feed(word("90")) == []
        out = asm.feed(word("degrees", 0.3, 0.5))
        assert len(out) == 1
        assert out[0].metric == Metric(90.0, MetricUnit.DEGREES)
        assert out[0].t_end == 0.5

    def test_dangling_number_raises(self, lex):
        asm = TokenAssembler(lex)
        asm.feed(word("90"))
        with pytest.raises(MalformedMetric):
            asm.feed(word("finish", 0.3, 0.5))

    def test_bare_unit_raises(self, lex):
        asm = TokenAssembler(lex)
        with pytest.raises(MalformedMetric):
            asm.feed(word("degrees"))

    def test_passthrough(self, lex):
        asm = TokenAssembler(lex)
        out = asm.feed(word("pick"))
        assert [t.kind for t in out] == [TokenKind.ACTION]


class TestLexiconValidation:
    def test_overlapping_sets_rejected(self):
        with pytest.raises(LexiconError):
            Lexicon(
                action_words={"pick": "pick"},
                class_words={"pick": "pick"},  # same word in two sets
            )

    def test_unknown_iff_absent_everywhere(self, lex):
        all_words = (
            set(lex.action_words) | set(lex.class_words) | set(lex.pronoun_words)
            | set(lex.metric_units) | set(lex.finish_words) | set(lex.number_words)
        )
        for text in sorted(all_words):
            assert classify(word(text), lex).kind is not TokenKind.UNKNOWN
        assert classify(word("xylophone"), lex).kind is TokenKind.UNKNOWN

    def test_lexicon_actions_require_catalog_entries(self):
        with pytest.raises(LexiconError):
            load_config(overrides={"lexicon": {"actions": {"levitate": "levitate"}}})

    def test_duplicate_word_in_config_rejected(self):
        with pytest.raises(LexiconError):
            load_config(overrides={"lexicon": {"classes": {"pick": "cup"}}})
