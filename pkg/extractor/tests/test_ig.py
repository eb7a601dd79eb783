"""Integrated gradients: exactness, completeness, error surfaces."""

import json
import math

import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptlens_extractor.attribute import (
    attribute_corpus,
    attributions_bytes,
    integrated_gradients,
)
from conceptlens_extractor.config import ExtractionConfig
from conceptlens_extractor.corpus import Sentence, read_corpus
from conceptlens_extractor.errors import ConfigError, NumericError
from conceptlens_extractor.fixtures import (
    TOY_WORDS,
    build_linear_classifier,
    build_toy_classifier,
    toy_corpus,
)
from conceptlens_extractor.model import encode_words


def config(**overrides) -> ExtractionConfig:
    base = dict(model="toy", ig_steps=128)
    base.update(overrides)
    return ExtractionConfig(**base)


def logit_span(model, tokenizer, words, pred):
    """F(x) and F(zero baseline) recomputed independently."""
    enc = encode_words(tokenizer, words)
    x = model.get_input_embeddings()(enc["input_ids"]).detach()
    mask = enc.get("attention_mask")
    with torch.no_grad():
        fx = float(model(inputs_embeds=x, attention_mask=mask).logits[0, pred])
        fxp = float(model(inputs_embeds=torch.zeros_like(x), attention_mask=mask).logits[0, pred])
    return fx, fxp


class TestLinearExactness:
    @pytest.mark.parametrize("m", [1, 4, 128])
    def test_word_scores_equal_w_dot_x(self, linear_model, m):
        model, tokenizer = linear_model
        words = ["the", "cat", "sat", "on", "a", "mat"]
        result = integrated_gradients(config(ig_steps=m), words, model, tokenizer)
        enc = encode_words(tokenizer, words)
        x = model.get_input_embeddings()(enc["input_ids"]).detach()[0].double()
        w = model.weight[result.predicted_index].detach().double()
        expected = (x @ w).tolist()
        for got, want in zip(result.word_scores, expected):
            assert abs(got - want) <= 1e-6
        assert result.convergence_delta <= 1e-6

    def test_zero_input_equal_to_baseline_gives_zero_scores(self):
        model, tokenizer = build_linear_classifier(seed=5)
        wid = tokenizer.convert_tokens_to_ids("the")
        with torch.no_grad():
            model.embedding.weight[wid] = 0.0
        result = integrated_gradients(config(), ["the", "the"], model, tokenizer)
        assert result.word_scores == [0.0, 0.0]
        assert result.convergence_delta == 0.0


class TestCompleteness:
    def test_delta_within_relative_tolerance_at_m128(self, toy_model):
        model, tokenizer = toy_model
        for sentence in read_corpus(toy_corpus(6, seed=3)):
            result = integrated_gradients(config(), sentence.words, model, tokenizer)
            fx, fxp = logit_span(model, tokenizer, sentence.words, result.predicted_index)
            assert result.convergence_delta <= 1e-3 * max(1.0, abs(fx - fxp))

    def test_delta_shrinks_with_step_count(self, toy_model):
        model, tokenizer = toy_model
        words = read_corpus(toy_corpus(4, seed=8))[0].words
        coarse = integrated_gradients(config(ig_steps=16), words, model, tokenizer)
        fine = integrated_gradients(config(ig_steps=256), words, model, tokenizer)
        assert fine.convergence_delta <= coarse.convergence_delta + 1e-4

    def test_single_piece_sentence_word_sum_matches_logit_gap(self, toy_model):
        """With no special tokens and no splitting, word scores carry all mass."""
        model, tokenizer = toy_model
        words = ["the", "cat", "sat", "on", "a", "mat"]
        result = integrated_gradients(config(), words, model, tokenizer)
        fx, fxp = logit_span(model, tokenizer, words, result.predicted_index)
        assert abs(sum(result.word_scores) - (fx - fxp)) <= 1e-3 * max(1.0, abs(fx - fxp))


class TestBaselines:
    def test_pad_token_baseline_differs_but_converges(self):
        model, tokenizer = build_toy_classifier(seed=7)
        # padding_idx zeroes the pad row at init, which would make both
        # strategies coincide; nudge it so they are distinguishable
        with torch.no_grad():
            model.bert.embeddings.word_embeddings.weight[tokenizer.pad_token_id] = 0.05
        words = ["the", "cat", "sat", "playing"]
        zero = integrated_gradients(config(), words, model, tokenizer)
        pad = integrated_gradients(config(baseline="pad-token"), words, model, tokenizer)
        assert zero.word_scores != pad.word_scores
        # completeness against the pad baseline's own span
        enc = encode_words(tokenizer, words)
        ids = enc["input_ids"]
        emb = model.get_input_embeddings()
        with torch.no_grad():
            x = emb(ids)
            xp = emb(torch.full_like(ids, tokenizer.pad_token_id))
            fx = float(model(inputs_embeds=x, attention_mask=enc["attention_mask"]).logits[0, pad.predicted_index])
            fxp = float(model(inputs_embeds=xp, attention_mask=enc["attention_mask"]).logits[0, pad.predicted_index])
        assert pad.convergence_delta <= 1e-3 * max(1.0, abs(fx - fxp))

    def test_pad_baseline_requires_pad_token(self):
        model, tokenizer = build_linear_classifier(seed=5)
        model.config.pad_token_id = None
        with pytest.raises(ConfigError):
            integrated_gradients(config(baseline="pad-token"), ["the"], model, tokenizer)

    def test_unknown_baseline_rejected(self, toy_model):
        model, tokenizer = toy_model
        with pytest.raises(ConfigError):
            integrated_gradients(config(baseline="gaussian"), ["the"], model, tokenizer)

    def test_zero_steps_rejected(self, toy_model):
        model, tokenizer = toy_model
        with pytest.raises(ConfigError):
            integrated_gradients(config(ig_steps=0), ["the"], model, tokenizer)


class TestNumericGuards:
    def test_nan_weights_surface_with_sentence_id(self):
        model, tokenizer = build_toy_classifier(seed=7)
        with torch.no_grad():
            model.classifier.weight.fill_(float("nan"))
        with pytest.raises(NumericError) as err:
            integrated_gradients(config(), ["the", "cat"], model, tokenizer, sentence_id=41)
        assert err.value.details["sentence_id"] == 41

    def test_probabilities_sum_to_one(self, toy_model):
        model, tokenizer = toy_model
        result = integrated_gradients(config(), ["big", "red", "sun"], model, tokenizer)
        assert abs(sum(result.probabilities) - 1.0) <= 1e-6
        assert result.predicted_index == result.probabilities.index(max(result.probabilities))


class TestCorpusAttribution:
    def test_records_follow_the_exchange_format(self, toy_model):
        model, tokenizer = toy_model
        sentences = read_corpus(toy_corpus(5, seed=1))
        records = attribute_corpus(config(ig_steps=32), sentences, model, tokenizer)
        assert [r["sentence_id"] for r in records] == list(range(5))
        for record, sentence in zip(records, sentences):
            assert len(record["token_scores"]) == len(sentence.words)
            assert record["predicted_class"] in record["class_probabilities"]
            assert abs(sum(record["class_probabilities"].values()) - 1.0) <= 1e-4
            assert record["convergence_delta"] >= 0.0
        parsed = [json.loads(line) for line in attributions_bytes(records).decode().splitlines()]
        assert parsed == records

    def test_skips_match_extraction_rule(self, toy_model):
        model, tokenizer = toy_model
        sentences = [Sentence(["the", "cat"]), Sentence(["the"] * 70), Sentence(["a", "dog"])]
        records = attribute_corpus(config(ig_steps=8), sentences, model, tokenizer)
        assert [r["sentence_id"] for r in records] == [0, 1]
        assert len(records[1]["token_scores"]) == 2

    def test_deterministic(self, toy_model):
        model, tokenizer = toy_model
        sentences = read_corpus(toy_corpus(3, seed=12))
        a = attribute_corpus(config(ig_steps=16), sentences, model, tokenizer)
        b = attribute_corpus(config(ig_steps=16), sentences, model, tokenizer)
        assert a == b


class TestScoreProperties:
    @settings(max_examples=20)
    @given(
        words=st.lists(st.sampled_from(TOY_WORDS + ["playing", "walked"]), min_size=1, max_size=6),
        m=st.integers(min_value=1, max_value=24),
    )
    def test_scores_finite_and_delta_nonnegative(self, toy_model, words, m):
        model, tokenizer = toy_model
        result = integrated_gradients(config(ig_steps=m), list(words), model, tokenizer)
        assert len(result.word_scores) == len(words)
        assert all(math.isfinite(s) for s in result.word_scores)
        assert result.convergence_delta >= 0.0
