import random

import pytest

from spokensearch.recognizer import (
    AlignmentCounts,
    ErrorModel,
    Transcript,
    TranscriptWord,
    corrupt,
    derive_seed,
    merge_transcripts,
    parse_transcript_lines,
    transcribe_query,
    transcript_lines,
    word_accuracy,
)

VOCAB = frozenset(
    "market marked basket sheep ship shape wool price network upgrade engine "
    "farmer subsidy telephone business analyst trader pension exchange".split()
)


def model_with(**kwargs):
    kwargs.setdefault("vocabulary", VOCAB)
    return ErrorModel(**kwargs)


def make_transcript(pairs, rec="rec0"):
    words = tuple(
        TranscriptWord(surface=s, confidence=c, correct=True, source_index=i)
        for i, (s, c) in enumerate(pairs)
    )
    return Transcript(words=words, recognizer_id=rec)


class TestErrorModel:
    def test_mix_must_sum_to_one(self):
        with pytest.raises(ValueError):
            ErrorModel(error_mix=(0.5, 0.2, 0.2))

    def test_interval_bounds(self):
        with pytest.raises(ValueError):
            ErrorModel(conf_correct=(0.9, 0.2))

    def test_round_trip_dict(self):
        model = model_with(accuracy=0.65)
        assert ErrorModel.from_dict(model.to_dict()) == model


class TestCorrupt:
    def test_perfect_accuracy_is_identity(self):
        words = ["sheep", "farming", "subsidies"]
        out = corrupt(words, model_with(accuracy=1.0), seed=5)
        assert out.surfaces() == words
        assert all(w.correct for w in out.words)
        assert [w.source_index for w in out.words] == [0, 1, 2]

    def test_zero_accuracy_all_substituted(self):
        words = ["sheep", "wool"]
        model = model_with(accuracy=0.0, error_mix=(1.0, 0.0, 0.0))
        out = corrupt(words, model, seed=11)
        assert len(out.words) == 2
        assert all(not w.correct for w in out.words)
        assert all(w.surface != orig for w, orig in zip(out.words, words))
        assert all(w.surface in VOCAB for w in out.words)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            corrupt([], model_with(), seed=1)

    def test_deterministic_given_seed(self):
        words = ["sheep", "farming", "subsidies", "wool", "market"]
        model = model_with(accuracy=0.5)
        first = corrupt(words, model, seed=99)
        second = corrupt(words, model, seed=99)
        assert first == second
        other = corrupt(words, model, seed=100)
        assert other != first  # overwhelmingly likely at accuracy 0.5

    def test_confidences_in_declared_intervals(self):
        words = ["sheep"] * 200
        model = model_with(accuracy=0.5)
        out = corrupt(words, model, seed=3)
        for w in out.words:
            lo, hi = model.conf_correct if w.correct else model.conf_error
            assert lo <= w.confidence <= hi

    def test_calibration_quick(self):
        words = ["market"] * 10_000
        out = corrupt(words, model_with(accuracy=0.8), seed=17)
        correct = sum(1 for w in out.words if w.correct)
        assert 0.78 <= correct / 10_000 <= 0.82

    def test_substitutes_favor_similar_words(self):
        # "marked" is far closer to "market" than the rest of the vocabulary,
        # so it should dominate the substitution draws.
        model = model_with(accuracy=0.0, error_mix=(1.0, 0.0, 0.0))
        counts: dict[str, int] = {}
        for seed in range(300):
            out = corrupt(["market"], model, seed=seed)
            counts[out.words[0].surface] = counts.get(out.words[0].surface, 0) + 1
        assert counts.get("marked", 0) > 100

    def test_insertion_appends_vocabulary_word(self):
        model = model_with(accuracy=0.0, error_mix=(0.0, 0.0, 1.0))
        out = corrupt(["sheep"], model, seed=2)
        assert len(out.words) == 2
        assert out.words[0].surface == "sheep"
        assert out.words[0].correct is False
        assert out.words[1].source_index is None
        assert out.words[1].surface in VOCAB


class TestMerge:
    def test_single_transcript_identity(self):
        t = make_transcript([("sheep", 0.9), ("wool", 0.4)])
        merged = merge_transcripts([t])
        assert merged.surfaces() == ["sheep", "wool"]
        assert [w.confidence for w in merged.words] == [0.9, 0.4]
        assert all(w.agreement == 1.0 for w in merged.words)
        assert merged.source_count == 1

    def test_three_identical_keep_confidence(self):
        ts = [make_transcript([("market", 0.6)], rec=f"rec{i}") for i in range(3)]
        merged = merge_transcripts(ts)
        assert merged.surfaces() == ["market"]
        assert merged.words[0].confidence == pytest.approx(0.6)
        assert merged.words[0].agreement == 1.0

    def test_majority_vote_with_combined_confidence(self):
        a = make_transcript([("market", 0.7)], rec="rec0")
        b = make_transcript([("market", 0.5)], rec="rec1")
        c = make_transcript([("marked", 0.9)], rec="rec2")
        merged = merge_transcripts([a, b, c])
        assert merged.surfaces() == ["market"]
        assert merged.words[0].confidence == pytest.approx((0.7 + 0.5) / 3)
        assert merged.words[0].agreement == pytest.approx(2 / 3)

    def test_two_way_tie_resolved_by_confidence(self):
        a = make_transcript([("market", 0.6)], rec="rec0")
        b = make_transcript([("marked", 0.8)], rec="rec1")
        merged = merge_transcripts([a, b])
        assert merged.surfaces() == ["marked"]
        assert merged.words[0].confidence == pytest.approx(0.8 / 2)

    def test_lone_insertion_dropped_at_three(self):
        a = make_transcript([("sheep", 0.9), ("wool", 0.9)], rec="rec0")
        b = make_transcript([("sheep", 0.9), ("junkword", 0.3), ("wool", 0.9)], rec="rec1")
        c = make_transcript([("sheep", 0.9), ("wool", 0.9)], rec="rec2")
        merged = merge_transcripts([a, b, c])
        assert merged.surfaces() == ["sheep", "wool"]

    def test_word_deleted_by_first_recovered_by_majority(self):
        a = make_transcript([("sheep", 0.9)], rec="rec0")
        b = make_transcript([("sheep", 0.9), ("wool", 0.8)], rec="rec1")
        c = make_transcript([("sheep", 0.9), ("wool", 0.7)], rec="rec2")
        merged = merge_transcripts([a, b, c])
        assert merged.surfaces() == ["sheep", "wool"]
        assert merged.words[1].confidence == pytest.approx((0.8 + 0.7) / 3)

    def test_zero_transcripts_rejected(self):
        with pytest.raises(ValueError):
            merge_transcripts([])


class TestWordAccuracy:
    def test_identical(self):
        wer, counts = word_accuracy(["a", "b"], ["a", "b"])
        assert wer == 0.0
        assert counts == AlignmentCounts(0, 0, 0, 2)

    def test_single_substitution(self):
        wer, counts = word_accuracy(["a", "b", "c", "d"], ["a", "x", "c", "d"])
        assert wer == 0.25
        assert counts.substitutions == 1

    def test_insertion(self):
        wer, counts = word_accuracy(["a", "b", "c"], ["a", "x", "b", "c"])
        assert counts.insertions == 1
        assert wer == pytest.approx(1 / 3)

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            word_accuracy([], ["a"])

    def test_not_symmetric(self):
        wer_ab, _ = word_accuracy(["a"], ["a", "b", "c"])
        wer_ba, _ = word_accuracy(["a", "b", "c"], ["a"])
        assert wer_ab != wer_ba

    def test_zero_iff_equal(self):
        rng = random.Random(8)
        words = ["w" + str(i) for i in range(6)]
        for _ in range(50):
            ref = [rng.choice(words) for _ in range(rng.randint(1, 6))]
            hyp = [rng.choice(words) for _ in range(rng.randint(0, 6))]
            wer, _ = word_accuracy(ref, hyp)
            assert (wer == 0.0) == (ref == hyp)


class TestTranscribeQuery:
    def test_single_recognizer_equals_corrupt(self):
        model = model_with(accuracy=0.7)
        merged, raws = transcribe_query("sheep farming subsidies", 1, model, seed=21)
        assert len(raws) == 1
        expected = corrupt(["sheep", "farming", "subsidies"], model, derive_seed(21, 0))
        assert raws[0].words == expected.words
        assert merged.surfaces() == expected.surfaces()

    def test_perfect_accuracy_any_n(self):
        model = model_with(accuracy=1.0)
        merged, raws = transcribe_query("sheep farming", 3, model, seed=4)
        assert merged.surfaces() == ["sheep", "farming"]
        assert len(raws) == 3
        for word in merged.words:
            per_rec = [t.words[word.source_index].confidence for t in raws]
            assert word.confidence == pytest.approx(sum(per_rec) / 3)

    def test_merging_improves_word_accuracy(self):
        model = model_with(accuracy=0.8)
        totals = {1: 0.0, 3: 0.0}
        trials = 120
        for trial in range(trials):
            words = ["sheep", "wool", "market", "telephone", "network", "upgrade"]
            for n in totals:
                merged, _ = transcribe_query(" ".join(words), n, model, derive_seed(5, trial, n))
                _, counts = word_accuracy(words, merged.surfaces())
                totals[n] += counts.accuracy
        assert totals[3] / trials > totals[1] / trials

    def test_wrong_merged_words_have_lower_confidence(self):
        model = model_with(accuracy=0.8)
        right: list[float] = []
        wrong: list[float] = []
        words = ["market", "sheep", "network", "wool", "telephone"]
        for trial in range(150):
            merged, _ = transcribe_query(" ".join(words), 2, model, derive_seed(6, trial))
            for w in merged.words:
                if w.source_index is not None and w.surface == words[w.source_index]:
                    right.append(w.confidence)
                else:
                    wrong.append(w.confidence)
        assert right and wrong
        assert sum(wrong) / len(wrong) < sum(right) / len(right)

    def test_zero_recognizers_rejected(self):
        with pytest.raises(ValueError):
            transcribe_query("sheep", 0, model_with(), seed=1)


class TestSerialization:
    def test_round_trip(self):
        merged = merge_transcripts([make_transcript([("sheep", 0.91), ("wool", 0.42)])])
        text = transcript_lines(merged.words)
        assert parse_transcript_lines(text) == [("sheep", 0.91), ("wool", 0.42)]

    def test_bad_line_reported(self):
        with pytest.raises(ValueError, match="line 1"):
            parse_transcript_lines("no-tab-here")
