import string

from hypothesis import given
from hypothesis import strategies as st

from spokensearch.text import DEFAULT_STOPLIST, split_sentences, tokenize


class TestTokenize:
    def test_basic_normalization(self):
        assert [t.term for t in tokenize("Wall Street Journal.")] == [
            "wall",
            "street",
            "journal",
        ]

    def test_empty_text(self):
        assert tokenize("") == []

    def test_interior_punctuation_and_stoplist(self):
        tokens = tokenize("The U.S. market", stoplist=DEFAULT_STOPLIST)
        assert [t.term for t in tokens] == ["us", "market"]

    def test_surfaces_keep_their_case(self):
        tokens = tokenize("Wall Street")
        assert [t.surface for t in tokens] == ["Wall", "Street"]

    def test_pure_punctuation_dropped(self):
        assert tokenize("--- ... !!") == []

    def test_stoplist_none_keeps_function_words(self):
        assert [t.term for t in tokenize("the cat", stoplist=None)] == ["the", "cat"]

    def test_default_stoplist_has_no_content_words(self):
        for word in ("market", "sheep", "telephone", "network"):
            assert word not in DEFAULT_STOPLIST

    @given(st.text())
    def test_terms_are_lowercase_alnum(self, text):
        for token in tokenize(text):
            assert token.term
            assert not any(ch.isupper() for ch in token.term)
            assert not any(ch in string.punctuation for ch in token.term)

    @given(st.text())
    def test_deterministic(self, text):
        assert tokenize(text) == tokenize(text)


class TestSplitSentences:
    def test_two_sentences(self):
        assert split_sentences("It rained. We left.") == ["It rained.", "We left."]

    def test_abbreviation_is_not_a_boundary(self):
        assert split_sentences("Mr. Smith left. He ran.") == ["Mr. Smith left.", "He ran."]

    def test_empty(self):
        assert split_sentences("") == []

    def test_interior_abbreviation_with_dots(self):
        out = split_sentences("The U.S. Senate met. It adjourned.")
        assert out == ["The U.S. Senate met.", "It adjourned."]

    def test_question_and_exclamation(self):
        assert split_sentences("Really?! Yes. Fine!") == ["Really?!", "Yes.", "Fine!"]

    def test_no_boundary_without_capital(self):
        assert split_sentences("version 2. beta is out") == ["version 2. beta is out"]

    def test_unterminated_tail_kept(self):
        assert split_sentences("First one. and then") == ["First one. and then"]

    @given(st.text())
    def test_no_words_lost(self, text):
        rejoined = " ".join(split_sentences(text))
        assert rejoined.split() == text.split()
