import pytest
from hypothesis import given
from hypothesis import strategies as st

from spokensearch.phonetics import levenshtein, levenshtein_similarity, similarity, soundex


class TestSoundex:
    @pytest.mark.parametrize(
        "word,code",
        [
            ("Robert", "R163"),
            ("a", "A000"),
            ("ship", "S100"),
            ("sheep", "S100"),
            ("Tymczak", "T522"),
            ("Pfister", "P236"),
            ("Honeyman", "H555"),
            ("market", "M623"),
            ("marked", "M623"),
        ],
    )
    def test_known_codes(self, word, code):
        assert soundex(word) == code

    def test_no_letters_raises(self):
        with pytest.raises(ValueError):
            soundex("1234")

    @given(st.text(alphabet=st.characters(min_codepoint=97, max_codepoint=122), min_size=1))
    def test_shape(self, word):
        code = soundex(word)
        assert len(code) == 4
        assert code[0].isupper()
        assert all(c.isdigit() for c in code[1:])


class TestLevenshtein:
    def test_known_distances(self):
        assert levenshtein("ship", "sheep") == 2
        assert levenshtein("", "abc") == 3
        assert levenshtein("same", "same") == 0

    def test_similarity_normalization(self):
        assert levenshtein_similarity("ship", "sheep") == pytest.approx(1 - 2 / 5)
        assert levenshtein_similarity("", "") == 1.0

    @given(st.text(max_size=12), st.text(max_size=12))
    def test_symmetry(self, a, b):
        assert levenshtein(a, b) == levenshtein(b, a)

    @given(st.text(max_size=12))
    def test_identity(self, a):
        assert levenshtein(a, a) == 0


class TestSimilarity:
    def test_soundex_match_floors_to_one(self):
        assert similarity("ship", "sheep") == 1.0

    def test_plain_edit_similarity_otherwise(self):
        assert soundex("market") != soundex("basket")
        assert similarity("market", "basket") == pytest.approx(
            levenshtein_similarity("market", "basket")
        )

    def test_case_insensitive(self):
        assert similarity("Ship", "SHEEP") == 1.0

    def test_numeric_tokens_fall_back_to_edit_distance(self):
        assert similarity("1990", "1991") == pytest.approx(0.75)
