import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minibert import tokenizer as tk
from minibert.errors import InputError


def make_vocab(extra):
    return tk.Vocabulary(list(tk.SPECIAL_TOKENS) + list(extra))


def test_build_vocab_frequency_order():
    vocab = tk.build_vocab(["a a b"], max_size=10)
    assert "a" in vocab and "b" in vocab
    assert vocab.id("a") < vocab.id("b")
    assert vocab.id("a") == 5


def test_build_vocab_too_small():
    with pytest.raises(InputError):
        tk.build_vocab(["abcdef"], max_size=6)


def test_build_vocab_deterministic():
    corpus = ["the dog barked", "the dogs bark", "a dog"]
    v1 = tk.build_vocab(corpus, max_size=64)
    v2 = tk.build_vocab(corpus, max_size=64)
    assert v1.tokens() == v2.tokens()


def test_build_vocab_empty_corpus():
    with pytest.raises(InputError):
        tk.build_vocab([], max_size=100)
    with pytest.raises(InputError):
        tk.build_vocab(["   "], max_size=100)


def test_build_vocab_corpus_reencodes_without_unk():
    corpus = ["the quick brown fox", "jumps over the lazy dog", "dogs bark loudly"]
    vocab = tk.build_vocab(corpus, max_size=60)  # too small for all whole words
    for sentence in corpus:
        ex = tk.encode(vocab, sentence, max_len=32)
        assert tk.UNK_ID not in ex.input_ids[ex.attention_mask == 1]


def test_encode_subword_continuation():
    vocab = make_vocab(["the", "dog", "##s"])
    ex = tk.encode(vocab, "the dogs", max_len=8)
    assert ex.input_ids.tolist() == [2, 5, 6, 7, 3, 0, 0, 0]
    assert ex.attention_mask.tolist() == [1, 1, 1, 1, 1, 0, 0, 0]
    assert ex.token_type_ids.tolist() == [0] * 8


def test_encode_empty_string():
    vocab = make_vocab(["the"])
    ex = tk.encode(vocab, "", max_len=8)
    assert ex.input_ids.tolist()[:2] == [2, 3]
    assert ex.attention_mask.tolist() == [1, 1, 0, 0, 0, 0, 0, 0]


def test_encode_truncation():
    vocab = make_vocab(["word"])
    text = " ".join(["word"] * 100)
    ex = tk.encode(vocab, text, max_len=64)
    assert ex.input_ids.shape == (64,)
    assert ex.input_ids[63] == tk.SEP_ID
    assert ex.attention_mask.sum() == 64


def test_encode_unknown_word_becomes_single_unk():
    vocab = make_vocab(["the", "dog"])
    ex = tk.encode(vocab, "the zebra dog", max_len=8)
    assert ex.input_ids.tolist()[:5] == [2, 5, 1, 6, 3]


def test_encode_punctuation_split():
    vocab = make_vocab(["dog", "."])
    ex = tk.encode(vocab, "dog.", max_len=8)
    assert ex.input_ids.tolist()[:4] == [2, 5, 6, 3]


def test_encode_max_len_too_small():
    vocab = make_vocab([])
    with pytest.raises(InputError):
        tk.encode(vocab, "hi", max_len=1)


def test_monotone_truncation():
    vocab = make_vocab(["a", "b", "c", "d", "e", "f", "g", "h"])
    text = "a b c d e f g h"
    short = tk.encode(vocab, text, max_len=5)
    longer = tk.encode(vocab, text, max_len=9)
    assert short.input_ids.tolist()[:4] == longer.input_ids.tolist()[:4]


@given(
    st.lists(st.text(alphabet="abcd", min_size=1, max_size=5), min_size=1, max_size=10),
    st.integers(2, 12),
    st.integers(1, 6),
)
@settings(max_examples=60, deadline=None)
def test_monotone_truncation_property(words, m, extra):
    sentence = " ".join(words)
    vocab = tk.build_vocab([sentence], max_size=128)
    shorter = tk.encode(vocab, sentence, max_len=m)
    longer = tk.encode(vocab, sentence, max_len=m + extra)
    assert shorter.input_ids.tolist()[: m - 1] == longer.input_ids.tolist()[: m - 1]


@given(
    st.lists(
        st.text(alphabet="abcdefg", min_size=1, max_size=8),
        min_size=1,
        max_size=6,
    )
)
@settings(max_examples=60, deadline=None)
def test_round_trip_on_covered_sentences(words):
    sentence = " ".join(words)
    vocab = tk.build_vocab([sentence], max_size=256)
    ex = tk.encode(vocab, sentence, max_len=128)
    assert tk.decode(vocab, ex) == " ".join(tk.normalize_words(sentence))


def test_vocab_file_round_trip(tmp_path):
    vocab = tk.build_vocab(["the dog barked loudly"], max_size=64)
    path = tmp_path / "vocab.txt"
    vocab.save(path)
    loaded = tk.Vocabulary.load(path)
    assert loaded.tokens() == vocab.tokens()
    assert path.read_text(encoding="utf-8").splitlines()[0] == "[PAD]"


def test_vocabulary_rejects_duplicates_and_bad_specials():
    with pytest.raises(InputError):
        tk.Vocabulary(list(tk.SPECIAL_TOKENS) + ["a", "a"])
    with pytest.raises(InputError):
        tk.Vocabulary(["[PAD]", "[UNK]", "a"])


def test_estimator_fit_transform():
    est = tk.WordPieceTokenizer(max_vocab_size=64, max_len=10)
    batch = est.fit_transform(["the dog", "the cat"])
    assert batch.input_ids.shape == (2, 10)
    assert batch.attention_mask.shape == (2, 10)
    assert est.get_params() == {"max_vocab_size": 64, "max_len": 10}


def test_estimator_not_fitted():
    from minibert.errors import NotFittedError

    with pytest.raises(NotFittedError):
        tk.WordPieceTokenizer().transform(["x"])


def test_mask_ones_form_prefix():
    vocab = tk.build_vocab(["some words here"], max_size=64)
    for text in ["some", "some words here and more", ""]:
        ex = tk.encode(vocab, text, max_len=6)
        mask = ex.attention_mask
        n = int(mask.sum())
        assert mask.tolist() == [1] * n + [0] * (6 - n)
        assert ex.input_ids[0] == tk.CLS_ID
        assert ex.input_ids[n - 1] == tk.SEP_ID
        assert np.all(ex.input_ids[n:] == tk.PAD_ID)
