import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minibert import data as D
from minibert.errors import InputError, ParseError


def write_tsv(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_cola_line(tmp_path):
    path = write_tsv(tmp_path / "d.tsv", ["gj04\t1\t\tThe dog barked."])
    records = D.load_cola_tsv(path)
    assert records == [D.LabeledSentence("gj04", 1, "", "The dog barked.")]


def test_load_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("", encoding="utf-8")
    assert D.load_cola_tsv(path) == []


def test_load_wrong_column_count(tmp_path):
    path = write_tsv(tmp_path / "d.tsv", ["gj04\t1\tThe dog barked."])
    with pytest.raises(ParseError, match="line 1"):
        D.load_cola_tsv(path)


def test_load_non_integer_label(tmp_path):
    path = write_tsv(tmp_path / "d.tsv", ["gj04\tyes\t\tThe dog barked."])
    with pytest.raises(ParseError, match="line 1"):
        D.load_cola_tsv(path)


def test_load_error_names_correct_line(tmp_path):
    path = write_tsv(tmp_path / "d.tsv", ["gj04\t1\t\tok", "gj04\t7\t\tbad label"])
    with pytest.raises(ParseError, match="line 2") as exc:
        D.load_cola_tsv(path)
    assert exc.value.line_number == 2


def test_load_simple_format(tmp_path):
    path = write_tsv(tmp_path / "d.tsv", ["1\tthe dog barked", "0\tbarked dog the"])
    records = D.load_simple_tsv(path)
    assert [r.label for r in records] == [1, 0]
    assert records[0].text == "the dog barked"
    assert D.load_dataset(path, "simple") == records
    with pytest.raises(InputError):
        D.load_dataset(path, "json")


def make_records(n):
    return [D.LabeledSentence("s", i % 2, "", f"sentence {i}") for i in range(n)]


def test_split_cola_sizes():
    data = make_records(8551)
    ds = D.split(data, 0.8, seed=0)
    assert (len(ds.train), len(ds.validation)) == (6841, 1710)


def test_split_small():
    ds = D.split(make_records(10), 0.8, seed=0)
    assert (len(ds.train), len(ds.validation)) == (8, 2)


def test_split_deterministic_and_partition():
    data = make_records(101)
    a = D.split(data, 0.3, seed=5)
    b = D.split(data, 0.3, seed=5)
    assert a.train == b.train and a.validation == b.validation
    combined = sorted(a.train + a.validation, key=lambda r: r.text)
    assert combined == sorted(data, key=lambda r: r.text)
    assert not set(a.train) & set(a.validation)


@given(st.integers(2, 200), st.floats(0.01, 0.99), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_split_is_a_partition(n, ratio, seed):
    data = make_records(n)
    ds = D.split(data, ratio, seed)
    assert len(ds.train) + len(ds.validation) == n
    assert len(ds.train) == int(n * ratio + 0.5)
    key = lambda r: r.text
    assert sorted(ds.train + ds.validation, key=key) == sorted(data, key=key)


def test_split_validation_errors():
    with pytest.raises(InputError):
        D.split(make_records(10), 1.0, seed=0)
    with pytest.raises(InputError):
        D.split(make_records(1), 0.5, seed=0)


def test_permute_preserves_multiset():
    data = list(range(50)) + [7, 7, 7]
    out = D.permute(data, seed=3)
    assert sorted(out) == sorted(data)


def test_permute_single_element():
    assert D.permute(["x"], seed=9) == ["x"]


def test_permute_fixed_seed_golden_orders():
    # Frozen outputs of the pinned Philox-keyed generator; a change here means
    # the cross-platform reproducibility contract broke.
    first10 = {
        0: [85, 95, 88, 62, 76, 32, 14, 37, 30, 33],
        1: [30, 99, 69, 51, 9, 35, 40, 67, 20, 58],
        2: [58, 85, 95, 27, 5, 30, 38, 1, 69, 8],
    }
    for seed, expected in first10.items():
        assert D.permute(list(range(100)), seed=seed)[:10] == expected


def test_permute_different_seeds_differ():
    base = list(range(100))
    for s1, s2 in [(0, 1), (1, 2), (0, 2)]:
        assert D.permute(base, s1) != D.permute(base, s2)


def test_batches_counts():
    out = D.batches(list(range(6841)), 16)
    assert len(out) == 428
    assert len(out[-1]) == 9
    assert all(len(b) == 16 for b in out[:-1])


def test_batches_single():
    assert len(D.batches(list(range(16)), 16)) == 1


def test_batches_order_and_validation():
    out = D.batches([3, 1, 4, 1, 5], 2)
    assert out == [[3, 1], [4, 1], [5]]
    with pytest.raises(InputError):
        D.batches([1], 0)


def test_cola_scale_step_arithmetic():
    # 8551 rows, 80:20 split, batch 16, 3 epochs -> 428 steps/epoch, 1284 total
    ds = D.split(make_records(8551), 0.8, seed=1)
    spe = D.steps_per_epoch(len(ds.train), 16)
    assert spe == 428
    assert 3 * spe == 1284
