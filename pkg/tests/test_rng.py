import numpy as np
import pytest

from wpmix.rng import substream, tag_key


def test_same_key_same_numbers():
    np.testing.assert_array_equal(substream(5, "a", 3).random(10), substream(5, "a", 3).random(10))


@pytest.mark.parametrize("other", [(6, "a", 3), (5, "b", 3), (5, "a", 4)])
def test_any_key_change_gives_new_stream(other):
    assert not np.array_equal(substream(5, "a", 3).random(10), substream(*other).random(10))


def test_tag_key_is_stable_64_bit():
    assert tag_key("sample") == tag_key("sample")
    assert 0 <= tag_key("sample") < 2**64


def test_negative_seed_rejected():
    with pytest.raises(ValueError):
        substream(-1)
