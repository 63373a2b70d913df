import numpy as np

from leancast.rng import derive_rng, derive_seed, tag_entropy


def test_same_seed_and_tag_is_reproducible():
    a = derive_rng(7, "shuffle").random(5)
    b = derive_rng(7, "shuffle").random(5)
    np.testing.assert_array_equal(a, b)


def test_different_tags_decorrelate():
    a = derive_rng(7, "shuffle").random(5)
    b = derive_rng(7, "weights").random(5)
    assert not np.array_equal(a, b)


def test_different_seeds_decorrelate():
    a = derive_rng(1, "weights").random(5)
    b = derive_rng(2, "weights").random(5)
    assert not np.array_equal(a, b)


def test_tag_entropy_is_stable():
    assert tag_entropy("weights") == tag_entropy("weights")
    assert tag_entropy("weights") != tag_entropy("dropout")


def test_derive_seed_integer():
    s = derive_seed(3, "sarima/left/post_count")
    assert isinstance(s, int)
    assert s == derive_seed(3, "sarima/left/post_count")
