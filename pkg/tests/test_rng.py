import numpy as np
import pytest

from gssd.rng import RngRoot, RngStream, derive_stream, draw_standard_normal


def test_same_triple_reproduces_sequence():
    a = derive_stream(RngRoot(7), "proj", 0).normals(100)
    b = derive_stream(RngRoot(7), "proj", 0).normals(100)
    assert np.array_equal(a, b)


def test_distinct_index_differs():
    a = derive_stream(RngRoot(7), "proj", 0).normals(100)
    b = derive_stream(RngRoot(7), "proj", 1).normals(100)
    assert np.any(a != b)


def test_distinct_seed_differs():
    a = derive_stream(RngRoot(7), "proj", 0).normals(100)
    b = derive_stream(RngRoot(8), "proj", 0).normals(100)
    assert np.any(a != b)


def test_distinct_label_differs():
    a = derive_stream(RngRoot(7), "proj", 3).normals(64)
    b = derive_stream(RngRoot(7), "noisex", 3).normals(64)
    assert np.any(a != b)


def test_chunked_draws_continue_the_same_sequence():
    s1 = derive_stream(RngRoot(11), "chunks", 0)
    s2 = derive_stream(RngRoot(11), "chunks", 0)
    whole = s1.normals(10)
    parts = np.concatenate([s2.normals(3), s2.normals(7)])
    assert np.array_equal(whole, parts)


def test_standard_normal_moments():
    z = derive_stream(RngRoot(123), "moments", 0).normals(10**6)
    assert abs(float(z.mean())) < 0.005
    assert 0.99 <= float(z.var(ddof=1)) <= 1.01


def test_scalar_draw_matches_vector_head():
    s1 = derive_stream(RngRoot(5), "scalar", 2)
    s2 = derive_stream(RngRoot(5), "scalar", 2)
    assert draw_standard_normal(s1) == s2.normals(1)[0]


def test_uniforms_live_in_open_interval():
    u = derive_stream(RngRoot(1), "unif", 0).uniforms(10**5)
    assert u.min() > 0.0
    assert u.max() < 1.0


def test_pairwise_stream_correlation_is_negligible():
    n = 10**5
    a = derive_stream(RngRoot(42), "corr", 0).normals(n)
    b = derive_stream(RngRoot(42), "corr", 1).normals(n)
    r = float(np.corrcoef(a, b)[0, 1])
    assert abs(r) < 0.01


def test_child_roots_are_distinct_and_stable():
    root = RngRoot(42)
    c1 = root.child("run", 0)
    c2 = root.child("run", 1)
    assert c1 == root.child("run", 0)
    assert c1.seed != c2.seed


@pytest.mark.parametrize("bad", [-1, 2**64, 1.5, "42"])
def test_invalid_seed_rejected(bad):
    with pytest.raises((ValueError, TypeError)):
        RngRoot(bad)


def test_negative_stream_index_rejected():
    with pytest.raises(ValueError):
        RngStream(RngRoot(0), "proj", -1)
