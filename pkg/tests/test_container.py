import gzip

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from patrec import container
from patrec.container import ContainerError

scalars = st.none() | st.booleans() | st.integers(-2**63, 2**63 - 1) \
    | st.floats(allow_nan=False) | st.text(max_size=20) | st.binary(max_size=20)
values = st.recursive(
    scalars,
    lambda inner: st.lists(inner, max_size=5)
    | st.dictionaries(st.text(max_size=8), inner, max_size=5),
    max_leaves=20)


@given(values)
def test_round_trip(v):
    assert container.decode(container.encode("k", v), "k") == v


@given(st.dictionaries(st.text(max_size=6), st.integers(-2**63, 2**63 - 1), max_size=8))
def test_equal_dicts_encode_identically(d):
    shuffled = dict(reversed(list(d.items())))
    assert container.encode("k", d) == container.encode("k", shuffled)


def test_arrays_keep_shape_and_bits():
    a = np.random.default_rng(0).normal(size=(3, 4))
    back = container.decode(container.encode("k", {"a": a}), "k")["a"]
    assert back.shape == (3, 4)
    np.testing.assert_array_equal(back, a)


def test_kind_mismatch():
    with pytest.raises(ContainerError, match="expected"):
        container.decode(container.encode("stats", 1), "training-set")


def test_version_mismatch():
    raw = bytearray(gzip.decompress(container.encode("k", 1)))
    raw[5] = 99
    with pytest.raises(ContainerError, match="version"):
        container.decode(gzip.compress(bytes(raw)), "k")


def test_corrupt_data():
    with pytest.raises(ContainerError):
        container.decode(b"not gzip at all", "k")
    with pytest.raises(ContainerError):
        container.decode(gzip.compress(b"XXXX"), "k")
    good = gzip.decompress(container.encode("k", [1, 2, 3]))
    with pytest.raises(ContainerError):
        container.decode(gzip.compress(good[:-2]), "k")


def test_integer_overflow():
    with pytest.raises(ContainerError):
        container.encode("k", 2**63)


def test_unencodable_type():
    with pytest.raises(TypeError):
        container.encode("k", object())
