import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecgbounds.basis_io import (basis_from_dict, basis_to_dict, dumps_basis, from_lower_triangle, lower_triangle,
                                read_basis, write_basis)
from ecgbounds.errors import ConfigError, DimensionMismatch
from helpers import random_ecg


def test_lower_triangle_layout():
    A = np.array([[1.0, 2.0, 4.0], [2.0, 3.0, 5.0], [4.0, 5.0, 6.0]])
    assert lower_triangle(A) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    assert np.array_equal(from_lower_triangle(lower_triangle(A), 3), A)
    with pytest.raises(DimensionMismatch):
        from_lower_triangle([1.0, 2.0], 2)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), size=st.integers(1, 5))
def test_round_trip_is_byte_identical(tmp_path_factory, seed, n, size):
    rng = np.random.default_rng(seed)
    basis = [random_ecg(rng, n) for _ in range(size)]
    path = tmp_path_factory.mktemp("basis") / "b.json"
    first = write_basis(path, basis).read_bytes()
    again = read_basis(path)
    write_basis(path, again)
    assert path.read_bytes() == first
    for f, g in zip(basis, again):
        assert np.array_equal(f.A, g.A) and np.array_equal(f.s, g.s)


def test_schema(rng):
    data = json.loads(dumps_basis([random_ecg(rng, 2)]))
    assert data["version"] == 1 and data["n_electrons"] == 2
    entry = data["functions"][0]
    assert len(entry["A_lower_triangle_row_major"]) == 3 and len(entry["s"]) == 6


def test_bad_files(tmp_path, rng):
    good = basis_to_dict([random_ecg(rng, 2)])
    with pytest.raises(ConfigError):
        basis_from_dict({**good, "version": 99})
    with pytest.raises(ConfigError):
        basis_from_dict({"version": 1})
    bad = json.loads(json.dumps(good))
    bad["functions"][0]["s"] = [0.0] * 5
    with pytest.raises(DimensionMismatch):
        basis_from_dict(bad)
    path = tmp_path / "broken.json"
    path.write_text("{\n  \"version\": 1,\n")
    with pytest.raises(ConfigError, match="line"):
        read_basis(path)
    with pytest.raises(ValueError):
        basis_to_dict([])
