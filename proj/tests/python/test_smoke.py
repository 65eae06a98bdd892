import numpy as np
import pytest

import opcert


def test_catalog_lists_six_spaces():
    assert len(opcert.catalog_names()) == 6
    assert "two-circles" in opcert.catalog_names()


def test_unit_of_full_matrix_algebra_is_unitary():
    space = opcert.Space.catalog("m2-full")
    report = opcert.certify_unitary(space, level=1)
    assert report.verdict == "pass"
    assert report.margin < 1e-6


def test_non_unitary_diagonal_fails_with_three_quarters():
    basis = [np.diag([1, 0]), np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]), np.diag([0, 1])]
    space = opcert.Space.from_matrices(basis, unit=[1, 0, 0, 1])
    report = opcert.certify_unitary(space, u=[1, 0, 0, 0.5], level=1)
    assert report.verdict == "fail"
    assert report.margin >= 0.75 - 1e-4


def test_upper_triangular_span_is_not_a_system():
    space = opcert.Space.catalog("m2-upper")
    assert opcert.detect_operator_system(space).verdict == "fail"
    assert opcert.ambient_system_check(space).verdict == "fail"


def test_involution_of_e12_is_e21():
    space = opcert.Space.catalog("m2-full")
    coeffs, residual, bound = opcert.recover_involution(space, [0, 1, 0, 0], t=100.0)
    expected = np.array([0, 0, 1, 0])
    assert np.max(np.abs(np.array(coeffs) - expected)) <= bound


def test_space_file_round_trip_is_byte_identical():
    text = opcert.Space.catalog("m2-sym3").to_json()
    assert opcert.Space.from_json(text).to_json() == text


def test_circle_hermitian_dimensions():
    space = opcert.Space.catalog("circle-1zzbar")
    assert opcert.hermitian_dims(space, [1, 0, 0])[0] == 3
    assert opcert.hermitian_dims(space, [0, 1, 0])[0] == 1


def test_bad_input_raises_value_error():
    with pytest.raises(ValueError):
        opcert.Space.from_json("{}")
    with pytest.raises(ValueError):
        opcert.Space.catalog("no-such-space")
