import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from c0model import serialize as io
from c0model.corona import bezout_solve
from c0model.equivalence import maximality_report, similarity_synthesize
from c0model.errors import InvalidInput
from c0model.inner import BlaschkeProduct, RationalFunction
from c0model.modelspace import JordanModel, jordan_block
from c0model.planted import random_rational, random_theta

thetas = st.lists(st.tuples(st.complex_numbers(max_magnitude=0.9), st.integers(1, 3)), max_size=5).map(
    BlaschkeProduct.from_zeros
)


def round_trip(obj, kind):
    text = io.dumps(obj)
    back = io.from_jsonable(kind, json.loads(text))
    assert io.dumps(back) == text
    return back


def test_format_float_keeps_every_bit():
    for x in (0.1, 1 / 3, -2.5e-300, 1e22, 3.0):
        assert float(io.format_float(x)) == x
    assert io.format_float(3.0) == "3.0"
    with pytest.raises(InvalidInput):
        io.format_float(float("nan"))


def test_negative_zero_prints_as_zero():
    assert io.dumps(complex(-0.0, -0.0), indent=None) == "[0.0, 0.0]"


@given(thetas)
@settings(max_examples=50, deadline=None)
def test_blaschke_round_trip(theta):
    back = round_trip(theta, "blaschke")
    assert back == theta


def test_rational_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(20):
        u = random_rational(rng, 6)
        back = round_trip(u, "rational")
        np.testing.assert_array_equal(back.numerator, u.numerator)
        np.testing.assert_array_equal(back.denominator, u.denominator)


def test_symbol_accepts_either_record():
    theta = BlaschkeProduct.from_zeros([0.3])
    assert isinstance(io.symbol_from_dict(io.blaschke_to_dict(theta)), BlaschkeProduct)
    assert isinstance(io.symbol_from_dict(io.rational_to_dict(RationalFunction.constant(2.0))), RationalFunction)


def test_matrix_and_operator_round_trip():
    s = jordan_block(random_theta(np.random.default_rng(1), 4)).matrix
    text = io.dumps(io.matrix_to_dict(s))
    back = io.from_jsonable("matrix", json.loads(text))
    np.testing.assert_array_equal(back, s)
    assert io.dumps(io.matrix_to_dict(back)) == text
    np.testing.assert_array_equal(io.from_jsonable("operator", io.matrix_to_dict(s)).matrix, s)


def test_jordan_corona_certificate_maximality_round_trip():
    a = BlaschkeProduct.from_zeros([0.3, -0.2j])
    b = BlaschkeProduct.from_zeros([0.3])
    round_trip(JordanModel((a, b)), "jordan")
    round_trip(bezout_solve(BlaschkeProduct.from_zeros([0.0]), BlaschkeProduct.from_zeros([0.5])), "corona")
    s = jordan_block(a).matrix
    cert = round_trip(similarity_synthesize(s, s, 0.5, 0.9), "certificate")
    assert cert.residual < 1e-12
    rep = round_trip(maximality_report(s), "maximality")
    assert rep.is_maximal()


def test_save_and_load(tmp_path):
    theta = BlaschkeProduct.from_zeros([(0.25, 2), 0.5j])
    path = tmp_path / "theta.json"
    io.save(theta, path)
    assert io.load(path, "blaschke") == theta


@pytest.mark.parametrize(
    "kind, doc",
    [
        ("blaschke", {"zeros": []}),
        ("blaschke", {"constant": [1.0, 0.0], "zeros": [{"re": 1.5, "im": 0.0}]}),
        ("blaschke", {"constant": [1.0, 0.0], "zeros": [{"re": 0.1, "im": 0.0, "mult": 1.5}]}),
        ("blaschke", {"constant": [2.0, 0.0], "zeros": []}),
        ("matrix", {"n": 2, "data": [[0.0, 0.0]]}),
        ("matrix", {"n": 0, "data": []}),
        ("operator", {"n": 1, "data": [[2.0, 0.0]]}),
        ("rational", {"num": [], "den": [[1.0, 0.0]]}),
        ("rational", {"num": [[1.0, 0.0]], "den": [[1.0, 0.0], [-2.0, 0.0]]}),
        ("matrix", [1, 2]),
        ("nonsense", {}),
    ],
)
def test_malformed_records(kind, doc):
    with pytest.raises(InvalidInput):
        io.from_jsonable(kind, doc)


def test_load_errors(tmp_path):
    with pytest.raises(InvalidInput):
        io.load(tmp_path / "missing.json", "blaschke")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidInput):
        io.load(bad, "blaschke")
