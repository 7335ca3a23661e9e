import json
from fractions import Fraction

import pytest

from k3lg.errors import InvalidInput, ParseError
from k3lg.hodge import PeriodVector, RealField
from k3lg.jsonio import (
    digest,
    dumps,
    lattice_from_dict,
    lattice_to_dict,
    period_from_dict,
    period_to_dict,
    plain,
    quadspace_from_dict,
    quadspace_to_dict,
    read_json,
)
from k3lg.k3lattice import IntegralLattice
from k3lg.quadform import QuadSpace


def test_quadspace_round_trip():
    V = QuadSpace([[Fraction(1, 2), 3], [3, Fraction(-7, 3)]])
    d = json.loads(dumps(quadspace_to_dict(V)))
    assert d["gram"][0] == ["1/2", "3"]
    assert quadspace_from_dict(d) == V


def test_lattice_round_trip():
    L = IntegralLattice([[2, 1], [1, -4]])
    assert lattice_from_dict(json.loads(dumps(lattice_to_dict(L)))).gram == L.gram


def test_size_mismatch_rejected():
    with pytest.raises(InvalidInput):
        quadspace_from_dict({"n": 3, "gram": [[1]]})
    with pytest.raises(InvalidInput):
        lattice_from_dict({"rank": 2, "gram": [[2]]})


@pytest.mark.parametrize("w", [
    PeriodVector.exact([5, 0, 4], [0, 3, 0]),
    PeriodVector.exact([(0, 1), 0, Fraction(1, 3)], [0, (1, -1), 0], d=(2, 1), field=RealField([1, 0, -2], (1, 2))),
    PeriodVector.approx([Fraction(1, 3), 0], [0, 1], Fraction(1, 10**6)),
])
def test_period_round_trip(w):
    again = period_from_dict(json.loads(dumps(period_to_dict(w))))
    assert (again.mode, again.x, again.y, again.d, again.tau) == (w.mode, w.x, w.y, w.d, w.tau)


def test_plain_refuses_floats():
    with pytest.raises(TypeError):
        plain({"a": 0.5})


def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [Fraction(1, 2)]}) == digest({"b": ["1/2"], "a": 1})


def test_read_json_errors(tmp_path):
    with pytest.raises(ParseError):
        read_json(tmp_path / "nope.json")
    (tmp_path / "x.json").write_text("[1,")
    with pytest.raises(ParseError):
        read_json(tmp_path / "x.json")
