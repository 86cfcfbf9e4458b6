import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nilgrowth.errors import UsageError
from nilgrowth.geometry import explore
from nilgrowth.convex import box
from nilgrowth.lattice import standard_lattice
from nilgrowth.report import emit_report, format_value, render_csv, to_jsonable


def test_format_values():
    assert format_value(Fraction(3, 4)) == "3/4"
    assert format_value(Fraction(6, 3)) == "2"
    assert format_value(True) == "true"
    assert format_value(3.14159265) == "3.14159"
    assert format_value(math.inf) == "inf"
    assert format_value(None) == ""
    assert format_value([1, Fraction(1, 2)]) == '[1,"1/2"]'


def test_empty_results_give_header_only_csv():
    text = emit_report([], "csv", columns=["scale", "rank"], header={"seed": 7})
    assert text == "# seed: 7\nscale,rank\n"


def test_exploration_rows_one_per_scale():
    rep = explore(standard_lattice(2), [box([1, Fraction(1, 2)]), box([1, 1]), box([2, 2])])
    text = render_csv(rep.rows())
    lines = text.strip().splitlines()
    assert lines[0] == "scale,rank,covolume,changed,index_from_previous"
    assert len(lines) == 4


@given(st.dictionaries(st.text(min_size=1, max_size=5),
                       st.one_of(st.integers(), st.booleans(), st.text(max_size=5),
                                 st.lists(st.integers(), max_size=3)), max_size=5))
def test_json_round_trip(d):
    text = emit_report(d, "json")
    assert json.loads(text) == to_jsonable(d)
    assert emit_report(json.loads(text), "json") == text


def test_bad_format_and_path(tmp_path):
    with pytest.raises(UsageError):
        emit_report([], "xml")
    with pytest.raises(UsageError, match="nope"):
        emit_report([], "csv", path=str(tmp_path / "nope" / "out.csv"), columns=["a"])


def test_writes_file(tmp_path):
    p = tmp_path / "r.csv"
    emit_report([{"a": Fraction(1, 3)}], "csv", path=str(p))
    assert p.read_text() == "a\n1/3\n"
