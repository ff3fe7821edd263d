"""Chart and cover files."""

import json

import pytest

from algebroid_forge import fixtures as F
from algebroid_forge.fixtures import fixture_path
from algebroid_forge.io import (
    InputError,
    chart_to_dict,
    cover_from_dict,
    dumps,
    dumps_chart,
    load_chart,
    load_cover,
    loads_chart,
)

ALL_CHARTS = {**F.passing_charts(), **F.auxiliary_charts(), **F.failing_charts()}


@pytest.mark.parametrize("name", sorted(ALL_CHARTS))
def test_shipped_chart_files_match_builders(name):
    assert load_chart(fixture_path(name)) == ALL_CHARTS[name]


@pytest.mark.parametrize("name", sorted(ALL_CHARTS))
def test_emitted_chart_re_parses(name):
    s = ALL_CHARTS[name]
    text = dumps_chart(s)
    assert loads_chart(text) == s
    assert dumps_chart(loads_chart(text)) == text


@pytest.mark.parametrize("name", sorted(F.covers()))
def test_shipped_cover_files_match_builders(name):
    on_disk = json.loads(fixture_path(name).read_text())
    assert on_disk == F.covers()[name]
    cover, cext, cdo = load_cover(fixture_path(name))
    assert cover.validate() == []


def test_dumps_is_sorted_and_stable():
    text = dumps({"b": 1, "a": {"d": 2, "c": 3}})
    assert text == '{\n  "a": {\n    "c": 3,\n    "d": 2\n  },\n  "b": 1\n}\n'


def test_invalid_json_reports_position():
    with pytest.raises(InputError, match="line 2, column"):
        loads_chart('{\n  "format": }')


def test_bad_form_text_reports_column():
    d = chart_to_dict(F.cdo_twisted())
    d["alpha"] = "x*y dx^^dy^dz"
    with pytest.raises(InputError, match="column"):
        loads_chart(json.dumps(d))


@pytest.mark.parametrize("field, value, message", [
    ("format", "other", "format"),
    ("kind", "groupoid", "kind"),
])
def test_bad_fields(field, value, message):
    d = chart_to_dict(F.cdo_standard())
    d[field] = value
    with pytest.raises(InputError, match=message):
        loads_chart(json.dumps(d))


def test_non_closed_alpha_loads_but_fails_its_precondition():
    d = chart_to_dict(F.cdo_A4())
    d["alpha"] = "w dx^dy^dz"
    s = loads_chart(json.dumps(d))
    status = {name: ok for name, ok, _ in s.precondition_report()}
    assert status["alpha-slot"] is False


def test_inconsistent_cover_is_rejected():
    d = F.sl2_affine_cover_dict()
    d["transitions"][0]["images"] = ["y", "x", "z"]
    with pytest.raises(InputError, match="transitions"):
        cover_from_dict(d)


def test_missing_file():
    with pytest.raises(InputError):
        load_chart("/nonexistent/chart.json")
