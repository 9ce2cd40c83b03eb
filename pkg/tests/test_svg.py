"""The standalone SVG line-chart renderer."""

import xml.etree.ElementTree as ET

import pytest

from scalelaw.errors import DomainError, InputError
from scalelaw.svg import render_line_chart

NS = "{http://www.w3.org/2000/svg}"


def _chart(**kwargs):
    defaults = dict(title="t", x_label="x", y_label="y")
    defaults.update(kwargs)
    return render_line_chart(
        kwargs.pop("series", [("a", [1e6, 1e7, 1e8], [3.0, 2.0, 2.5])]),
        **{k: v for k, v in defaults.items() if k != "series"},
    )


def test_chart_is_wellformed_xml_with_expected_parts():
    svg = _chart()
    root = ET.fromstring(svg)
    assert root.tag == f"{NS}svg"
    assert len(root.findall(f".//{NS}polyline")) == 1
    texts = [t.text for t in root.findall(f".//{NS}text")]
    assert "t" in texts and "x" in texts and "y" in texts and "a" in texts
    # log-x decade ticks
    assert "1e6" in texts and "1e8" in texts


def test_linear_x_axis():
    svg = render_line_chart(
        [("lin", [0.0, 1.0, 2.0], [1.0, 4.0, 9.0])],
        title="t", x_label="x", y_label="y", log_x=False,
    )
    ET.fromstring(svg)


def test_labels_are_escaped():
    svg = render_line_chart(
        [("a<b>&\"c\"", [1e6, 1e7], [1.0, 2.0])],
        title="<script>alert(1)</script>", x_label="x&y", y_label="y",
    )
    root = ET.fromstring(svg)  # would raise on unescaped markup
    texts = [t.text for t in root.findall(f".//{NS}text")]
    assert '<script>alert(1)</script>' in texts
    assert 'a<b>&"c"' in texts
    assert "<script>" not in svg  # stored only in escaped form


def test_multi_series_palette_cycles():
    series = [(f"s{i}", [1e6, 1e7], [1.0, 2.0]) for i in range(9)]
    root = ET.fromstring(render_line_chart(series, title="t", x_label="x", y_label="y"))
    polylines = root.findall(f".//{NS}polyline")
    assert len(polylines) == 9
    strokes = [p.get("stroke") for p in polylines]
    assert strokes[0] == strokes[7]  # palette of 7 wraps around


def test_render_validation():
    with pytest.raises(InputError, match="at least one series"):
        render_line_chart([], title="t", x_label="x", y_label="y")
    with pytest.raises(InputError, match="length >= 2"):
        render_line_chart([("a", [1e6], [1.0])], title="t", x_label="x", y_label="y")
    with pytest.raises(InputError, match="matching x/y"):
        render_line_chart([("a", [1e6, 1e7], [1.0])], title="t", x_label="x", y_label="y")
    with pytest.raises(DomainError, match="finite"):
        render_line_chart([("a", [1e6, 1e7], [1.0, float("nan")])], title="t", x_label="x", y_label="y")
    with pytest.raises(DomainError, match="positive"):
        render_line_chart([("a", [-1.0, 1.0], [1.0, 2.0])], title="t", x_label="x", y_label="y", log_x=True)
