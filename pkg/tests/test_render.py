import math
import re
import xml.etree.ElementTree as ET

import pytest

from ellipsoid_ph.estimators import RipsPersistence
from ellipsoid_ph.persistence import Barcode
from ellipsoid_ph.pointcloud import generate_circle
from ellipsoid_ph.render import MARGIN_LEFT, MARGIN_RIGHT, WIDTH, render_barcode_svg

NS = {"svg": "http://www.w3.org/2000/svg"}
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT


def bars(svg):
    root = ET.fromstring(svg.split("\n", 1)[1])
    return root, root.findall("svg:rect[@class='bar']", NS)


def test_empty_barcode_is_axes_only():
    root, rects = bars(render_barcode_svg(Barcode()))
    assert rects == []
    assert root.findall("svg:line[@class='axis']", NS)
    assert len(root.findall("svg:line[@class='tick']", NS)) == 6


def test_essential_bar_spans_axis_with_arrow():
    root, rects = bars(render_barcode_svg(Barcode(((0, 0.0, math.inf),)), rmax=2.0))
    assert len(rects) == 1
    assert float(rects[0].get("width")) == pytest.approx(PLOT_W)
    assert len(root.findall("svg:path[@class='arrow']", NS)) == 1


def test_finite_bar_geometry():
    _, rects = bars(render_barcode_svg(Barcode(((1, 0.5, 1.5),)), rmax=2.0))
    assert float(rects[0].get("x")) == pytest.approx(MARGIN_LEFT + PLOT_W / 4, abs=1e-3)
    assert float(rects[0].get("width")) == pytest.approx(PLOT_W / 2, abs=1e-3)
    assert rects[0].get("data-dim") == "1"


def test_circle_has_one_long_degree_one_bar():
    bc = RipsPersistence(rmax=1.0).fit().barcode(generate_circle(20, 1.0))
    _, rects = bars(render_barcode_svg(bc))
    long_h1 = [r for r in rects if r.get("data-dim") == "1" and float(r.get("width")) > PLOT_W / 2]
    assert len(long_h1) == 1


def test_rmax_from_barcode_and_title_escaped():
    svg = render_barcode_svg(Barcode(((0, 0.0, 1.0),), rmax=4.0), title="a < b")
    assert re.search(r'data-rmax="4.0"', svg)
    assert "a &lt; b" in svg


def test_degree_labels():
    svg = render_barcode_svg(Barcode(((0, 0.0, 1.0), (1, 0.2, 0.4))))
    assert ">H0<" in svg and ">H1<" in svg
