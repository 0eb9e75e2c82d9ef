"""SVG output of the tiling."""
import xml.etree.ElementTree as ET

import pytest

from pentlab.render import render_svg, to_disk
from pentlab.tables import sphere_sizes

NS = "{http://www.w3.org/2000/svg}"


@pytest.mark.parametrize("radius", [0, 1, 3])
def test_chamber_count(radius):
    root = ET.fromstring(render_svg(radius))
    chambers = [p for p in root.iter(NS + "path") if p.get("class") == "chamber"]
    assert len(chambers) == sum(sphere_sizes(radius))


def test_metadata_and_axis():
    svg = render_svg(2, ["0213"], size=300, provenance={"seed": 4, "code_version": "x"})
    root = ET.fromstring(svg)
    entries = {e.get("key"): e.text for e in root.iter(NS + "entry")}
    assert entries == {"code_version": "x", "seed": "4"}
    axes = [p for p in root.iter(NS + "path") if p.get("class") == "axis"]
    assert axes[0].get("data-word") == "0213"
    assert render_svg(2, ["0213"], size=300, provenance={"seed": 4, "code_version": "x"}) == svg


def test_projection_stays_in_disk():
    import numpy as np
    from pentlab.tables import ElementTable
    pts = to_disk(ElementTable(5).centers(5))
    assert np.all(np.hypot(pts[:, 0], pts[:, 1]) < 1)
