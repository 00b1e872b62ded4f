"""Tests for SVG rendering."""

import pytest

from lipknot.corpus import corpus
from lipknot.germ_model import tangent_cone
from lipknot.link_core import parse_braid, parse_pd
from lipknot.render import RenderError, render_svg, write_svg


class TestRenderSvg:
    """Element counts and annotations."""

    def test_one_path_per_component(self):
        svg = render_svg(parse_pd("X[1,4,2,3] X[3,2,4,1]"))
        assert svg.startswith("<svg")
        assert svg.count('class="component"') == 2
        assert svg.count('class="crossing"') == 2

    def test_free_loops_widen_canvas(self):
        svg = render_svg(parse_pd("O O"))
        assert svg.count('class="component"') == 2
        assert 'width="560"' in svg

    def test_bridge_annotation(self):
        svg = render_svg(corpus("ex3.X"))
        assert svg.count('class="bridge"') == 1
        assert "q=3, β=2" in svg

    def test_pinch_annotation(self):
        svg = render_svg(corpus("ex2.X1"))
        assert "tord=3/2" in svg

    def test_pinched_link(self):
        cone = tangent_cone(corpus("ex3.X"))
        svg = render_svg(cone)
        assert svg.count('class="component"') == 2
        assert 'class="pinch"' in svg

    def test_deterministic(self):
        d = parse_braid("braid 3: s1 s2^-1 s1 s2^-1")
        assert render_svg(d) == render_svg(d)


class TestWriteSvg:
    def test_writes_file(self, tmp_path):
        path = write_svg(parse_pd("O"), tmp_path / "unknot.svg")
        assert path.read_text(encoding="utf-8").startswith("<svg")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(RenderError) as exc_info:
            write_svg(parse_pd("O"), tmp_path / "missing" / "unknot.svg")
        assert "Cannot write SVG" in str(exc_info.value)
