"""CLI subcommands, JSON determinism, SVG rendering."""

import json
import math

import numpy as np
import pytest

from polyft import jsonio
from polyft.cli import main
from polyft.errors import WrongDimension
from polyft.solver import Instance, ft_locus
from polyft.svgout import render_svg

HEX_SITES = "[[0,0],[1,0],[0.5,0.8660254037844386]]"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCLI:
    def test_solve_cube(self, capsys):
        code, out, _ = run(
            capsys, "solve", "--ball", "cube", "--sites", "[[0,0,0],[1,1,1],[2,0,1]]"
        )
        assert code == 0
        payload = json.loads(out)
        assert {"x", "value"} <= set(payload)
        # cross-checked against the grid oracle in test_oracle-style runs
        from polyft.scenarios import builtin_ball
        from polyft.oracle import grid_minimize

        inst = Instance(
            builtin_ball("cube"),
            np.array([[0, 0, 0], [1, 1, 1], [2, 0, 1]], dtype=float),
        )
        report = grid_minimize(inst)
        assert payload["value"] <= report.min_value + 1e-6

    def test_audit_octahedron(self, capsys):
        code, out, _ = run(capsys, "audit", "--ball", "octahedron", "--n", "3")
        assert code == 0
        assert json.loads(out)["verdict"] == "unique_for_all"

    def test_locus_json_roundtrip_and_determinism(self, capsys, tmp_path):
        args = ("locus", "--ball", "hexagon", "--sites", HEX_SITES)
        code1, out1, _ = run(capsys, *args)
        code2, out2, _ = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2  # byte-identical
        payload = json.loads(out1)
        assert payload["tag"] == "polygon"
        assert payload["certificate"]["mode"] == "exact"

    def test_verify_subcommand(self, capsys):
        code, out, _ = run(
            capsys,
            "verify",
            "--ball",
            "hexagon",
            "--sites",
            HEX_SITES,
            "--point",
            "[0.5, 0.28867513459481287]",
        )
        assert code == 0
        assert json.loads(out)["optimal"] is True
        code, out, _ = run(
            capsys,
            "verify",
            "--ball",
            "hexagon",
            "--sites",
            HEX_SITES,
            "--point",
            "[10, 0]",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["optimal"] is False
        assert payload["margin"] > 0

    def test_case_svg(self, capsys, tmp_path):
        svg_path = tmp_path / "triangle.svg"
        code, out, _ = run(
            capsys, "case", "hexagon_triangle", "--svg", str(svg_path)
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["passed"] is True
        assert payload["svg"].startswith("<svg")  # embedded scene for 2d cases
        doc = svg_path.read_text()
        assert doc.startswith("<svg")
        assert doc.count("<polygon") == 2  # ball outline + solution fill

    def test_case_3d_embeds_vertex_dump(self, capsys):
        code, out, _ = run(capsys, "case", "cube_segment")
        assert code == 0
        payload = json.loads(out)
        assert "vertex_dump" in payload
        assert len(payload["vertex_dump"]["ball_vertices"]) == 8

    def test_case_failure_exit_code(self, capsys):
        code, _, err = run(capsys, "case", "no_such_case")
        assert code == 3
        assert "error" in err

    def test_invalid_inputs_exit_one(self, capsys):
        code, _, _ = run(capsys, "solve", "--ball", "klein_bottle", "--sites", "[[0,0]]")
        assert code == 1
        code, _, _ = run(capsys, "solve", "--ball", "hexagon", "--sites", "not json [")
        assert code == 1
        code, _, _ = run(capsys, "solve", "--ball", "tetrahedron", "--sites", "[[0,0,0]]")
        assert code == 1
        code, _, _ = run(capsys, "locus", "--ball", "hexagon", "--sites", "[]")
        assert code == 1

    def test_verify_no_extension_flag(self, capsys):
        code, _, err = run(
            capsys,
            "verify",
            "--ball",
            "hexagon",
            "--sites",
            "[[0,0],[1,0],[3,0]]",
            "--point",
            "[1,0]",
            "--no-extension",
        )
        assert code == 1
        assert "coincide" in err

    def test_oracle_check(self, capsys):
        code, out, _ = run(
            capsys,
            "oracle-check",
            "--ball",
            "hexagon",
            "--sites",
            "[[0,0],[2,0],[4,0]]",
            "--resolution",
            "0.01",
        )
        assert code == 0
        assert json.loads(out)["confirmed"] is True

    def test_consistent_sets_cli(self, capsys):
        code, out, _ = run(
            capsys,
            "consistent-sets",
            "--ball",
            "cube",
            "--n",
            "3",
            "--span-filter",
            "line",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["count"] == 2

    def test_scene_file_and_out_file(self, capsys, tmp_path):
        scene = tmp_path / "scene.json"
        scene.write_text(json.dumps({"ball": "hexagon", "sites": [[0, 0], [2, 0]]}))
        out_file = tmp_path / "result.json"
        code, out, _ = run(
            capsys, "locus", "--scene", f"@{scene}", "--out", str(out_file)
        )
        assert code == 0
        assert out == ""
        assert json.loads(out_file.read_text())["tag"] == "segment"

    def test_tolerance_env_override(self, capsys, monkeypatch):
        monkeypatch.setenv("FT_TOLERANCE", "bogus")
        code, _, err = run(capsys, "solve", "--ball", "hexagon", "--sites", "[[0,0]]")
        assert code == 1
        monkeypatch.setenv("FT_TOLERANCE", "1e-10")
        code, _, _ = run(capsys, "solve", "--ball", "hexagon", "--sites", "[[0,0]]")
        assert code == 0

    def test_3d_svg_falls_back_to_dump(self, capsys, tmp_path):
        path = tmp_path / "dump.svg"
        code, _, _ = run(
            capsys,
            "locus",
            "--ball",
            "cube",
            "--sites",
            "[[0,0,0],[2,2,2]]",
            "--svg",
            str(path),
        )
        assert code == 0
        assert path.read_text().startswith("# vertex dump")


class TestJsonIO:
    def test_float_formatting_12_digits(self):
        text = jsonio.dumps({"value": 1.0 / 3.0})
        assert "0.333333333333" in text  # 12 significant digits

    def test_parse_ball_dim_mismatch(self):
        with pytest.raises(Exception):
            jsonio.parse_ball({"dim": 3, "vertices": [[1, 0], [-1, 0], [0, 1], [0, -1]]})

    def test_instance_roundtrip(self, hexagon):
        inst = Instance(hexagon, np.array([[0.0, 0.0], [1.0, 2.0]]))
        payload = jsonio.instance_to_json(inst)
        back = jsonio.parse_instance(json.loads(jsonio.dumps(payload)))
        assert np.allclose(back.sites, inst.sites)
        assert back.ball.num_vertices == hexagon.num_vertices


class TestSVG:
    def test_deterministic_and_layered(self, hexagon):
        sites = np.array([[0.0, 0.0], [1.0, 0.0]])
        inst = Instance(hexagon, sites)
        fts = ft_locus(inst)
        a = render_svg(hexagon, sites, fts)
        b = render_svg(hexagon, sites, fts)
        assert a == b
        assert a.count("<circle") == 2  # two site markers
        assert "<line" in a  # segment solution

    def test_point_marker(self, hexagon):
        sites = np.array([[0.0, 0.0], [1.0, 0.0], [3.0, 0.0]])
        inst = Instance(hexagon, sites)
        fts = ft_locus(inst)
        doc = render_svg(hexagon, sites, fts)
        assert doc.count("<circle") == 4  # 3 sites + 1 solution dot

    def test_cone_rays_rendered(self, hexagon):
        from polyft.geometry import norming_functionals
        from polyft.solver import cone as make_cone

        df = norming_functionals(hexagon, np.array([1.0, 0.1]))
        c = make_cone(hexagon, np.array([1.0, 0.1]), df.generators[0])
        doc = render_svg(hexagon, None, None, cones=[c])
        assert "stroke-dasharray" in doc

    def test_rejects_3d(self, cube):
        with pytest.raises(WrongDimension):
            render_svg(cube, None, None)
