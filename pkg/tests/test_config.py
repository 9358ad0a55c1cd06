import json
import textwrap

import pytest

from plane_attractors.config import (ConfigError, LineDict, load, loads, parse_continuation,
                                     parse_hopf, parse_ifs, region_from)
from plane_attractors.grid import BitGrid, Disk, Rect, new_grid
from plane_attractors.pgm import write_pgm

GOOD = textwrap.dedent("""\
    {
      "maps": [
        {"a": 0.5, "b": 0, "c": 0, "d": 0.5, "e": 0, "f": 0},
        {"a": 0.5, "b": 0, "c": 0, "d": 0.5, "e": 0.5, "f": 0}
      ],
      "probabilities": [1, 3],
      "bounds": [-0.1, -0.1, 1.1, 0.1],
      "resolution": 100
    }
    """)


def test_parse_ifs():
    cfg = parse_ifs(loads(GOOD))
    assert len(cfg.system) == 2 and cfg.system.probabilities == (1.0, 3.0)
    assert cfg.bounds == (-0.1, -0.1, 1.1, 0.1) and cfg.resolution == 100.0
    assert cfg.system.maps[1].e == 0.5


def test_key_lines_recorded():
    doc = loads(GOOD)
    assert isinstance(doc, LineDict)
    assert doc.line_of("maps") == 2 and doc.line_of("resolution") == 8
    assert doc["maps"][1].line == 4


def test_syntax_error_line():
    with pytest.raises(ConfigError) as err:
        loads('{\n  "maps": [\n    {"a": 1,}\n  ]\n}')
    assert err.value.line == 3


def test_bad_coefficient_names_key_and_line():
    text = GOOD.replace('"d": 0.5, "e": 0.5', '"d": "half", "e": 0.5')
    with pytest.raises(ConfigError) as err:
        parse_ifs(loads(text))
    assert err.value.key == "maps[1].d" and err.value.line == 4
    assert "maps[1].d" in str(err.value) and "line 4" in str(err.value)


@pytest.mark.parametrize("mutation, key", [
    (lambda d: d.pop("maps"), "maps"),
    (lambda d: d["maps"][0].pop("f"), "maps[0].f"),
    (lambda d: d["maps"][0].update(g=1), "maps[0].g"),
    (lambda d: d.update(probabilities=[1]), "probabilities"),
    (lambda d: d.update(bounds=[0, 0, 0, 1]), "bounds"),
    (lambda d: d.update(bounds=[0, 0, 1]), "bounds"),
    (lambda d: d.update(resolution=-5), "resolution"),
    (lambda d: d.update(resolution=True), "resolution"),
    (lambda d: d["maps"][0].update(a=0, d=0), "maps[0]"),
])
def test_validation_errors(mutation, key):
    doc = json.loads(GOOD)
    mutation(doc)
    with pytest.raises(ConfigError) as err:
        parse_ifs(loads(json.dumps(doc, indent=2)))
    assert err.value.key == key


def test_duplicate_key_lines_ignore_nested_objects():
    text = '{\n "block": {"type": "disk",\n  "radius": 0.5},\n "radius": 3\n}'
    doc = loads(text)
    assert doc.line_of("radius") == 4
    assert doc["block"].line_of("radius") == 3


def test_regions(tmp_path):
    assert region_from(loads('{"type": "disk", "center": [1, 2], "radius": 3}'), "r") == Disk(1, 2, 3)
    assert region_from(loads('{"type": "rect", "bounds": [0, 0, 1, 1]}'), "r") == Rect(0, 0, 1, 1)
    g = new_grid((0, 0, 1, 1), 10, Disk(0.5, 0.5, 0.3))
    write_pgm(g, tmp_path / "q.pgm")
    q = region_from(loads('{"type": "pgm", "path": "q.pgm"}'), "block", str(tmp_path))
    assert isinstance(q, BitGrid) and q == g
    with pytest.raises(ConfigError):
        region_from(loads('{"type": "hexagon"}'), "block")
    with pytest.raises(ConfigError):
        region_from(loads('{"type": "disk"}'), "block")
    with pytest.raises(ConfigError):
        region_from(loads('{"type": "pgm", "path": "missing.pgm"}'), "block", str(tmp_path))


CONT = {
    "maps": [{"a": 0.5, "b": 0, "c": 0, "d": 0.5,
              "e": {"base": 0.0, "per_lambda": 0.03}, "f": {"base": 0.0, "per_lambda": 0.04}}],
    "bounds": [-0.6, -0.6, 0.6, 0.6], "resolution": 50,
    "block": {"type": "disk", "radius": 0.5},
    "lambdas": [0, 0.05, 0.1],
    "contractive": True,
}


def test_parse_continuation():
    cfg = parse_continuation(loads(json.dumps(CONT)))
    F = cfg.family(0.1)
    assert F.maps[0].e == pytest.approx(0.003) and F.maps[0].f == pytest.approx(0.004)
    assert cfg.lambdas == [0.0, 0.05, 0.1] and cfg.contractive
    assert cfg.block_grid().count == new_grid(cfg.bounds, 50, Disk(0, 0, 0.5)).count


@pytest.mark.parametrize("mutation, key", [
    (lambda d: d.pop("block"), "block"),
    (lambda d: d.pop("lambdas"), "lambdas"),
    (lambda d: d.update(lambdas=[0.1, 0.0]), "lambdas"),
    (lambda d: d.update(lambdas=[]), "lambdas"),
    (lambda d: d.pop("bounds"), "bounds"),
    (lambda d: d.update(contractive="yes"), "contractive"),
    (lambda d: d["maps"][0].update(e={"per_lambda": 1}), "maps[0].e.base"),
])
def test_continuation_errors(mutation, key):
    doc = json.loads(json.dumps(CONT))
    mutation(doc)
    with pytest.raises(ConfigError) as err:
        parse_continuation(loads(json.dumps(doc)))
    assert err.value.key == key


def test_parse_hopf():
    cfg = parse_hopf(loads('{"family": "neimark-sacker", "params": {"omega": 1.1},'
                           ' "lambdas": [0.01, 0.04], "perturb": [0.01]}'))
    assert cfg.params == {"omega": 1.1} and cfg.lambdas == [0.01, 0.04] and cfg.perturb == [0.01]
    with pytest.raises(ConfigError) as err:
        parse_hopf(loads('{"params": {"spin": 1}}'))
    assert err.value.key == "params.spin"
    with pytest.raises(ConfigError):
        parse_hopf(loads('{"family": "henon"}'))


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "absent.json")
    (tmp_path / "list.json").write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load(tmp_path / "list.json")
