import json

import numpy as np
import pytest

from cstardual import jsonio
from cstardual.cli import main
from cstardual.errors import SchemaError
from cstardual.generators import GenParams, gen_category, gen_morphism_pair, gen_spaceoid
from cstardual.cstarcat import identity_functor


@pytest.fixture
def footnote_file(tmp_path, footnote_category):
    path = tmp_path / "footnote.json"
    path.write_text(jsonio.dump_json(jsonio.category_to_json(footnote_category)))
    return path


@pytest.fixture
def e1_file(tmp_path, e1_spaceoid):
    path = tmp_path / "e1.json"
    path.write_text(jsonio.dump_json(jsonio.spaceoid_to_json(e1_spaceoid)))
    return path


class TestJsonIo:
    def test_spaceoid_round_trip_exact(self, tmp_path):
        S = gen_spaceoid(GenParams(seed=12, n_objects=3, max_base=3,
                                   edge_density=0.8, phase_mode="random"))
        text = jsonio.dump_json(jsonio.spaceoid_to_json(S))
        kind, S2 = jsonio.load_document(text)
        assert kind == "spaceoid"
        assert S2.points == S.points
        assert all(S.nu[k] == S2.nu[k] for k in S.nu)
        assert all(S.cphase[k] == S2.cphase[k] for k in S.cphase)
        assert jsonio.dump_json(jsonio.spaceoid_to_json(S2)) == text

    def test_category_round_trip_exact(self):
        cat, _ = gen_category(GenParams(seed=3, n_objects=2, max_base=3,
                                        edge_density=0.9, scramble="unitary"))
        text = jsonio.dump_json(jsonio.category_to_json(cat))
        kind, cat2 = jsonio.load_document(text)
        assert kind == "category"
        assert all(np.array_equal(cat.comp[k], cat2.comp[k]) for k in cat.comp)
        assert jsonio.dump_json(jsonio.category_to_json(cat2)) == text

    def test_functor_round_trip(self, footnote_category):
        F = identity_functor(footnote_category)
        text = jsonio.dump_json(jsonio.functor_to_json(F))
        kind, F2 = jsonio.load_document(text)
        assert kind == "star_functor"
        assert F2.obj_map == F.obj_map

    def test_morphism_round_trip(self):
        m1, _ = gen_morphism_pair(GenParams(seed=4, n_objects=2, max_base=2,
                                            edge_density=0.9, phase_mode="random"))
        text = jsonio.dump_json(jsonio.morphism_to_json(m1))
        kind, m2 = jsonio.load_document(text)
        assert kind == "spaceoid_morphism"
        assert m2.obj_map == m1.obj_map
        for h in m1.source.all_points():
            assert m2.scalar(h) == pytest.approx(m1.scalar(h))

    def test_bimodule_round_trip(self, nonfull_bimodule):
        text = jsonio.dump_json(jsonio.bimodule_to_json(nonfull_bimodule))
        kind, M2 = jsonio.load_document(text)
        assert kind == "bimodule"
        assert np.array_equal(M2.ipA, nonfull_bimodule.ipA)

    def test_schema_error_paths(self):
        with pytest.raises(SchemaError) as err:
            jsonio.load_document('{"objects": ["A"], "dims": {"A|A": 1}}')
        assert "units" in str(err.value)
        with pytest.raises(SchemaError) as err:
            jsonio.load_document(
                '{"objects": ["A"], "dims": {"A|A": 1}, "units": {"A": [[1, "x"]]}}')
        assert "units" in str(err.value)

    def test_malformed_json_position(self):
        with pytest.raises(SchemaError) as err:
            jsonio.load_document("{broken")
        assert "line 1" in str(err.value)


class TestCli:
    def test_validate_pass(self, footnote_file, capsys):
        assert main(["validate", "--input", str(footnote_file)]) == 0
        assert "valid" in capsys.readouterr().out

    def test_validate_failure_exit_two(self, tmp_path, c2_negative_square, capsys):
        path = tmp_path / "bad.json"
        path.write_text(jsonio.dump_json(jsonio.category_to_json(c2_negative_square)))
        assert main(["validate", "--input", str(path)]) == 2

    def test_spectrum_of_footnote(self, footnote_file, capsys):
        assert main(["--format", "json", "spectrum", "--input",
                     str(footnote_file)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["spaceoid"]["points"]["A|B"]) == 1

    def test_sections_of_e1(self, e1_file, capsys):
        assert main(["--format", "json", "sections", "--input", str(e1_file)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["category"]["dims"]["A|A"] == 2
        assert doc["category"]["dims"]["B|B"] == 3

    def test_roundtrip_generated(self, capsys):
        assert main(["--format", "json", "roundtrip", "--gen", "--seed", "7"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pass"] is True

    def test_roundtrip_from_file(self, e1_file, capsys):
        assert main(["roundtrip", "--input", str(e1_file)]) == 0

    def test_naturality_morphism(self, tmp_path, capsys):
        m1, _ = gen_morphism_pair(GenParams(seed=6, n_objects=2, max_base=2,
                                            edge_density=0.9, phase_mode="random"))
        path = tmp_path / "m.json"
        path.write_text(jsonio.dump_json(jsonio.morphism_to_json(m1)))
        assert main(["--format", "json", "naturality", "--input", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["pass"] is True

    def test_naturality_functor(self, tmp_path, footnote_category, capsys):
        path = tmp_path / "id.json"
        path.write_text(jsonio.dump_json(
            jsonio.functor_to_json(identity_functor(footnote_category))))
        assert main(["--format", "json", "naturality", "--input", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["side"] == "algebra" and doc["pass"] is True

    def test_naturality_degenerate_exit_three(self, tmp_path, footnote_embedding):
        path = tmp_path / "emb.json"
        path.write_text(jsonio.dump_json(jsonio.functor_to_json(footnote_embedding)))
        assert main(["--format", "json", "spectrum", "--input", str(path)]) == 3
        assert main(["--format", "json", "naturality", "--input", str(path)]) == 3

    def test_nonfinite_entries_rejected(self, tmp_path):
        path = tmp_path / "nan.json"
        path.write_text('{"objects": ["A"], "dims": {"A|A": 1}, '
                        '"comp": {"A|A|A": [[[NaN, 0.0]]]}, '
                        '"invol": {"A|A": [[[1.0, 0.0]]]}, '
                        '"units": {"A": [[1.0, 0.0]]}}')
        assert main(["validate", "--input", str(path)]) == 1

    def test_link_nonfull(self, tmp_path, nonfull_bimodule, capsys):
        path = tmp_path / "bimodule.json"
        path.write_text(jsonio.dump_json(jsonio.bimodule_to_json(nonfull_bimodule)))
        assert main(["--format", "json", "link", "--input", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["pairs"]) == 2
        assert doc["full_left"] is True and doc["full_right"] is False
        assert doc["inner_product_deviation"] <= 1e-9

    def test_io_error_exit_one(self, tmp_path):
        missing = tmp_path / "nope.json"
        assert main(["validate", "--input", str(missing)]) == 1
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        assert main(["validate", "--input", str(bad)]) == 1

    def test_gen_then_reingest(self, tmp_path, capsys):
        assert main(["--format", "json", "gen", "--out", str(tmp_path),
                     "--seed", "11", "--what", "both"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["written"]) == 3
        for path in doc["written"]:
            kind, value = jsonio.load_document(open(path).read())
            assert kind in ("category", "spaceoid")
        # emit then re-ingest yields an equal in-memory value
        spaceoid_path = [p for p in doc["written"] if "spaceoid" in p][0]
        text = open(spaceoid_path).read().strip()
        _, S = jsonio.load_document(text)
        assert jsonio.dump_json(jsonio.spaceoid_to_json(S)) == text
