import json

import numpy as np
import pytest

from fsbench import bundle as bio
from fsbench.errors import ParseError, ShapeError, UnresolvedReference
from fsbench.gallery import GALLERY_NAMES, build, gallery


def _doc(name):
    return json.loads(bio.dumps(bio.encode_bundle(build(name))))


@pytest.mark.parametrize("name", GALLERY_NAMES)
def test_gallery_round_trip(name, tmp_path):
    path = gallery(name, tmp_path)
    text = path.read_text()
    again = tmp_path / "again.json"
    bio.write_bundle(bio.parse_bundle(path), again)
    assert again.read_text() == text


def test_complex_arrays_round_trip(rng):
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    np.testing.assert_array_equal(bio.decode_complex_array(bio.encode_complex_array(a), "x"), a)


def test_short_sigma_row_is_shape_error(tmp_path):
    doc = _doc("sys-triv")
    row = doc["systems"]["sys-triv"]["sigma"][0]
    row.append(row[0])
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ShapeError) as exc:
        bio.parse_bundle(p)
    assert "sigma" in str(exc.value)


def test_dangling_system_reference(tmp_path):
    doc = _doc("sys-triv")
    doc["reps"]["sys-triv-trivial"]["system"] = "nowhere"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(UnresolvedReference) as exc:
        bio.parse_bundle(p)
    assert "system:nowhere" in str(exc.value)


def test_parse_error_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "systems": {\n  oops\n }\n}\n')
    with pytest.raises(ParseError) as exc:
        bio.parse_bundle(p)
    assert exc.value.line == 3


def test_files_merge_and_conflict(tmp_path):
    a, b = _doc("sys-triv"), _doc("sys-tw")
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    pa.write_text(json.dumps(a))
    pb.write_text(json.dumps(b))
    merged = bio.parse_bundle(pa, pb)
    assert set(merged.systems) == {"sys-triv", "sys-tw"}
    b["systems"]["sys-triv"] = b["systems"]["sys-tw"]
    pb.write_text(json.dumps(b))
    with pytest.raises(ShapeError):
        bio.parse_bundle(pa, pb)


def test_morita_frame_is_optional(tmp_path):
    doc = _doc("mor-pair")
    del doc["morita"]["mor-pair"]["frame"]
    p = tmp_path / "m.json"
    p.write_text(json.dumps(doc))
    entry = bio.parse_bundle(p).morita["mor-pair"]
    assert not entry.frame_given
    assert entry.data().frame.K == pytest.approx(4.0)
