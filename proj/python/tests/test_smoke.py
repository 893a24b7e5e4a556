import json
import os
import pathlib

import pytest

import clonescope as cs

DATA = pathlib.Path(os.environ.get("CLONESCOPE_DATA", pathlib.Path(__file__).parents[2] / "tests" / "data"))


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h = ((h ^ b) * 0x100000001B3) % (1 << 64)
    return h


def test_normalize_and_fingerprint():
    raw = "int x = 1;   \r\n\r\n  {\n    call(x);\n}\n"
    assert cs.normalize(raw) == "int x = 1;\n    call(x);"
    assert cs.nloc("a\nb") == 2
    assert cs.nloc("") == 0
    assert cs.project_alnum("int x = 1;") == "intx1"
    assert cs.fingerprint("") == 0xCBF29CE484222325
    assert cs.fingerprint_hex(cs.fingerprint("foobar")) == "85944171f73967e8"
    for s in [b"", b"a", b"\x00\xff", "héllo".encode()]:
        assert cs.fnv1a64(s) == fnv1a64(s)
    snip = cs.process_block(raw)
    assert snip.projection == "intx1callx"
    assert snip.fingerprint == fnv1a64(b"intx1callx")


def test_parse_and_extract():
    line = json.dumps({"post_id": 7, "post_type": "question", "creation_date": "2016-01-01T00:00:00Z",
                       "body": "see\n\n```\nfoo();\n```\n"})
    posts = cs.parse_posts(line + "\n")
    assert len(posts) == 1
    blocks = cs.extract_code_blocks(posts[0]["body"], post_id=7)
    assert [(b["raw_content"], b["kind"]) for b in blocks] == [("foo();", "fenced")]
    with pytest.raises(cs.ParseError):
        cs.parse_posts('{"post_id": 1}\n')
    with pytest.raises(ValueError):
        cs.parse_posts("", format="csv")


def test_links_skip_code():
    body = "From [docs](https://www.AndroidHive.info/x) and `http://example.com/in-code`"
    links = cs.extract_links(body)
    assert [l["domain"] for l in links] == ["androidhive.info"]


def test_planted_corpus_matches_expectations(tmp_path):
    expected = json.loads((DATA / "planted_expected.json").read_text())
    a = cs.analyze((DATA / "planted_corpus.jsonl").read_text(), min_nloc=20)
    assert a.ranked_keys() == expected["ranking_min_nloc_20"]
    summary = cs.summary(a)
    assert summary["distinct_fingerprints"] == expected["distinct_fingerprints"]
    assert summary["cloned_fingerprints"] == expected["cloned_fingerprints"]
    top = cs.clone_set(a, a.ranked_keys()[0])
    assert top["fingerprint"] == a.ranked_keys()[0]
    with pytest.raises(KeyError):
        a.clone_set_json("ffffffffffffffff")
    a.write(str(tmp_path))
    assert (tmp_path / "histogram.csv").read_text() == a.histogram_csv()
    assert len(list((tmp_path / "clone-sets").glob("*.json"))) == len(a.ranked_keys())
