"""Smoke test for the poemotion extension module.

Build first:
    cargo build -p poemotion-python --release
    cp target/release/libpoemotion_py.so python/poemotion.so
then run `python3 python/smoke_test.py` from the repository root.
"""

import json
import math
import pathlib
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

import poemotion  # noqa: E402

FIXTURES = HERE.parent / "crates" / "core" / "tests" / "fixtures"


def main():
    assert math.isclose(poemotion.intensity(0.6, 0.8), 1.0)
    assert poemotion.classify_quadrant(-0.5, 0.5) == "anger"
    assert poemotion.classify_quadrant(0.0, 0.0) == "neutral"
    try:
        poemotion.intensity(2.0, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range valence accepted")

    poem = (FIXTURES / "poem.txt").read_text()
    assert len(poemotion.segment_sentences(poem)) == 10

    segments = poemotion.extract_segments((FIXTURES / "poem.conllu").read_text())
    assert len(segments) == 25
    kept = poemotion.select_segments(segments, keep_ratio=0.5)
    assert len(kept) == 13
    assert all(a[1] >= b[1] for a, b in zip(kept, kept[1:]))

    assert poemotion.textrank([[0, 1], [1, 0]]) == [0.5, 0.5]
    assert math.isclose(poemotion.polygon_complexity([(0, 0), (1, 0), (1, 1), (0, 1)]), 16.0)
    assert math.isclose(poemotion.gan_objective([0.5], [0.5]), -2 * math.log(2))
    stroke = poemotion.synthesize_stroke("sadness", 0.5, 7)
    assert stroke == poemotion.synthesize_stroke("sadness", 0.5, 7)

    with tempfile.TemporaryDirectory() as tmp:
        db = poemotion.build_database(pathlib.Path(tmp) / "db", per_quadrant=8, seed=42)
        assert len(db) == 32
        loaded = poemotion.StrokeDatabase.load(pathlib.Path(tmp) / "db")
        assert loaded.match_stroke("anger", 1.0).quadrant == "anger"

        svg, report = poemotion.analyze(
            FIXTURES / "poem.txt",
            lexicon=FIXTURES / "lexicon.tsv",
            conllu=FIXTURES / "poem.conllu",
        )
        report = json.loads(report)
        assert report["selected_count"] == 13
        assert svg.count("<path") == report["non_neutral_count"]

        out = pathlib.Path(tmp) / "poem.svg"
        poemotion.run(FIXTURES / "poem.txt", out, lexicon=FIXTURES / "lexicon.tsv")
        assert out.exists() and out.with_suffix(".json").exists()

    print("python smoke test passed")


if __name__ == "__main__":
    main()
