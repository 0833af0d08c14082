import random

import pytest
from conftest import data_text

from khmseg import (
    EvalReport,
    SyllableDatabase,
    build_sdb,
    evaluate,
    ingest_lexicon,
    normalize_text,
    segment_syllables,
    segment_words,
)
from khmseg.errors import EvalInputError

ENTRY8 = "វិទ្យាសាស្ត្រកុំព្យូទ័រ"


def test_segment_worked_example(tables, mini_tdb, mini_fallback):
    seg = segment_syllables(ENTRY8, tables, mini_tdb, mini_fallback)
    assert seg.rendered == "វិទ្យា|សាស្ត្រ|កុំ|ព្យូ|ទ័រ"
    assert len(seg.units) == 5


def test_segment_empty(tables):
    seg = segment_syllables("", tables)
    assert seg.units == ()
    assert seg.rendered == ""


def test_segment_single_sdb_syllable(tables):
    sdb = SyllableDatabase()
    sdb.add("កណ្ដាល")
    seg = segment_syllables("កណ្តាល", tables, sdb=sdb)
    assert seg.units == ("កណ្ដាល",)


def test_segment_custom_separator(tables):
    seg = segment_syllables("ភាគរយ", tables, sep="/")
    assert "/" in seg.rendered and "|" not in seg.rendered


def test_segment_never_fails_and_round_trips(tables, mini_tdb, mini_fallback):
    rng = random.Random(41)
    pool = "កតសរងាុំ្់័៌x១ ។qz"
    for _ in range(400):
        text = "".join(rng.choice(pool) for _ in range(rng.randint(0, 12)))
        seg = segment_syllables(text, tables, mini_tdb, mini_fallback)
        assert seg.stripped == normalize_text(text, tables, lenient=True)


def test_segment_whitespace_is_standalone(tables):
    seg = segment_syllables("ទៅ មក", tables)
    assert " " in seg.units


def _mini(tables, mini_tdb, mini_fallback):
    entries = ingest_lexicon(data_text("mini_lexicon.tsv"))
    sdb = build_sdb(entries, tables, mini_tdb, mini_fallback).sdb
    return entries, sdb


def test_segment_words_exact_compound(tables, mini_tdb, mini_fallback):
    entries, sdb = _mini(tables, mini_tdb, mini_fallback)
    seg = segment_words("សាលារៀន", entries, tables, mini_tdb, mini_fallback, sdb)
    assert seg.units == ("សាលារៀន",)


def test_segment_words_two_adjacent_words(tables, mini_tdb, mini_fallback):
    entries, sdb = _mini(tables, mini_tdb, mini_fallback)
    seg = segment_words("ខ្ញុំទៅ", entries, tables, mini_tdb, mini_fallback, sdb)
    assert seg.units == ("ខ្ញុំ", "ទៅ")


def test_segment_words_longest_match_wins(tables, mini_tdb, mini_fallback):
    entries, sdb = _mini(tables, mini_tdb, mini_fallback)
    # ទៅសាលារៀន is itself a lexicon phrase, so it wins whole.
    seg = segment_words("ទៅសាលារៀន", entries, tables, mini_tdb, mini_fallback, sdb)
    assert seg.units == ("ទៅសាលារៀន",)
    # Without a covering phrase the longest component entries win.
    seg = segment_words("ទឹកសាលារៀន", entries, tables, mini_tdb, mini_fallback, sdb)
    assert seg.units == ("ទឹក", "សាលារៀន")


def test_segment_words_unknown_passthrough_with_diagnostic(tables, mini_tdb, mini_fallback):
    entries, sdb = _mini(tables, mini_tdb, mini_fallback)
    diags = []
    seg = segment_words("ឆ្កែឆ", entries, tables, mini_tdb, mini_fallback, sdb, diagnostics=diags)
    assert seg.units == ("ឆ្កែ", "ឆ")
    assert any("not in lexicon" in d for d in diags)


def test_segment_words_boundaries_are_syllable_boundaries(tables, mini_tdb, mini_fallback):
    entries, sdb = _mini(tables, mini_tdb, mini_fallback)
    for text in ["ខ្ញុំទៅសាលារៀន", "ទឹកដោះភាគរយ", "សូមអរគុណ"]:
        syl = segment_syllables(text, tables, mini_tdb, mini_fallback, sdb)
        words = segment_words(text, entries, tables, mini_tdb, mini_fallback, sdb)
        assert words.stripped == syl.stripped
        syllable_cuts = set()
        pos = 0
        for unit in syl.units:
            pos += len(unit)
            syllable_cuts.add(pos)
        pos = 0
        for word in words.units[:-1]:
            pos += len(word)
            assert pos in syllable_cuts


def bruteforce_words(syllables, known, i=0):
    """Leftmost-longest reference for the word grouping."""
    if i == len(syllables):
        return []
    best = None
    for j in range(len(syllables), i, -1):
        if "".join(syllables[i:j]) in known:
            best = j
            break
    if best is None:
        return ["".join(syllables[i : i + 1])] + bruteforce_words(syllables, known, i + 1)
    return ["".join(syllables[i:best])] + bruteforce_words(syllables, known, best)


def test_segment_words_matches_bruteforce_oracle(tables, mini_tdb, mini_fallback):
    entries, sdb = _mini(tables, mini_tdb, mini_fallback)
    known = {normalize_text(e.text, tables, lenient=True) for e in entries}
    samples = ["ខ្ញុំទៅផ្សារ", "ទៅសាលារៀន", "ភាគរយទឹក", "កុំព្យូទ័រថ្ងៃនេះ"]
    for text in samples:
        syl = segment_syllables(text, tables, mini_tdb, mini_fallback, sdb)
        assert len(syl.units) <= 8
        expected = bruteforce_words(list(syl.units), known)
        got = segment_words(text, entries, tables, mini_tdb, mini_fallback, sdb)
        assert list(got.units) == expected


def test_evaluate_identical_is_100():
    gold = ["ក|ខ\tSimple word", "គ\tPhrase"]
    report = evaluate(gold, ["ក|ខ", "គ"])
    assert report.overall == 100.0
    assert all(row.accuracy == 100.0 for row in report.rows)


def test_evaluate_half_wrong_is_50():
    gold = ["ក|ខ\tSimple word", "គ|ឃ\tSimple word"]
    pred = ["ក|ខ", "គឃ"]
    report = evaluate(gold, pred)
    assert report.overall == 50.0
    assert report.total.syllables == 4


def test_evaluate_line_count_mismatch_fatal():
    with pytest.raises(EvalInputError):
        evaluate(["ក"], ["ក", "ខ"])


def test_evaluate_concat_mismatch_fatal():
    with pytest.raises(EvalInputError) as err:
        evaluate(["កខ"], ["កគ"])
    assert err.value.line_no == 1


def test_evaluate_untyped_lines_aggregate_unknown():
    report = evaluate(["កខ"], ["កខ"])
    assert report.rows[0].type_label == "Unknown"


def test_evaluate_overall_is_syllable_weighted():
    gold = ["ក|ខ|គ\tSimple word", "ឃ|ង\tPhrase"]
    pred = ["ក|ខ|គ", "ឃង"]
    report = evaluate(gold, pred)
    # 3 of 5 gold syllables belong to correct lines
    assert report.overall == pytest.approx(60.0)
    total = sum(r.syllables for r in report.rows)
    weighted = sum(r.accuracy * r.syllables for r in report.rows) / total
    assert report.overall == pytest.approx(weighted)


def test_prefilled_report_round_trip():
    prefilled = (
        "Type\tQuantity\tSyllable\tAccuracy\n"
        "Simple word\t7278\t7278\t95%\n"
        "Compound word\t17095\t34190\t92.5%\n"
        "Phrase\t24574\t96779\t89.5%\n"
        "Total\t48947\t138247\t92.3%\n"
    )
    report = EvalReport.parse_tsv(prefilled)
    assert report.overall == pytest.approx(92.3)
    assert report.total.quantity == 48947
    assert report.total.syllables == 138247
    assert report.render_tsv() == prefilled
