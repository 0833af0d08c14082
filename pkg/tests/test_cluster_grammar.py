import itertools
import random

from reference_splitter import ref_split

from khmseg import (
    PatternKind,
    clusters_to_text,
    match_cc,
    match_sc,
    normalize,
    split_clusters,
)

KA = "ក"
TA = "ត"
SA = "ស"
RO = "រ"
COENG = "្"
AA = "ា"
QI = "ឥ"  # ឥ
RY = "ឫ"  # ឫ
QUUV = "ឪ"  # ឪ
LYY = "ឮ"  # ឮ
BANTOC = "់"
SAMYOK = "័"
ROBAT = "៌"
NIKAHIT = "ំ"


def texts(clusters):
    return [c.text for c in clusters]


def test_sc_vowel_plus_consonant(tables):
    m = match_sc(RY + SA, 0, tables)  # ឫស
    assert m is not None
    cluster, nxt = m
    assert cluster.pattern is PatternKind.SC
    assert cluster.text == RY + SA
    assert cluster.bindings == {"V": (ord(RY),), "C": (ord(SA),)}
    assert nxt == 2


def test_sc_lone_vowel_at_end(tables):
    cluster, nxt = match_sc(QUUV, 0, tables)
    assert cluster.text == QUUV
    assert "C" not in cluster.bindings
    assert nxt == 1


def test_sc_absent_for_consonant(tables):
    assert match_sc(KA, 0, tables) is None


def test_sc_does_not_steal_attached_consonant(tables):
    # ឥ + ណ + ្ឌ + ា : the consonant owns a coeng pair, so SC takes V alone.
    text = QI + "ណ" + COENG + "ឌ" + AA
    cluster, nxt = match_sc(text, 0, tables)
    assert cluster.text == QI
    assert nxt == 1


def test_cc_bare_consonant_binds_c_alone(tables):
    cluster, _ = match_cc(KA, 0, tables)
    assert cluster.pattern is PatternKind.CC_BEGIN
    assert cluster.bindings == {"C": (ord(KA),)}


def test_cc_consonant_vowel(tables):
    cluster, _ = match_cc(KA + AA, 0, tables)  # កា
    assert cluster.bindings == {"C": (ord(KA),), "X4": (ord(AA),)}


def test_cc_consonant_coeng_vowel(tables):
    cluster, _ = match_cc(KA + COENG + RO + AA, 0, tables)  # ក្រា
    assert cluster.pattern is PatternKind.CC_BEGIN
    assert cluster.bindings["X2"] == (ord(COENG), ord(RO))
    assert cluster.bindings["X4"] == (ord(AA),)


def test_cc_end_sign_cluster(tables):
    cluster, _ = match_cc("ង" + BANTOC, 0, tables)  # ង់
    assert cluster.pattern is PatternKind.CC_END
    assert cluster.bindings == {"Z10": (0x1784,), "Z12": (ord(BANTOC),)}


def test_cc_robat_cluster_is_center(tables):
    cluster, _ = match_cc("ម" + ROBAT, 0, tables)  # ម៌
    assert cluster.pattern is PatternKind.CC_CENTER
    assert cluster.bindings == {"Y5": (0x1798,), "Y6": (ord(ROBAT),)}


def test_cc_shifter_and_samyok_bind_x1(tables):
    cluster, _ = match_cc("ប៉័ង", 0, tables)  # ប៉័ង
    assert cluster.bindings["X1"] == (0x17C9, 0x17D0)
    assert cluster.text == "ប៉័"


def test_coeng_initial_cluster_is_center(tables):
    # Three subscripts: two stay with the base, the third opens a center cluster.
    text = KA + COENG + TA + COENG + TA + COENG + TA
    clusters = split_clusters(text, tables)
    assert texts(clusters) == [KA + COENG + TA + COENG + TA, COENG + TA]
    assert clusters[1].pattern is PatternKind.CC_CENTER


def test_split_worked_example_eight_clusters(tables):
    entry = "វិទ្យាសាស្ត្រកុំព្យូទ័រ"
    clusters = split_clusters(entry, tables)
    assert texts(clusters) == ["វិ", "ទ្យា", "សា", "ស្ត្រ", "កុំ", "ព្យូ", "ទ័", "រ"]
    assert [c.source_span for c in clusters] == [
        (0, 2), (2, 6), (6, 8), (8, 13), (13, 16), (16, 20), (20, 22), (22, 23),
    ]


def test_split_empty(tables):
    assert split_clusters("", tables) == []


def test_split_foreign_singletons(tables):
    clusters = split_clusters("x" + "៣" + "។", tables)  # x ៣ ។
    assert [c.pattern for c in clusters] == [PatternKind.FOREIGN] * 3


def test_exact_cover_and_losslessness(tables):
    rng = random.Random(13)
    pool = "កតសរ់័ាុំ្ឥx ។"
    for _ in range(500):
        raw = "".join(rng.choice(pool) for _ in range(rng.randint(0, 8)))
        clusters = split_clusters(raw, tables)
        assert clusters_to_text(clusters) == raw
        gaps = [c.source_span for c in clusters]
        pos = 0
        for start, end in gaps:
            assert start == pos
            pos = end
        assert pos == len(raw)


def test_roundtrip_on_normalized_text(tables):
    rng = random.Random(17)
    pool = "កតសរ់ាុំ្"
    for _ in range(500):
        raw = "".join(rng.choice(pool) for _ in range(rng.randint(0, 8)))
        canon = normalize(raw, tables, lenient=True)
        clusters = split_clusters(canon, tables)
        assert clusters_to_text(clusters) == canon.text


def test_slot_concatenation_matches_cluster(tables):
    clusters = split_clusters("វិទ្យាសាស្ត្រកុំព្យូទ័រ", tables)
    for c in clusters:
        joined = tuple(cp for _slot, cps in c.slot_bindings for cp in cps)
        assert joined == c.codepoints


def test_determinism(tables):
    text = "កណ្ដាលស្រីង់x១"
    assert split_clusters(text, tables) == split_clusters(text, tables)


def _slot_class_ok(slot, cps, tables):
    from khmseg import Kind, classify

    kinds = [classify(cp, tables).kind for cp in cps]
    cons = (Kind.CONSONANT_A, Kind.CONSONANT_O)
    if slot in ("C", "Y5", "Z10", "Z11"):
        return len(cps) == 1 and kinds[0] in cons
    if slot in ("X2", "X3", "Y7", "Y8"):
        return (
            len(cps) == 2
            and kinds[0] is Kind.COENG
            and kinds[1] in cons + (Kind.INDEPENDENT_VOWEL,)
        )
    if slot in ("X4", "Y9"):
        return 1 <= len(cps) <= 2 and all(k is Kind.DEPENDENT_VOWEL for k in kinds)
    if slot == "X1":
        return 1 <= len(cps) <= 2 and all(k is Kind.BEGIN_SIGN for k in kinds)
    if slot == "Y6":
        return kinds == [Kind.REPLACEMENT_SIGN]
    if slot == "Z12":
        return len(cps) == 1 and kinds[0] is Kind.END_SIGN
    if slot == "V":
        return kinds == [Kind.INDEPENDENT_VOWEL]
    return slot == "F"


def test_slot_bindings_satisfy_slot_classes(tables):
    rng = random.Random(29)
    pool = "កតសរម៌ងាុំ្់័ឥ៉x"
    for _ in range(500):
        raw = "".join(rng.choice(pool) for _ in range(rng.randint(0, 8)))
        canon = normalize(raw, tables, lenient=True)
        for cluster in split_clusters(canon, tables):
            if cluster.pattern is PatternKind.FOREIGN:
                continue
            for slot, cps in cluster.slot_bindings:
                assert _slot_class_ok(slot, cps, tables), (cluster.text, slot, cps)


def test_no_dangling_vowel_or_coeng_in_real_words(tables):
    # Canonical real words never shed a dependent vowel or coeng pair into a
    # Foreign singleton.
    from khmseg import Kind, classify

    words = ["វិទ្យាសាស្ត្រកុំព្យូទ័រ", "កណ្ដាល", "ស្ត្រី", "ព័ត៌មាន", "ឆ្នាំ", "ញ៉ាំ"]
    for word in words:
        for cluster in split_clusters(normalize(word, tables).text, tables):
            if cluster.pattern is PatternKind.FOREIGN:
                kind = classify(cluster.codepoints[0], tables).kind
                assert kind not in (Kind.DEPENDENT_VOWEL, Kind.COENG)


def test_matches_reference_smoke(tables):
    alphabet = [KA, TA, QI, AA, NIKAHIT, COENG, BANTOC, SAMYOK]
    for n in range(0, 4):
        for combo in itertools.product(alphabet, repeat=n):
            s = "".join(combo)
            mine = [(c.text, c.pattern.value) for c in split_clusters(s, tables)]
            assert mine == ref_split(s, tables), f"disagree on {[hex(ord(x)) for x in s]}"
