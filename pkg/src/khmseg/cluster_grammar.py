"""Component-cluster splitting under the SC and CC syllable models.

SC covers independent-vowel syllables (V, optionally followed by one bare
consonant).  CC covers consonant-initial clusters in three shapes:

    begin   C  [X2 coeng-pair] [X3 coeng-pair] [X1 shifter/samyok] [X4 vowel]
    center  Y5 [Y6 robat] (Y7 coeng-pair) [Y8 coeng-pair] [Y9 vowel]
    end     Z10 [Z12 end sign]

Slot names follow the model; their surface order inside a cluster follows the
canonical intra-unit order.  Vowel slots bind a vowel unit: one main vowel
sign optionally followed by nikahit/reahmuk.  Matching is maximal munch, SC
tried before CC, ties between CC shapes broken begin > center > end.  Scalars
that start no pattern become singleton Foreign clusters, so splitting is total.

The splitter scans class codes with a small state machine; splitting canonical
text and joining the clusters back is lossless in both directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

from .normalizer import CanonicalSequence, _as_codepoints
from .script_model import Kind, ScriptTables, classify


class PatternKind(enum.Enum):
    SC = "SC"
    CC_BEGIN = "CC_Begin"
    CC_CENTER = "CC_Center"
    CC_END = "CC_End"
    FOREIGN = "Foreign"


@dataclass(frozen=True)
class ComponentCluster:
    codepoints: Tuple[int, ...]
    pattern: PatternKind
    slot_bindings: Tuple[Tuple[str, Tuple[int, ...]], ...]  # surface order
    source_span: Tuple[int, int]

    @property
    def text(self) -> str:
        return "".join(chr(cp) for cp in self.codepoints)

    @property
    def bindings(self) -> dict:
        return dict(self.slot_bindings)

    def __str__(self) -> str:
        return self.text


# Class codes the scanner runs on.
_C_CONS = 0
_C_INDEP = 1
_C_COENG = 2
_C_SHIFT = 3  # BeginSign kind: shifters + samyok
_C_VOWEL = 4  # main dependent vowel
_C_CODA = 5  # nikahit / reahmuk
_C_END = 6  # EndSign kind
_C_ROBAT = 7
_C_OTHER = 8


def _code(cp: int, tables: ScriptTables) -> int:
    kind = classify(cp, tables).kind
    if kind in (Kind.CONSONANT_A, Kind.CONSONANT_O):
        return _C_CONS
    if kind is Kind.INDEPENDENT_VOWEL:
        return _C_INDEP
    if kind is Kind.COENG:
        return _C_COENG
    if kind is Kind.BEGIN_SIGN:
        return _C_SHIFT
    if kind is Kind.DEPENDENT_VOWEL:
        return _C_CODA if cp in tables.vowel_codas else _C_VOWEL
    if kind is Kind.END_SIGN:
        return _C_END
    if kind is Kind.REPLACEMENT_SIGN:
        return _C_ROBAT
    return _C_OTHER


class _Scan:
    """Cursor over the codepoint/class arrays shared by the CC matchers."""

    __slots__ = ("cps", "codes", "n")

    def __init__(self, cps: Tuple[int, ...], tables: ScriptTables):
        self.cps = cps
        self.codes = [_code(cp, tables) for cp in cps]
        self.n = len(cps)

    def code(self, i: int) -> int:
        return self.codes[i] if 0 <= i < self.n else -1

    def pair_at(self, i: int) -> bool:
        return self.code(i) == _C_COENG and self.code(i + 1) in (_C_CONS, _C_INDEP)

    def attaching(self, i: int) -> bool:
        return self.code(i) in (
            _C_COENG,
            _C_SHIFT,
            _C_VOWEL,
            _C_CODA,
            _C_END,
            _C_ROBAT,
        )

    def vowel_unit(self, i: int) -> int:
        """End index of a vowel unit starting at i (== i if none)."""
        j = i
        if self.code(j) == _C_VOWEL:
            j += 1
        if self.code(j) == _C_CODA:
            j += 1
        return j


Bindings = List[Tuple[str, Tuple[int, ...]]]


def _match_begin(s: _Scan, pos: int) -> Optional[Bindings]:
    if s.code(pos) != _C_CONS:
        return None
    out: Bindings = [("C", (s.cps[pos],))]
    i = pos + 1
    for slot in ("X2", "X3"):
        if s.pair_at(i):
            out.append((slot, (s.cps[i], s.cps[i + 1])))
            i += 2
    shift: List[int] = []
    while s.code(i) == _C_SHIFT and len(shift) < 2:
        shift.append(s.cps[i])
        i += 1
    if shift:
        out.append(("X1", tuple(shift)))
    j = s.vowel_unit(i)
    if j > i:
        out.append(("X4", tuple(s.cps[i:j])))
    return out


def _match_center(s: _Scan, pos: int) -> Optional[Bindings]:
    out: Bindings = []
    i = pos
    if s.code(i) == _C_CONS:
        out.append(("Y5", (s.cps[i],)))
        i += 1
        if s.code(i) == _C_ROBAT:
            out.append(("Y6", (s.cps[i],)))
            i += 1
        if s.pair_at(i):
            out.append(("Y7", (s.cps[i], s.cps[i + 1])))
            i += 2
    elif s.pair_at(i):
        out.append(("Y7", (s.cps[i], s.cps[i + 1])))
        i += 2
    else:
        return None
    if s.pair_at(i):
        out.append(("Y8", (s.cps[i], s.cps[i + 1])))
        i += 2
    j = s.vowel_unit(i)
    if j > i:
        out.append(("Y9", tuple(s.cps[i:j])))
    return out


def _match_end(s: _Scan, pos: int) -> Optional[Bindings]:
    # Z11 (a second bare consonant) is never bound: the worked divisions keep
    # final consonants in separate clusters.
    if s.code(pos) != _C_CONS:
        return None
    out: Bindings = [("Z10", (s.cps[pos],))]
    if s.code(pos + 1) == _C_END:
        out.append(("Z12", (s.cps[pos + 1],)))
    return out


def _width(bindings: Bindings) -> int:
    return sum(len(cps) for _slot, cps in bindings)


def _cluster(pattern: PatternKind, bindings: Bindings, pos: int) -> Tuple[ComponentCluster, int]:
    cps = tuple(cp for _slot, group in bindings for cp in group)
    cluster = ComponentCluster(
        codepoints=cps,
        pattern=pattern,
        slot_bindings=tuple(bindings),
        source_span=(pos, pos + len(cps)),
    )
    return cluster, pos + len(cps)


def match_sc(
    seq: Union[str, CanonicalSequence], pos: int, tables: ScriptTables
) -> Optional[Tuple[ComponentCluster, int]]:
    """Match an SC cluster (independent vowel, optional bare consonant) at pos."""
    s = seq if isinstance(seq, _Scan) else _Scan(_as_codepoints(seq), tables)
    if s.code(pos) != _C_INDEP:
        return None
    bindings: Bindings = [("V", (s.cps[pos],))]
    # The consonant joins only if nothing after it attaches to it (ឫស yes,
    # ឥណ្ឌា no: ណ owns the following coeng pair).
    if s.code(pos + 1) == _C_CONS and not s.attaching(pos + 2):
        bindings.append(("C", (s.cps[pos + 1],)))
    return _cluster(PatternKind.SC, bindings, pos)


def match_cc(
    seq: Union[str, CanonicalSequence], pos: int, tables: ScriptTables
) -> Optional[Tuple[ComponentCluster, int]]:
    """Match the longest CC cluster at pos; ties break begin > center > end."""
    s = seq if isinstance(seq, _Scan) else _Scan(_as_codepoints(seq), tables)
    best: Optional[Tuple[int, PatternKind, Bindings]] = None
    for kind, matcher in (
        (PatternKind.CC_BEGIN, _match_begin),
        (PatternKind.CC_CENTER, _match_center),
        (PatternKind.CC_END, _match_end),
    ):
        bindings = matcher(s, pos)
        if bindings is None:
            continue
        width = _width(bindings)
        if best is None or width > best[0]:
            best = (width, kind, bindings)
    if best is None:
        return None
    return _cluster(best[1], best[2], pos)


def split_clusters(
    seq: Union[str, CanonicalSequence], tables: ScriptTables
) -> List[ComponentCluster]:
    """Split a canonical sequence into component clusters (total, deterministic).

    Callers should normalize first; unmatched scalars (foreign text, digits,
    punctuation, stray marks) become singleton Foreign clusters so the spans
    always tile the input exactly.
    """
    cps = _as_codepoints(seq)
    s = _Scan(cps, tables)
    out: List[ComponentCluster] = []
    pos = 0
    while pos < s.n:
        m = match_sc(s, pos, tables) or match_cc(s, pos, tables)
        if m is None:
            m = _cluster(PatternKind.FOREIGN, [("F", (cps[pos],))], pos)
        cluster, pos = m
        out.append(cluster)
    return out


def clusters_to_text(clusters: List[ComponentCluster]) -> str:
    """Exact inverse of split_clusters on its own output."""
    return "".join(c.text for c in clusters)


def render_clusters(clusters: List[ComponentCluster]) -> str:
    """Bracketed presentation used by the CLI: [ក]+[ង់]."""
    return "+".join(f"[{c.text}]" for c in clusters)
