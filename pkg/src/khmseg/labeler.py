"""Position labeling of component clusters and syllable merging.

Each cluster of an entry receives one of four labels: LL opens a syllable,
RR closes it, MM continues a three-cluster syllable, LR is a standalone
syllable.  Resolution runs in tiers: characteristic markers first, then the
training database, then the fallback database, then (during free-text
segmentation) longest-match against the syllable database, and finally a
bracketing-aware structural default.  Marker labels are never overridden by
database lookups.  Defaulted runs emit ambiguity records for the review queue.

Labeling is pure over immutable databases; records are ordered by position so
concurrent per-entry labeling cannot change any output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import IO, Dict, List, Optional, Sequence, Tuple, Union

from .cluster_grammar import ComponentCluster, PatternKind, split_clusters
from .errors import (
    DatabaseInvariantError,
    DatabaseParseError,
    MalformedLabelSequenceError,
)
from .normalizer import normalize
from .script_model import MarkerRole, ScriptTables, marker_role


class PositionLabel(enum.Enum):
    LL = "LL"
    RR = "RR"
    MM = "MM"
    LR = "LR"


class Confidence(enum.Enum):
    MARKER = "Marker"
    TDB = "TDB"
    FALLBACK = "Fallback"
    SDB = "Sdb"
    DEFAULT = "Default"
    MANUAL = "Manual"


@dataclass(frozen=True)
class LabeledCluster:
    cluster: ComponentCluster
    label: PositionLabel
    confidence: Confidence
    position: int


@dataclass(frozen=True)
class Syllable:
    clusters: Tuple[ComponentCluster, ...]

    @property
    def text(self) -> str:
        return "".join(c.text for c in self.clusters)

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class ContextWindow:
    center: ComponentCluster
    neighbors: Dict[int, Optional[ComponentCluster]]  # p in {-2,-1,1,2}
    position: int = 0

    @classmethod
    def at(cls, clusters: Sequence[ComponentCluster], j: int) -> "ContextWindow":
        neigh = {}
        for p in (-2, -1, 1, 2):
            k = j + p
            neigh[p] = clusters[k] if 0 <= k < len(clusters) else None
        return cls(center=clusters[j], neighbors=neigh, position=j)


@dataclass(frozen=True)
class AmbiguityRecord:
    """A defaulted run: its clusters, the chosen labels, the viable alternatives."""

    position: int
    clusters: Tuple[str, ...]
    chosen: Tuple[PositionLabel, ...]
    candidates: Tuple[Tuple[PositionLabel, ...], ...]


LabelSeq = Tuple[PositionLabel, ...]


class _ClusterLabelDb:
    """Shared machinery of the training and fallback databases."""

    db_name = "cluster-label db"

    def __init__(self, entries: Optional[Dict[Tuple[str, ...], LabelSeq]] = None):
        self.entries: Dict[Tuple[str, ...], LabelSeq] = dict(entries or {})

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.entries == other.entries

    def get(self, key: Tuple[str, ...]) -> Optional[LabelSeq]:
        return self.entries.get(key)

    @classmethod
    def load(cls, source: Union[str, bytes, IO], tables: Optional[ScriptTables] = None):
        if hasattr(source, "read"):
            source = source.read()
        if isinstance(source, bytes):
            source = source.decode("utf-8")
        entries: Dict[Tuple[str, ...], LabelSeq] = {}
        for line_no, raw in enumerate(source.splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2 or not fields[1].strip():
                raise DatabaseParseError(line_no, "expected clusters<TAB>labels")
            clusters = tuple(fields[0].split("+"))
            try:
                labels = tuple(PositionLabel(t.strip()) for t in fields[1].split(","))
            except ValueError as exc:
                raise DatabaseParseError(line_no, f"bad label: {exc}") from None
            cls._check_entry(clusters, labels, line_no, tables)
            if clusters in entries:
                raise DatabaseParseError(line_no, f"duplicate key {'+'.join(clusters)}")
            entries[clusters] = labels
        db = cls(entries)
        return db

    @classmethod
    def _check_entry(cls, clusters, labels, line_no, tables) -> None:
        if not 2 <= len(clusters) <= 3:
            raise DatabaseParseError(line_no, "keys must span 2-3 clusters")
        if len(labels) != len(clusters):
            raise DatabaseParseError(line_no, "label count must match cluster count")
        try:
            merge_syllables(
                [
                    LabeledCluster(_text_cluster(t), lab, Confidence.MANUAL, i)
                    for i, (t, lab) in enumerate(zip(clusters, labels))
                ]
            )
        except MalformedLabelSequenceError as exc:
            raise DatabaseParseError(line_no, f"label sequence not well-formed: {exc}")
        if tables is not None:
            text = "".join(clusters)
            if normalize(text, tables, lenient=True).text != text:
                raise DatabaseInvariantError(
                    f"{cls.db_name} key {'+'.join(clusters)} is not canonical"
                )
            resplit = tuple(c.text for c in split_clusters(text, tables))
            if resplit != clusters:
                raise DatabaseInvariantError(
                    f"{cls.db_name} key {'+'.join(clusters)} does not match "
                    f"the grammar's division {'+'.join(resplit)}"
                )

    def dump(self) -> str:
        lines = []
        for key in sorted(self.entries):
            labels = ",".join(lab.value for lab in self.entries[key])
            lines.append(f"{'+'.join(key)}\t{labels}")
        return "\n".join(lines) + ("\n" if lines else "")


class TrainingDatabase(_ClusterLabelDb):
    db_name = "TDB"


class FallbackClusterDatabase(_ClusterLabelDb):
    db_name = "fallback db"


def _text_cluster(text: str) -> ComponentCluster:
    cps = tuple(ord(c) for c in text)
    return ComponentCluster(cps, PatternKind.FOREIGN, (("F", cps),), (0, len(cps)))


def check_disjoint(tdb: Optional[TrainingDatabase], fallback: Optional[FallbackClusterDatabase]) -> None:
    """TDB and fallback key sets must be disjoint."""
    if tdb is None or fallback is None:
        return
    shared = set(tdb.entries) & set(fallback.entries)
    if shared:
        key = "+".join(sorted(shared)[0])
        raise DatabaseInvariantError(f"key {key} present in both TDB and fallback db")


def label_by_markers(cluster: ComponentCluster, tables: ScriptTables) -> Optional[PositionLabel]:
    """Label from characteristic markers alone, or None if the cluster has none.

    Foreign clusters (digits, Latin, punctuation, whitespace) are always
    standalone.
    """
    roles = {marker_role(cp, tables) for cp in cluster.codepoints}
    has_begin = MarkerRole.BEGIN in roles
    has_end = MarkerRole.END in roles
    if MarkerRole.BOTH in roles or (has_begin and has_end):
        return PositionLabel.LR
    if has_begin:
        return PositionLabel.LL
    if has_end:
        return PositionLabel.RR
    if cluster.pattern is PatternKind.FOREIGN:
        return PositionLabel.LR
    return None


@dataclass(frozen=True)
class WindowMatch:
    labels: LabelSeq
    offsets: Tuple[int, ...]  # relative to the window's center
    source: Confidence


# Probe order: triples longest-first with left context before right context,
# then the two pairs. The center alone is never a key.
_PROBE_OFFSETS: Tuple[Tuple[int, ...], ...] = (
    (-2, -1, 0),
    (-1, 0, 1),
    (0, 1, 2),
    (-1, 0),
    (0, 1),
)


def _probe_window(window: ContextWindow, db: _ClusterLabelDb) -> Optional[Tuple[Tuple[int, ...], LabelSeq]]:
    def cluster_at(p: int) -> Optional[ComponentCluster]:
        return window.center if p == 0 else window.neighbors.get(p)

    for offsets in _PROBE_OFFSETS:
        cs = [cluster_at(p) for p in offsets]
        if any(c is None for c in cs):
            continue
        labels = db.get(tuple(c.text for c in cs))
        if labels is not None:
            return offsets, labels
    return None


def label_window(
    window: ContextWindow,
    tdb: Optional[TrainingDatabase],
    fallback: Optional[FallbackClusterDatabase] = None,
) -> Optional[WindowMatch]:
    """First database hit for the window's key sequences, TDB before fallback."""
    check_disjoint(tdb, fallback)
    for db, source in ((tdb, Confidence.TDB), (fallback, Confidence.FALLBACK)):
        if db is None:
            continue
        hit = _probe_window(window, db)
        if hit is not None:
            return WindowMatch(hit[1], hit[0], source)
    return None


# ---------------------------------------------------------------------------
# Structural default: enumerate well-formed labelings of an unlabeled run.

def _enumerate_labelings(
    k: int,
    left_count: Optional[int],
    right_need: Tuple[str, int],
    allow_mm: bool,
    first_only: bool = False,
) -> List[LabelSeq]:
    """All well-formed labelings of k unlabeled clusters.

    left_count is the open syllable's cluster count so far (None = closed);
    right_need is ("closed", 0) or ("open", max_count) from the next fixed
    label.  Branch order (LL before LR, RR before MM) makes the first result
    the pairwise left-to-right grouping the default tier assigns.
    """
    results: List[LabelSeq] = []
    path: List[PositionLabel] = []

    def ok_end(count: Optional[int]) -> bool:
        if right_need[0] == "closed":
            return count is None
        return count is not None and count <= right_need[1]

    def walk(i: int, count: Optional[int]) -> bool:
        if i == k:
            if ok_end(count):
                results.append(tuple(path))
                return first_only
            return False
        if count is None:
            options = ((PositionLabel.LL, 1), (PositionLabel.LR, None))
        else:
            options = [(PositionLabel.RR, None)]
            if allow_mm and count == 1:
                options.append((PositionLabel.MM, 2))
        for label, nxt in options:
            path.append(label)
            if walk(i + 1, nxt):
                return True
            path.pop()
        return False

    walk(0, left_count)
    return results


def _run_candidates(
    k: int, left_count: Optional[int], right_need: Tuple[str, int]
) -> List[LabelSeq]:
    cands = _enumerate_labelings(k, left_count, right_need, allow_mm=False)
    if not cands:
        cands = _enumerate_labelings(k, left_count, right_need, allow_mm=True)
    if k >= 3 and len(cands) > 1:
        all_lr = tuple([PositionLabel.LR] * k)
        cands = [c for c in cands if c != all_lr]
    return cands


_ENUM_CAP = 6  # full candidate enumeration only for short runs


def label_clusters(
    clusters: Sequence[ComponentCluster],
    tables: ScriptTables,
    tdb: Optional[TrainingDatabase] = None,
    fallback: Optional[FallbackClusterDatabase] = None,
    sdb=None,
) -> Tuple[List[LabeledCluster], List[AmbiguityRecord]]:
    """Assign a label to every cluster of one entry (total, deterministic).

    sdb, when given, adds the syllable-database longest-match tier between the
    fallback and default tiers (used for free-text segmentation).
    """
    check_disjoint(tdb, fallback)
    n = len(clusters)
    labels: List[Optional[PositionLabel]] = [None] * n
    conf: List[Optional[Confidence]] = [None] * n

    # Tier 1: markers.
    for j, cluster in enumerate(clusters):
        lab = label_by_markers(cluster, tables)
        if lab is not None:
            labels[j] = lab
            conf[j] = Confidence.MARKER

    # Tiers 2-3: training db, then fallback db, via context windows.
    for db, source in ((tdb, Confidence.TDB), (fallback, Confidence.FALLBACK)):
        if db is None:
            continue
        for j in range(n):
            if labels[j] is not None:
                continue
            hit = _probe_window(ContextWindow.at(clusters, j), db)
            if hit is None:
                continue
            offsets, stored_labels = hit
            positions = [j + off for off in offsets]
            stored = dict(zip(positions, stored_labels))
            if any(labels[p] is not None and labels[p] is not stored[p] for p in positions):
                continue  # never override markers or earlier hits
            for p in positions:
                if labels[p] is None:
                    labels[p] = stored[p]
                    conf[p] = source

    # Tier 4: syllable-database longest match over unlabeled runs.
    if sdb is not None:
        _apply_sdb_tier(clusters, tables, sdb, labels, conf)

    # Tier 5: bracketing-aware structural default.
    records: List[AmbiguityRecord] = []
    j = 0
    count: Optional[int] = None  # open syllable's cluster count, None = closed
    while j < n:
        lab = labels[j]
        if lab is not None:
            count = _advance_state(count, lab)
            j += 1
            continue
        end = j
        while end < n and labels[end] is None:
            end += 1
        k = end - j
        if end < n and labels[end] in (PositionLabel.RR, PositionLabel.MM):
            right_need = ("open", 1 if labels[end] is PositionLabel.MM else 2)
        else:
            right_need = ("closed", 0)
        chosen_list = _enumerate_labelings(k, count, right_need, False, first_only=True)
        if not chosen_list:
            chosen_list = _enumerate_labelings(k, count, right_need, True, first_only=True)
        if chosen_list:
            chosen = chosen_list[0]
        else:
            # Unsatisfiable boundary (conflicting markers); merge will flag it.
            chosen = tuple(
                PositionLabel.RR if (count is not None and i == 0) else PositionLabel.LR
                for i in range(k)
            )
        candidates = (
            tuple(_run_candidates(k, count, right_need)) if k <= _ENUM_CAP else (chosen,)
        )
        if not candidates:
            candidates = (chosen,)
        records.append(
            AmbiguityRecord(
                position=j,
                clusters=tuple(c.text for c in clusters[j:end]),
                chosen=chosen,
                candidates=candidates,
            )
        )
        for i, lab_i in enumerate(chosen):
            labels[j + i] = lab_i
            conf[j + i] = Confidence.DEFAULT
            count = _advance_state(count, lab_i)
        j = end

    labeled = [
        LabeledCluster(cluster=c, label=labels[i], confidence=conf[i], position=i)
        for i, c in enumerate(clusters)
    ]
    return labeled, records


def _advance_state(count: Optional[int], lab: PositionLabel) -> Optional[int]:
    if lab is PositionLabel.LL:
        return 1
    if lab is PositionLabel.MM:
        return (count or 1) + 1
    return None  # RR and LR close; a stray RR is caught at merge time


def _apply_sdb_tier(clusters, tables, sdb, labels, conf) -> None:
    """Longest-match of known syllables over unlabeled runs (1-3 clusters).

    Candidates are ranked by cluster length, then frequency, then codepoint
    order.  Unmatched clusters stay unlabeled for the default tier; matched
    spans are self-contained syllables, so the surrounding gaps keep closed
    boundaries.
    """
    shapes = {
        1: (PositionLabel.LR,),
        2: (PositionLabel.LL, PositionLabel.RR),
        3: (PositionLabel.LL, PositionLabel.MM, PositionLabel.RR),
    }
    n = len(clusters)
    j = 0
    count: Optional[int] = None
    while j < n:
        if labels[j] is not None:
            count = _advance_state(count, labels[j])
            j += 1
            continue
        if count is not None:
            # An open syllable must be closed by the default tier first.
            count = None
            j += 1
            continue
        candidates = []
        for length in (1, 2, 3):
            end = j + length
            if end > n or any(labels[p] is not None for p in range(j, end)):
                break
            text = "".join(c.text for c in clusters[j:end])
            freq = sdb.syllables.get(text)
            if freq is not None:
                candidates.append((length, freq, text))
        if not candidates:
            j += 1
            continue
        candidates.sort(key=lambda t: (-t[0], -t[1], t[2]))
        length = candidates[0][0]
        for i, lab in enumerate(shapes[length]):
            labels[j + i] = lab
            conf[j + i] = Confidence.SDB
        j += length


def merge_syllables(labeled: Sequence[LabeledCluster]) -> List[Syllable]:
    """Combine labeled clusters into syllables of 1-3 clusters.

    Raises MalformedLabelSequenceError naming the offending position when the
    sequence cannot be bracketed.
    """
    out: List[Syllable] = []
    current: List[ComponentCluster] = []
    open_at = -1
    for j, lc in enumerate(labeled):
        lab = lc.label
        if lab is PositionLabel.LR:
            if current:
                raise MalformedLabelSequenceError(j, "LR inside an open syllable")
            out.append(Syllable((lc.cluster,)))
        elif lab is PositionLabel.LL:
            if current:
                raise MalformedLabelSequenceError(j, "LL inside an open syllable")
            current = [lc.cluster]
            open_at = j
        elif lab is PositionLabel.MM:
            if not current:
                raise MalformedLabelSequenceError(j, "MM with no open syllable")
            current.append(lc.cluster)
            if len(current) >= 3:
                raise MalformedLabelSequenceError(j, "syllable would exceed 3 clusters")
        else:  # RR
            if not current:
                raise MalformedLabelSequenceError(j, "RR with no open syllable")
            current.append(lc.cluster)
            if len(current) > 3:
                raise MalformedLabelSequenceError(j, "syllable would exceed 3 clusters")
            out.append(Syllable(tuple(current)))
            current = []
    if current:
        raise MalformedLabelSequenceError(open_at, "unclosed syllable at end of input")
    return out


def merge_syllables_lenient(
    labeled: Sequence[LabeledCluster],
) -> Tuple[List[Syllable], List[str]]:
    """merge_syllables with deterministic repairs instead of errors.

    Used by free-text segmentation, which must never fail: stray RR/MM become
    standalone syllables, an open syllable is flushed before a conflicting
    label and at end of input.  Returns the syllables and repair notes.
    """
    out: List[Syllable] = []
    current: List[ComponentCluster] = []
    notes: List[str] = []

    def flush(reason: str, j: int) -> None:
        if current:
            out.append(Syllable(tuple(current)))
            current.clear()
            notes.append(f"position {j}: {reason}")

    for j, lc in enumerate(labeled):
        lab = lc.label
        if lab is PositionLabel.LR:
            flush("closed open syllable before standalone cluster", j)
            out.append(Syllable((lc.cluster,)))
        elif lab is PositionLabel.LL:
            flush("closed open syllable before new opener", j)
            current.append(lc.cluster)
        elif lab is PositionLabel.MM:
            if not current:
                notes.append(f"position {j}: MM with no open syllable, made standalone")
                out.append(Syllable((lc.cluster,)))
            else:
                current.append(lc.cluster)
                if len(current) >= 3:
                    flush("syllable reached 3 clusters", j)
        else:  # RR
            if not current:
                notes.append(f"position {j}: RR with no open syllable, made standalone")
                out.append(Syllable((lc.cluster,)))
            else:
                current.append(lc.cluster)
                if len(current) > 3:
                    current.pop()
                    flush("syllable would exceed 3 clusters", j)
                    out.append(Syllable((lc.cluster,)))
                else:
                    out.append(Syllable(tuple(current)))
                    current.clear()
    flush("unclosed syllable at end of input", len(labeled))
    return out, notes
