"""Lexicon-to-syllable-database pipeline with persistence for every stage.

Stages mirror the staged architecture: lexicon in, cluster inventory, labeled
clusters (persisted as an intermediate artifact for debugging), merged
syllables out, plus a review queue of ambiguities and malformed entries.
Entries whose labels cannot be merged (typically loanwords without native
syllable structure) are skipped with a diagnostic, never aborting the batch.

Per-entry processing is side-effect free; results are reduced in entry order
and persisted sorted, so outputs are byte-identical across runs.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from typing import IO, Dict, List, Optional, Sequence, Set, Tuple, Union

from .cluster_grammar import PatternKind, split_clusters
from .errors import DatabaseInvariantError, DatabaseParseError, InputError
from .labeler import (
    FallbackClusterDatabase,
    LabeledCluster,
    PositionLabel,
    TrainingDatabase,
    check_disjoint,
    label_clusters,
    merge_syllables,
)
from .errors import MalformedLabelSequenceError
from .normalizer import Diagnostic, normalize
from .script_model import ScriptTables


class EntryType(enum.Enum):
    SIMPLE_WORD = "Simple word"
    COMPOUND_WORD = "Compound word"
    PHRASE = "Phrase"
    UNKNOWN = "Unknown"


_TYPE_ALIASES = {
    "simple": EntryType.SIMPLE_WORD,
    "simple word": EntryType.SIMPLE_WORD,
    "simpleword": EntryType.SIMPLE_WORD,
    "compound": EntryType.COMPOUND_WORD,
    "compound word": EntryType.COMPOUND_WORD,
    "compoundword": EntryType.COMPOUND_WORD,
    "phrase": EntryType.PHRASE,
    "unknown": EntryType.UNKNOWN,
    "": EntryType.UNKNOWN,
}


def parse_entry_type(token: str) -> EntryType:
    return _TYPE_ALIASES.get(token.strip().lower(), EntryType.UNKNOWN)


@dataclass(frozen=True)
class LexiconEntry:
    text: str
    entry_type: EntryType = EntryType.UNKNOWN
    meaning: Optional[str] = None


def ingest_lexicon(source: Union[str, bytes, IO]) -> List[LexiconEntry]:
    """Read a lexicon TSV: text[<TAB>type[<TAB>meaning]].

    Blank lines and # comments are skipped; duplicate texts are kept because
    frequency matters downstream.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"lexicon is not valid UTF-8 at byte {exc.start}") from None
    entries: List[LexiconEntry] = []
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        text = fields[0].strip()
        if not text:
            raise InputError(f"line {line_no}: empty entry text")
        entry_type = parse_entry_type(fields[1]) if len(fields) > 1 else EntryType.UNKNOWN
        meaning = fields[2].strip() if len(fields) > 2 and fields[2].strip() else None
        entries.append(LexiconEntry(text, entry_type, meaning))
    return entries


@dataclass
class ClusterInventory:
    """DB (2): every distinct cluster with its frequency, plus the per-entry
    cluster sequences the fallback seeding works from."""

    counts: Dict[str, int] = field(default_factory=dict)
    sequences: List[Tuple[str, ...]] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def build_cluster_inventory(
    entries: Sequence[LexiconEntry], tables: ScriptTables
) -> ClusterInventory:
    """Normalize and split every entry; per-entry problems become diagnostics."""
    inv = ClusterInventory()
    for ordinal, entry in enumerate(entries):
        diags: List[Diagnostic] = []
        canon = normalize(entry.text, tables, lenient=True, diagnostics=diags)
        clusters = split_clusters(canon, tables)
        seq = tuple(c.text for c in clusters)
        inv.sequences.append(seq)
        for text in seq:
            inv.counts[text] = inv.counts.get(text, 0) + 1
        for d in diags:
            inv.diagnostics.append(f"entry {ordinal}: column {d.column}: {d.code}: {d.message}")
    return inv


def seed_fallback_db(
    inventory: ClusterInventory, tdb: Optional[TrainingDatabase]
) -> List[Tuple[str, ...]]:
    """Adjacent cluster pairs seen in entries but absent from the TDB.

    Returned sorted, for a curation skeleton with empty label columns; the
    result is disjoint from the TDB keys by construction.
    """
    tdb_keys: Set[Tuple[str, ...]] = set(tdb.entries) if tdb is not None else set()
    pairs: Set[Tuple[str, ...]] = set()
    for seq in inventory.sequences:
        for i in range(len(seq) - 1):
            pairs.add((seq[i], seq[i + 1]))
    return sorted(pairs - tdb_keys)


def write_fallback_skeleton(keys: Sequence[Tuple[str, ...]]) -> str:
    return "".join(f"{'+'.join(key)}\t\n" for key in keys)


@dataclass
class SyllableDatabase:
    """DB (7): known syllables with frequencies.

    Provenance (which entries contributed a syllable) is kept in memory for
    debugging but is not persisted and does not take part in equality.
    """

    syllables: Dict[str, int] = field(default_factory=dict)
    provenance: Dict[str, Set[int]] = field(default_factory=dict, compare=False)

    def add(self, text: str, source_ordinal: Optional[int] = None) -> None:
        self.syllables[text] = self.syllables.get(text, 0) + 1
        if source_ordinal is not None:
            self.provenance.setdefault(text, set()).add(source_ordinal)

    def __len__(self) -> int:
        return len(self.syllables)


@dataclass
class PipelineReport:
    entries_processed: int = 0
    syllables_emitted: int = 0
    ambiguity_count: int = 0
    malformed_count: int = 0
    per_type: Dict[EntryType, List[int]] = field(default_factory=dict)  # [quantity, syllables]

    def count(self, entry_type: EntryType, syllables: int) -> None:
        row = self.per_type.setdefault(entry_type, [0, 0])
        row[0] += 1
        row[1] += syllables

    def render_tsv(self) -> str:
        out = io.StringIO()
        out.write("Type\tQuantity\tSyllable\n")
        for entry_type in EntryType:
            if entry_type in self.per_type:
                q, s = self.per_type[entry_type]
                out.write(f"{entry_type.value}\t{q}\t{s}\n")
        out.write(f"Total\t{self.entries_processed}\t{self.syllables_emitted}\n")
        return out.getvalue()


@dataclass(frozen=True)
class ReviewItem:
    """One review-queue row: a defaulted or malformed cluster sequence."""

    entry_ordinal: int
    position: int
    clusters: Tuple[str, ...]
    chosen: Tuple[PositionLabel, ...]
    candidates: Tuple[Tuple[PositionLabel, ...], ...]
    reason: str  # "ambiguity" | "malformed-entry"


@dataclass
class BuildResult:
    sdb: SyllableDatabase
    report: PipelineReport
    review_queue: List[ReviewItem]
    labeled_entries: List[List[LabeledCluster]]
    diagnostics: List[str]


def build_sdb(
    entries: Sequence[LexiconEntry],
    tables: ScriptTables,
    tdb: Optional[TrainingDatabase] = None,
    fallback: Optional[FallbackClusterDatabase] = None,
) -> BuildResult:
    """Run the whole pipeline: normalize, split, label, merge, accumulate."""
    check_disjoint(tdb, fallback)
    sdb = SyllableDatabase()
    report = PipelineReport()
    review: List[ReviewItem] = []
    labeled_entries: List[List[LabeledCluster]] = []
    diagnostics: List[str] = []

    for ordinal, entry in enumerate(entries):
        diags: List[Diagnostic] = []
        canon = normalize(entry.text, tables, lenient=True, diagnostics=diags)
        for d in diags:
            diagnostics.append(f"entry {ordinal}: column {d.column}: {d.code}: {d.message}")
        clusters = split_clusters(canon, tables)
        labeled, records = label_clusters(clusters, tables, tdb, fallback)
        labeled_entries.append(labeled)
        report.entries_processed += 1
        for rec in records:
            review.append(
                ReviewItem(ordinal, rec.position, rec.clusters, rec.chosen, rec.candidates, "ambiguity")
            )
        report.ambiguity_count += len(records)
        try:
            syllables = merge_syllables(labeled)
        except MalformedLabelSequenceError as exc:
            report.malformed_count += 1
            report.count(entry.entry_type, 0)
            diagnostics.append(f"entry {ordinal}: skipped, {exc}")
            review.append(
                ReviewItem(
                    ordinal,
                    0,
                    tuple(c.text for c in clusters),
                    tuple(lc.label for lc in labeled),
                    (),
                    "malformed-entry",
                )
            )
            continue
        for syl in syllables:
            # The SDB stores Khmer syllables only: units made of foreign
            # material (digits, Latin, punctuation) are emitted but not kept.
            if all(c.pattern is not PatternKind.FOREIGN for c in syl.clusters):
                sdb.add(syl.text, ordinal)
        report.syllables_emitted += len(syllables)
        report.count(entry.entry_type, len(syllables))
    return BuildResult(sdb, report, review, labeled_entries, diagnostics)


# ---------------------------------------------------------------------------
# Persistence

def persist_sdb(db: SyllableDatabase, sink: Optional[IO] = None) -> str:
    """syllable<TAB>frequency, sorted by codepoint so runs are byte-identical."""
    text = "".join(f"{syl}\t{db.syllables[syl]}\n" for syl in sorted(db.syllables))
    if sink is not None:
        sink.write(text)
    return text


def load_sdb(source: Union[str, bytes, IO], tables: ScriptTables) -> SyllableDatabase:
    """Load an SDB file, validating every key against the grammar.

    A key must be canonical and re-split into 1-3 non-foreign clusters.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    db = SyllableDatabase()
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise DatabaseParseError(line_no, "expected syllable<TAB>frequency")
        text, freq_txt = fields
        try:
            freq = int(freq_txt)
        except ValueError:
            raise DatabaseParseError(line_no, f"bad frequency {freq_txt!r}") from None
        if freq < 1:
            raise DatabaseInvariantError(f"syllable {text!r} has frequency {freq} < 1")
        if normalize(text, tables, lenient=True).text != text:
            raise DatabaseInvariantError(f"syllable {text!r} is not canonical")
        clusters = split_clusters(text, tables)
        if not 1 <= len(clusters) <= 3:
            raise DatabaseInvariantError(
                f"syllable {text!r} splits into {len(clusters)} clusters"
            )
        if any(c.pattern is PatternKind.FOREIGN for c in clusters):
            raise DatabaseInvariantError(f"syllable {text!r} is not grammar-conformant")
        if text in db.syllables:
            raise DatabaseParseError(line_no, f"duplicate syllable {text!r}")
        db.syllables[text] = freq
    return db


def persist_labeled_clusters(
    labeled_entries: Sequence[Sequence[LabeledCluster]], sink: Optional[IO] = None
) -> str:
    """DB (6): entry-ordinal, position, cluster, label, confidence."""
    lines = []
    for ordinal, labeled in enumerate(labeled_entries):
        for lc in labeled:
            lines.append(
                f"{ordinal}\t{lc.position}\t{lc.cluster.text}\t{lc.label.value}\t{lc.confidence.value}\n"
            )
    text = "".join(lines)
    if sink is not None:
        sink.write(text)
    return text


def persist_review_queue(items: Sequence[ReviewItem], sink: Optional[IO] = None) -> str:
    """Review rows: cluster-sequence, chosen labels, |-separated candidates."""
    lines = []
    for item in sorted(items, key=lambda it: (it.entry_ordinal, it.position)):
        clusters = "+".join(item.clusters)
        chosen = ",".join(lab.value for lab in item.chosen)
        cands = "|".join(",".join(lab.value for lab in cand) for cand in item.candidates)
        lines.append(f"{clusters}\t{chosen}\t{cands}\n")
    text = "".join(lines)
    if sink is not None:
        sink.write(text)
    return text
