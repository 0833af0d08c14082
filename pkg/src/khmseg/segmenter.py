"""Free-text syllable segmentation, lexicon word grouping, and evaluation.

segment_syllables runs the full pipeline over arbitrary text and never fails:
labels degrade to the structural default and merging is lenient.  The output
joined with the separator reproduces the normalized input exactly when the
separators are stripped.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import IO, Dict, List, Optional, Sequence, Tuple, Union

from .cluster_grammar import split_clusters
from .errors import EvalInputError, InputError
from .labeler import (
    FallbackClusterDatabase,
    TrainingDatabase,
    label_clusters,
    merge_syllables_lenient,
)
from .normalizer import Diagnostic, normalize
from .script_model import ScriptTables
from .sdb_pipeline import EntryType, LexiconEntry, SyllableDatabase, parse_entry_type

DEFAULT_SEPARATOR = "|"  # VERTICAL LINE, the display convention


@dataclass(frozen=True)
class SegmentedText:
    units: Tuple[str, ...]
    separator: str = DEFAULT_SEPARATOR

    @property
    def rendered(self) -> str:
        return self.separator.join(self.units)

    @property
    def stripped(self) -> str:
        return "".join(self.units)

    def __str__(self) -> str:
        return self.rendered


def segment_syllables(
    text: str,
    tables: ScriptTables,
    tdb: Optional[TrainingDatabase] = None,
    fallback: Optional[FallbackClusterDatabase] = None,
    sdb: Optional[SyllableDatabase] = None,
    sep: str = DEFAULT_SEPARATOR,
    diagnostics: Optional[List[str]] = None,
) -> SegmentedText:
    """Split running text into syllables (total: degrades with diagnostics)."""
    norm_diags: List[Diagnostic] = []
    canon = normalize(text, tables, lenient=True, diagnostics=norm_diags)
    if diagnostics is not None:
        diagnostics.extend(f"column {d.column}: {d.code}: {d.message}" for d in norm_diags)
    clusters = split_clusters(canon, tables)
    labeled, _records = label_clusters(clusters, tables, tdb, fallback, sdb=sdb)
    syllables, notes = merge_syllables_lenient(labeled)
    if diagnostics is not None:
        diagnostics.extend(notes)
    return SegmentedText(tuple(s.text for s in syllables), sep)


def segment_words(
    text: str,
    lexicon: Sequence[LexiconEntry],
    tables: ScriptTables,
    tdb: Optional[TrainingDatabase] = None,
    fallback: Optional[FallbackClusterDatabase] = None,
    sdb: Optional[SyllableDatabase] = None,
    sep: str = DEFAULT_SEPARATOR,
    diagnostics: Optional[List[str]] = None,
) -> SegmentedText:
    """Greedy longest-match of syllable runs against the lexicon.

    Word boundaries always coincide with syllable boundaries; syllables not
    covered by any lexicon entry pass through as single-syllable words with a
    diagnostic.
    """
    known = {normalize(e.text, tables, lenient=True).text for e in lexicon}
    max_len = max((len(t) for t in known), default=0)
    syllables = segment_syllables(text, tables, tdb, fallback, sdb, sep, diagnostics).units
    words: List[str] = []
    i = 0
    while i < len(syllables):
        best_j = None
        candidate = ""
        for j in range(i, len(syllables)):
            candidate += syllables[j]
            if len(candidate) > max_len:
                break
            if candidate in known:
                best_j = j
        if best_j is None:
            if diagnostics is not None and syllables[i] not in known:
                diagnostics.append(f"syllable {syllables[i]!r} not in lexicon")
            words.append(syllables[i])
            i += 1
        else:
            words.append("".join(syllables[i : best_j + 1]))
            i = best_j + 1
    return SegmentedText(tuple(words), sep)


# ---------------------------------------------------------------------------
# Evaluation

@dataclass(frozen=True)
class EvalRow:
    type_label: str
    quantity: int
    syllables: int
    accuracy: float  # percent


@dataclass(frozen=True)
class EvalReport:
    rows: Tuple[EvalRow, ...]
    total: EvalRow

    @property
    def overall(self) -> float:
        return self.total.accuracy

    def render_tsv(self) -> str:
        out = io.StringIO()
        out.write("Type\tQuantity\tSyllable\tAccuracy\n")
        for row in self.rows:
            out.write(_render_row(row))
        out.write(_render_row(self.total))
        return out.getvalue()

    @classmethod
    def parse_tsv(cls, source: Union[str, bytes, IO]) -> "EvalReport":
        """Round-trips render_tsv output; stored totals are taken verbatim."""
        if hasattr(source, "read"):
            source = source.read()
        if isinstance(source, bytes):
            source = source.decode("utf-8")
        rows: List[EvalRow] = []
        total: Optional[EvalRow] = None
        for line_no, raw in enumerate(source.splitlines(), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("Type\t"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise EvalInputError(line_no, "expected Type/Quantity/Syllable/Accuracy")
            try:
                row = EvalRow(
                    fields[0],
                    int(fields[1]),
                    int(fields[2]),
                    float(fields[3].rstrip("%")),
                )
            except ValueError as exc:
                raise EvalInputError(line_no, str(exc)) from None
            if fields[0] == "Total":
                total = row
            else:
                rows.append(row)
        if total is None:
            raise EvalInputError(0, "report has no Total row")
        return cls(tuple(rows), total)


def _fmt_pct(value: float) -> str:
    text = f"{value:.1f}".rstrip("0").rstrip(".")
    return f"{text}%"


def _render_row(row: EvalRow) -> str:
    return f"{row.type_label}\t{row.quantity}\t{row.syllables}\t{_fmt_pct(row.accuracy)}\n"


def _parse_eval_line(line: str, line_no: int, sep: str) -> Tuple[Tuple[str, ...], Optional[str]]:
    fields = line.split("\t")
    units = tuple(fields[0].split(sep)) if fields[0] else ()
    type_token = fields[1] if len(fields) > 1 else None
    return units, type_token


def evaluate(
    gold_lines: Sequence[str],
    predicted_lines: Sequence[str],
    sep: str = DEFAULT_SEPARATOR,
) -> EvalReport:
    """Exact-match evaluation of predicted against gold segmentations.

    Lines must align one-to-one and agree on the underlying text; a line is
    correct only when its unit sequence equals gold's exactly.  Per-type
    accuracy is correct syllables / gold syllables x 100; the overall row is
    the syllable-count-weighted mean.
    """
    gold_lines = [l for l in gold_lines]
    predicted_lines = [l for l in predicted_lines]
    if len(gold_lines) != len(predicted_lines):
        raise EvalInputError(
            min(len(gold_lines), len(predicted_lines)) + 1,
            f"line counts differ: gold {len(gold_lines)}, predicted {len(predicted_lines)}",
        )
    stats: Dict[EntryType, List[int]] = {}  # [quantity, gold syllables, correct syllables]
    for line_no, (gline, pline) in enumerate(zip(gold_lines, predicted_lines), start=1):
        gunits, gtype = _parse_eval_line(gline.rstrip("\n"), line_no, sep)
        punits, _ptype = _parse_eval_line(pline.rstrip("\n"), line_no, sep)
        if "".join(gunits) != "".join(punits):
            raise EvalInputError(
                line_no, "gold and prediction disagree on the underlying text"
            )
        entry_type = parse_entry_type(gtype or "")
        row = stats.setdefault(entry_type, [0, 0, 0])
        row[0] += 1
        row[1] += len(gunits)
        if gunits == punits:
            row[2] += len(gunits)
    rows: List[EvalRow] = []
    total_q = total_s = total_c = 0
    for entry_type in EntryType:
        if entry_type not in stats:
            continue
        q, s, c = stats[entry_type]
        accuracy = 100.0 * c / s if s else 100.0
        rows.append(EvalRow(entry_type.value, q, s, accuracy))
        total_q += q
        total_s += s
        total_c += c
    overall = 100.0 * total_c / total_s if total_s else 100.0
    return EvalReport(tuple(rows), EvalRow("Total", total_q, total_s, overall))
