"""Keystroke-order normalization: reorder, sign unification, subscript unification.

A raw Khmer sequence may encode one syllable in several keystroke orders.
normalize() converts them all to a single canonical form with the fixed
intra-unit slot order

    base, coeng+subscript pairs, register shifter / samyok, dependent vowel,
    nikahit/reahmuk, trailing signs

Within the coeng group, non-RO subscripts keep their typed relative order and
coeng-RO sorts last (both typed orders of e.g. ្ត្រ occur in real text and must
converge).  This is a script-specific ordering, deliberately NOT Unicode
NFC/NFD (which leave Khmer untouched).

All functions are pure over immutable tables and callable concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from .errors import DanglingCoengError
from .script_model import Kind, ScriptTables, _resolve_subcons, classify

RawInput = Union[str, Sequence[int]]


@dataclass(frozen=True)
class Diagnostic:
    column: int  # offset into the raw input
    code: str
    message: str


DANGLING_COENG = "dangling-coeng"
EXTRA_VOWEL = "extra-vowel"
STRAY_MARK = "stray-mark"


@dataclass(frozen=True)
class CanonicalSequence:
    """A normalized codepoint sequence plus raw->canonical index moves."""

    codepoints: Tuple[int, ...]
    provenance: Tuple[Tuple[int, int], ...] = ()

    @property
    def text(self) -> str:
        return "".join(chr(cp) for cp in self.codepoints)

    def __len__(self) -> int:
        return len(self.codepoints)


def _as_codepoints(seq: RawInput) -> Tuple[int, ...]:
    if isinstance(seq, str):
        return tuple(ord(c) for c in seq)
    if isinstance(seq, CanonicalSequence):
        return seq.codepoints
    return tuple(seq)


# Slot ranks for the canonical intra-unit order.
_R_BASE = 0
_R_ROBAT = 1  # robat rides the base directly (ព័ត៌មាន)
_R_COENG = 2
_R_COENG_RO = 3  # coeng ro second
_R_SHIFT = 4  # shifters and samyok, pre-vowel
_R_VOWEL = 5
_R_CODA = 6  # nikahit / reahmuk
_R_TAIL = 7  # bantoc, toandakhiat, ...

_RO = 0x179A


def _rank(cp: int, tables: ScriptTables) -> Optional[int]:
    """Slot rank of an attaching scalar; None for anything that starts/breaks units."""
    kind = classify(cp, tables).kind
    if kind is Kind.REPLACEMENT_SIGN:
        return _R_ROBAT
    if kind is Kind.BEGIN_SIGN:
        return _R_SHIFT
    if kind is Kind.DEPENDENT_VOWEL:
        return _R_CODA if cp in tables.vowel_codas else _R_VOWEL
    if kind is Kind.END_SIGN:
        return _R_TAIL
    return None


def reorder(
    seq: RawInput,
    tables: ScriptTables,
    lenient: bool = False,
    diagnostics: Optional[List[Diagnostic]] = None,
) -> CanonicalSequence:
    """Phase 1: put every orthographic unit into canonical slot order.

    The output is a permutation of the input (multiset preserved); already
    canonical input comes back unchanged.  A coeng without a following
    consonant raises DanglingCoengError, or is dropped with a diagnostic in
    lenient mode.
    """
    cps = _as_codepoints(seq)
    n = len(cps)
    # items: (rank, raw_start, [cps]); rank None = standalone pass-through
    items: List[Tuple[Optional[int], int, List[int]]] = []
    unit_start: Optional[int] = None  # index into items of the current unit's base
    i = 0
    while i < n:
        cp = cps[i]
        kind = classify(cp, tables).kind
        if kind is Kind.COENG:
            if i + 1 < n and classify(cps[i + 1], tables).kind in (
                Kind.CONSONANT_A,
                Kind.CONSONANT_O,
                Kind.INDEPENDENT_VOWEL,
            ):
                rank = _R_COENG_RO if cps[i + 1] == _RO else _R_COENG
                if unit_start is None:
                    items.append((None, i, [cp, cps[i + 1]]))
                    if diagnostics is not None:
                        diagnostics.append(
                            Diagnostic(i, STRAY_MARK, "coeng pair before any base")
                        )
                else:
                    items.append((rank, i, [cp, cps[i + 1]]))
                i += 2
                continue
            if not lenient:
                raise DanglingCoengError(i)
            if diagnostics is not None:
                diagnostics.append(Diagnostic(i, DANGLING_COENG, "dropped dangling coeng"))
            i += 1
            continue
        if kind in (Kind.CONSONANT_A, Kind.CONSONANT_O, Kind.INDEPENDENT_VOWEL):
            unit_start = len(items)
            items.append((_R_BASE, i, [cp]))
        else:
            rank = _rank(cp, tables)
            if rank is None or unit_start is None:
                # digits, punctuation, foreign text, or a mark with no base
                if rank is not None and diagnostics is not None:
                    diagnostics.append(
                        Diagnostic(i, STRAY_MARK, f"mark U+{cp:04X} has no base")
                    )
                items.append((None, i, [cp]))
                if rank is None:
                    unit_start = None
            else:
                items.append((rank, i, [cp]))
        i += 1

    # Stable-sort each unit's attachments by rank.
    out_items: List[Tuple[Optional[int], int, List[int]]] = []
    unit: List[Tuple[Optional[int], int, List[int]]] = []

    def flush():
        if not unit:
            return
        base, rest = unit[0], unit[1:]
        out_items.append(base)
        out_items.extend(sorted(rest, key=lambda it: it[0]))
        if diagnostics is not None:
            vowels = [it for it in rest if it[0] == _R_VOWEL]
            if len(vowels) > 1:
                diagnostics.append(
                    Diagnostic(vowels[1][1], EXTRA_VOWEL, "unit has multiple vowels")
                )
        unit.clear()

    for item in items:
        rank = item[0]
        if rank == _R_BASE:
            flush()
            unit.append(item)
        elif rank is None:
            flush()
            out_items.append(item)
        else:
            unit.append(item)
    flush()

    out: List[int] = []
    moves: List[Tuple[int, int]] = []
    for _rank_, raw_start, group in out_items:
        for offset, cp in enumerate(group):
            if raw_start + offset != len(out):
                moves.append((raw_start + offset, len(out)))
            out.append(cp)
    return CanonicalSequence(tuple(out), tuple(moves))


def unify_signs(seq: CanonicalSequence, tables: ScriptTables) -> CanonicalSequence:
    """Phase 2: replace table-declared sign sequences (same morpheme, one spelling).

    The output stays canonical-ordered: a replacement can turn a previously
    non-attaching scalar into a base (ឤ -> អា), so the slot order is restored
    afterwards.  Provenance keeps the phase-1 moves.
    """
    cps = seq.codepoints
    keys = sorted(tables.sign_unification, key=lambda k: (-len(k), k))
    out: List[int] = []
    i = 0
    while i < len(cps):
        for key in keys:
            if cps[i : i + len(key)] == key:
                out.extend(tables.sign_unification[key])
                i += len(key)
                break
        else:
            out.append(cps[i])
            i += 1
    reordered = reorder(tuple(out), tables, lenient=True)
    return CanonicalSequence(reordered.codepoints, seq.provenance)


def unify_subconsonant(seq: CanonicalSequence, tables: ScriptTables) -> CanonicalSequence:
    """Phase 3: rewrite coeng pairs per the (main consonant, subscript) rules."""
    cps = seq.codepoints
    mains = tables.rule_mains()
    out: List[int] = []
    main: Optional[int] = None
    i = 0
    while i < len(cps):
        cp = cps[i]
        kind = classify(cp, tables).kind
        if kind is Kind.COENG and i + 1 < len(cps):
            pair = (cp, cps[i + 1])
            if pair[1] in tables.consonant_series:
                out.extend(_resolve_subcons(tables, mains, main, pair))
                i += 2
                continue
        if kind in (Kind.CONSONANT_A, Kind.CONSONANT_O, Kind.INDEPENDENT_VOWEL):
            main = cp
        elif _rank(cp, tables) is None and kind is not Kind.COENG:
            main = None
        out.append(cp)
        i += 1
    return CanonicalSequence(tuple(out), seq.provenance)


def normalize(
    seq: RawInput,
    tables: ScriptTables,
    lenient: bool = False,
    diagnostics: Optional[List[Diagnostic]] = None,
) -> CanonicalSequence:
    """All three phases; idempotent."""
    canon = reorder(seq, tables, lenient=lenient, diagnostics=diagnostics)
    canon = unify_signs(canon, tables)
    return unify_subconsonant(canon, tables)


def normalize_text(
    text: str,
    tables: ScriptTables,
    lenient: bool = False,
    diagnostics: Optional[List[Diagnostic]] = None,
) -> str:
    return normalize(text, tables, lenient=lenient, diagnostics=diagnostics).text
