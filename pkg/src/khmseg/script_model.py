"""Khmer codepoint classification and the characteristic marker tables.

Class membership is not hardcoded: it is loaded from a line-oriented tables
file (see data/khmer_tables.txt for the shipped default) so that the
contested linguistic facts stay auditable and editable without code changes.
All structures returned by load_tables are immutable after load and safe to
share across threads.
"""

from __future__ import annotations

import enum
import io
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from typing import IO, Iterable, Optional, Union

from .errors import TablesInvariantError, TablesParseError

# Khmer block plus the lunar-date symbols block.
KHMER_RANGES = ((0x1780, 0x17FF), (0x19E0, 0x19FF))


class Kind(enum.Enum):
    """Classification of one scalar value."""

    CONSONANT_A = "ConsonantA"
    CONSONANT_O = "ConsonantO"
    DEPENDENT_VOWEL = "DependentVowel"
    INDEPENDENT_VOWEL = "IndependentVowel"
    COENG = "Coeng"
    BEGIN_SIGN = "BeginSign"
    END_SIGN = "EndSign"
    REPLACEMENT_SIGN = "ReplacementSign"
    DIGIT = "Digit"
    OTHER_SIGN = "OtherSign"
    FOREIGN = "Foreign"


class MarkerRole(enum.Enum):
    BEGIN = "Begin"
    END = "End"
    BOTH = "Both"
    NONE = "None"


@dataclass(frozen=True)
class CodepointClass:
    kind: Kind
    value: int

    @property
    def digit_value(self) -> Optional[int]:
        """Numeric value 0-9 for Digit scalars, None otherwise."""
        if self.kind is Kind.DIGIT:
            return self.value - 0x17E0
        return None


# File sections that define a scalar's kind (pairwise disjoint).
_CLASS_SECTIONS = (
    "CONSONANT_A",
    "CONSONANT_O",
    "DEP_VOWEL",
    "INDEP_VOWEL",
    "COENG",
    "SHIFT_SIGN",
    "BEGIN_SIGN",
    "END_SIGN",
    "REPLACEMENT_SIGN",
    "DIGIT",
)
_MARKER_SECTIONS = ("BEGIN_SIGN", "END_SIGN", "STANDALONE")
_ALL_SECTIONS = set(_CLASS_SECTIONS) | {"STANDALONE", "SIGN_UNIFY", "SUBCONS_RULE"}


@dataclass(frozen=True)
class ScriptTables:
    """Immutable inventory of the script's classes, markers and rewrite rules."""

    consonant_series: dict  # scalar -> "A" | "O"
    dependent_vowel_units: tuple  # 24 units, each a tuple of 1-2 scalars
    dependent_vowels: frozenset  # scalars used by the units
    independent_vowels: frozenset
    coeng: int
    shift_signs: frozenset  # U+17C9/U+17CA, X1-class but not markers
    begin_markers: frozenset
    end_sign_scalars: frozenset  # END_SIGN section only
    replacement_signs: frozenset
    standalone_markers: frozenset
    digits: frozenset
    sign_unification: dict  # tuple[int,...] -> tuple[int,...]
    subconsonant_rules: dict  # (main scalar | "*", from pair) -> to pair
    _kind_map: dict = field(repr=False, compare=False)

    @property
    def end_markers(self) -> frozenset:
        # Robat-bearing clusters always close a syllable (ធម៌, ព័ត៌មាន).
        return self.end_sign_scalars | self.replacement_signs

    @property
    def vowel_codas(self) -> frozenset:
        """Second elements of composite vowel units (nikahit, reahmuk)."""
        return frozenset(u[1] for u in self.dependent_vowel_units if len(u) == 2)

    @property
    def main_vowels(self) -> frozenset:
        return self.dependent_vowels - self.vowel_codas

    def rule_mains(self) -> frozenset:
        """Consonants with a specific SUBCONS_RULE (excluded from '*' rules)."""
        return frozenset(m for (m, _f) in self.subconsonant_rules if m != "*")


def classify(cp: int, tables: ScriptTables) -> CodepointClass:
    """Total classification: any scalar value maps to exactly one Kind."""
    kind = tables._kind_map.get(cp)
    if kind is None:
        if any(lo <= cp <= hi for lo, hi in KHMER_RANGES):
            kind = Kind.OTHER_SIGN
        else:
            kind = Kind.FOREIGN
    return CodepointClass(kind, cp)


def _is_printable(cp: int) -> bool:
    cat = unicodedata.category(chr(cp))
    return cat[0] not in ("C", "Z")


def marker_role(cp: int, tables: ScriptTables) -> MarkerRole:
    """Position a scalar signals per the begin/end/standalone tables.

    Digits and printable foreign characters are Both without being listed:
    they form standalone syllables on their own.
    """
    kind = classify(cp, tables).kind
    if cp in tables.standalone_markers or kind is Kind.DIGIT:
        return MarkerRole.BOTH
    begin = cp in tables.begin_markers
    end = cp in tables.end_markers
    if begin and end:
        return MarkerRole.BOTH
    if begin:
        return MarkerRole.BEGIN
    if end:
        return MarkerRole.END
    if kind is Kind.FOREIGN and _is_printable(cp):
        return MarkerRole.BOTH
    return MarkerRole.NONE


def _parse_cp(token: str, line_no: int) -> int:
    token = token.strip()
    if not token.upper().startswith("U+"):
        raise TablesParseError(line_no, f"expected U+XXXX codepoint, got {token!r}")
    try:
        return int(token[2:], 16)
    except ValueError:
        raise TablesParseError(line_no, f"bad codepoint {token!r}") from None


def _parse_seq(token: str, line_no: int) -> tuple:
    return tuple(_parse_cp(t, line_no) for t in token.split(","))


def load_tables(source: Union[str, bytes, IO]) -> ScriptTables:
    """Parse and validate a tables file.

    Accepts file content (str/bytes) or a readable stream.  Any invariant
    violation is an error, not a warning.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")

    sections: dict = {name: [] for name in _ALL_SECTIONS}
    seen_any = False
    for line_no, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        seen_any = True
        fields = line.split("\t")
        name = fields[0].strip()
        if name not in _ALL_SECTIONS:
            raise TablesParseError(line_no, f"unknown section {name!r}")
        body = [f for f in fields[1:] if f.strip()]
        if name == "SIGN_UNIFY":
            if len(body) != 2:
                raise TablesParseError(line_no, "SIGN_UNIFY needs from-seq and to-seq")
            sections[name].append(
                (_parse_seq(body[0], line_no), _parse_seq(body[1], line_no))
            )
        elif name == "SUBCONS_RULE":
            if len(body) != 3:
                raise TablesParseError(line_no, "SUBCONS_RULE needs main, from, to")
            main = body[0].strip()
            main_key = "*" if main == "*" else _parse_cp(main, line_no)
            sections[name].append(
                (main_key, _parse_seq(body[1], line_no), _parse_seq(body[2], line_no))
            )
        else:
            if len(body) != 1:
                raise TablesParseError(line_no, f"{name} takes one codepoint entry")
            seq = _parse_seq(body[0], line_no)
            if name != "DEP_VOWEL" and len(seq) != 1:
                raise TablesParseError(line_no, f"{name} entries are single scalars")
            sections[name].append(seq)

    if not seen_any:
        raise TablesParseError(0, "empty tables file")
    return _build_tables(sections)


def _build_tables(sections: dict) -> ScriptTables:
    def scalars(name):
        return [seq[0] for seq in sections[name]]

    kind_map: dict = {}

    def assign(cps: Iterable[int], kind: Kind, section: str) -> None:
        for cp in cps:
            if cp in kind_map and kind_map[cp] is not kind:
                raise TablesInvariantError(
                    f"U+{cp:04X} in {section} already classified {kind_map[cp].value}"
                )
            kind_map[cp] = kind

    assign(scalars("CONSONANT_A"), Kind.CONSONANT_A, "CONSONANT_A")
    assign(scalars("CONSONANT_O"), Kind.CONSONANT_O, "CONSONANT_O")
    dep_units = tuple(tuple(seq) for seq in sections["DEP_VOWEL"])
    for unit in dep_units:
        if not 1 <= len(unit) <= 2:
            raise TablesInvariantError(f"dependent vowel unit {unit} must be 1-2 scalars")
    dep_scalars = frozenset(cp for unit in dep_units for cp in unit)
    assign(dep_scalars, Kind.DEPENDENT_VOWEL, "DEP_VOWEL")
    assign(scalars("INDEP_VOWEL"), Kind.INDEPENDENT_VOWEL, "INDEP_VOWEL")

    coengs = scalars("COENG")
    if len(coengs) != 1:
        raise TablesInvariantError("COENG must list exactly one scalar")
    assign(coengs, Kind.COENG, "COENG")

    assign(scalars("SHIFT_SIGN"), Kind.BEGIN_SIGN, "SHIFT_SIGN")
    assign(scalars("BEGIN_SIGN"), Kind.BEGIN_SIGN, "BEGIN_SIGN")
    assign(scalars("END_SIGN"), Kind.END_SIGN, "END_SIGN")
    assign(scalars("REPLACEMENT_SIGN"), Kind.REPLACEMENT_SIGN, "REPLACEMENT_SIGN")

    digits = sorted(scalars("DIGIT"))
    if len(digits) != 10 or digits != list(range(digits[0], digits[0] + 10)):
        raise TablesInvariantError("DIGIT must list a contiguous run of 10 scalars")
    assign(digits, Kind.DIGIT, "DIGIT")

    # Standalone markers may reference scalars classified elsewhere, but
    # attaching marks among them (Mn/Mc) still need a sign kind so the grammar
    # can bind them as cluster tails (ៈ, ៎, ៏).
    standalone = frozenset(scalars("STANDALONE"))
    for cp in sorted(standalone):
        if cp not in kind_map:
            if unicodedata.category(chr(cp)) in ("Mn", "Mc"):
                kind_map[cp] = Kind.END_SIGN
            elif any(lo <= cp <= hi for lo, hi in KHMER_RANGES):
                kind_map[cp] = Kind.OTHER_SIGN
            else:
                raise TablesInvariantError(
                    f"STANDALONE lists non-Khmer scalar U+{cp:04X}"
                )

    tables = ScriptTables(
        consonant_series={
            **{cp: "A" for cp in scalars("CONSONANT_A")},
            **{cp: "O" for cp in scalars("CONSONANT_O")},
        },
        dependent_vowel_units=dep_units,
        dependent_vowels=dep_scalars,
        independent_vowels=frozenset(scalars("INDEP_VOWEL")),
        coeng=coengs[0],
        shift_signs=frozenset(scalars("SHIFT_SIGN")),
        begin_markers=frozenset(scalars("BEGIN_SIGN")),
        end_sign_scalars=frozenset(scalars("END_SIGN")),
        replacement_signs=frozenset(scalars("REPLACEMENT_SIGN")),
        standalone_markers=standalone,
        digits=frozenset(digits),
        sign_unification={k: v for k, v in sections["SIGN_UNIFY"]},
        subconsonant_rules={(m, f): t for m, f, t in sections["SUBCONS_RULE"]},
        _kind_map=kind_map,
    )
    _validate(tables)
    return tables


def _validate(tables: ScriptTables) -> None:
    # Markers must be classifiable script material, never digits or foreign
    # scalars (those are implicitly standalone already).
    for name, marks in (
        ("BEGIN_SIGN", tables.begin_markers),
        ("END_SIGN", tables.end_sign_scalars),
        ("STANDALONE", tables.standalone_markers),
    ):
        for cp in sorted(marks):
            kind = classify(cp, tables).kind
            if kind in (Kind.DIGIT, Kind.FOREIGN):
                raise TablesInvariantError(
                    f"{name} lists U+{cp:04X} but classify says {kind.value}"
                )
    # A marker in both begin and end tables must behave as standalone.
    both = tables.begin_markers & tables.end_markers
    if not both <= tables.standalone_markers:
        bad = sorted(both - tables.standalone_markers)[0]
        raise TablesInvariantError(
            f"U+{bad:04X} is in both begin and end tables but not standalone"
        )
    # Sign unification must be idempotent: no replacement contains a key.
    for key in tables.sign_unification:
        if not key:
            raise TablesInvariantError("empty SIGN_UNIFY key")
        for value in tables.sign_unification.values():
            for i in range(len(value) - len(key) + 1):
                if value[i : i + len(key)] == key:
                    raise TablesInvariantError(
                        f"SIGN_UNIFY replacement {value} contains key {key}"
                    )
    # Subscript rules: pairs must be coeng+consonant, outputs must be fixed points.
    mains = tables.rule_mains()
    for (main, frm), to in tables.subconsonant_rules.items():
        for pair in (frm, to):
            if len(pair) != 2 or pair[0] != tables.coeng or pair[1] not in tables.consonant_series:
                raise TablesInvariantError(
                    f"SUBCONS_RULE pair {pair} is not coeng+consonant"
                )
        resolved = _resolve_subcons(tables, mains, main if main != "*" else None, to)
        if resolved != to:
            raise TablesInvariantError(
                f"SUBCONS_RULE output {to} is rewritten again to {resolved}"
            )


def _resolve_subcons(tables, mains, main, pair):
    """Rule lookup used by validation and by the normalizer."""
    if main is not None and (main, pair) in tables.subconsonant_rules:
        return tables.subconsonant_rules[(main, pair)]
    if main is not None and main not in mains and ("*", pair) in tables.subconsonant_rules:
        return tables.subconsonant_rules[("*", pair)]
    if main is None and ("*", pair) in tables.subconsonant_rules:
        return tables.subconsonant_rules[("*", pair)]
    return pair


def serialize_tables(tables: ScriptTables) -> str:
    """Emit the tables in the load_tables format (comments are not preserved)."""
    out = io.StringIO()

    def seq(cps):
        return ",".join(f"U+{cp:04X}" for cp in cps)

    for cp in sorted(c for c, s in tables.consonant_series.items() if s == "A"):
        out.write(f"CONSONANT_A\t{seq([cp])}\n")
    for cp in sorted(c for c, s in tables.consonant_series.items() if s == "O"):
        out.write(f"CONSONANT_O\t{seq([cp])}\n")
    for unit in tables.dependent_vowel_units:
        out.write(f"DEP_VOWEL\t{seq(unit)}\n")
    for name, cps in (
        ("INDEP_VOWEL", tables.independent_vowels),
        ("COENG", [tables.coeng]),
        ("SHIFT_SIGN", tables.shift_signs),
        ("BEGIN_SIGN", tables.begin_markers),
        ("END_SIGN", tables.end_sign_scalars),
        ("REPLACEMENT_SIGN", tables.replacement_signs),
        ("STANDALONE", tables.standalone_markers),
        ("DIGIT", tables.digits),
    ):
        for cp in sorted(cps):
            out.write(f"{name}\t{seq([cp])}\n")
    for key in sorted(tables.sign_unification):
        out.write(f"SIGN_UNIFY\t{seq(key)}\t{seq(tables.sign_unification[key])}\n")
    for main, frm in sorted(
        tables.subconsonant_rules, key=lambda k: (k[0] == "*", k)
    ):
        main_txt = "*" if main == "*" else f"U+{main:04X}"
        out.write(
            f"SUBCONS_RULE\t{main_txt}\t{seq(frm)}\t{seq(tables.subconsonant_rules[(main, frm)])}\n"
        )
    return out.getvalue()


_DEFAULT: Optional[ScriptTables] = None


def default_tables() -> ScriptTables:
    """The curated tables shipped with the package (loaded once)."""
    global _DEFAULT
    if _DEFAULT is None:
        data = resources.files("khmseg.data").joinpath("khmer_tables.txt").read_bytes()
        _DEFAULT = load_tables(data)
    return _DEFAULT
