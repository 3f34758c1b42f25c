"""Set-valued case tables and their case-based belief semantics.

A case assigns a nonempty set of values to every variable and stands for
the cross product of those sets. The unconditional bpa is the relative
frequency of each distinct assignment; conditioning selects the cases
compatible with the event and then intersects (updates) their cells.
"""

from __future__ import annotations

import io
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import pandas as pd

from .errors import FormatError, FrameError, ImpossibleConditionError, MassError, SetValuedDataError
from .frames import LABEL_PATTERN, JointFrame, Variable, box, build_frame
from .mass import MassFunction, Number, as_fraction

logger = logging.getLogger(__name__)

CELL_SEPARATOR = "|"
COUNT_COLUMN = "count"


@dataclass(frozen=True)
class CaseRecord:
    values: tuple[frozenset, ...]
    count: int = 1
    id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(frozenset(v) for v in self.values))


@dataclass(frozen=True)
class CaseTable:
    frame: JointFrame
    records: tuple[CaseRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for r in self.records:
            if len(r.values) != len(self.frame.variables):
                raise FrameError(f"case {r.id or ''} does not assign every variable")
            for v, cell in zip(self.frame.variables, r.values):
                if not cell:
                    raise FrameError(f"case {r.id or ''} has an empty set for {v.name!r}")
                for label in cell:
                    v.index(label)
            if r.count < 1:
                raise FrameError(f"case {r.id or ''} has count {r.count}")

    @property
    def total(self) -> int:
        return sum(r.count for r in self.records)

    def position(self, var: str) -> int:
        self.frame.variable(var)
        return self.frame.names.index(var)

    def cell_text(self, record: CaseRecord, position: int) -> str:
        v = self.frame.variables[position]
        return CELL_SEPARATOR.join(x for x in v.domain if x in record.values[position])

    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for r in self.records:
            row = {"id": r.id}
            row.update({name: self.cell_text(r, i) for i, name in enumerate(self.frame.names)})
            row[COUNT_COLUMN] = r.count
            rows.append(row)
        return pd.DataFrame(rows, columns=["id", *self.frame.names, COUNT_COLUMN])

    def to_csv(self) -> str:
        return self.to_dataframe().drop(columns="id").to_csv(index=False, lineterminator="\n")


def table_from_rows(frame: JointFrame, rows: Iterable[tuple[Mapping[str, Iterable[str]], int]]) -> CaseTable:
    """Build a table from (assignment, count) pairs; equal assignments are merged."""
    merged: dict[tuple, CaseRecord] = {}
    for i, (assignment, count) in enumerate(rows, start=1):
        values = tuple(frozenset(assignment[n]) for n in frame.names)
        if values in merged:
            first = merged[values]
            merged[values] = CaseRecord(values, first.count + count, first.id)
        else:
            merged[values] = CaseRecord(values, count, str(i))
    return CaseTable(frame, tuple(merged.values()))


def _parser_line(exc: Exception) -> int | None:
    found = re.search(r"line (\d+)", str(exc))
    return int(found.group(1)) if found else None


def ingest_cases(text: str, frame: JointFrame | None = None) -> CaseTable:
    """Parse a case CSV.

    The header names the variables, optionally followed by a ``count``
    column. Cells hold ``|``-separated value labels. Without ``frame`` the
    domains are the observed labels in order of first appearance.
    """
    try:
        raw = pd.read_csv(
            io.StringIO(text), header=None, dtype=str, keep_default_na=False, skip_blank_lines=True
        )
    except pd.errors.EmptyDataError as exc:
        raise FormatError("no header row", line=1) from exc
    except pd.errors.ParserError as exc:
        raise FormatError(f"ragged row: {exc}", line=_parser_line(exc)) from exc
    line_numbers = [n for n, line in enumerate(text.splitlines(), start=1) if line.strip()]

    header = [str(h).strip() for h in raw.iloc[0]]
    has_count = header[-1].lower() == COUNT_COLUMN
    names = header[:-1] if has_count else header
    if not names:
        raise FormatError("header names no variables", line=line_numbers[0])
    for col, name in enumerate(names, start=1):
        if not LABEL_PATTERN.match(name):
            raise FormatError(f"bad variable name {name!r}", line=line_numbers[0], column=col)
    if len(set(names)) != len(names):
        raise FormatError("duplicate variable in header", line=line_numbers[0])
    if frame is not None and set(names) != set(frame.names):
        raise FormatError(f"header {names} does not match frame variables {list(frame.names)}", line=line_numbers[0])

    observed: dict[str, list[str]] = {n: [] for n in names}
    parsed: list[tuple[dict[str, tuple[str, ...]], int]] = []
    for row_no in range(1, len(raw)):
        line = line_numbers[row_no]
        row = raw.iloc[row_no]
        assignment = {}
        for col, name in enumerate(names):
            cell = row.iloc[col]
            if pd.isna(cell):
                raise FormatError(f"ragged row: expected {len(header)} fields", line=line)
            labels = tuple(x.strip() for x in str(cell).split(CELL_SEPARATOR))
            if not str(cell).strip() or any(not x for x in labels):
                raise FormatError(f"empty cell for {name!r}", line=line, column=col + 1)
            for label in labels:
                if not LABEL_PATTERN.match(label):
                    raise FormatError(f"bad value label {label!r}", line=line, column=col + 1)
                if frame is not None and label not in frame.variable(name).domain:
                    raise FormatError(f"unknown value {label!r} for {name!r}", line=line, column=col + 1)
                if label not in observed[name]:
                    observed[name].append(label)
            assignment[name] = labels
        count = 1
        if has_count:
            cell = row.iloc[len(names)]
            if pd.isna(cell):
                raise FormatError(f"ragged row: expected {len(header)} fields", line=line)
            try:
                count = int(str(cell).strip())
            except ValueError:
                raise FormatError(f"count {cell!r} is not an integer", line=line, column=len(header)) from None
            if count < 1:
                raise FormatError(f"count must be positive, got {count}", line=line, column=len(header))
        parsed.append((assignment, count))

    if frame is None:
        frame = build_frame([Variable(n, tuple(observed[n])) for n in names])
    table = table_from_rows(frame, parsed)
    logger.debug("ingested %d rows into %d records, total %d", len(parsed), len(table.records), table.total)
    return table


def bpa_from_cases(table: CaseTable) -> MassFunction:
    total = table.total
    if total == 0:
        raise MassError("the case table is empty")
    frame = table.frame
    return MassFunction(
        frame, [(box(dict(zip(frame.names, r.values)), frame), Fraction(r.count, total)) for r in table.records]
    )


def probability_from_cases(table: CaseTable) -> MassFunction:
    for r in table.records:
        if any(len(cell) != 1 for cell in r.values):
            raise SetValuedDataError(f"case {r.id or ''} has a set-valued cell; use bpa_from_cases")
    return bpa_from_cases(table)


def _condition_set(table: CaseTable, var: str, values: Iterable[str]) -> tuple[int, frozenset]:
    position = table.position(var)
    chosen = frozenset(values)
    if not chosen:
        raise FrameError("conditioning set is empty")
    for label in chosen:
        table.frame.variables[position].index(label)
    return position, chosen


def update_cases(table: CaseTable, var: str, values: Iterable[str]) -> CaseTable:
    """Keep the cases compatible with ``var ∈ values`` and intersect their cells."""
    position, chosen = _condition_set(table, var, values)
    kept = []
    for r in table.records:
        cell = r.values[position] & chosen
        if cell:
            updated = r.values[:position] + (cell,) + r.values[position + 1 :]
            kept.append(CaseRecord(updated, r.count, r.id))
    if not kept:
        raise ImpossibleConditionError(f"no case is compatible with {var} ∈ {{{', '.join(sorted(chosen))}}}")
    return CaseTable(table.frame, tuple(kept))


def condition_by_cases(table: CaseTable, var: str, values: Iterable[str]) -> MassFunction:
    return bpa_from_cases(update_cases(table, var, values))


def serial_condition(table: CaseTable, conditions: Sequence[tuple[str, Iterable[str]]]) -> MassFunction:
    for var, values in conditions:
        table = update_cases(table, var, values)
    return bpa_from_cases(table)


def naive_serial_condition(table: CaseTable, conditions: Sequence[tuple[str, Iterable[str]]]) -> MassFunction:
    """Select cases per condition independently, intersect the selections, never update cells.

    Kept for comparison with :func:`serial_condition`; it does not compute a
    conditional bpa.
    """
    surviving = set(range(len(table.records)))
    for var, values in conditions:
        position, chosen = _condition_set(table, var, values)
        surviving &= {i for i, r in enumerate(table.records) if r.values[position] & chosen}
    if not surviving:
        raise ImpossibleConditionError("no case survives every selection")
    kept = tuple(r for i, r in enumerate(table.records) if i in surviving)
    return bpa_from_cases(CaseTable(table.frame, kept))


def random_set_lift(
    probabilities: Mapping[str, Number], mapping: Mapping[str, Iterable[str]], variable: Variable
) -> MassFunction:
    """Belief on ``variable`` induced by a distribution over sources and a set-valued mapping."""
    probabilities = {y: as_fraction(p) for y, p in probabilities.items()}
    if any(p < 0 for p in probabilities.values()):
        raise MassError("probabilities must be nonnegative")
    if sum(probabilities.values(), Fraction(0)) != 1:
        raise MassError("probabilities must sum to 1")
    frame = build_frame([variable])
    pairs = []
    for y, p in probabilities.items():
        if p == 0:
            continue
        if y not in mapping:
            raise MassError(f"mapping is undefined for source {y!r}")
        image = tuple(mapping[y])
        if not image:
            raise MassError(f"source {y!r} maps to the empty set")
        pairs.append((box({variable.name: image}, frame), p))
    return MassFunction(frame, pairs)


def _two_column_csv(text: str, columns: tuple[str, str]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(io.StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError as exc:
        raise FormatError("no header row", line=1) from exc
    except pd.errors.ParserError as exc:
        raise FormatError(f"ragged row: {exc}", line=_parser_line(exc)) from exc
    if tuple(c.strip() for c in frame.columns) != columns:
        raise FormatError(f"expected header {','.join(columns)}", line=1)
    frame.columns = list(columns)
    if frame.isna().any().any():
        raise FormatError("ragged row")
    return frame


def load_distribution(text: str) -> dict[str, Fraction]:
    """``source,probability`` CSV; probabilities are rationals like 1/10."""
    probabilities: dict[str, Fraction] = {}
    for row_no, (source, value) in enumerate(_two_column_csv(text, ("source", "probability")).itertuples(index=False), start=2):
        try:
            probabilities[source.strip()] = as_fraction(value.strip())
        except MassError as exc:
            raise FormatError(str(exc), line=row_no, column=2) from None
    return probabilities


def load_mapping(text: str) -> dict[str, tuple[str, ...]]:
    """``source,values`` CSV with ``|``-separated value labels."""
    mapping: dict[str, tuple[str, ...]] = {}
    for row_no, (source, values) in enumerate(_two_column_csv(text, ("source", "values")).itertuples(index=False), start=2):
        labels = tuple(x.strip() for x in values.split(CELL_SEPARATOR) if x.strip())
        if not labels:
            raise FormatError(f"empty value set for {source!r}", line=row_no, column=2)
        mapping[source.strip()] = labels
    return mapping


def mapping_variable(name: str, mapping: Mapping[str, Iterable[str]]) -> Variable:
    """Variable whose domain is the mapped labels in order of first appearance."""
    domain: list[str] = []
    for labels in mapping.values():
        domain.extend(x for x in labels if x not in domain)
    return Variable(name, tuple(domain))
