"""The 4-letter value codec, bundled knot tables, and table verification.

A value ⌊a,b,c,d⌋ is written as four characters: ``A..Z`` for 1..26,
``a..z`` for -1..-26, ``0`` for 0, and ``α``, ``β``, ``γ`` for -27, -30, -33.
Data files spell the Greek letters as ``\\a27``, ``\\b30`` and ``\\g33``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .cyclotomic import CycInt
from .diagram import ClosedDiagram, DiagramError, PDCode, parse_pd, random_r2
from .uinv import eval_u, eval_u_normalized

__all__ = [
    "TableError",
    "CodecError",
    "KnotRecord",
    "Report",
    "RecordResult",
    "decode_word",
    "encode_word",
    "try_encode",
    "parse_word",
    "data_dir",
    "load_knot_csv",
    "load_appendix",
    "load_table",
    "verify",
]

DATA_ENV = "UINV_DATA_DIR"

_GREEK = {"α": -27, "β": -30, "γ": -33}
_ESCAPES = {"\\a27": "α", "\\b30": "β", "\\g33": "γ"}


class CodecError(ValueError):
    """Bad character in a word, or a coefficient with no letter."""


class TableError(ValueError):
    """Malformed table data; the message carries the file and line."""


def _char_value(ch: str) -> int:
    if ch == "0":
        return 0
    if ch in _GREEK:
        return _GREEK[ch]
    if "A" <= ch <= "Z":
        return ord(ch) - ord("A") + 1
    if "a" <= ch <= "z":
        return -(ord(ch) - ord("a") + 1)
    raise CodecError(f"bad character {ch!r} in word")


def _value_char(n: int) -> str:
    if n == 0:
        return "0"
    if 1 <= n <= 26:
        return chr(ord("A") + n - 1)
    if -26 <= n <= -1:
        return chr(ord("a") - n - 1)
    for ch, v in _GREEK.items():
        if v == n:
            return ch
    raise CodecError(f"coefficient {n} has no letter")


def parse_word(text: str) -> str:
    """Replace data-file escapes by Greek letters."""
    for esc, ch in _ESCAPES.items():
        text = text.replace(esc, ch)
    return text


def decode_word(word: str) -> CycInt:
    word = parse_word(word.strip())
    if len(word) != 4:
        raise CodecError(f"word {word!r} does not have 4 characters")
    return CycInt(*(_char_value(ch) for ch in word))


def encode_word(value: CycInt, ascii: bool = False) -> str:
    word = "".join(_value_char(n) for n in value.coeffs)
    if ascii:
        for esc, ch in _ESCAPES.items():
            word = word.replace(ch, esc)
    return word


def try_encode(value: CycInt) -> Optional[str]:
    try:
        return encode_word(value)
    except CodecError:
        return None


# ---------------------------------------------------------------------------
# data files


def data_dir() -> Path:
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("uinvariant") / "data"))


@dataclass
class KnotRecord:
    name: str
    pd: PDCode
    expected: Optional[str] = None


def load_knot_csv(path, text: Optional[str] = None) -> list[KnotRecord]:
    """Read ``name,pd`` rows; lines starting with ``#`` are comments."""
    path = Path(path) if path is not None else Path("<string>")
    if text is None:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise TableError(f"{path}: {exc.strerror or exc}") from exc
    lines = [(n, line) for n, line in enumerate(text.splitlines(), start=1)
             if line.strip() and not line.lstrip().startswith("#")]
    records: list[KnotRecord] = []
    if not lines:
        return records
    reader = csv.reader(io.StringIO("\n".join(line for _, line in lines)))
    seen = set()
    for (lineno, _), row in zip(lines, reader):
        if [c.strip().lower() for c in row] == ["name", "pd"]:
            continue
        if len(row) != 2:
            raise TableError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        name, pd_text = row[0].strip(), row[1]
        if name in seen:
            raise TableError(f"{path}:{lineno}: duplicate name {name!r}")
        seen.add(name)
        try:
            pd = parse_pd(pd_text)
        except DiagramError as exc:
            raise TableError(f"{path}:{lineno}: {exc}") from exc
        records.append(KnotRecord(name, pd))
    return records


def load_appendix(path=None) -> dict[str, str]:
    """Map knot name to expected word (Greek letters restored)."""
    path = Path(path) if path is not None else data_dir() / "appendixA.txt"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableError(f"{path}: {exc.strerror or exc}") from exc
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TableError(f"{path}:{lineno}: expected 'name word'")
        name, word = parts[0], parse_word(parts[1])
        try:
            decode_word(word)
        except CodecError as exc:
            raise TableError(f"{path}:{lineno}: {exc}") from exc
        if name in out:
            raise TableError(f"{path}:{lineno}: duplicate name {name!r}")
        out[name] = word
    return out


def load_table(knots=None, appendix=None) -> list[KnotRecord]:
    """Bundled knots joined with their expected words."""
    base = data_dir()
    records = load_knot_csv(knots if knots is not None else base / "knots.csv")
    words = load_appendix(appendix if appendix is not None else base / "appendixA.txt")
    for r in records:
        r.expected = words.get(r.name)
    return records


# ---------------------------------------------------------------------------
# verification


@dataclass
class RecordResult:
    name: str
    computed: CycInt
    expected: Optional[str]
    classification: str  # exact, mirror, both, FAIL, unknown
    moves_ok: Optional[bool] = None

    @property
    def word(self) -> Optional[str]:
        return try_encode(self.computed)

    def to_json(self) -> str:
        return json.dumps({
            "name": self.name,
            "computed": str(self.computed),
            "word": self.word,
            "expected": self.expected,
            "class": self.classification,
            **({} if self.moves_ok is None else {"moves_ok": self.moves_ok}),
        }, ensure_ascii=False)

    def to_text(self) -> str:
        parts = [f"{self.name:<8}", f"{str(self.computed):<18}", f"{self.word or '----':<5}",
                 f"expected {self.expected or '?':<5}", self.classification]
        if self.moves_ok is not None:
            parts.append("moves ok" if self.moves_ok else "moves CHANGED")
        return "  ".join(parts)


def classify(computed: CycInt, expected: Optional[str]) -> str:
    if expected is None:
        return "unknown"
    want = decode_word(expected)
    exact = computed == want
    mirror = computed == want.conj()
    if exact and mirror:
        return "both"
    if exact:
        return "exact"
    if mirror:
        return "mirror"
    return "FAIL"


@dataclass
class Report:
    results: list[RecordResult] = field(default_factory=list)

    @property
    def matched(self) -> int:
        return sum(r.classification in ("exact", "mirror", "both") for r in self.results)

    @property
    def failed(self) -> int:
        return sum(r.classification == "FAIL" for r in self.results)

    @property
    def move_failures(self) -> int:
        return sum(r.moves_ok is False for r in self.results)

    def chirality(self) -> str:
        """The global orientation flag: exact, mirror, mixed, or none."""
        kinds = {r.classification for r in self.results} & {"exact", "mirror"}
        if not kinds:
            return "none"
        return kinds.pop() if len(kinds) == 1 else "mixed"

    @property
    def ok(self) -> bool:
        return (bool(self.results) and self.failed == 0 and self.move_failures == 0
                and self.chirality() != "mixed")

    def summary(self) -> str:
        counts = {k: sum(r.classification == k for r in self.results)
                  for k in ("exact", "mirror", "both")}
        line = (f"{self.matched} matched, {self.failed} failed "
                f"(exact {counts['exact']}, mirror {counts['mirror']}, palindromic {counts['both']}); "
                f"chirality flag: {self.chirality()}")
        if any(r.moves_ok is not None for r in self.results):
            line += f"; move checks failed: {self.move_failures}"
        return line

    def to_text(self) -> str:
        return "\n".join([r.to_text() for r in self.results] + [self.summary()])

    def to_jsonl(self) -> str:
        return "\n".join(r.to_json() for r in self.results)


def _verify_one(args) -> RecordResult:
    record, moves, seed = args
    value = eval_u_normalized(record.pd)
    moves_ok = None
    if moves:
        rng = random.Random(f"{seed}:{record.name}")
        pd = record.pd
        for _ in range(moves):
            pd = random_r2(pd, rng)
        moves_ok = eval_u(pd) == eval_u(record.pd)
    return RecordResult(record.name, value, record.expected, classify(value, record.expected), moves_ok)


def verify(records: Sequence[KnotRecord], parallel: Optional[int] = None,
           moves: int = 0, seed: int = 0) -> Report:
    """Evaluate every record; results stay in input order."""
    jobs = [(r, moves, seed) for r in records]
    if parallel and parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_verify_one, jobs, chunksize=max(1, len(jobs) // (4 * parallel))))
    else:
        results = [_verify_one(j) for j in jobs]
    return Report(results)
