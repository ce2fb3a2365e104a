"""Append-only, hash-chained ledger of witnessed tests.

Every verdict an agent gives during an audit is recorded as one entry.
Entries form a SHA-256 hash chain over a canonical serialization, so any
mutation, deletion, or reorder of past entries is detectable, and any
third party can recompute certification decisions from the file alone.

File format is JSON Lines: one entry per line, keys sorted, no extra
whitespace, digests hex-encoded lowercase.
"""

from __future__ import annotations

import enum
import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

__all__ = [
    "GENESIS_HASH",
    "Verdict",
    "WitnessedTest",
    "ChainCheck",
    "Ledger",
    "LedgerTamperedError",
    "verify_file",
]

GENESIS_HASH = "0" * 64

_REQUIRED_FIELDS = {
    "seq", "epoch", "agent", "pei", "term", "verdict", "prev_hash", "entry_hash",
}


class Verdict(enum.Enum):
    """An agent's judgment of whether a term applies to an event.

    Neutral is an explicit recorded judgment, distinct from the absence
    of any ledger entry.
    """

    ASSENT = "assent"
    NEUTRAL = "neutral"
    DISSENT = "dissent"

    @property
    def decided(self) -> bool:
        return self is not Verdict.NEUTRAL

    def inverted(self) -> "Verdict":
        if self is Verdict.ASSENT:
            return Verdict.DISSENT
        if self is Verdict.DISSENT:
            return Verdict.ASSENT
        return Verdict.NEUTRAL


class LedgerTamperedError(Exception):
    """Raised when an operation refuses to run on a chain-invalid ledger."""

    def __init__(self, invalid_at: int):
        super().__init__(f"ledger chain invalid at seq {invalid_at}")
        self.invalid_at = invalid_at


def _entry_digest(seq: int, agent: str, pei: str, term: str,
                  verdict: str, epoch: int, prev_hash: str) -> str:
    payload = {
        "agent": agent,
        "epoch": epoch,
        "pei": pei,
        "prev_hash": prev_hash,
        "seq": seq,
        "term": term,
        "verdict": verdict,
    }
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True, slots=True)
class WitnessedTest:
    """One ledger entry: an agent's verdict on (event, term) plus chain metadata."""

    seq: int
    agent: str
    pei: str
    term: str
    verdict: Verdict
    epoch: int
    prev_hash: str
    entry_hash: str

    def to_record(self) -> dict:
        return {
            "seq": self.seq,
            "epoch": self.epoch,
            "agent": self.agent,
            "pei": self.pei,
            "term": self.term,
            "verdict": self.verdict.value,
            "prev_hash": self.prev_hash,
            "entry_hash": self.entry_hash,
        }

    def to_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_record(cls, record: dict) -> "WitnessedTest":
        return cls(
            seq=record["seq"],
            agent=record["agent"],
            pei=record["pei"],
            term=record["term"],
            verdict=Verdict(record["verdict"]),
            epoch=record["epoch"],
            prev_hash=record["prev_hash"],
            entry_hash=record["entry_hash"],
        )

    def recomputed_hash(self) -> str:
        return _entry_digest(self.seq, self.agent, self.pei, self.term,
                             self.verdict.value, self.epoch, self.prev_hash)


@dataclass(frozen=True)
class ChainCheck:
    """Result of chain verification: valid, or the first violating seq."""

    valid: bool
    invalid_at: int | None = None


class Ledger:
    """In-memory hash chain with optional write-through persistence.

    Appends are serialized through a lock (single-writer contract); reads
    observe an immutable prefix and are safe to run concurrently. When a
    path is given, each append is written and flushed before it is
    committed to memory, so a persistence failure leaves the ledger
    unchanged.
    """

    def __init__(self, path: str | Path | None = None):
        self._entries: list[WitnessedTest] = []
        self._lock = threading.Lock()
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            self._entries = _parse_lines(self._path.read_text(encoding="utf-8"))

    @classmethod
    def load(cls, path: str | Path, for_append: bool = False) -> "Ledger":
        """Read an existing ledger file; keep it attached only if for_append."""
        ledger = cls(path)
        if not for_append:
            ledger._path = None
        return ledger

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[WitnessedTest]:
        return iter(self._entries)

    def __getitem__(self, index: int) -> WitnessedTest:
        return self._entries[index]

    @property
    def entries(self) -> Sequence[WitnessedTest]:
        return self._entries

    @property
    def head_hash(self) -> str:
        return self._entries[-1].entry_hash if self._entries else GENESIS_HASH

    def append(self, agent: str, pei: str, term: str,
               verdict: Verdict, epoch: int) -> int:
        """Append one witnessed test; returns its sequence number.

        On persistence failure nothing is committed and the error
        propagates.
        """
        if not isinstance(verdict, Verdict):
            verdict = Verdict(verdict)
        with self._lock:
            seq = len(self._entries)
            prev_hash = self.head_hash
            entry_hash = _entry_digest(seq, agent, pei, term,
                                       verdict.value, epoch, prev_hash)
            entry = WitnessedTest(seq=seq, agent=agent, pei=pei, term=term,
                                  verdict=verdict, epoch=epoch,
                                  prev_hash=prev_hash, entry_hash=entry_hash)
            if self._path is not None:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(entry.to_line() + "\n")
                    fh.flush()
            self._entries.append(entry)
            return seq

    def verify(self) -> ChainCheck:
        """Check seq continuity, chain linkage, and every entry digest."""
        prev = GENESIS_HASH
        for i, entry in enumerate(self._entries):
            if entry.seq != i:
                return ChainCheck(False, i)
            if entry.prev_hash != prev:
                return ChainCheck(False, i)
            if entry.recomputed_hash() != entry.entry_hash:
                return ChainCheck(False, i)
            prev = entry.entry_hash
        return ChainCheck(True, None)

    def query(self, term: str | None = None, agent: str | None = None,
              epoch_range: tuple[int, int] | None = None) -> list[WitnessedTest]:
        """All entries matching every provided filter, in seq order."""
        out = []
        for entry in self._entries:
            if term is not None and entry.term != term:
                continue
            if agent is not None and entry.agent != agent:
                continue
            if epoch_range is not None and not (
                epoch_range[0] <= entry.epoch <= epoch_range[1]
            ):
                continue
            out.append(entry)
        return out

    def save(self, path: str | Path) -> None:
        text = "".join(e.to_line() + "\n" for e in self._entries)
        Path(path).write_text(text, encoding="utf-8")


def _parse_lines(text: str) -> list[WitnessedTest]:
    entries = []
    for line in text.splitlines():
        if not line:
            continue
        entries.append(WitnessedTest.from_record(json.loads(line)))
    return entries


def _check_record(record: dict, index: int, prev_hash: str) -> bool:
    if not isinstance(record, dict) or set(record) != _REQUIRED_FIELDS:
        return False
    if not isinstance(record["seq"], int) or not isinstance(record["epoch"], int):
        return False
    if record["verdict"] not in ("assent", "neutral", "dissent"):
        return False
    if record["seq"] != index or record["prev_hash"] != prev_hash:
        return False
    digest = _entry_digest(record["seq"], record["agent"], record["pei"],
                           record["term"], record["verdict"], record["epoch"],
                           record["prev_hash"])
    return digest == record["entry_hash"]


def verify_file(path: str | Path) -> ChainCheck:
    """Verify a ledger file line by line.

    Any line that fails to parse, fails the schema, breaks seq continuity,
    breaks chain linkage, or fails digest recomputation marks the chain
    invalid at that line index. Unreadable storage raises OSError instead
    of reporting a chain violation.
    """
    raw = Path(path).read_bytes()
    lines = raw.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    prev = GENESIS_HASH
    for i, line in enumerate(lines):
        try:
            record = json.loads(line.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return ChainCheck(False, i)
        if not _check_record(record, i, prev):
            return ChainCheck(False, i)
        prev = record["entry_hash"]
    return ChainCheck(True, None)
