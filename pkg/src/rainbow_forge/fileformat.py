"""Instance and report serialization.

Instances use the plain-text ``rainbow-forge/1`` format, one document
per instance: a version line, ``r`` and ``n`` counts, an optional
``partition`` line (part index per vertex, 0-based), sorted ``meta``
key-value lines, then one ``matching i`` block per colour with one
edge per line (r space-separated vertex ids).  Blank lines and ``#``
comments are ignored on input and never emitted, so serializing a
canonical instance round-trips byte for byte.

Solver reports are JSON documents with sorted keys; the ``wall_time``
statistic is the only field excluded from determinism guarantees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .core import Instance, RainbowMatching, Violation, canonicalize, validate_instance

FORMAT_VERSION = "rainbow-forge/1"
REPORT_FORMAT = "rainbow-forge-report/1"


class ParseError(ValueError):
    """Malformed instance text; carries the 1-based source line."""

    def __init__(self, message: str, line: int):
        self.line = line
        super().__init__(f"line {line}: {message}")


class InstanceValidationError(ValueError):
    """Structurally parseable text that violates instance invariants."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__(
            "instance invariants violated: " + "; ".join(str(v) for v in violations)
        )


def serialize_instance(inst: Instance) -> str:
    """Render the canonical form (edges of each matching sorted)."""
    inst = canonicalize(inst)
    lines = [FORMAT_VERSION, f"r {inst.r}", f"n {inst.n}"]
    if inst.partition is not None:
        lines.append("partition " + " ".join(str(p) for p in inst.partition))
    for key in sorted(inst.meta):
        value = inst.meta[key]
        if "\n" in key or " " in key or not key:
            raise ValueError(f"metadata key not representable: {key!r}")
        if "\n" in value or value != value.strip():
            raise ValueError(f"metadata value not representable for {key!r}: {value!r}")
        lines.append(f"meta {key} {value}".rstrip())
    for i, matching in enumerate(inst.matchings):
        lines.append(f"matching {i}")
        for e in matching:
            lines.append("  " + " ".join(str(v) for v in e))
    return "\n".join(lines) + "\n"


def _parse_int(token: str, what: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer {what}, got {token!r}", lineno) from None


def parse_instance(text: str, validate: bool = True) -> Instance:
    """Parse the documented format; reject invariant violations.

    Malformed structure raises :class:`ParseError` with the offending
    line; a well-formed document describing an invalid instance raises
    :class:`InstanceValidationError` listing every violation.
    """
    version_seen = False
    r: int | None = None
    declared_n: int | None = None
    partition: tuple[int, ...] | None = None
    meta: dict[str, str] = {}
    matchings: list[list[tuple[int, ...]]] = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not version_seen:
            if line != FORMAT_VERSION:
                raise ParseError(f"expected version line {FORMAT_VERSION!r}, got {line!r}", lineno)
            version_seen = True
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "r":
            if len(tokens) != 2:
                raise ParseError("r line takes exactly one value", lineno)
            r = _parse_int(tokens[1], "uniformity", lineno)
        elif head == "n":
            if len(tokens) != 2:
                raise ParseError("n line takes exactly one value", lineno)
            declared_n = _parse_int(tokens[1], "matching count", lineno)
        elif head == "partition":
            partition = tuple(_parse_int(t, "part index", lineno) for t in tokens[1:])
        elif head == "meta":
            if len(tokens) < 2:
                raise ParseError("meta line needs a key", lineno)
            key = tokens[1]
            if key in meta:
                raise ParseError(f"duplicate metadata key {key!r}", lineno)
            meta[key] = line.split(maxsplit=2)[2] if len(tokens) > 2 else ""
        elif head == "matching":
            if len(tokens) != 2:
                raise ParseError("matching line takes exactly one index", lineno)
            idx = _parse_int(tokens[1], "matching index", lineno)
            if idx != len(matchings):
                raise ParseError(
                    f"matching indices must be sequential, expected {len(matchings)} got {idx}",
                    lineno,
                )
            matchings.append([])
        else:
            if not matchings:
                raise ParseError(f"unexpected line before any matching: {line!r}", lineno)
            if r is None:
                raise ParseError("edge seen before the r line", lineno)
            vertices = tuple(_parse_int(t, "vertex id", lineno) for t in tokens)
            if len(vertices) != r:
                raise ParseError(
                    f"edge {len(matchings[-1])} of matching {len(matchings) - 1}: "
                    f"expected {r} vertices, got {len(vertices)}",
                    lineno,
                )
            matchings[-1].append(vertices)
    if not version_seen:
        raise ParseError("empty document", max(lineno, 1))
    if r is None:
        raise ParseError("missing r line", lineno)
    if declared_n is None:
        raise ParseError("missing n line", lineno)
    if declared_n != len(matchings):
        raise ParseError(
            f"declared n {declared_n} but found {len(matchings)} matchings", lineno
        )
    inst = Instance(
        r=r,
        matchings=tuple(tuple(m) for m in matchings),
        partition=partition,
        meta=meta,
    )
    if validate:
        report = validate_instance(inst)
        if report:
            raise InstanceValidationError(report)
    return inst


@dataclass(frozen=True)
class ReportDoc:
    """A persisted solver run: everything ``verify`` needs to re-check."""

    solver: str
    certificate: str
    size: int
    assignment: RainbowMatching
    stats: dict = field(default_factory=dict)
    instance: str | None = None
    failure: dict | None = None


def serialize_report(doc: ReportDoc) -> str:
    payload: dict[str, Any] = {
        "format": REPORT_FORMAT,
        "solver": doc.solver,
        "certificate": doc.certificate,
        "size": doc.size,
        "assignment": [[c, list(e)] for c, e in doc.assignment.assignment],
        "stats": doc.stats,
        "instance": doc.instance,
    }
    if doc.failure is not None:
        payload["failure"] = doc.failure
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> ReportDoc:
    payload = json.loads(text)
    if payload.get("format") != REPORT_FORMAT:
        raise ValueError(f"not a {REPORT_FORMAT} document")
    assignment = RainbowMatching(
        tuple((int(c), tuple(int(v) for v in e)) for c, e in payload["assignment"])
    )
    return ReportDoc(
        solver=payload["solver"],
        certificate=payload["certificate"],
        size=int(payload["size"]),
        assignment=assignment,
        stats=dict(payload.get("stats", {})),
        instance=payload.get("instance"),
        failure=payload.get("failure"),
    )
