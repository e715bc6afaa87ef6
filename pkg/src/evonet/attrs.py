"""Typed attribute system: domains, values, validation, random draws.

Attribute domains are declared in a small text grammar that appears
verbatim in model metadata files and project CSVs:

    bool
    string
    int[min,max]
    double[min,max]
    int{a,b,...}
    double{a,b,...}
    string{a,b,...}

Whitespace around tokens is ignored; numeric literals are decimal with an
optional sign and fraction. Ranges and values are immutable and safe to
share across workers.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

from .errors import AttrError
from .rng import Pcg32


class AttrKind(enum.Enum):
    BOOL = "bool"
    INT = "int"
    REAL = "real"
    TEXT = "text"


@dataclass(frozen=True, eq=False)
class AttrValue:
    """A single typed value.

    Comparison is defined per variant only; comparing values of different
    kinds raises instead of coercing (int 1 is not real 1.0 here).
    """

    kind: AttrKind
    value: bool | int | float | str

    def __post_init__(self):
        k, v = self.kind, self.value
        if k is AttrKind.BOOL:
            if not isinstance(v, bool):
                raise AttrError(f"bool value expected, got {v!r}")
        elif k is AttrKind.INT:
            if isinstance(v, bool) or not isinstance(v, int):
                raise AttrError(f"integer value expected, got {v!r}")
        elif k is AttrKind.REAL:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise AttrError(f"real value expected, got {v!r}")
            object.__setattr__(self, "value", float(v))
            if not math.isfinite(self.value):
                raise AttrError(f"real value must be finite, got {v!r}")
        elif k is AttrKind.TEXT:
            if not isinstance(v, str):
                raise AttrError(f"text value expected, got {v!r}")

    def _check_kind(self, other: "AttrValue") -> None:
        if self.kind is not other.kind:
            raise TypeError(
                f"cannot compare {self.kind.value} value with {other.kind.value} value"
            )

    def __eq__(self, other):
        if not isinstance(other, AttrValue):
            return NotImplemented
        self._check_kind(other)
        return self.value == other.value

    def __hash__(self):
        return hash((self.kind, self.value))

    def __lt__(self, other):
        if not isinstance(other, AttrValue):
            return NotImplemented
        self._check_kind(other)
        return self.value < other.value

    def __le__(self, other):
        if not isinstance(other, AttrValue):
            return NotImplemented
        self._check_kind(other)
        return self.value <= other.value

    def __gt__(self, other):
        if not isinstance(other, AttrValue):
            return NotImplemented
        self._check_kind(other)
        return self.value > other.value

    def __ge__(self, other):
        if not isinstance(other, AttrValue):
            return NotImplemented
        self._check_kind(other)
        return self.value >= other.value

    def __repr__(self):
        return f"AttrValue({self.kind.value}, {self.value!r})"


def boolean(v: bool) -> AttrValue:
    return AttrValue(AttrKind.BOOL, v)


def integer(v: int) -> AttrValue:
    return AttrValue(AttrKind.INT, v)


def real(v: float) -> AttrValue:
    return AttrValue(AttrKind.REAL, v)


def text(v: str) -> AttrValue:
    return AttrValue(AttrKind.TEXT, v)


def format_plain(value: bool | int | float | str) -> str:
    """Canonical text form of a plain scalar: bools lowercased, floats via
    repr (shortest round-trip) with integral values compacted."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return str(int(value)) if value.is_integer() else repr(value)
    return value


def format_value(av: AttrValue) -> str:
    return format_plain(av.value)


class RangeKind(enum.Enum):
    BOOL = "bool"
    INT_INTERVAL = "int-interval"
    REAL_INTERVAL = "real-interval"
    INT_SET = "int-set"
    REAL_SET = "real-set"
    TEXT = "text"
    TEXT_SET = "text-set"


_ATTR_KIND_OF = {
    RangeKind.BOOL: AttrKind.BOOL,
    RangeKind.INT_INTERVAL: AttrKind.INT,
    RangeKind.INT_SET: AttrKind.INT,
    RangeKind.REAL_INTERVAL: AttrKind.REAL,
    RangeKind.REAL_SET: AttrKind.REAL,
    RangeKind.TEXT: AttrKind.TEXT,
    RangeKind.TEXT_SET: AttrKind.TEXT,
}

_INT_RE = re.compile(r"[+-]?\d+\Z")
_REAL_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


def _parse_int_literal(tok: str) -> int:
    if not _INT_RE.match(tok):
        raise AttrError(f"bad integer literal {tok!r}")
    return int(tok)


def _parse_real_literal(tok: str) -> float:
    if not _REAL_RE.match(tok):
        raise AttrError(f"bad real literal {tok!r}")
    v = float(tok)
    if not math.isfinite(v):
        raise AttrError(f"real literal out of range: {tok!r}")
    return v


@dataclass(frozen=True)
class AttributeRange:
    """A validated attribute domain with a defined default value.

    Intervals satisfy lo <= hi; sets are non-empty and duplicate-free.
    Defaults: intervals -> lo, sets -> first member, bool -> false,
    text -> empty string.
    """

    kind: RangeKind
    lo: int | float | None = None
    hi: int | float | None = None
    members: tuple = ()

    def __post_init__(self):
        k = self.kind
        if k in (RangeKind.INT_INTERVAL, RangeKind.REAL_INTERVAL):
            if self.lo is None or self.hi is None:
                raise AttrError("interval range needs both bounds")
            if self.lo > self.hi:
                raise AttrError(f"interval min {self.lo} exceeds max {self.hi}")
        elif k in (RangeKind.INT_SET, RangeKind.REAL_SET, RangeKind.TEXT_SET):
            if not self.members:
                raise AttrError("set range must not be empty")
            if len(set(self.members)) != len(self.members):
                raise AttrError(f"duplicate members in set range {self.members!r}")

    @property
    def attr_kind(self) -> AttrKind:
        return _ATTR_KIND_OF[self.kind]

    def default(self) -> AttrValue:
        k = self.kind
        if k is RangeKind.BOOL:
            return boolean(False)
        if k is RangeKind.TEXT:
            return text("")
        if k is RangeKind.INT_INTERVAL:
            return integer(self.lo)
        if k is RangeKind.REAL_INTERVAL:
            return real(self.lo)
        first = self.members[0]
        return AttrValue(self.attr_kind, first)

    def validate(self, av: AttrValue) -> bool:
        """True iff the value's variant matches and it lies in the domain."""
        if not isinstance(av, AttrValue) or av.kind is not self.attr_kind:
            return False
        k = self.kind
        if k in (RangeKind.BOOL, RangeKind.TEXT):
            return True
        if k in (RangeKind.INT_INTERVAL, RangeKind.REAL_INTERVAL):
            return self.lo <= av.value <= self.hi
        return av.value in self.members

    def random_value(self, rng: Pcg32) -> AttrValue:
        """Uniform draw; consumes exactly one 32-bit PCG32 output.

        Integer intervals are inclusive both ends; real intervals are
        half-open [lo, hi); sets draw a uniform member.
        """
        k = self.kind
        if k is RangeKind.TEXT:
            raise AttrError("cannot draw from an unbounded text range")
        if k is RangeKind.BOOL:
            return boolean(rng.next_bool())
        if k is RangeKind.INT_INTERVAL:
            return integer(rng.next_int(self.lo, self.hi))
        if k is RangeKind.REAL_INTERVAL:
            return real(self.lo + (self.hi - self.lo) * rng.next_double())
        return AttrValue(self.attr_kind, self.members[rng.next_index(len(self.members))])

    def value_from_text(self, tok: str) -> AttrValue:
        """Parse a value in this domain from its text form and validate it."""
        tok = tok.strip()
        ak = self.attr_kind
        if ak is AttrKind.BOOL:
            low = tok.lower()
            if low not in ("true", "false"):
                raise AttrError(f"bad bool literal {tok!r}")
            av = boolean(low == "true")
        elif ak is AttrKind.INT:
            av = integer(_parse_int_literal(tok))
        elif ak is AttrKind.REAL:
            av = real(_parse_real_literal(tok))
        else:
            av = text(tok)
        if not self.validate(av):
            raise AttrError(f"value {tok!r} outside declared range {self.to_spec()!r}")
        return av

    def value_from_json(self, raw) -> AttrValue:
        """Wrap a JSON-decoded scalar as a value in this domain and validate."""
        ak = self.attr_kind
        try:
            if ak is AttrKind.BOOL:
                if not isinstance(raw, bool):
                    raise AttrError(f"bool expected, got {raw!r}")
                av = boolean(raw)
            elif ak is AttrKind.INT:
                if isinstance(raw, bool) or not isinstance(raw, int):
                    raise AttrError(f"integer expected, got {raw!r}")
                av = integer(raw)
            elif ak is AttrKind.REAL:
                if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                    raise AttrError(f"number expected, got {raw!r}")
                av = real(float(raw))
            else:
                if not isinstance(raw, str):
                    raise AttrError(f"string expected, got {raw!r}")
                av = text(raw)
        except AttrError:
            raise
        if not self.validate(av):
            raise AttrError(f"value {raw!r} outside declared range {self.to_spec()!r}")
        return av

    def to_spec(self) -> str:
        """Render back to the grammar; parse_attr_range round-trips this."""
        k = self.kind
        if k is RangeKind.BOOL:
            return "bool"
        if k is RangeKind.TEXT:
            return "string"
        if k is RangeKind.INT_INTERVAL:
            return f"int[{self.lo},{self.hi}]"
        if k is RangeKind.REAL_INTERVAL:
            return f"double[{format_plain(float(self.lo))},{format_plain(float(self.hi))}]"
        if k is RangeKind.INT_SET:
            body = ",".join(str(m) for m in self.members)
            return "int{%s}" % body
        if k is RangeKind.REAL_SET:
            body = ",".join(format_plain(float(m)) for m in self.members)
            return "double{%s}" % body
        body = ",".join(self.members)
        return "string{%s}" % body


def _split_members(body: str) -> list[str]:
    toks = [t.strip() for t in body.split(",")]
    if toks == [""]:
        raise AttrError("empty set range")
    if any(t == "" for t in toks):
        raise AttrError(f"empty member in set range {body!r}")
    return toks


def parse_attr_range(spec: str) -> AttributeRange:
    """Parse an attribute-domain declaration from the grammar above."""
    s = spec.strip()
    if s == "bool":
        return AttributeRange(RangeKind.BOOL)
    if s == "string":
        return AttributeRange(RangeKind.TEXT)

    m = re.match(r"(int|double|string)\s*([\[{])(.*)([\]}])\Z", s, re.DOTALL)
    if not m:
        raise AttrError(f"malformed attribute range {spec!r}")
    base, opener, body, closer = m.group(1), m.group(2), m.group(3), m.group(4)
    if (opener, closer) not in (("[", "]"), ("{", "}")):
        raise AttrError(f"mismatched brackets in range {spec!r}")

    if opener == "[":
        if base == "string":
            raise AttrError("string ranges must be sets, not intervals")
        parts = [p.strip() for p in body.split(",")]
        if len(parts) != 2:
            raise AttrError(f"interval needs exactly two bounds: {spec!r}")
        if base == "int":
            lo, hi = (_parse_int_literal(p) for p in parts)
            return AttributeRange(RangeKind.INT_INTERVAL, lo=lo, hi=hi)
        lo, hi = (_parse_real_literal(p) for p in parts)
        return AttributeRange(RangeKind.REAL_INTERVAL, lo=lo, hi=hi)

    toks = _split_members(body)
    if base == "int":
        return AttributeRange(RangeKind.INT_SET, members=tuple(_parse_int_literal(t) for t in toks))
    if base == "double":
        return AttributeRange(RangeKind.REAL_SET, members=tuple(_parse_real_literal(t) for t in toks))
    return AttributeRange(RangeKind.TEXT_SET, members=tuple(toks))


def validate(value: AttrValue, rng: AttributeRange) -> bool:
    """Functional form of AttributeRange.validate."""
    return rng.validate(value)


def random_value(rng: AttributeRange, prng: Pcg32) -> AttrValue:
    """Functional form of AttributeRange.random_value."""
    return rng.random_value(prng)
