"""Phenomenal-time substrate: chronoids, time boundaries, coincidence, parthood.

Time coordinates are exact rationals (``fractions.Fraction``).  All checks
downstream rely on decidable equality for coincidence and meeting tests, so
floats never enter the time layer; decimal literals are converted exactly.

A chronoid is a connected time interval of strictly positive duration,
represented symbolically by its endpoints.  Boundary entities are
individuals, not numbers: two boundaries may coincide (occupy the same
coordinate) without being the same entity.  Inner boundaries are interned
per (chronoid, coordinate), so repeated queries return the same entity;
the interning store is lock-protected and everything else is immutable,
which makes all time values safe to share between concurrent tasks.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotASubinterval, OutOfExtent, ZeroOrNegativeDuration

TimeCoordinate = Fraction

LEFT = "left"
RIGHT = "right"
INNER = "inner"


def coord(value: int | str | Fraction) -> Fraction:
    """Coerce ints, Fractions and strings ('3/2', '0.25') to an exact coordinate."""
    return Fraction(value)


def coord_str(value: Fraction) -> str:
    """Canonical text form: plain integer when whole, 'p/q' otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _id_safe(value: Fraction) -> str:
    # '/' and leading '-' are not legal inside ids
    return coord_str(value).replace("-", "m").replace("/", "_")


@dataclass(frozen=True)
class TimeBoundary:
    """An instantaneous boundary entity of a chronoid."""

    id: str
    coordinate: Fraction
    owner: str  # owning chronoid id
    kind: str  # LEFT, RIGHT or INNER


@dataclass(frozen=True)
class Chronoid:
    """A connected time interval of strictly positive duration."""

    id: str
    left: Fraction
    right: Fraction
    _boundaries: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        if self.left >= self.right:
            raise ZeroOrNegativeDuration(
                f"chronoid {self.id!r}: [{coord_str(self.left)}, {coord_str(self.right)}] "
                "has no duration"
            )

    @property
    def duration(self) -> Fraction:
        return self.right - self.left

    def contains(self, t: Fraction) -> bool:
        return self.left <= t <= self.right

    def same_extent(self, other: "Chronoid") -> bool:
        return self.left == other.left and self.right == other.right


def make_chronoid(
    left: int | str | Fraction, right: int | str | Fraction, id: str | None = None
) -> Chronoid:
    """Build a chronoid with the given exact endpoints.

    The left and right boundary entities are created lazily via
    :func:`inner_boundary` and cached on the chronoid.
    """
    l, r = coord(left), coord(right)
    name = id if id is not None else f"chr-{_id_safe(l)}-{_id_safe(r)}"
    return Chronoid(id=name, left=l, right=r)


def inner_boundary(ch: Chronoid, t: int | str | Fraction) -> TimeBoundary:
    """Return the boundary entity of ``ch`` at coordinate ``t``.

    Endpoints yield the chronoid's own left/right boundary entity; interior
    coordinates yield an inner boundary, interned so that repeated calls on
    the same (chronoid, coordinate) return the same entity.
    """
    t = coord(t)
    if not ch.contains(t):
        raise OutOfExtent(
            f"{coord_str(t)} lies outside [{coord_str(ch.left)}, {coord_str(ch.right)}] "
            f"of chronoid {ch.id!r}"
        )
    with ch._lock:
        entity = ch._boundaries.get(t)
        if entity is None:
            if t == ch.left:
                kind = LEFT
            elif t == ch.right:
                kind = RIGHT
            else:
                kind = INNER
            entity = TimeBoundary(
                id=f"{ch.id}@{coord_str(t)}", coordinate=t, owner=ch.id, kind=kind
            )
            ch._boundaries[t] = entity
        return entity


def left_boundary(ch: Chronoid) -> TimeBoundary:
    return inner_boundary(ch, ch.left)


def right_boundary(ch: Chronoid) -> TimeBoundary:
    return inner_boundary(ch, ch.right)


def coincides(b1: TimeBoundary, b2: TimeBoundary) -> bool:
    """True iff the two boundary entities occupy the same coordinate.

    Coincidence is deliberately not restricted to boundaries of meeting or
    otherwise related chronoids; see docs/semantics.md.
    """
    return b1.coordinate == b2.coordinate


def meets(ch1: Chronoid, ch2: Chronoid) -> bool:
    """True iff ``ch1`` ends exactly where ``ch2`` begins."""
    return ch1.right == ch2.left


def temporal_part_chronoid(
    ch: Chronoid, l: int | str | Fraction, r: int | str | Fraction
) -> Chronoid:
    """Restrict ``ch`` to the subinterval [l, r] (improper parts allowed)."""
    l, r = coord(l), coord(r)
    if l >= r:
        raise ZeroOrNegativeDuration(
            f"[{coord_str(l)}, {coord_str(r)}] has no duration"
        )
    if l < ch.left or r > ch.right:
        raise NotASubinterval(
            f"[{coord_str(l)}, {coord_str(r)}] is not a subinterval of "
            f"[{coord_str(ch.left)}, {coord_str(ch.right)}]"
        )
    return Chronoid(id=f"{ch.id}-part-{_id_safe(l)}-{_id_safe(r)}", left=l, right=r)
