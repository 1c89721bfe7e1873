"""Exact construction and queries for the Weaver distribution W(n, p).

W(n, p) is the distribution of the conditional sample mean produced by
``n`` independent Bernoulli(p) selections over blocks of doubling size.
It places mass ``p**ones(k) * (1-p)**(n-ones(k))`` on the lattice point
``k / (2**n - 1)``, where ``ones(k)`` is the number of one-bits in the
leaf index ``k`` (``0 <= k < 2**n``).

Everything in this module is computed with exact rational arithmetic
(:class:`fractions.Fraction`).  Binary64 enters only through the
explicit log-space helpers meant for depths far beyond the
materialization cap; those carry a documented relative tolerance of
1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from weaver.errors import CapacityError, RangeError, RefinementError

#: Largest depth for which full vectors of 2**n rationals may be
#: materialized.  Beyond the cap only pointwise / streaming queries are
#: allowed; every closed form here is O(n) per point.
MATERIALIZATION_CAP = 24


def as_exact_probability(value: Fraction | str | float | int) -> Fraction:
    """Coerce ``value`` to an exact :class:`Fraction`.

    Strings accept both fraction syntax (``"2/3"``) and decimal syntax
    (``"0.25"``); either parses exactly.  Floats are converted through
    their shortest decimal representation, never through their binary
    expansion, so ``0.1`` becomes exactly ``1/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("probability must be a Fraction, str, float, or int")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact probability")


@dataclass(frozen=True)
class WeaverParams:
    """Parameters of W(n, p): the number of selections and the selection bias.

    ``p`` may be given as a Fraction, a string, or a float; it is stored
    as an exact rational and must lie strictly inside (0, 1).  The
    degenerate endpoints are rejected because they collapse the cascade
    onto a single leaf and break every ratio identity.
    """

    n: int
    p: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise RangeError(f"n must be a positive integer, got {self.n!r}")
        p = as_exact_probability(self.p)
        if not 0 < p < 1:
            raise RangeError(f"p must lie strictly inside (0, 1), got {p}")
        object.__setattr__(self, "p", p)

    @property
    def leaf_count(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class SelectionPath:
    """One vector of n binary selections, encoded as the integer k.

    Bit j of ``k`` records the outcome of selection j+1 (the block of
    size 2**j), so ``k = sum(b[j] << j)`` and the bit tuple reads
    most-significant selection first.
    """

    n: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise RangeError(f"path length must be positive, got {self.n}")
        if not 0 <= self.k < 1 << self.n:
            raise RangeError(f"k={self.k} outside [0, 2**{self.n} - 1]")

    @classmethod
    def from_bits(cls, bits: tuple[int, ...]) -> "SelectionPath":
        """Build a path from the bit vector (b[n-1], ..., b[0])."""
        k = 0
        for b in bits:
            if b not in (0, 1):
                raise RangeError(f"selection bits must be 0 or 1, got {b!r}")
            k = (k << 1) | b
        return cls(n=len(bits), k=k)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.k >> j) & 1 for j in range(self.n - 1, -1, -1))

    @property
    def ones(self) -> int:
        return self.k.bit_count()

    @property
    def zeros(self) -> int:
        return self.n - self.k.bit_count()


@dataclass(frozen=True)
class WeaverDist:
    """W(n, p) together with an optionally materialized pmf vector."""

    params: WeaverParams
    pmf: tuple[Fraction, ...] | None = None

    def mass(self, k: int) -> Fraction:
        """Mass at leaf k, from the vector if present, else pointwise."""
        if self.pmf is not None:
            if not 0 <= k < len(self.pmf):
                raise RangeError(f"k={k} outside [0, {len(self.pmf) - 1}]")
            return self.pmf[k]
        return pmf_point(k, self.params)


@dataclass(frozen=True)
class DyadicPoint:
    """The point k / 2**n of the dyadic grid at resolution n."""

    k: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise RangeError(f"resolution must be non-negative, got {self.n}")
        if not 0 <= self.k <= 1 << self.n:
            raise RangeError(f"k={self.k} outside [0, 2**{self.n}]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.k, 1 << self.n)


def _check_leaf_index(k: int, n: int) -> None:
    if not 0 <= k < 1 << n:
        raise RangeError(f"leaf index k={k} outside [0, 2**{n} - 1]")


def _check_cap(n: int, cap: int, what: str) -> None:
    if n > cap:
        raise CapacityError(
            f"{what} needs 2**{n} entries, above the materialization cap {cap}"
        )


def realization_value(k: int, n: int) -> Fraction:
    """The k-th support point of W(n, p): k / (2**n - 1).

    The support is an equispaced lattice on [0, 1]; consecutive points
    differ by exactly 1 / (2**n - 1).
    """
    if n < 1:
        raise RangeError(f"n must be positive, got {n}")
    _check_leaf_index(k, n)
    return Fraction(k, (1 << n) - 1)


def pmf_point(k: int, params: WeaverParams) -> Fraction:
    """Mass at leaf k: p**ones(k) * (1-p)**(n - ones(k)).

    O(n) via the popcount of k; never materializes the vector.
    """
    _check_leaf_index(k, params.n)
    ones = k.bit_count()
    p = params.p
    return p**ones * (1 - p) ** (params.n - ones)


def pmf_point_log2(k: int, params: WeaverParams) -> float:
    """Base-2 logarithm of the mass at leaf k, in binary64.

    Intended for depths beyond the materialization cap (multifractal
    diagnostics at n of 40 and more).  Relative tolerance 1e-12.
    """
    _check_leaf_index(k, params.n)
    ones = k.bit_count()
    p = float(params.p)
    return ones * math.log2(p) + (params.n - ones) * math.log2(1.0 - p)


def build_pmf_vector(params: WeaverParams, cap: int = MATERIALIZATION_CAP) -> WeaverDist:
    """Materialize the full pmf vector of W(n, p) by prefix doubling.

    Starting from the one-entry vector (1,), each selection concatenates
    the scaled halves: v -> ((1-p)*v, p*v).  Entry k of the result
    equals :func:`pmf_point` at k and the entries sum to 1 exactly.
    """
    _check_cap(params.n, cap, "pmf vector")
    p = params.p
    q = 1 - p
    vec: list[Fraction] = [Fraction(1)]
    for _ in range(params.n):
        vec = [q * m for m in vec] + [p * m for m in vec]
    return WeaverDist(params=params, pmf=tuple(vec))


def geometric_triangle_row(n: int, cap: int = MATERIALIZATION_CAP) -> list[int]:
    """Row n of the multiplicative triangle, as integer exponents.

    Entry k is the exponent of the bias ratio f = p/(1-p) in the mass at
    leaf k, i.e. the number of one-bits of k.  Row n+1 is row n followed
    by row n shifted up by one.
    """
    if n < 0:
        raise RangeError(f"row index must be non-negative, got {n}")
    _check_cap(n, cap, "triangle row")
    row = [0]
    for _ in range(n):
        row = row + [e + 1 for e in row]
    return row


def exponent_sum(n: int) -> int:
    """Sum of row n of the exponent triangle, via s(n+1) = 2*s(n) + 2**n."""
    if n < 0:
        raise RangeError(f"row index must be non-negative, got {n}")
    s = 0
    for j in range(n):
        s = 2 * s + (1 << j)
    return s


def cdf_at_dyadic(point: DyadicPoint, params: WeaverParams) -> Fraction:
    """Distribution function of W(n, p) at the dyadic point k / 2**m.

    Equals the total mass of the leaves with index j < k * 2**(n - m),
    computed in O(n) by walking the binary digits of that bound.  The
    value is stable under refinement: any params.n >= m returns the
    identical rational.  Interior dyadic points carry no atom, so the
    left and right limits agree there; the endpoint 1 returns the total
    mass.
    """
    if point.n > params.n:
        raise RefinementError(
            f"resolution {point.n} exceeds construction depth {params.n}; "
            "the value is not yet stable"
        )
    bound = point.k << (params.n - point.n)
    if bound >= 1 << params.n:
        return Fraction(1)
    p = params.p
    q = 1 - p
    total = Fraction(0)
    prefix = Fraction(1)
    for i in range(params.n - 1, -1, -1):
        if (bound >> i) & 1:
            # every index sharing the consumed prefix with a 0 here lies below
            total += prefix * q
            prefix *= p
        else:
            prefix *= q
    return total


def jump_spectrum(params: WeaverParams) -> list[tuple[Fraction, int]]:
    """Heights and multiplicities of the jumps of the step CDF.

    There are n+1 distinct heights p**j * (1-p)**(n-j), the height with
    j one-bits occurring at C(n, j) leaves; the multiplicity-weighted
    heights sum to 1.  For p = 1/2 every height equals 2**-n.
    """
    n = params.n
    p = params.p
    q = 1 - p
    return [(p**j * q ** (n - j), comb(n, j)) for j in range(n + 1)]


def mirror_index(k: int, n: int) -> int:
    """Index of the leaf mirrored across 1/2: 2**n - 1 - k.

    Complementing every selection bit maps W(n, p) onto W(n, 1-p), so
    the mass of W(n, p) at k equals the mass of W(n, 1-p) at the mirror.
    """
    if n < 1:
        raise RangeError(f"n must be positive, got {n}")
    _check_leaf_index(k, n)
    return ((1 << n) - 1) - k
