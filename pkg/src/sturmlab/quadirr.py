"""Exact arithmetic in a real quadratic field Q(sqrt(d)), specialised to the circle R/Z.

Every value is (p + q*sqrt(d)) / r with arbitrary-precision integer p, q, r.
All comparisons are resolved by integer sign analysis (squaring with sign
bookkeeping), never by floating point, so arc-membership tests on the circle
are decidable even at interval boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple


class QuadIrrError(ValueError):
    pass


def _is_squarefree(d: int) -> bool:
    if d % 4 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 2
    return True


def _sign_pair(u: int, v: int, d: int) -> int:
    """Exact sign of u + v*sqrt(d)."""
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    if u > 0 and v > 0:
        return 1
    if u < 0 and v < 0:
        return -1
    uu = u * u
    vv = d * v * v
    if uu == vv:
        return 0
    big = (uu > vv)
    # the term with the larger square dictates the sign
    return (1 if u > 0 else -1) if big else (1 if v > 0 else -1)


@dataclass(frozen=True)
class QuadraticIrrational:
    """Canonical (p + q*sqrt(d))/r with gcd(p,q,r)=1, r>0; rationals get d=1."""

    p: int
    q: int
    r: int
    d: int

    # -- construction -------------------------------------------------

    def __post_init__(self):
        if self.r == 0:
            raise QuadIrrError("denominator r must be nonzero")
        if self.d <= 0:
            raise QuadIrrError("radicand d must be positive")
        p, q, r, d = self.p, self.q, self.r, self.d
        if q == 0:
            d = 1
        g = math.gcd(math.gcd(abs(p), abs(q)), abs(r))
        if g == 0:
            g = 1
        if r < 0:
            g = -g
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)
        object.__setattr__(self, "r", r // g)
        object.__setattr__(self, "d", d)

    @staticmethod
    def from_fraction(x) -> "QuadraticIrrational":
        f = Fraction(x)
        return QuadraticIrrational(f.numerator, 0, f.denominator, 1)

    # -- predicates ----------------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def _compatible(self, other: "QuadraticIrrational") -> int:
        """Common radicand, or raise for mixed irrational fields."""
        if self.q == 0:
            return other.d
        if other.q == 0:
            return self.d
        if self.d != other.d:
            raise QuadIrrError(f"mixed radicands {self.d} and {other.d}")
        return self.d

    # -- arithmetic (closed in the field) -------------------------------

    def __add__(self, other) -> "QuadraticIrrational":
        other = _coerce(other, self.d)
        d = self._compatible(other)
        a, b = self, other
        return QuadraticIrrational(
            a.p * b.r + b.p * a.r, a.q * b.r + b.q * a.r, a.r * b.r, d
        )

    __radd__ = __add__

    def __neg__(self) -> "QuadraticIrrational":
        return QuadraticIrrational(-self.p, -self.q, self.r, self.d)

    def __sub__(self, other):
        return self + (-_coerce(other, self.d))

    def __rsub__(self, other):
        return _coerce(other, self.d) + (-self)

    def __mul__(self, other) -> "QuadraticIrrational":
        other = _coerce(other, self.d)
        d = self._compatible(other)
        a, b = self, other
        return QuadraticIrrational(
            a.p * b.p + a.q * b.q * d, a.p * b.q + a.q * b.p, a.r * b.r, d
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticIrrational":
        if self.sign() == 0:
            raise ZeroDivisionError("inverse of zero")
        # 1/((p+q*sqrt(d))/r) = r*(p - q*sqrt(d)) / (p^2 - q^2 d)
        norm = self.p * self.p - self.q * self.q * self.d
        return QuadraticIrrational(self.r * self.p, -self.r * self.q, norm, self.d)

    def __truediv__(self, other):
        return self * _coerce(other, self.d).inverse()

    # -- order ----------------------------------------------------------

    def sign(self) -> int:
        s = _sign_pair(self.p, self.q, self.d)
        return s if self.r > 0 else -s

    def cmp(self, other) -> int:
        return (self - _coerce(other, self.d)).sign()

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (QuadraticIrrational, int, Fraction)):
            return self.cmp(other) == 0
        return NotImplemented

    def __hash__(self):
        if self.q == 0:
            return hash(Fraction(self.p, self.r))
        return hash((self.p, self.q, self.r, self.d))

    # -- floor / fractional part ----------------------------------------

    def floor(self) -> int:
        p, q, r, d = self.p, self.q, self.r, self.d
        s = math.isqrt(q * q * d)
        # q*sqrt(d) lies in [s, s+1) for q>=0 and (-s-1, -s] for q<0
        lo = p + (s if q >= 0 else -s - 1)
        e = lo // r  # r > 0 after canonicalisation
        # exact adjustment (at most a couple of steps)
        while (self - e).sign() < 0:
            e -= 1
        while (self - (e + 1)).sign() >= 0:
            e += 1
        return e

    def frac(self) -> "QuadraticIrrational":
        return self - self.floor()

    def floor_frac(self) -> tuple[int, "QuadraticIrrational"]:
        e = self.floor()
        return e, self - e

    # -- conversions -----------------------------------------------------

    def __float__(self) -> float:
        return (self.p + self.q * math.sqrt(self.d)) / self.r

    def as_fraction(self) -> Fraction:
        if self.q != 0:
            raise QuadIrrError("not rational")
        return Fraction(self.p, self.r)

    def rational_lower_bound(self, bits: int = 64) -> Fraction:
        """Largest n/2^bits not exceeding the value (exact bracketing)."""
        scaled = self * (1 << bits)
        return Fraction(scaled.floor(), 1 << bits)

    def to_tuple(self) -> tuple[int, int, int, int]:
        return (self.p, self.q, self.r, self.d)

    def __repr__(self):
        if self.q == 0:
            return f"QuadraticIrrational({self.p}/{self.r})"
        return f"QuadraticIrrational(({self.p}{self.q:+d}*sqrt({self.d}))/{self.r})"


def _coerce(x, d: int) -> QuadraticIrrational:
    if isinstance(x, QuadraticIrrational):
        return x
    if isinstance(x, int):
        return QuadraticIrrational(x, 0, 1, 1)
    if isinstance(x, Fraction):
        return QuadraticIrrational(x.numerator, 0, x.denominator, 1)
    raise TypeError(f"cannot mix QuadraticIrrational with {type(x).__name__}")


ZERO = QuadraticIrrational(0, 0, 1, 1)
ONE = QuadraticIrrational(1, 0, 1, 1)


def make_quad(p: int, q: int, r: int, d: int) -> QuadraticIrrational:
    """Validated constructor: r != 0, d > 0 and squarefree."""
    if r == 0:
        raise QuadIrrError("r must be nonzero")
    if d <= 0:
        raise QuadIrrError("d must be positive")
    if not _is_squarefree(d):
        raise QuadIrrError(f"d={d} is not squarefree")
    return QuadraticIrrational(p, q, r, d)


def cmp(a: QuadraticIrrational, b) -> int:
    """-1, 0 or +1; exact, no floating point."""
    return a.cmp(b)


def floor_frac(x: QuadraticIrrational) -> tuple[int, QuadraticIrrational]:
    return x.floor_frac()


# ---------------------------------------------------------------------------
# circular arcs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    """Arc on R/Z from lo to hi (wrap-around when lo > hi), with closure flags."""

    lo: QuadraticIrrational
    hi: QuadraticIrrational
    lo_closed: bool = True
    hi_closed: bool = True

    def length(self) -> QuadraticIrrational:
        diff = self.hi - self.lo
        if diff.sign() < 0:
            diff = diff + 1
        return diff

    def contains(self, x: QuadraticIrrational) -> bool:
        """Exact membership for x reduced to [0, 1)."""
        cl = x.cmp(self.lo)
        ch = x.cmp(self.hi)
        at_lo = cl == 0 and self.lo_closed
        at_hi = ch == 0 and self.hi_closed
        wraps = self.lo.cmp(self.hi) > 0
        if wraps:
            return at_lo or at_hi or cl > 0 or ch < 0
        return at_lo or at_hi or (cl > 0 and ch < 0)


def in_arc(x: QuadraticIrrational, arc: Arc) -> bool:
    return arc.contains(x)


def full_circle() -> Arc:
    return Arc(ZERO, ONE, True, False)


# ---------------------------------------------------------------------------
# continued fractions
# ---------------------------------------------------------------------------

class PeriodicTail(NamedTuple):
    start: int     # index of the first partial quotient inside the period
    length: int


@dataclass(frozen=True)
class ContinuedFraction:
    partial_quotients: tuple[int, ...]
    periodic_tail: PeriodicTail | None = None

    @property
    def bounded_quotients(self) -> bool | None:
        """Badly-approximable flag; only decidable once periodicity is seen."""
        if self.periodic_tail is None:
            return None
        return True  # a detected period means the quotients repeat, hence bounded

    def quotient(self, i: int) -> int:
        aq = self.partial_quotients
        if i < len(aq):
            return aq[i]
        if self.periodic_tail is None:
            raise IndexError(f"partial quotient {i} beyond computed depth")
        start, length = self.periodic_tail
        return aq[start + (i - start) % length]

    def quotients(self, n: int) -> Iterator[int]:
        for i in range(n):
            yield self.quotient(i)


def cf_expand(x: QuadraticIrrational, max_depth: int) -> ContinuedFraction:
    """Continued fraction of a quadratic irrational by the standard surd recurrence.

    The complete quotient is kept as (P + sqrt(N))/Q with the invariant
    Q | N - P^2; periodicity is detected by recurrence of the (P, Q) state.
    """
    if x.is_rational:
        raise QuadIrrError("continued fraction expansion requires an irrational")
    # rewrite (p + q*sqrt(d))/r as (P + sqrt(N))/Q with q absorbed into N
    if x.q > 0:
        P, Q, N = x.p, x.r, x.q * x.q * x.d
    else:
        P, Q, N = -x.p, -x.r, x.q * x.q * x.d
    if (N - P * P) % Q != 0:
        # scale numerator and denominator by |Q| to restore the invariant
        s = abs(Q)
        P, N, Q = P * s, N * s * s, Q * s

    sqrtN = math.isqrt(N)
    quotients: list[int] = []
    seen: dict[tuple[int, int], int] = {}
    tail = None
    for depth in range(max_depth):
        key = (P, Q)
        if key in seen:
            tail = PeriodicTail(start=seen[key], length=depth - seen[key])
            break
        seen[key] = depth
        a = _surd_floor(P, N, Q, sqrtN)
        quotients.append(a)
        P = a * Q - P
        Q = (N - P * P) // Q
    return ContinuedFraction(tuple(quotients), tail)


def _surd_cmp(P: int, N: int, Q: int, m: int) -> int:
    """Exact sign of (P + sqrt(N))/Q - m."""
    s = _sign_pair(P - m * Q, 1, N)
    return s if Q > 0 else -s


def _surd_floor(P: int, N: int, Q: int, sqrtN: int) -> int:
    a = (P + sqrtN) // Q
    while _surd_cmp(P, N, Q, a) < 0:
        a -= 1
    while _surd_cmp(P, N, Q, a + 1) >= 0:
        a += 1
    return a


def convergents(cf: ContinuedFraction, n: int) -> list[tuple[int, int]]:
    """First max(n, 1) convergents p/q by the standard recurrence, lowest terms."""
    n = max(n, 1)
    out: list[tuple[int, int]] = []
    p0, p1 = 0, 1   # p_{-2}, p_{-1}
    q0, q1 = 1, 0   # q_{-2}, q_{-1}
    for i in range(n):
        a = cf.quotient(i)
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        g = math.gcd(abs(p1), q1)
        out.append((p1 // g, q1 // g))
    return out


class BadlyScan(NamedTuple):
    c_est: Fraction          # exact rational lower bound of min_k k*dist({k phi}, 0)
    argmin_k: int
    d: int                   # ceil(1 / c_est), the integer from the hitting bound


def badly_constant_scan(phi: QuadraticIrrational, k_max: int) -> BadlyScan:
    """min over 1 <= k <= k_max of k * dist({k phi}, 0), as an exact rational bound.

    A float shadow orbit flags candidate record minima; every candidate is
    confirmed with exact arithmetic before the record is updated.
    """
    if phi.is_rational:
        raise QuadIrrError("phi must be irrational")
    if k_max < 1:
        raise QuadIrrError("k_max must be >= 1")
    fphi = float(phi.frac())
    best: QuadraticIrrational | None = None
    best_f = math.inf
    argmin = 1
    y = 0.0
    for k in range(1, k_max + 1):
        y += fphi
        if y >= 1.0:
            y -= 1.0
        dist_f = min(y, 1.0 - y)
        if k * dist_f < best_f * (1.0 + 1e-9) + 1e-9:
            yk = (phi * k).frac()
            dist = yk if yk.cmp(1 - yk) <= 0 else 1 - yk
            cand = dist * k
            if best is None or cand.cmp(best) < 0:
                best, argmin = cand, k
                best_f = float(cand)
    assert best is not None
    c_est = best.rational_lower_bound()
    if c_est <= 0:
        raise QuadIrrError("scan produced a nonpositive constant")
    d = -((-c_est.denominator) // c_est.numerator)  # ceil(1/c_est)
    return BadlyScan(c_est=c_est, argmin_k=argmin, d=d)
