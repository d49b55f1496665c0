"""Lacunary integer sequences and their exact dilates modulo one.

A sequence (a_n) is lacunary with growth factor r > 1 if a_{n+1} >= r * a_n
for every n.  This module generates such sequences, subsamples them so that
consecutive retained terms are separated by a factor N**xi with xi > 2,
checks the linear-independence inequality that the subsample satisfies, and
produces the dilated point sets {alpha * a_n} mod 1 exactly in fixed-point
arithmetic before rounding to doubles.

All term arithmetic uses Python integers and fractions; nothing here is
subject to floating-point overflow or rounding until the final conversion of
fractional parts to float64.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyInput,
    GrowthViolation,
    IndexOutOfRange,
    InsufficientGrowth,
    PrecisionTooLow,
)

__all__ = [
    "LacunarySeq",
    "SubsampledSeq",
    "DilationVector",
    "PointSet",
    "gen_lacunary",
    "subsample",
    "check_linear_independence",
    "dilate_mod1",
    "dilate_exact",
]

# Fractional bits that must survive beyond the largest term's bit length so
# that frac(alpha * a_n) keeps at least 64 exact bits.
GUARD_BITS = 64


def _log_fraction(x: Fraction) -> float:
    """Natural log of a positive Fraction, safe for huge numerators."""
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class LacunarySeq:
    """Strictly increasing positive integers with a certified growth factor.

    The growth factor stored here is recomputed from the data: it is the
    exact minimum of the consecutive ratios a_{n+1}/a_n, kept as a Fraction.
    Downstream guarantees (subsampling gaps, linear independence) depend on
    it, so a declared value is never trusted.
    """

    terms: tuple[int, ...]
    growth_factor: Fraction
    label: str = "custom"

    def __post_init__(self):
        if not self.terms:
            raise EmptyInput("lacunary sequence needs at least one term")
        if any(t <= 0 for t in self.terms):
            raise GrowthViolation("terms must be positive")
        for a, b in zip(self.terms, self.terms[1:]):
            if b <= a:
                raise GrowthViolation(f"terms not strictly increasing: {a} -> {b}")
            if Fraction(b, a) < self.growth_factor:
                raise GrowthViolation(
                    f"ratio {b}/{a} below growth factor {self.growth_factor}"
                )
        if self.growth_factor <= 1:
            raise GrowthViolation("growth factor must exceed 1")

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> str:
        """Serialize as a JSON array of decimal strings (exact)."""
        return json.dumps([str(t) for t in self.terms])

    @classmethod
    def from_json(cls, text: str, label: str = "custom") -> "LacunarySeq":
        terms = [int(s) for s in json.loads(text)]
        return cls(tuple(terms), _certified_growth(terms), label=label)


def _certified_growth(terms: Sequence[int]) -> Fraction:
    if len(terms) < 2:
        # A single term satisfies the gap condition vacuously; use a marker
        # ratio just above 1 so the invariant check passes.
        return Fraction(2)
    return min(Fraction(b, a) for a, b in zip(terms, terms[1:]))


def gen_lacunary(kind: str, count: int | None = None, *, base: int | None = None,
                 terms: Iterable[int] | None = None,
                 r: float | Fraction | None = None) -> LacunarySeq:
    """Build a lacunary sequence.

    kind = "geometric":   terms base, base**2, ..., base**count  (base >= 2)
    kind = "custom":      the given terms, checked against declared r
    kind = "min_growth":  greedy minimal sequence a_{n+1} = max(a_n+1, ceil(r a_n))

    The returned sequence always carries the certified growth factor, i.e.
    the exact minimum of consecutive ratios, which may exceed a declared r.
    """
    if kind == "geometric":
        if base is None or base < 2:
            raise GrowthViolation("geometric kind needs integer base >= 2")
        if count is None or count < 1:
            raise GrowthViolation("count must be >= 1")
        seq = tuple(base ** n for n in range(1, count + 1))
        return LacunarySeq(seq, Fraction(base), label=f"geometric({base})")
    if kind == "custom":
        if terms is None:
            raise GrowthViolation("custom kind needs terms")
        tt = tuple(int(t) for t in terms)
        declared = Fraction(r) if r is not None else None
        certified = _certified_growth(tt)
        if declared is not None and len(tt) >= 2 and certified < declared:
            raise GrowthViolation(
                f"declared growth {declared} not met: certified {certified}"
            )
        return LacunarySeq(tt, certified, label="custom")
    if kind == "min_growth":
        if r is None:
            raise GrowthViolation("min_growth kind needs r")
        rr = Fraction(r)
        if rr <= 1:
            raise GrowthViolation("growth factor must exceed 1")
        if count is None or count < 1:
            raise GrowthViolation("count must be >= 1")
        seq = [1]
        for _ in range(count - 1):
            seq.append(max(seq[-1] + 1, math.ceil(seq[-1] * rr)))
        return LacunarySeq(tuple(seq), _certified_growth(seq),
                           label=f"min_growth({rr})")
    raise GrowthViolation(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class SubsampledSeq:
    """Subsample a_(l*n*ceil(log N)) whose consecutive gaps beat N**xi.

    xi = l * log(r) must exceed 2, which is the precondition r**l > e**2.
    The index stride uses the integer ceil(log N); this keeps the gap
    guarantee exact, because each stride multiplies the terms by at least
    r**(l*ceil(log N)) >= N**xi.
    """

    parent: LacunarySeq
    l: int
    N: int
    terms: tuple[int, ...]
    xi: float

    @property
    def K(self) -> int:
        return len(self.terms)


def subsample(seq: LacunarySeq, l: int, N: int) -> SubsampledSeq:
    """Retain every (l * ceil(log N))-th term of seq.

    Raises InsufficientGrowth unless r**l > e**2 (equivalently xi > 2), and
    IndexOutOfRange when seq has fewer than l*K*ceil(log N) terms for
    K = floor(N / (l * ceil(log N))).
    """
    if l < 1:
        raise InsufficientGrowth("l must be a positive integer")
    if N < 2:
        raise IndexOutOfRange("N must be at least 2")
    log_r = _log_fraction(seq.growth_factor)
    xi = l * log_r
    if xi <= 2.0:
        raise InsufficientGrowth(
            f"r**l = exp({xi:.6f}) does not exceed e**2; increase l or growth"
        )
    stride = l * math.ceil(math.log(N))
    K = N // stride
    if K < 1:
        raise IndexOutOfRange(f"N={N} too small for stride {stride}")
    if len(seq.terms) < K * stride:
        raise IndexOutOfRange(
            f"need {K * stride} parent terms, have {len(seq.terms)}"
        )
    picked = tuple(seq.terms[n * stride - 1] for n in range(1, K + 1))
    sub = SubsampledSeq(parent=seq, l=l, N=N, terms=picked, xi=xi)
    _check_subsample_gaps(sub)
    return sub


def _check_subsample_gaps(sub: SubsampledSeq) -> None:
    # gap guarantee: log(t_{n+1}/t_n) >= xi * log N.  The margin is strictly
    # positive because ceil(log N) > log N for integer N >= 2 (log N is
    # irrational), so a float comparison with a tiny slack is safe.
    bound = sub.xi * math.log(sub.N)
    for a, b in zip(sub.terms, sub.terms[1:]):
        if math.log(b) - math.log(a) < bound - 1e-9:
            raise GrowthViolation(
                f"subsample gap {b}/{a} below N**xi"
            )


def check_linear_independence(sub: SubsampledSeq, c: Fraction | int | float,
                              N: int) -> bool:
    """Exact test of the domination inequality behind linear independence.

    Returns True iff for every K0 in [2, K]:

        sum_{j < K0} c * N**2 * t_j  <  t_{K0}

    in exact rational arithmetic.  When this holds, no nonzero integer
    combination with coefficients bounded by c*N**2 can vanish, because the
    largest participating term dominates the rest.
    """
    cc = Fraction(c)
    terms = sub.terms
    running = Fraction(0)
    for k0 in range(1, len(terms)):
        running += cc * N * N * terms[k0 - 1]
        if running >= terms[k0]:
            return False
    return True


@dataclass(frozen=True)
class DilationVector:
    """Point of [0,1)^d in binary fixed point: component i is m_i / 2**B.

    precision_bits B must exceed the bit length of the largest sequence term
    by at least 64, so that frac(alpha * a_n) keeps 64 exact fractional bits.
    """

    mantissas: tuple[int, ...]
    precision_bits: int

    def __post_init__(self):
        if self.precision_bits < 1:
            raise PrecisionTooLow("precision_bits must be positive")
        top = 1 << self.precision_bits
        for m in self.mantissas:
            if not (0 <= m < top):
                raise PrecisionTooLow("mantissa outside [0, 2**B)")

    @property
    def dim(self) -> int:
        return len(self.mantissas)

    def as_floats(self) -> np.ndarray:
        top = 1 << self.precision_bits
        return np.array([m / top for m in self.mantissas])

    def check_precision(self, max_term: int) -> None:
        need = max_term.bit_length() + GUARD_BITS
        if self.precision_bits < need:
            raise PrecisionTooLow(
                f"need {need} bits for largest term, have {self.precision_bits}"
            )

    @classmethod
    def from_fractions(cls, values: Sequence[Fraction | float], bits: int) -> "DilationVector":
        ms = []
        for v in values:
            f = Fraction(v) % 1
            ms.append((f.numerator << bits) // f.denominator)
        return cls(tuple(ms), bits)

    @classmethod
    def random(cls, dim: int, bits: int, rng: np.random.Generator) -> "DilationVector":
        nbytes = (bits + 7) // 8 + 8
        mask = (1 << bits) - 1
        ms = tuple(
            int.from_bytes(rng.bytes(nbytes), "little") & mask for _ in range(dim)
        )
        return cls(ms, bits)

    @classmethod
    def random_for_terms(cls, dim: int, max_term: int,
                         rng: np.random.Generator, extra_bits: int = GUARD_BITS,
                         ) -> "DilationVector":
        """Random vector with precision matched to the largest term."""
        bits = max_term.bit_length() + max(extra_bits, GUARD_BITS)
        return cls.random(dim, bits, rng)


@dataclass
class PointSet:
    """Finite point set in [0,1)^d with provenance metadata."""

    dim: int
    points: np.ndarray  # shape (N, dim), float64
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != self.dim:
            raise ValueError("points must have shape (N, dim)")
        if self.points.size and (
            self.points.min() < 0.0 or self.points.max() >= 1.0
        ):
            raise ValueError("coordinates must lie in [0, 1)")

    @property
    def N(self) -> int:
        return self.points.shape[0]

    def prefix(self, n: int) -> "PointSet":
        meta = dict(self.meta)
        meta["n"] = n
        return PointSet(self.dim, self.points[:n].copy(), meta)

    def to_csv(self, path) -> None:
        head = " ".join(
            f"{k}={self.meta[k]}" for k in ("seed", "sequence") if k in self.meta
        )
        with open(path, "w") as fh:
            fh.write(f"# dim={self.dim} n={self.N}" + (f" {head}" if head else "") + "\n")
            for row in self.points:
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "PointSet":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("#"):
                raise ValueError("missing point-set header")
            meta = {}
            for tok in header[1:].split():
                k, _, v = tok.partition("=")
                meta[k] = v
            rows = [
                [float(x) for x in line.split(",")]
                for line in fh
                if line.strip()
            ]
        dim = int(meta.pop("dim"))
        meta.pop("n", None)
        return cls(dim, np.array(rows, dtype=float).reshape(len(rows), dim), meta)


def dilate_exact(seq_terms: Sequence[int], alpha: DilationVector) -> list[tuple[int, ...]]:
    """Exact fixed-point fractional parts of alpha * a_n.

    Returns, per term, the tuple of mantissas of frac(alpha_i * a_n), each an
    integer in [0, 2**B).  This is the bit-exact core of dilate_mod1 and is
    exposed so tests can compare against independent big-integer oracles.
    """
    if not seq_terms:
        raise EmptyInput("no sequence terms")
    alpha.check_precision(max(seq_terms))
    mask = (1 << alpha.precision_bits) - 1
    out = []
    for a in seq_terms:
        out.append(tuple((m * a) & mask for m in alpha.mantissas))
    return out


def dilate_mod1(seq_terms: Sequence[int], alpha: DilationVector,
                meta: dict | None = None) -> PointSet:
    """Point set {alpha * a_n mod 1 : n} rounded to float64.

    Each coordinate is computed exactly in fixed point (see dilate_exact) and
    only then rounded, so the result is deterministic for a fixed alpha and
    independent of evaluation order.
    """
    exact = dilate_exact(seq_terms, alpha)
    top = 1 << alpha.precision_bits
    pts = np.array([[m / top for m in row] for row in exact], dtype=float)
    # a mantissa just below 2**B can round up to 1.0; clamp to the largest
    # double below 1 so coordinates stay in [0, 1)
    pts[pts >= 1.0] = np.nextafter(1.0, 0.0)
    return PointSet(alpha.dim, pts, dict(meta or {}))
