"""Constructions: q-ary codes and the sparse matrix families built from them.

Three sampler families produce sketching matrices:

* ``sample_sparse_sign_jl`` — s nonzeros per column, values +-1/sqrt(s), rows
  drawn uniformly without replacement;
* ``sample_osnap_block`` — s nonzeros per column, one per contiguous block of
  m/s rows;
* ``sample_countsketch`` — exactly one +-1 per column, as a
  :class:`~sketchbounds.matrices.OneSparseMap`.

Deterministic constructions turn a low-agreement code into a matrix with
low pairwise column coherence (``code_to_incoherent``) and into a family of
flat k/2-sparse unit vectors (``spread_vectors``).

Every sampler is a pure function of its parameters plus a 64-bit seed; the
matrix samplers draw one derived stream per column (see
:mod:`sketchbounds.rng`), so columns could be sampled in parallel without
changing the output.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import json

import numpy as np

from .errors import (
    Exhausted,
    IndexOutOfRange,
    InvalidDimension,
    InvalidSparsity,
    NotDivisible,
    ShapeMismatch,
    TooFewWords,
    TooLarge,
)
from .matrices import SparseMatrix, OneSparseMap, canonical_json
from .rng import substream


class Code:
    """A q-ary block code: N distinct words of length t over alphabet {0..q-1}."""

    __slots__ = ("q", "t", "words")

    def __init__(self, q: int, t: int, words: Sequence[Sequence[int]]):
        q = int(q)
        t = int(t)
        if q < 2:
            raise ValueError(f"alphabet size must be >= 2, got {q}")
        if t < 1:
            raise ValueError(f"block length must be >= 1, got {t}")
        arr = np.asarray(words, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != t:
            raise ValueError(f"words must form an N x {t} array")
        if arr.shape[0] < 1:
            raise ValueError("a code needs at least one word")
        if arr.size and (arr.min() < 0 or arr.max() >= q):
            raise ValueError(f"symbols must lie in [0, {q})")
        seen = set(map(tuple, arr.tolist()))
        if len(seen) != arr.shape[0]:
            raise ValueError("codewords must be distinct")
        arr.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "words", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Code is immutable")

    @property
    def size(self) -> int:
        return int(self.words.shape[0])

    def __eq__(self, other):
        if not isinstance(other, Code):
            return NotImplemented
        return (self.q, self.t) == (other.q, other.t) and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.q, self.t, self.size))

    def __repr__(self):
        return f"Code(q={self.q}, t={self.t}, size={self.size})"


def code_to_json(c: Code) -> str:
    return canonical_json({"q": c.q, "t": c.t, "words": c.words.tolist()})


def code_from_json(text: str) -> Code:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid code JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"q", "t", "words"} <= set(obj):
        raise ValueError("code JSON must be an object with keys q, t, words")
    return Code(obj["q"], obj["t"], obj["words"])


def save_code(c: Code, path) -> None:
    with open(path, "w") as fh:
        fh.write(code_to_json(c))


def load_code(path) -> Code:
    with open(path) as fh:
        return code_from_json(fh.read())


def random_code(q: int, t: int, N: int, eps: float, seed: int, max_attempts: int = 1000) -> Code:
    """Sample N words i.i.d. uniform, rejecting whole words that agree with an
    accepted word in more than floor(eps * t) positions.

    Duplicates are always rejected, keeping codewords distinct even when
    eps = 1 makes the agreement cap vacuous.  Raises :class:`Exhausted` if
    some word cannot be placed within ``max_attempts`` candidate draws.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if N < 1:
        raise ValueError(f"need at least one word, got N={N}")
    if max_attempts < 1:
        raise ValueError("max_attempts must be positive")
    cap = math.floor(eps * t)
    g = substream(seed)
    accepted = np.empty((N, t), dtype=np.int64)
    count = 0
    while count < N:
        for attempt in range(max_attempts):
            candidate = g.integers(0, q, size=t)
            if count:
                agreements = (accepted[:count] == candidate).sum(axis=1)
                if agreements.max() > cap or agreements.max() == t:
                    continue
            accepted[count] = candidate
            break
        else:
            raise Exhausted(
                f"could not place word {count} within {max_attempts} attempts "
                f"(q={q}, t={t}, eps={eps})"
            )
        count += 1
    return Code(q, t, accepted)


def code_max_agreement(c: Code) -> int:
    """Largest number of agreeing positions over all pairs of codewords."""
    if c.size < 2:
        raise TooFewWords("pairwise agreement needs at least two words")
    words = c.words
    best = 0
    for i in range(c.size - 1):
        agree = (words[i + 1 :] == words[i]).sum(axis=1)
        best = max(best, int(agree.max()))
    return best


def code_to_incoherent(c: Code) -> SparseMatrix:
    """Embed each word as a unit column: chunk j of q rows carries 1/sqrt(t)
    at offset equal to the word's j-th symbol.

    The result has q*t rows, one column per word, and pairwise column dot
    products equal to (number of agreeing positions) / t.
    """
    value = 1.0 / math.sqrt(c.t)
    cols = [
        [(j * c.q + int(sym), value) for j, sym in enumerate(word)]
        for word in c.words
    ]
    return SparseMatrix(c.q * c.t, c.size, cols)


# --- random matrix samplers ---------------------------------------------------

def sample_sparse_sign_jl(m: int, n: int, s: int, seed: int) -> SparseMatrix:
    """Sign matrix with s nonzeros per column: rows are a uniform s-subset of
    [m], values independent +-1/sqrt(s)."""
    if not 1 <= s <= m:
        raise InvalidSparsity(f"sparsity s={s} must lie in [1, m={m}]")
    if n < 1:
        raise ValueError(f"need n >= 1 columns, got {n}")
    scale = 1.0 / math.sqrt(s)
    cols = []
    for j in range(n):
        g = substream(seed, j)
        rows = np.sort(g.choice(m, size=s, replace=False))
        signs = g.integers(0, 2, size=s) * 2 - 1
        cols.append(list(zip(rows.tolist(), (signs * scale).tolist())))
    return SparseMatrix(m, n, cols)


def sample_osnap_block(m: int, n: int, s: int, seed: int) -> SparseMatrix:
    """Block sign matrix: s must divide m; each column places one +-1/sqrt(s)
    uniformly inside each of the s contiguous blocks of m/s rows."""
    if not 1 <= s <= m:
        raise InvalidSparsity(f"sparsity s={s} must lie in [1, m={m}]")
    if m % s != 0:
        raise NotDivisible(f"s={s} must divide m={m} for block sampling")
    if n < 1:
        raise ValueError(f"need n >= 1 columns, got {n}")
    b = m // s
    scale = 1.0 / math.sqrt(s)
    block_starts = np.arange(s, dtype=np.int64) * b
    cols = []
    for j in range(n):
        g = substream(seed, j)
        rows = block_starts + g.integers(0, b, size=s)
        signs = g.integers(0, 2, size=s) * 2 - 1
        cols.append(list(zip(rows.tolist(), (signs * scale).tolist())))
    return SparseMatrix(m, n, cols)


def sample_countsketch(m: int, n: int, seed: int) -> OneSparseMap:
    """One-sparse map: each column independently picks a uniform row and sign."""
    if m < 1:
        raise ValueError(f"need m >= 1 rows, got {m}")
    if n < 1:
        raise ValueError(f"need n >= 1 columns, got {n}")
    g = substream(seed)
    a = g.integers(0, m, size=n)
    sigma = g.integers(0, 2, size=n) * 2 - 1
    return OneSparseMap(m, n, a, sigma)


def sample_coordinate_subspace(n: int, d: int, seed: int) -> tuple[int, ...]:
    """Uniform d-subset of the n coordinates, returned sorted ascending."""
    if not 1 <= d <= n:
        raise InvalidDimension(f"subspace dimension d={d} must lie in [1, n={n}]")
    g = substream(seed)
    return tuple(int(i) for i in np.sort(g.choice(n, size=d, replace=False)))


# --- exact support-distribution checks ---------------------------------------

@dataclass(frozen=True)
class OsnapReport:
    """Exact expectation of a product of support indicators vs its cap."""

    expectation: float
    bound: float
    holds: bool
    exact_expectation: Fraction
    exact_bound: Fraction


_ENUM_MAX_CELLS = 6
_ENUM_MAX_ROWS = 16


def _support_probability(m: int, s: int, sampler: str, rows_needed: frozenset[int]) -> Fraction:
    """P(all rows in rows_needed lie in one column's support), by enumeration."""
    if sampler == "sign_jl":
        total = 0
        hits = 0
        for support in itertools.combinations(range(m), s):
            total += 1
            if rows_needed <= set(support):
                hits += 1
        return Fraction(hits, total)
    if sampler == "block":
        b = m // s
        total = 0
        hits = 0
        for offsets in itertools.product(range(b), repeat=s):
            total += 1
            support = {blk * b + off for blk, off in enumerate(offsets)}
            if rows_needed <= support:
                hits += 1
        return Fraction(hits, total)
    raise ValueError(f"unknown sampler {sampler!r}; expected 'sign_jl' or 'block'")


def verify_osnap_properties(
    m: int, n: int, s: int, sampler: str, cells: Iterable[tuple[int, int]]
) -> OsnapReport:
    """Check E[prod of delta_{(i,j)} over cells] <= (s/m)^{|cells|} exactly.

    The expectation is computed with rational arithmetic by enumerating every
    possible per-column support of the named sampler (columns are
    independent), which is why the guards |cells| <= 6 and m <= 16 exist.
    """
    if not 1 <= s <= m:
        raise InvalidSparsity(f"sparsity s={s} must lie in [1, m={m}]")
    if sampler == "block" and m % s != 0:
        raise NotDivisible(f"s={s} must divide m={m} for block sampling")
    cell_set = set()
    for i, j in cells:
        i, j = int(i), int(j)
        if not 0 <= i < m:
            raise IndexOutOfRange(f"row {i} outside [0, {m})")
        if not 0 <= j < n:
            raise IndexOutOfRange(f"column {j} outside [0, {n})")
        cell_set.add((i, j))
    if len(cell_set) > _ENUM_MAX_CELLS:
        raise TooLarge(f"enumeration supports at most {_ENUM_MAX_CELLS} cells, got {len(cell_set)}")
    if m > _ENUM_MAX_ROWS:
        raise TooLarge(f"enumeration supports at most m={_ENUM_MAX_ROWS} rows, got m={m}")

    by_column: dict[int, set[int]] = {}
    for i, j in cell_set:
        by_column.setdefault(j, set()).add(i)
    expectation = Fraction(1)
    for rows_needed in by_column.values():
        expectation *= _support_probability(m, s, sampler, frozenset(rows_needed))
    bound = Fraction(s, m) ** len(cell_set)
    holds = float(expectation) <= float(bound) + 1e-12
    return OsnapReport(
        expectation=float(expectation),
        bound=float(bound),
        holds=holds,
        exact_expectation=expectation,
        exact_bound=bound,
    )


# --- flat vectors from codes ---------------------------------------------------

def spread_vectors(c: Code, n: int, k: int) -> list[np.ndarray]:
    """Turn each codeword into a k/2-sparse unit vector in R^n.

    Requires k even with c.t == k/2 and c.q == 2n/k.  Word i yields the vector
    with value sqrt(2/k) at position 2*j*n/k + (word_i)_j for each j; blocks
    are disjoint, every vector has unit norm, and two vectors' dot product is
    (2/k) times their words' agreement count.
    """
    if k < 2 or k % 2 != 0:
        raise ShapeMismatch(f"k must be even and >= 2, got {k}")
    if (2 * n) % k != 0:
        raise ShapeMismatch(f"k={k} must divide 2n={2 * n}")
    if c.t != k // 2:
        raise ShapeMismatch(f"code block length {c.t} must equal k/2={k // 2}")
    q_needed = (2 * n) // k
    if c.q != q_needed:
        raise ShapeMismatch(f"code alphabet {c.q} must equal 2n/k={q_needed}")
    value = math.sqrt(2.0 / k)
    out = []
    for word in c.words:
        y = np.zeros(n)
        for j, sym in enumerate(word):
            y[2 * j * n // k + int(sym)] = value
        out.append(y)
    return out
