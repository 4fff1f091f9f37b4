"""Witness searches: executable certifiers and refuters.

Each search either returns a :class:`Certificate` that re-verifies from raw
matrix data, or the ``none`` certificate.  Four certificate kinds exist:

* ``incoherence_pair`` — two columns whose inner product exceeds the claimed
  coherence level (a refutation of an incoherence assumption);
* ``sparsity_lower_bound`` — a pigeonhole group of near-identical columns
  forcing a floor on per-column sparsity;
* ``rip_distortion`` — a k-sparse vector whose image has norm ratio bounded
  away from 1 (a refutation of a small restricted-isometry constant);
* ``kernel_witness`` — an exactly-null vector for a one-sparse map, built
  from a row collision in integer arithmetic.

The searches are deterministic: scans run in ascending index order and every
tie breaks toward the lexicographically smallest choice, so reruns on equal
inputs emit identical certificates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateColumn,
    EmptyIndexSet,
    IndexOutOfRange,
    InvalidT,
    NoScaleFound,
    NotSignMatrix,
    PreconditionViolated,
    TooLarge,
)
from .matrices import SparseMatrix, OneSparseMap, apply, column_sparsity
from .measures import check_unit_columns, dyadic_scale_count, scale_profile
from .rng import derive_seed
from .constructions import sample_countsketch, sample_coordinate_subspace
from .measures import subspace_distortion

# Group constant for the t-type certifier: C = 2 / (1 - 1/sqrt(2)).
TTYPE_GROUP_CONSTANT = 2.0 / (1.0 - 1.0 / math.sqrt(2.0))


# --- certificates --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Certificate:
    """Tagged union of witness outcomes; ``kind == 'none'`` means no finding.

    Only the fields relevant to ``kind`` are populated: (i, j, dot) for an
    incoherence pair, (t, group_size, bound_value) for a sparsity bound,
    (vector, ratio) for a distortion witness, and vector alone for a kernel
    witness.  ``source`` names the search that produced the certificate.
    """

    kind: str
    source: str = ""
    i: int | None = None
    j: int | None = None
    dot: float | None = None
    t: int | None = None
    group_size: int | None = None
    bound_value: float | None = None
    vector: np.ndarray | None = None
    ratio: float | None = None

    def to_jsonable(self) -> dict:
        out: dict = {"kind": self.kind, "source": self.source}
        if self.kind == "incoherence_pair":
            out.update(i=self.i, j=self.j, dot=self.dot)
        elif self.kind == "sparsity_lower_bound":
            out.update(t=self.t, group_size=self.group_size, bound_value=self.bound_value)
        elif self.kind == "rip_distortion":
            out.update(vector=self.vector.tolist(), ratio=self.ratio)
        elif self.kind == "kernel_witness":
            out.update(vector=self.vector.tolist())
        return out


def none_certificate(source: str) -> Certificate:
    return Certificate(kind="none", source=source)


def verify_certificate(cert: Certificate, A: SparseMatrix | OneSparseMap, tol: float | None = None) -> bool:
    """Recompute a certificate's claim from raw data.

    Incoherence pairs re-derive the stored dot product within 1e-12;
    distortion witnesses re-derive the ratio within 1e-9; kernel witnesses
    must map to exactly zero in integer arithmetic.  Sparsity bound
    certificates recheck their arithmetic.  The ``none`` kind verifies
    trivially.
    """
    if cert.kind == "none":
        return True
    if cert.kind == "incoherence_pair":
        tol = 1e-12 if tol is None else tol
        ci = A.submatrix_dense([cert.i])[:, 0]
        cj = A.submatrix_dense([cert.j])[:, 0]
        return abs(float(ci @ cj) - cert.dot) <= tol
    if cert.kind == "sparsity_lower_bound":
        tol = 1e-12 if tol is None else tol
        scale = 0.25 if cert.source == "sign_pattern_certify" else 1.0 / (2.0 * TTYPE_GROUP_CONSTANT)
        return abs(cert.bound_value - cert.t * (cert.group_size - 1) * scale) <= tol
    if cert.kind == "rip_distortion":
        tol = 1e-9 if tol is None else tol
        x = cert.vector
        if isinstance(A, OneSparseMap):
            y = A.apply(x)
        else:
            y = apply(A, x)
        ratio = float(y @ y) / float(x @ x)
        return abs(ratio - cert.ratio) <= tol
    if cert.kind == "kernel_witness":
        x = np.asarray(cert.vector)
        if not np.any(x):
            return False
        xi = np.rint(x).astype(np.int64)
        if not np.array_equal(xi, x):
            return False
        if isinstance(A, OneSparseMap):
            y = A.apply(xi)
            return bool(np.all(y == 0))
        return bool(np.all(apply(A, x) == 0))
    raise ValueError(f"unknown certificate kind {cert.kind!r}")


# --- row-mass overload search ---------------------------------------------------

def _row_entries(A: SparseMatrix) -> list[list[tuple[int, float]]]:
    """Transpose the column store into per-row (column, value) lists."""
    rows: list[list[tuple[int, float]]] = [[] for _ in range(A.m)]
    for j in range(A.n):
        r, v = A.column(j)
        for rr, vv in zip(r.tolist(), v.tolist()):
            rows[rr].append((j, vv))
    return rows


def _max_dot_pair(A: SparseMatrix, cols: Sequence[int]) -> tuple[int, int, float]:
    """The pair among `cols` with the largest |dot|; ties keep the first pair."""
    D = A.submatrix_dense(cols)
    G = D.T @ D
    best = (-1, -1, 0.0)
    best_abs = -1.0
    for p in range(len(cols)):
        for q in range(p + 1, len(cols)):
            d = float(G[p, q])
            if abs(d) > best_abs:
                best_abs = abs(d)
                best = (int(cols[p]), int(cols[q]), d)
    return best


def row_mass_violation_search(A: SparseMatrix, eps: float) -> Certificate:
    """Scan rows for overloaded same-signed mass and certify the coherence
    violation it forces.

    For each row, the thresholds x are the squared magnitudes of the row's own
    entries, restricted to x >= 2 * eps.  If some row carries at least 5/x
    entries of one sign with squared magnitude >= x, then two of the columns
    meeting that threshold must have inner product above eps; the returned
    certificate is the maximum-|dot| pair among them.  On a matrix whose
    coherence really is <= eps no such overload can exist, so the search
    returns the ``none`` certificate.
    """
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    check_unit_columns(A)
    source = "row_mass_violation_search"
    for r, entries in enumerate(_row_entries(A)):
        if len(entries) < 2:
            continue
        candidates = sorted({v * v for _, v in entries if v * v >= 2.0 * eps})
        for x in candidates:
            limit = 5.0 / x
            pos = [j for j, v in entries if v > 0 and v * v >= x]
            neg = [j for j, v in entries if v < 0 and v * v >= x]
            for group in (pos, neg):
                if len(group) >= limit:
                    i, j, dot = _max_dot_pair(A, group)
                    return Certificate(kind="incoherence_pair", source=source, i=i, j=j, dot=dot)
    return none_certificate(source)


# --- t-types ---------------------------------------------------------------------

@dataclass(frozen=True)
class TType:
    """Discretization of a vector by its top-t coordinates.

    ``locations`` are the t largest-magnitude indices (ties to the lower
    index), in ascending order; ``signs`` are the matching coordinate signs;
    ``rounded_squares`` hold each squared coordinate rounded to the nearest
    multiple of 1/(2s), stored as the integer numerator, halfway rounding
    down.
    """

    s: int
    locations: tuple[int, ...]
    signs: tuple[int, ...]
    rounded_squares: tuple[int, ...]

    def __post_init__(self):
        t = len(self.locations)
        if not (len(self.signs) == len(self.rounded_squares) == t):
            raise ValueError("locations, signs, rounded_squares must have equal length")
        if any(sg not in (-1, 1) for sg in self.signs):
            raise ValueError("signs must be +1 or -1")
        if any(r < 0 or r > 2 * self.s + 1 for r in self.rounded_squares):
            raise ValueError(f"each rounded square must lie in [0, {2 * self.s + 1}]")
        if sum(self.rounded_squares) > 2 * self.s + t:
            raise ValueError(f"rounded squares sum to more than {2 * self.s + t}")


def _round_half_down(x: float) -> int:
    return math.ceil(x - 0.5)


def ttype_of(v: np.ndarray, t: int, s: int) -> TType:
    """The t-type of a unit-norm vector with at most s nonzeros."""
    v = np.asarray(v, dtype=np.float64)
    if not 1 <= t <= s:
        raise InvalidT(f"t={t} must lie in [1, s={s}]")
    nnz = int(np.count_nonzero(v))
    if nnz > s:
        raise ValueError(f"vector has {nnz} nonzeros, more than s={s}")
    if t > v.size:
        raise InvalidT(f"t={t} exceeds the vector dimension {v.size}")
    order = sorted(range(v.size), key=lambda i: (-abs(v[i]), i))
    locs = tuple(sorted(order[:t]))
    signs = tuple(1 if v[i] >= 0 else -1 for i in locs)
    rounded = tuple(_round_half_down(float(v[i]) ** 2 * 2 * s) for i in locs)
    return TType(s=s, locations=locs, signs=signs, rounded_squares=rounded)


def ttype_count_bound(m: int, s: int, t: int) -> int:
    """Cap on the number of distinct t-types of s-sparse vectors in R^m."""
    return 2**t * math.comb(m, t) * math.comb(2 * (s + t), t)


def _largest_group(members: dict) -> list[int]:
    """Largest group of column indices; ties keep the smallest first member."""
    best: list[int] = []
    for cols in members.values():
        if len(cols) > len(best) or (len(cols) == len(best) and best and cols[0] < best[0]):
            best = cols
    return best


def _expose_incoherent_pair(A: SparseMatrix, cols: Sequence[int], eps: float) -> tuple[int, int, float] | None:
    """First pair (ascending) in `cols` with signed dot above eps, or None."""
    D = A.submatrix_dense(cols)
    for p in range(len(cols)):
        dots = D[:, p + 1 :].T @ D[:, p]
        over = np.nonzero(dots > eps)[0]
        if over.size:
            q = p + 1 + int(over[0])
            return int(cols[p]), int(cols[q]), float(dots[over[0]])
    return None


def ttype_collision_certify(A: SparseMatrix, eps: float, t: int) -> Certificate:
    """Group unit columns by t-type and certify what a large group forces.

    Requires t/s > C * eps with C = 2/(1 - 1/sqrt(2)).  If the largest group
    has N >= 2 members, either some pair inside it has inner product above
    eps (returned as an incoherence pair) or the group pigeonhole forces
    s >= t(N-1)/(2C), returned as a sparsity lower bound.  The zeroed-top-t
    sum-of-vectors identity |sum u_j|^2 >= 0 underlying the bound is
    recomputed as a sanity check.
    """
    source = "ttype_collision_certify"
    check_unit_columns(A)
    s = column_sparsity(A)
    if not 1 <= t <= s:
        raise InvalidT(f"t={t} must lie in [1, s={s}]")
    if not t / s > TTYPE_GROUP_CONSTANT * eps:
        raise PreconditionViolated(
            f"need t/s > C*eps: {t}/{s} = {t / s:.6g} vs C*eps = {TTYPE_GROUP_CONSTANT * eps:.6g}"
        )
    members: dict[TType, list[int]] = {}
    for j in range(A.n):
        ty = ttype_of(A.column_dense(j), t, s)
        members.setdefault(ty, []).append(j)
    group = _largest_group(members)
    N = len(group)
    if N < 2:
        return none_certificate(source)
    exposed = _expose_incoherent_pair(A, group, eps)
    if exposed is not None:
        i, j, dot = exposed
        return Certificate(kind="incoherence_pair", source=source, i=i, j=j, dot=dot)
    # Sanity: with the shared top-t locations zeroed, the summed remainders
    # still have nonnegative squared norm (this is the proof's engine).
    shared = list(ttype_of(A.column_dense(group[0]), t, s).locations)
    acc = np.zeros(A.m)
    for j in group:
        u = A.column_dense(j)
        u[shared] = 0.0
        acc += u
    if float(acc @ acc) < 0.0:  # pragma: no cover - cannot happen
        raise AssertionError("squared norm went negative")
    bound = t * (N - 1) / (2.0 * TTYPE_GROUP_CONSTANT)
    return Certificate(
        kind="sparsity_lower_bound", source=source, t=t, group_size=N, bound_value=bound
    )


# --- sign-pattern certifier -------------------------------------------------------

_FULL_ENUM_MAX_S = 8


def sign_pattern_certify(
    A: SparseMatrix, eps: float, t: int, full_enumeration: bool = False
) -> Certificate:
    """Group sign-matrix columns by a shared t-row sign pattern.

    Every entry must have magnitude 1/sqrt(s) with s = column_sparsity(A).
    In canonical mode each column contributes one pattern: its t smallest
    support rows with their signs.  With ``full_enumeration=True`` (guarded
    by s <= 8) every t-subset of every column's support is a pattern, which
    matches the pigeonhole argument exactly but costs C(s, t) per column.
    The largest group either exposes an incoherence pair (some inner product
    above eps) or certifies the sparsity bound s >= t(N-1)/4.
    """
    source = "sign_pattern_certify"
    s = column_sparsity(A)
    scale = 1.0 / math.sqrt(s)
    for j in range(A.n):
        _, vals = A.column(j)
        bad = np.nonzero(np.abs(np.abs(vals) - scale) > 1e-12)[0]
        if bad.size:
            raise NotSignMatrix(
                f"column {j} entry {float(vals[bad[0]])!r} is not +-1/sqrt({s}) within 1e-12"
            )
    if not 1 <= t <= s:
        raise InvalidT(f"t={t} must lie in [1, s={s}]")
    if t < 2 * eps * s:
        raise PreconditionViolated(f"need t >= 2*eps*s: t={t} vs 2*eps*s={2 * eps * s:.6g}")

    members: dict[tuple, list[int]] = {}
    if full_enumeration:
        if s > _FULL_ENUM_MAX_S:
            raise TooLarge(f"full enumeration allows s <= {_FULL_ENUM_MAX_S}, got s={s}")
        seen: dict[tuple, set[int]] = {}
        for j in range(A.n):
            rows, vals = A.column(j)
            signs = np.sign(vals).astype(np.int64)
            for combo in itertools.combinations(range(rows.size), t):
                key = (tuple(int(rows[c]) for c in combo), tuple(int(signs[c]) for c in combo))
                seen.setdefault(key, set()).add(j)
        members = {key: sorted(cols) for key, cols in seen.items()}
    else:
        for j in range(A.n):
            rows, vals = A.column(j)
            if rows.size < t:
                continue
            key = (tuple(rows[:t].tolist()), tuple(int(np.sign(v)) for v in vals[:t]))
            members.setdefault(key, []).append(j)

    group = _largest_group(members)
    N = len(group)
    if N < 2:
        return none_certificate(source)
    exposed = _expose_incoherent_pair(A, group, eps)
    if exposed is not None:
        i, j, dot = exposed
        return Certificate(kind="incoherence_pair", source=source, i=i, j=j, dot=dot)
    bound = t * (N - 1) / 4.0
    return Certificate(
        kind="sparsity_lower_bound", source=source, t=t, group_size=N, bound_value=bound
    )


# --- restricted-isometry pattern witness -------------------------------------------

@dataclass(frozen=True)
class PatternAtScale:
    """A column's heavy-row pattern at dyadic scale t.

    ``u`` is the target pattern size max(ceil(2^(4-t) * s / k), 1); ``rows``
    holds the u largest-magnitude rows meeting the scale threshold (all
    qualifying rows when fewer than u exist), ascending, with their signs.
    """

    t: int
    u: int
    rows: tuple[int, ...]
    signs: tuple[int, ...]


def pattern_at_scale(A: SparseMatrix, column: int, t: int, k: int, s: int) -> PatternAtScale | None:
    """The canonical pattern of one column at scale t, or None if no entry
    reaches the threshold 2^((t-3)/2)/sqrt(s)."""
    u = max(int(math.ceil(Fraction(2, 1) ** (4 - t) * s / k)), 1)
    rows, vals = A.column(column)
    threshold_sq = 2.0 ** (t - 3) / s
    qual = [(int(r), float(v)) for r, v in zip(rows.tolist(), vals.tolist()) if v * v >= threshold_sq]
    if not qual:
        return None
    qual.sort(key=lambda rv: (-abs(rv[1]), rv[0]))
    chosen = sorted(qual[: min(u, len(qual))])
    return PatternAtScale(
        t=t,
        u=u,
        rows=tuple(r for r, _ in chosen),
        signs=tuple(1 if v >= 0 else -1 for _, v in chosen),
    )


def rip_pattern_witness(A: SparseMatrix, k: int) -> Certificate:
    """Search for a k-sparse flat vector that the matrix stretches.

    Every column must first admit a scale profile (else
    :class:`DegenerateColumn`).  At each scale the columns are grouped by
    their canonical pattern; the largest group of size z >= 2 proposes the
    indicator vector of its first min(z, k) members, and the best ratio
    |Av|^2 / |v|^2 over all scales is returned as a ``rip_distortion``
    certificate when it exceeds 1 + 1e-9.
    """
    source = "rip_pattern_witness"
    if k < 2:
        raise ValueError(f"need k >= 2, got {k}")
    for j in range(A.n):
        try:
            scale_profile(A, j)
        except NoScaleFound as exc:
            raise DegenerateColumn(f"column {j} has no qualifying scale") from exc
    s = column_sparsity(A)
    best_vector: np.ndarray | None = None
    best_ratio = -math.inf
    for t in range(1, dyadic_scale_count(s) + 1):
        members: dict[tuple, list[int]] = {}
        for j in range(A.n):
            pat = pattern_at_scale(A, j, t, k, s)
            if pat is None:
                continue
            members.setdefault((pat.rows, pat.signs), []).append(j)
        group = _largest_group(members)
        if len(group) < 2:
            continue
        support = group[: min(len(group), k)]
        v = np.zeros(A.n)
        v[support] = 1.0
        y = apply(A, v)
        ratio = float(y @ y) / float(v @ v)
        if ratio > best_ratio:
            best_ratio = ratio
            best_vector = v
    if best_vector is not None and best_ratio >= 1.0 + 1e-9:
        return Certificate(
            kind="rip_distortion", source=source, vector=best_vector, ratio=best_ratio
        )
    return none_certificate(source)


# --- one-sparse map witnesses --------------------------------------------------------

def ose_collision_witness(S: OneSparseMap, indices: Iterable[int]) -> Certificate:
    """Exact kernel vector from a row collision among the selected columns.

    Takes the lexicographically first pair i < j with a(i) == a(j) and emits
    x with x_i = sigma(j), x_j = -sigma(i): then S x = 0 exactly in integer
    arithmetic and |x| = sqrt(2).  Returns ``none`` when the selected columns
    hash to distinct rows.
    """
    source = "ose_collision_witness"
    cols = sorted({int(i) for i in indices})
    if not cols:
        raise EmptyIndexSet("need at least one column index")
    for i in cols:
        if not 0 <= i < S.n:
            raise IndexOutOfRange(f"column index {i} outside [0, {S.n})")
    first_for_row: dict[int, int] = {}
    best: tuple[int, int] | None = None
    for j in cols:
        row = int(S.a[j])
        if row in first_for_row:
            pair = (first_for_row[row], j)
            if best is None or pair < best:
                best = pair
        else:
            first_for_row[row] = j
    if best is None:
        return none_certificate(source)
    i, j = best
    x = np.zeros(S.n, dtype=np.int64)
    x[i] = int(S.sigma[j])
    x[j] = -int(S.sigma[i])
    return Certificate(kind="kernel_witness", source=source, vector=x)


@dataclass(frozen=True)
class TrialRecord:
    """One embedding trial: singular extremes, failure flag, heavy-row count."""

    failed: bool
    sigma_min: float
    sigma_max: float
    heavy_rows: int


@dataclass(frozen=True)
class OseFailureReport:
    m: int
    d: int
    n: int
    trials: int
    failures: int
    rate: float
    records: tuple[TrialRecord, ...]


def ose_failure_probability(m: int, d: int, n: int, trials: int, seed: int) -> OseFailureReport:
    """Monte Carlo failure rate of one-sparse maps on coordinate subspaces.

    Each trial samples a fresh map and a uniform d-coordinate subspace, then
    fails iff the subspace distortion leaves [1/2, 2].  Trials derive
    independent streams from (seed, trial index).  The per-trial heavy-row
    count (rows receiving at least n/(10m) columns) is recorded as a
    diagnostic only; it plays no part in the failure decision.
    """
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    heavy_cut = n / (10.0 * m)
    records = []
    failures = 0
    for trial in range(trials):
        smap = sample_countsketch(m, n, derive_seed(seed, trial, 0))
        subset = sample_coordinate_subspace(n, d, derive_seed(seed, trial, 1))
        sigma_min, sigma_max = subspace_distortion(smap, subset)
        failed = sigma_min < 0.5 or sigma_max > 2.0
        failures += int(failed)
        heavy = int(np.count_nonzero(smap.row_loads() >= heavy_cut))
        records.append(
            TrialRecord(failed=failed, sigma_min=sigma_min, sigma_max=sigma_max, heavy_rows=heavy)
        )
    return OseFailureReport(
        m=m, d=d, n=n, trials=trials, failures=failures, rate=failures / trials,
        records=tuple(records),
    )
