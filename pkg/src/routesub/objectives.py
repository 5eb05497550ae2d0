"""Set-function objectives: cut diversity, summarization diversity, Gaussian
mutual information and an explicit lookup table.

Item sets are any iterable of integer item ids in ``range(n)``.  Every oracle
counts its evaluations; the solver reads the counter before and after a run to
get per-run call counts.
"""
from __future__ import annotations

import itertools
import math
import threading

import numpy as np

from ._report import VerificationReport, Violation
from .errors import DomainError, IllConditionedCovariance, ParameterError, PreconditionError

TOL = 1e-9
LOG_2PIE = math.log(2.0 * math.pi * math.e)

PIVOT_FLOOR = 1e-12
JITTER_SCALE = 1e-8


def _index(S, n):
    idx = np.fromiter(S, dtype=np.int64) if not isinstance(S, np.ndarray) else S.astype(np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= n:
            bad = [int(i) for i in idx if i < 0 or i >= n]
            raise DomainError(f"items {bad} are outside the ground set 0..{n - 1}")
        idx = np.unique(idx)
    return idx


def _mask(idx, n):
    m = np.zeros(n, dtype=bool)
    m[idx] = True
    return m


class ObjectiveOracle:
    """Base class: subclasses implement ``_value(idx, mask)``."""

    kind = "abstract"

    def __init__(self, n):
        if n < 1:
            raise ParameterError("ground set must be nonempty")
        self.n = int(n)
        self._calls = 0
        self._lock = threading.Lock()

    @property
    def calls(self):
        return self._calls

    def reset_calls(self):
        with self._lock:
            self._calls = 0

    def evaluate(self, S):
        idx = _index(S, self.n)
        with self._lock:
            self._calls += 1
        return float(self._value(idx, _mask(idx, self.n)))

    __call__ = evaluate

    def marginal_gain(self, S, x):
        S = set(S)
        if x in S:
            raise PreconditionError(f"item {x} is already in the set")
        return self.evaluate(S | {x}) - self.evaluate(S)

    def _value(self, idx, mask):
        raise NotImplementedError


class SimilarityMatrix:
    def __init__(self, entries, symmetric=None):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"similarity matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ParameterError("similarity matrix has non-finite entries")
        is_sym = bool(np.allclose(a, a.T, atol=TOL, rtol=0))
        if symmetric and not is_sym:
            raise ParameterError("similarity matrix flagged symmetric but is not")
        self.entries = a
        self.symmetric = is_sym if symmetric is None else bool(symmetric)

    @property
    def n(self):
        return self.entries.shape[0]

    @classmethod
    def from_features(cls, features):
        """Inner products of (non-normalized) feature vectors, one row per item."""
        F = np.asarray(features, dtype=float)
        return cls(F @ F.T, symmetric=True)


class CovarianceMatrix:
    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"covariance matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ParameterError("covariance matrix has non-finite entries")
        if not np.allclose(a, a.T, atol=TOL, rtol=1e-12):
            raise ParameterError("covariance matrix is not symmetric")
        self.entries = 0.5 * (a + a.T)
        self.jitter = JITTER_SCALE * float(np.mean(np.diag(self.entries)))

    @property
    def n(self):
        return self.entries.shape[0]


def cut_diversity(sim, lam, S):
    """sum_{i outside S, j in S} s_ij - lam * sum_{i, j in S} s_ij."""
    if not 0.0 < lam <= 1.0:
        raise ParameterError(f"lambda must lie in (0, 1], got {lam}")
    s = sim.entries if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=float)
    n = s.shape[0]
    idx = _index(S, n)
    return _cut_value(s, lam, _mask(idx, n))


def _cut_value(s, lam, mask):
    if not mask.any():
        return 0.0
    inside = s[mask][:, mask].sum()
    across = s[~mask][:, mask].sum()
    return float(across - lam * inside)


def summarization_diversity(sim, S):
    """Facility-location coverage of the unselected items minus a scaled
    redundancy penalty.  Undefined on the full ground set."""
    d = sim.entries if isinstance(sim, SimilarityMatrix) else np.asarray(sim, dtype=float)
    n = d.shape[0]
    idx = _index(S, n)
    return _summ_value(d, _mask(idx, n))


def _summ_value(d, mask):
    k = int(mask.sum())
    n = mask.size
    if k == 0:
        return 0.0
    if k == n:
        raise DomainError("summarization diversity is undefined on the full ground set")
    cover = d[~mask][:, mask].max(axis=1).sum()
    penalty = d[mask][:, mask].sum() / (n - k)
    return float(cover - penalty)


def _logdet(B, items, jitter):
    if len(items) == 0:
        return 0.0
    sub = B[np.ix_(items, items)]
    try:
        L = np.linalg.cholesky(sub)
        pivots = np.diag(L) ** 2
        ok = pivots.min() >= PIVOT_FLOOR
    except np.linalg.LinAlgError:
        ok = False
    if not ok:
        try:
            L = np.linalg.cholesky(sub + jitter * np.eye(len(items)))
            pivots = np.diag(L) ** 2
        except np.linalg.LinAlgError:
            raise IllConditionedCovariance([int(i) for i in items], float("nan")) from None
        if pivots.min() <= PIVOT_FLOOR:
            raise IllConditionedCovariance([int(i) for i in items], float(pivots.min()))
    return 2.0 * float(np.log(np.diag(L)).sum())


def gaussian_entropy(cov, S):
    """Differential entropy of the Gaussian marginal on S (natural log)."""
    if not isinstance(cov, CovarianceMatrix):
        cov = CovarianceMatrix(cov)
    idx = _index(S, cov.n)
    k = idx.size
    if k == 0:
        return 0.0
    return 0.5 * (k * LOG_2PIE + _logdet(cov.entries, idx, cov.jitter))


def mutual_information(cov, S):
    if not isinstance(cov, CovarianceMatrix):
        cov = CovarianceMatrix(cov)
    idx = _index(S, cov.n)
    rest = np.setdiff1d(np.arange(cov.n), idx)
    return (gaussian_entropy(cov, idx) + gaussian_entropy(cov, rest)
            - gaussian_entropy(cov, np.arange(cov.n)))


class CutDiversity(ObjectiveOracle):
    kind = "cut-diversity"

    def __init__(self, sim, lam=1.0):
        if not isinstance(sim, SimilarityMatrix):
            sim = SimilarityMatrix(sim)
        if not 0.0 < lam <= 1.0:
            raise ParameterError(f"lambda must lie in (0, 1], got {lam}")
        super().__init__(sim.n)
        self.sim = sim
        self.lam = float(lam)

    def _value(self, idx, mask):
        return _cut_value(self.sim.entries, self.lam, mask)


class SummarizationDiversity(ObjectiveOracle):
    kind = "summarization-diversity"

    def __init__(self, sim):
        if not isinstance(sim, SimilarityMatrix):
            sim = SimilarityMatrix(sim)
        super().__init__(sim.n)
        self.sim = sim

    def _value(self, idx, mask):
        return _summ_value(self.sim.entries, mask)


class MutualInformation(ObjectiveOracle):
    kind = "mutual-information"

    def __init__(self, cov):
        if not isinstance(cov, CovarianceMatrix):
            cov = CovarianceMatrix(cov)
        super().__init__(cov.n)
        self.cov = cov
        self._h_all = gaussian_entropy(cov, range(cov.n))

    def _value(self, idx, mask):
        rest = np.flatnonzero(~mask)
        return (gaussian_entropy(self.cov, idx) + gaussian_entropy(self.cov, rest)
                - self._h_all)


class Tabulated(ObjectiveOracle):
    """Explicit value per subset, indexed by bitmask (bit i <-> item i)."""

    kind = "tabulated"
    MAX_N = 20

    def __init__(self, values, n=None):
        values = np.asarray(values, dtype=float)
        if n is None:
            n = int(round(math.log2(values.size)))
        if n > self.MAX_N:
            raise ParameterError(f"tabulated oracle supports n <= {self.MAX_N}")
        if values.size != 1 << n:
            raise ParameterError(f"expected {1 << n} values for n={n}, got {values.size}")
        super().__init__(n)
        self.values = values
        self._weights = 1 << np.arange(n, dtype=np.int64)

    @classmethod
    def from_function(cls, n, fn):
        """Tabulate ``fn(frozenset)`` over all subsets of ``range(n)``."""
        vals = [fn(frozenset(i for i in range(n) if m >> i & 1)) for m in range(1 << n)]
        return cls(vals, n)

    def _value(self, idx, mask):
        return self.values[int(self._weights[idx].sum())]


def safe_value(oracle, S):
    """Evaluate, mapping a domain error (e.g. full-set summarization) to -inf."""
    try:
        return oracle.evaluate(S)
    except DomainError:
        return -math.inf


def gain(new, old):
    """new - old with the -inf conventions used by the solvers."""
    if new == -math.inf:
        return -math.inf
    if old == -math.inf:
        return math.inf
    return new - old


def subset_table(oracle):
    """f on every subset of the ground set, indexed by bitmask; -inf where undefined."""
    n = oracle.n
    out = np.empty(1 << n)
    for m in range(1 << n):
        out[m] = safe_value(oracle, [i for i in range(n) if m >> i & 1])
    return out


def _members(m, n):
    return tuple(i for i in range(n) if m >> i & 1)


def check_submodularity(oracle, trials=0, seed=0, tol=TOL):
    """Look for violations of f(A|B) + f(A&B) <= f(A) + f(B).

    With ``trials == 0`` every pair (A, B) is checked (needs n <= 20, and the
    pairwise sweep is only vectorised for n <= 12; above that the equivalent
    local form f(A+x) + f(A+y) >= f(A+x+y) + f(A) is enumerated instead).
    With ``trials > 0`` random pairs A subset B, x outside B are sampled and the
    diminishing-returns form is checked.
    """
    n = oracle.n
    report = VerificationReport(f"submodularity[{oracle.kind}]")
    if trials > 0:
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            if n < 1:
                break
            x = int(rng.integers(n))
            others = [i for i in range(n) if i != x]
            B = {i for i in others if rng.random() < 0.5}
            A = {i for i in B if rng.random() < 0.5}
            ga = gain(safe_value(oracle, A | {x}), safe_value(oracle, A))
            gb = gain(safe_value(oracle, B | {x}), safe_value(oracle, B))
            ok = ga >= gb - tol or (math.isinf(ga) and ga == gb)
            report.record(seed, ok, ga, gb, witness=(tuple(sorted(A)), tuple(sorted(B)), x))
        return report

    if n > Tabulated.MAX_N:
        raise ParameterError("exhaustive submodularity check needs n <= 20")
    table = subset_table(oracle)
    if n <= 12:
        masks = np.arange(1 << n)
        for a in range(1 << n):
            union = a | masks
            inter = a & masks
            with np.errstate(invalid="ignore"):
                lhs = table[union] + table[inter]
                rhs = table[a] + table[masks]
                bad = ~((lhs <= rhs + tol) | np.isnan(lhs) | np.isnan(rhs))
            # count each unordered pair once
            report.checked += (1 << n) - a
            for b in np.flatnonzero(bad & (masks >= a)):
                report.violations.append(_pair_violation(a, int(b), n, lhs[b], rhs[b]))
        return report

    for a in range(1 << n):
        free = [i for i in range(n) if not a >> i & 1]
        for x, y in itertools.combinations(free, 2):
            lhs = table[a | 1 << x | 1 << y] + table[a]
            rhs = table[a | 1 << x] + table[a | 1 << y]
            report.checked += 1
            if not lhs <= rhs + tol and not (math.isnan(lhs) or math.isnan(rhs)):
                report.violations.append(
                    _pair_violation(a | 1 << x, a | 1 << y, n, lhs, rhs))
    return report


def _pair_violation(a, b, n, lhs, rhs):
    return Violation(None, (_members(a, n), _members(b, n)), float(lhs), float(rhs))
