"""Conditional independence testing for binary columns.

Tables are stratified on the conditioning assignment; the G2
(likelihood-ratio) statistic sums 2*O*ln(O/E) over cells with expected
counts from per-stratum margins, contributing one degree of freedom per
stratum whose four margins are all positive.  Strata with a zero margin add
nothing to either the statistic or the dof.  P-values come from the
chi-square distribution via the regularized lower incomplete gamma
function, implemented with the usual series / continued-fraction split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import BinaryDataset

__all__ = [
    "AlphaCISource",
    "CITestResult",
    "ContingencyStratum",
    "DatasetCITester",
    "chi_square_cdf",
    "ci_test",
    "g_squared",
    "pearson_chi2",
    "regularized_gamma_p",
    "stratify",
]

# n below 10x the valid stratum count marks a test as low powered
LOW_POWER_FACTOR = 10


@dataclass(frozen=True)
class ContingencyStratum:
    """A 2x2 observed table for (x, y) under one conditioning assignment."""

    assignment: tuple[int, ...]
    table: tuple[tuple[int, int], tuple[int, int]]

    @property
    def total(self) -> int:
        return sum(self.table[0]) + sum(self.table[1])


@dataclass(frozen=True)
class CITestResult:
    statistic: float
    dof: int
    p_value: float
    independent: bool
    low_power: bool = False


def stratify(data: BinaryDataset, x: str, y: str, z=()) -> list[ContingencyStratum]:
    """One stratum per realized assignment of the (sorted) conditioning
    columns; unrealized assignments are omitted.  Counts sum to n."""
    z = tuple(sorted(z))
    if x == y:
        raise ValueError("x and y must differ")
    if x in z or y in z:
        raise ValueError("x and y must not be conditioned on")
    xv = data.column(x).astype(np.int64)
    yv = data.column(y).astype(np.int64)
    if not z:
        codes = np.zeros(data.n, dtype=np.int64)
        n_assignments = 1
    else:
        zmat = np.column_stack([data.column(c) for c in z]).astype(np.int64)
        weights = 1 << np.arange(len(z) - 1, -1, -1, dtype=np.int64)
        codes = zmat @ weights
        n_assignments = 1 << len(z)
    packed = (codes << 2) | (xv << 1) | yv
    counts = np.bincount(packed, minlength=n_assignments * 4)
    strata = []
    for code in range(n_assignments):
        cells = counts[code * 4 : code * 4 + 4]
        if cells.sum() == 0:
            continue
        assignment = tuple((code >> (len(z) - 1 - i)) & 1 for i in range(len(z)))
        strata.append(
            ContingencyStratum(
                assignment=assignment,
                table=((int(cells[0]), int(cells[1])), (int(cells[2]), int(cells[3]))),
            )
        )
    return strata


def _per_stratum(stratum):
    (n00, n01), (n10, n11) = stratum.table
    r0, r1 = n00 + n01, n10 + n11
    c0, c1 = n00 + n10, n01 + n11
    total = r0 + r1
    if min(r0, r1, c0, c1) == 0:
        return None
    expected = (
        (r0 * c0 / total, r0 * c1 / total),
        (r1 * c0 / total, r1 * c1 / total),
    )
    return expected


def g_squared(strata) -> tuple[float, int]:
    """(statistic, dof) for the likelihood-ratio statistic; zero-count cells
    contribute nothing, zero-margin strata are dropped entirely."""
    statistic = 0.0
    dof = 0
    for stratum in strata:
        expected = _per_stratum(stratum)
        if expected is None:
            continue
        dof += 1
        for i in (0, 1):
            for j in (0, 1):
                observed = stratum.table[i][j]
                if observed > 0:
                    statistic += observed * math.log(observed / expected[i][j])
    return 2.0 * statistic, dof


def pearson_chi2(strata) -> tuple[float, int]:
    """Pearson chi-square alternative with the same stratum/dof handling."""
    statistic = 0.0
    dof = 0
    for stratum in strata:
        expected = _per_stratum(stratum)
        if expected is None:
            continue
        dof += 1
        for i in (0, 1):
            for j in (0, 1):
                diff = stratum.table[i][j] - expected[i][j]
                statistic += diff * diff / expected[i][j]
    return statistic, dof


_EPS = 1e-16
_MAX_ITER = 2000


def _lower_gamma_series(a, x):
    term = 1.0 / a
    total = term
    n = a
    for _ in range(_MAX_ITER):
        n += 1.0
        term *= x / n
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_gamma_cf(a, x):
    # Lentz's continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x), abs error <= 1e-10."""
    if a <= 0:
        raise ValueError("a must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return min(_lower_gamma_series(a, x), 1.0)
    return max(0.0, 1.0 - _upper_gamma_cf(a, x))


def chi_square_cdf(x: float, dof: int) -> float:
    """Chi-square CDF at ``x`` with ``dof`` degrees of freedom."""
    if dof < 1:
        raise ValueError("dof must be >= 1")
    if x < 0:
        raise ValueError("x must be non-negative")
    return regularized_gamma_p(dof / 2.0, x / 2.0)


def _p_value(statistic, dof):
    if dof == 0:
        return 1.0
    return 1.0 - chi_square_cdf(statistic, dof)


def ci_test(
    data: BinaryDataset,
    x: str,
    y: str,
    z=(),
    alpha: float = 0.05,
    statistic: str = "g2",
) -> CITestResult:
    """Test x independent of y given z at level ``alpha``.

    Fully degenerate tables (dof 0) count as independent by convention:
    the data cannot reject.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    strata = stratify(data, x, y, z)
    stat_fn = g_squared if statistic == "g2" else pearson_chi2
    value, dof = stat_fn(strata)
    p = _p_value(value, dof)
    return CITestResult(
        statistic=value,
        dof=dof,
        p_value=p,
        independent=p > alpha,
        low_power=data.n < LOW_POWER_FACTOR * max(dof, 1),
    )


@dataclass
class _TraceRow:
    x: str
    y: str
    z: tuple[str, ...]
    statistic: float
    dof: int
    p_value: float
    independent: bool


class DatasetCITester:
    """Cached CI testing over one dataset.

    For up to 16 columns the full joint contingency table is computed once
    and every test is a marginalization of it, which makes the result
    independent of n per query.  Statistics and p-values do not depend on
    alpha, so one tester can serve a whole alpha sweep.
    """

    def __init__(self, data: BinaryDataset, statistic: str = "g2"):
        self.data = data
        self.statistic = statistic
        self._cache: dict = {}
        k = len(data.columns)
        if k <= 16:
            weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
            codes = data.values.astype(np.int64) @ weights
            joint = np.bincount(codes, minlength=1 << k)
            self._joint = joint.reshape((2,) * k)
        else:
            self._joint = None

    def _strata(self, x, y, z):
        if self._joint is None:
            return stratify(self.data, x, y, z)
        idx = {name: i for i, name in enumerate(self.data.columns)}
        keep = [idx[c] for c in z] + [idx[x], idx[y]]
        drop = tuple(i for i in range(len(self.data.columns)) if i not in keep)
        table = self._joint.sum(axis=drop) if drop else self._joint
        # axes currently in dataset-column order; rearrange to (z..., x, y)
        order = sorted(range(len(keep)), key=lambda i: keep[i])
        table = np.transpose(table, axes=[order.index(i) for i in range(len(keep))])
        flat = table.reshape(-1, 2, 2)
        strata = []
        for code in range(flat.shape[0]):
            cells = flat[code]
            if cells.sum() == 0:
                continue
            assignment = tuple((code >> (len(z) - 1 - i)) & 1 for i in range(len(z)))
            strata.append(
                ContingencyStratum(
                    assignment=assignment,
                    table=(
                        (int(cells[0, 0]), int(cells[0, 1])),
                        (int(cells[1, 0]), int(cells[1, 1])),
                    ),
                )
            )
        return strata

    def result(self, x: str, y: str, z=()) -> tuple[float, int, float]:
        """(statistic, dof, p_value), cached and symmetric in (x, y)."""
        z = tuple(sorted(z))
        key = (min(x, y), max(x, y), z)
        hit = self._cache.get(key)
        if hit is None:
            stat_fn = g_squared if self.statistic == "g2" else pearson_chi2
            value, dof = stat_fn(self._strata(key[0], key[1], z))
            hit = (value, dof, _p_value(value, dof))
            self._cache[key] = hit
        return hit


class AlphaCISource:
    """Independence source for discovery: a tester bound to one alpha,
    recording a trace of every queried test."""

    def __init__(self, tester: DatasetCITester, alpha: float):
        if not 0 < alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {alpha}")
        self.tester = tester
        self.alpha = alpha
        self.trace: list[_TraceRow] = []

    def independent(self, x: str, y: str, z=()) -> bool:
        z = tuple(sorted(z))
        statistic, dof, p = self.tester.result(x, y, z)
        verdict = p > self.alpha
        self.trace.append(_TraceRow(x, y, z, statistic, dof, p, verdict))
        return verdict

    def write_trace(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,y,Z,statistic,dof,p,independent\n")
            for row in self.trace:
                fh.write(
                    f"{row.x},{row.y},{';'.join(row.z)},{row.statistic!r},"
                    f"{row.dof},{row.p_value!r},{int(row.independent)}\n"
                )
