"""Fast primitivity analysis by Boolean pattern iteration.

The nonzero pattern of the majorization matrix of successive tensor powers
obeys a column-local recurrence: entry (u, j) of the next pattern is set
exactly when some tensor entry with leading index u has all of its trailing
indices inside the current support of column j.  Iterating that recurrence
from the majorization pattern decides primitivity without ever
materializing a tensor power: the tensor is primitive iff every column
becomes all-positive within (n-1)^2 + 1 steps (a complete certificate, the
bound is a theorem), and the first all-positive step of column j is the
per-column degree gamma_j, with gamma = max_j gamma_j.

The kernel works on bitmasks.  Entries are pre-grouped by leading index
into deduplicated trailing-index masks once per analysis, so each step is a
subset test per (row, column, mask) triple and allocates nothing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .digraph import necessary_conditions
from .tensor import PatternMatrix, PatternVector, Tensor, majorization


@dataclass(frozen=True)
class DegreeReport:
    """Primitivity verdict with exact degrees and certificates.

    gamma_j[j] is the first step at which column j of the iterated pattern
    is all-positive, or None if that never happens within the bound.  The
    tensor is primitive iff every gamma_j is present, and then
    gamma = max_j gamma_j <= bound = (n-1)^2 + 1.  steps_run is the largest
    step actually computed (0 when a precheck violation short-circuits the
    iteration); violation carries the precheck failure, which by itself
    certifies non-primitivity.
    """

    primitive: bool
    gamma: int | None
    gamma_j: tuple[int | None, ...]
    steps_run: int
    bound: int
    violation: str | None = None


def iteration_bound(dim: int) -> int:
    """Steps after which an unfilled column certifies non-primitivity."""
    return (dim - 1) ** 2 + 1


def _trailing_masks_by_row(t: Tensor) -> list[list[int]]:
    """Distinct trailing-index bitmasks of t's entries, grouped by leading index."""
    groups: list[set[int]] = [set() for _ in range(t.dim)]
    for idx in t.entries:
        m = 0
        for p in idx[1:]:
            m |= 1 << p
        groups[idx[0]].add(m)
    return [sorted(g) for g in groups]


def _column_step(groups: list[list[int]], support: int) -> int:
    """One recurrence step on a single column support mask."""
    if support == 0:
        return 0
    out = 0
    bit = 1
    for masks in groups:
        for tm in masks:
            if tm & ~support == 0:
                out |= bit
                break
        bit <<= 1
    return out


def step(a: Tensor, mk: PatternMatrix) -> PatternMatrix:
    """Advance the power pattern one step: Z(M(A^k)) -> Z(M(A^{k+1}))."""
    if mk.dim != a.dim:
        raise ValueError(f"dimension mismatch: tensor {a.dim}, pattern {mk.dim}")
    groups = _trailing_masks_by_row(a)
    cols = mk.col_masks()
    return PatternMatrix.from_col_masks(a.dim, [_column_step(groups, s) for s in cols])


def essential_positive(a: Tensor) -> bool:
    """True iff the majorization pattern is already all-positive."""
    return majorization(a).is_full


def analyze(a: Tensor) -> DegreeReport:
    """Decide primitivity and compute gamma and all gamma_j with certificates.

    Runs the digraph prechecks first (a violation certifies non-primitivity
    and skips the iteration), then iterates the pattern recurrence up to the
    bound, recording the first all-positive step per column.  Full-column
    positivity must persist once attained; that is checked on every run and
    a regression raises AssertionError, since it would indicate a kernel bug.
    """
    n = a.dim
    bound = iteration_bound(n)
    violation = necessary_conditions(a)
    if violation is not None:
        return DegreeReport(False, None, (None,) * n, 0, bound, violation)

    groups = _trailing_masks_by_row(a)
    full = (1 << n) - 1
    all_columns = (1 << n) - 1
    gamma_j: list[int | None] = [None] * n
    cols = majorization(a).col_masks()
    filled_before = 0
    k = 1
    while True:
        filled_now = 0
        for j in range(n):
            if cols[j] == full:
                filled_now |= 1 << j
                if gamma_j[j] is None:
                    gamma_j[j] = k
        if filled_before & ~filled_now:
            raise AssertionError(
                f"full column lost positivity at step {k}; the recurrence kernel is broken"
            )
        filled_before = filled_now
        if filled_now == all_columns:
            gamma = max(g for g in gamma_j if g is not None)
            if gamma != k:
                raise AssertionError("gamma bookkeeping out of sync with the iteration")
            return DegreeReport(True, gamma, tuple(gamma_j), k, bound)
        if k == bound:
            return DegreeReport(False, None, tuple(gamma_j), bound, bound)
        cols = [_column_step(groups, s) for s in cols]
        k += 1


def column_fill_trace(a: Tensor, j: int) -> list[PatternVector]:
    """Column-j support sets of the iterated pattern, step by step.

    The recurrence is column-local, so the sequence of supports is a
    deterministic orbit; the trace runs until the support is full or a
    previously seen support recurs (the repeated set is included, so the
    trace always ends in a full set or a visible repeat).  When the
    majorization diagonal at j is positive the supports must grow
    monotonically; that is asserted whenever it applies.
    """
    n = a.dim
    if not 0 <= j < n:
        raise ValueError(f"column {j} out of range [0, {n})")
    groups = _trailing_masks_by_row(a)
    full = (1 << n) - 1
    s = majorization(a).col_mask(j)
    diagonal_seeded = bool(s >> j & 1)
    trace = [PatternVector(n, s)]
    seen = {s}
    while s != full:
        nxt = _column_step(groups, s)
        if diagonal_seeded and s & ~nxt:
            raise AssertionError(
                f"column {j} support shrank despite a positive diagonal seed"
            )
        trace.append(PatternVector(n, nxt))
        if nxt in seen:
            break
        seen.add(nxt)
        s = nxt
    return trace
