"""Sparse nonnegative tensors, Boolean patterns, and the general product.

An order-m dimension-n tensor is a finite map from index tuples in [n]^m to
strictly positive reals; absent tuples are zero.  Indices are 0-based inside
the library and 1-based in the TNS text format and in CLI reports.

TNS text format::

    tns v1
    order 3 dim 2
    # entry lines: i1 i2 ... im [value]   (value defaults to 1)
    1 2 2 0.5
    2 1 1

``#`` starts a comment, blank lines after the two header lines are ignored,
LF and CRLF both work, and duplicate index tuples are summed.

Only the zero pattern of a tensor matters for primitivity, so the Boolean
types here (`PatternVector`, `PatternMatrix`) are the working currency of
the analysis engine; real-valued arithmetic exists so the brute-force
oracles can confirm pattern results on actual data.  Positivity is closed
under the products involved, so any computed value > 0 is positive exactly
and no tolerance is ever applied.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

DEFAULT_ENTRY_CAP = 10**6


class TnsParseError(ValueError):
    """Malformed TNS input; carries the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SizeCapExceeded(RuntimeError):
    """A materialized tensor product would exceed the entry-count cap."""


@dataclass(frozen=True)
class PatternVector:
    """Boolean n-vector stored as a bitmask (bit i set = index i present)."""

    dim: int
    mask: int

    def __post_init__(self):
        if self.dim < 0 or self.mask < 0 or self.mask >> self.dim:
            raise ValueError(f"mask {self.mask:#x} does not fit dimension {self.dim}")

    @classmethod
    def from_indices(cls, dim: int, indices: Iterable[int]) -> "PatternVector":
        mask = 0
        for i in indices:
            if not 0 <= i < dim:
                raise ValueError(f"index {i} out of range [0, {dim})")
            mask |= 1 << i
        return cls(dim, mask)

    @classmethod
    def basis(cls, dim: int, j: int) -> "PatternVector":
        """Support of the j-th standard basis vector."""
        return cls.from_indices(dim, [j])

    @classmethod
    def full(cls, dim: int) -> "PatternVector":
        return cls(dim, (1 << dim) - 1)

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.dim) if self.mask >> i & 1)

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.dim and bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __le__(self, other: "PatternVector") -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "PatternVector") -> bool:
        return self.mask != other.mask and self <= other

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.dim) - 1


@dataclass(frozen=True)
class PatternMatrix:
    """Square Boolean matrix; rows[i] is a bitmask over columns.

    Entry (i, j) set means "positive".  Column masks (bit u set = row u
    positive) are the shape the propagation kernels consume and are
    recomputed on demand; rows are the stored representation.
    """

    dim: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.dim:
            raise ValueError(f"expected {self.dim} rows, got {len(self.rows)}")
        top = (1 << self.dim) - 1
        for i, r in enumerate(self.rows):
            if r < 0 or r & ~top:
                raise ValueError(f"row {i} mask {r:#x} does not fit dimension {self.dim}")

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[tuple[int, int]]) -> "PatternMatrix":
        rows = [0] * dim
        for i, j in pairs:
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"entry ({i}, {j}) out of range [0, {dim})")
            rows[i] |= 1 << j
        return cls(dim, tuple(rows))

    @classmethod
    def from_dense(cls, dense: Iterable[Iterable[float]]) -> "PatternMatrix":
        """Pattern of a dense row-major matrix (nonzero entries set)."""
        rows = []
        for row in dense:
            mask = 0
            for j, v in enumerate(row):
                if v:
                    mask |= 1 << j
            rows.append(mask)
        return cls(len(rows), tuple(rows))

    @classmethod
    def from_col_masks(cls, dim: int, cols: Iterable[int]) -> "PatternMatrix":
        rows = [0] * dim
        for j, c in enumerate(cols):
            while c:
                low = c & -c
                rows[low.bit_length() - 1] |= 1 << j
                c ^= low
        return cls(dim, tuple(rows))

    @classmethod
    def identity(cls, dim: int) -> "PatternMatrix":
        return cls(dim, tuple(1 << i for i in range(dim)))

    @classmethod
    def all_ones(cls, dim: int) -> "PatternMatrix":
        full = (1 << dim) - 1
        return cls(dim, (full,) * dim)

    def get(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)

    def col_mask(self, j: int) -> int:
        mask = 0
        for i, row in enumerate(self.rows):
            mask |= (row >> j & 1) << i
        return mask

    def col_masks(self) -> list[int]:
        cols = [0] * self.dim
        for i, row in enumerate(self.rows):
            bit = 1 << i
            while row:
                low = row & -row
                cols[low.bit_length() - 1] |= bit
                row ^= low
        return cols

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.rows):
            while row:
                low = row & -row
                yield i, low.bit_length() - 1
                row ^= low

    def nnz(self) -> int:
        return sum(r.bit_count() for r in self.rows)

    @property
    def is_full(self) -> bool:
        full = (1 << self.dim) - 1
        return all(r == full for r in self.rows)

    def mul(self, other: "PatternMatrix") -> "PatternMatrix":
        """Boolean matrix product (OR of ANDs)."""
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        out = []
        for row in self.rows:
            acc = 0
            while row:
                low = row & -row
                acc |= other.rows[low.bit_length() - 1]
                row ^= low
            out.append(acc)
        return PatternMatrix(self.dim, tuple(out))

    def to_dense(self) -> list[list[int]]:
        return [[row >> j & 1 for j in range(self.dim)] for row in self.rows]


@dataclass(frozen=True)
class Tensor:
    """Order-m dimension-n nonnegative tensor in coordinate form.

    `entries` maps 0-based index tuples of length `order` to positive finite
    values.  Instances are immutable by convention; build user-facing ones
    through `from_entries`, which validates and sums duplicates.
    """

    order: int
    dim: int
    entries: dict[tuple[int, ...], float]

    def __post_init__(self):
        if self.order < 2:
            raise ValueError(f"order must be >= 2, got {self.order}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    @classmethod
    def from_entries(
        cls, order: int, dim: int, items: Iterable[tuple[tuple[int, ...], float]]
    ) -> "Tensor":
        entries: dict[tuple[int, ...], float] = {}
        for idx, value in items:
            idx = tuple(idx)
            if len(idx) != order:
                raise ValueError(f"index {idx} does not have {order} components")
            for i in idx:
                if not 0 <= i < dim:
                    raise ValueError(f"index {idx} out of range [0, {dim})")
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"entry {idx} has nonpositive or non-finite value {value}")
            entries[idx] = entries.get(idx, 0.0) + value
        return cls(order, dim, entries)

    def nnz(self) -> int:
        return len(self.entries)

    def value(self, idx: tuple[int, ...]) -> float:
        return self.entries.get(tuple(idx), 0.0)


def _tokens(line: str) -> list[str]:
    return line.split("#", 1)[0].split()


def parse_tensor(text: str) -> Tensor:
    """Parse TNS text into a Tensor, summing duplicate entries.

    Raises TnsParseError naming the 1-based line of the first problem.
    """
    lines = text.splitlines()
    if not lines or _tokens(lines[0]) != ["tns", "v1"]:
        raise TnsParseError(1, "expected header 'tns v1'")
    if len(lines) < 2:
        raise TnsParseError(2, "missing 'order <m> dim <n>' line")
    hdr = _tokens(lines[1])
    if len(hdr) != 4 or hdr[0] != "order" or hdr[2] != "dim":
        raise TnsParseError(2, "expected 'order <m> dim <n>'")
    try:
        order, dim = int(hdr[1]), int(hdr[3])
    except ValueError:
        raise TnsParseError(2, "order and dim must be integers") from None
    if order < 2:
        raise TnsParseError(2, f"order must be >= 2, got {order}")
    if dim < 1:
        raise TnsParseError(2, f"dim must be >= 1, got {dim}")

    entries: dict[tuple[int, ...], float] = {}
    for lineno, line in enumerate(lines[2:], start=3):
        toks = _tokens(line)
        if not toks:
            continue
        if len(toks) not in (order, order + 1):
            raise TnsParseError(
                lineno, f"expected {order} indices plus optional value, got {len(toks)} fields"
            )
        try:
            idx = tuple(int(t) for t in toks[:order])
        except ValueError:
            raise TnsParseError(lineno, "indices must be integers") from None
        for i in idx:
            if not 1 <= i <= dim:
                raise TnsParseError(lineno, f"index {i} out of range [1, {dim}]")
        value = 1.0
        if len(toks) == order + 1:
            try:
                value = float(toks[order])
            except ValueError:
                raise TnsParseError(lineno, f"bad value {toks[order]!r}") from None
        if not (value > 0 and math.isfinite(value)):
            raise TnsParseError(lineno, f"value must be positive and finite, got {value}")
        key = tuple(i - 1 for i in idx)
        entries[key] = entries.get(key, 0.0) + value
    return Tensor(order, dim, entries)


def format_tensor(t: Tensor) -> str:
    """Serialize to TNS text (entries sorted, value omitted when exactly 1)."""
    out = ["tns v1", f"order {t.order} dim {t.dim}"]
    for idx in sorted(t.entries):
        line = " ".join(str(i + 1) for i in idx)
        v = t.entries[idx]
        if v != 1.0:
            line += f" {v!r}"
        out.append(line)
    return "\n".join(out) + "\n"


def majorization(t: Tensor) -> PatternMatrix:
    """Pattern of the majorization matrix: (i, j) set iff entry (i, j, ..., j) > 0."""
    rows = [0] * t.dim
    for idx in t.entries:
        j = idx[1]
        if all(k == j for k in idx[2:]):
            rows[idx[0]] |= 1 << j
    return PatternMatrix(t.dim, tuple(rows))


def shao_product(a: Tensor, b: Tensor, max_entries: int = DEFAULT_ENTRY_CAP) -> Tensor:
    """General tensor product of a (order m) and b (order k), order (m-1)(k-1)+1.

    Output entry at (i, alpha_1, ..., alpha_{m-1}) sums, over the trailing
    indices (i_2, ..., i_m) of a's entries with leading index i, the products
    a[i, i_2, ..., i_m] * b[i_2, alpha_1] * ... * b[i_m, alpha_{m-1}], where
    each alpha_t ranges over [n]^{k-1}.  Zero results are never stored.

    Refuses with SizeCapExceeded when the term count (an upper bound on the
    output entry count, exact for positive inputs) exceeds max_entries; the
    pattern engine handles those sizes without materializing anything.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    n = a.dim
    b_rows: list[list[tuple[tuple[int, ...], float]]] = [[] for _ in range(n)]
    for idx, v in b.entries.items():
        b_rows[idx[0]].append((idx[1:], v))

    terms = 0
    for idx in a.entries:
        t = 1
        for p in idx[1:]:
            t *= len(b_rows[p])
            if t == 0:
                break
        terms += t
        if terms > max_entries:
            raise SizeCapExceeded(
                f"product would generate more than {max_entries} entries "
                f"(order {(a.order - 1) * (b.order - 1) + 1}, dim {n})"
            )

    out: dict[tuple[int, ...], float] = {}
    for idx, av in a.entries.items():
        slices = [b_rows[p] for p in idx[1:]]
        if any(not s for s in slices):
            continue
        lead = (idx[0],)
        for combo in itertools.product(*slices):
            key = lead
            val = av
            for alpha, bv in combo:
                key += alpha
                val *= bv
            out[key] = out.get(key, 0.0) + val
    out = {k: v for k, v in out.items() if v > 0}
    return Tensor((a.order - 1) * (b.order - 1) + 1, n, out)


def tensor_power(a: Tensor, r: int, max_entries: int = DEFAULT_ENTRY_CAP) -> Tensor:
    """r-th power under the general product; order grows to (m-1)^r + 1.

    Associativity makes bracketing irrelevant; computed as a * (a^(r-1)).
    Oracle-scale only: raises SizeCapExceeded once a partial power would
    exceed max_entries.
    """
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    p = a
    for _ in range(r - 1):
        p = shao_product(a, p, max_entries=max_entries)
    return p
