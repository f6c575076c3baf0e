"""Exact linear algebra over the rationals.

Matrices are stored as sparse rows (``dict`` column -> ``Fraction``) and are
never mutated after construction.  Ranks use fraction-free elimination on
integer-scaled rows; kernels and subspace arithmetic use reduced row echelon
form over ``Fraction``.

Matrices act on column vectors: a map ``V -> W`` has shape
``(dim W, dim V)``.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

__all__ = [
    "RationalMatrix",
    "MatrixComplex",
    "ComplexError",
    "rank",
    "kernel_basis",
    "image_basis",
    "rref",
    "span_rank",
    "intersect_spans",
    "cohomology_dims",
    "solve",
]


class ComplexError(ValueError):
    """Raised when a putative cochain complex fails d^2 = 0 or shape checks."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalMatrix:
    """Immutable sparse matrix with exact rational entries."""

    __slots__ = ("_nrows", "_ncols", "_rows", "_hash")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Mapping[int, object]] | None = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative shape")
        self._nrows = nrows
        self._ncols = ncols
        out = []
        if rows is None:
            rows = [{}] * nrows
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        for r in rows:
            clean = {}
            for j, v in r.items():
                if not 0 <= j < ncols:
                    raise IndexError(f"column {j} out of range for {ncols} columns")
                v = _frac(v)
                if v:
                    clean[j] = v
            out.append(clean)
        self._rows = tuple(out)
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], ncols: int | None = None) -> "RationalMatrix":
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        sparse = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            sparse.append({j: v for j, v in enumerate(r) if v})
        return cls(len(rows), ncols, sparse)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries: Mapping[tuple[int, int], object]) -> "RationalMatrix":
        rows: list[dict] = [{} for _ in range(nrows)]
        for (i, j), v in entries.items():
            if not 0 <= i < nrows:
                raise IndexError(f"row {i} out of range")
            v = _frac(v)
            if v:
                rows[i][j] = rows[i].get(j, 0) + v
        return cls(nrows, ncols, rows)

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, object] | Sequence[object]]) -> "RationalMatrix":
        rows: list[dict] = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            items = col.items() if isinstance(col, Mapping) else enumerate(col)
            for i, v in items:
                if v:
                    rows[i][j] = _frac(v)
        return cls(nrows, len(columns), rows)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int, scale=1) -> "RationalMatrix":
        s = _frac(scale)
        return cls(n, n, [{i: s} for i in range(n)])

    # -- basic access ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self._nrows, self._ncols)

    @property
    def nrows(self) -> int:
        return self._nrows

    @property
    def ncols(self) -> int:
        return self._ncols

    def row(self, i: int) -> dict[int, Fraction]:
        return dict(self._rows[i])

    def rows(self) -> tuple[dict[int, Fraction], ...]:
        return tuple(dict(r) for r in self._rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        if not (0 <= i < self._nrows and 0 <= j < self._ncols):
            raise IndexError(ij)
        return self._rows[i].get(j, Fraction(0))

    def entries(self) -> Iterable[tuple[int, int, Fraction]]:
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                yield i, j, v

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def to_dense(self) -> list[list[Fraction]]:
        out = []
        for r in self._rows:
            d = [Fraction(0)] * self._ncols
            for j, v in r.items():
                d[j] = v
            out.append(d)
        return out

    def column(self, j: int) -> dict[int, Fraction]:
        return {i: r[j] for i, r in enumerate(self._rows) if j in r}

    def columns(self) -> list[dict[int, Fraction]]:
        cols: list[dict[int, Fraction]] = [{} for _ in range(self._ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                cols[j][i] = v
        return cols

    def is_zero(self) -> bool:
        return all(not r for r in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))
        return self._hash

    def __repr__(self) -> str:
        return f"RationalMatrix({self._nrows}x{self._ncols}, nnz={self.nnz()})"

    # -- arithmetic -----------------------------------------------------
    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self._ncols, self._nrows, self.columns())

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        rows = []
        for a, b in zip(self._rows, other._rows):
            r = dict(a)
            for j, v in b.items():
                r[j] = r.get(j, 0) + v
            rows.append(r)
        return RationalMatrix(self._nrows, self._ncols, rows)

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-1)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, c) -> "RationalMatrix":
        c = _frac(c)
        return RationalMatrix(self._nrows, self._ncols, [{j: c * v for j, v in r.items()} for r in self._rows])

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self._ncols != other._nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        orows = other._rows
        rows = []
        for r in self._rows:
            acc: dict[int, Fraction] = {}
            for k, a in r.items():
                for j, b in orows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            rows.append(acc)
        return RationalMatrix(self._nrows, other._ncols, rows)

    def apply(self, vec: Mapping[int, object] | Sequence[object]) -> dict[int, Fraction]:
        """Matrix times a (sparse or dense) column vector; returns a sparse dict."""
        items = vec.items() if isinstance(vec, Mapping) else enumerate(vec)
        v = {j: _frac(x) for j, x in items if x}
        out = {}
        for i, r in enumerate(self._rows):
            s = sum((a * v[j] for j, a in r.items() if j in v), Fraction(0))
            if s:
                out[i] = s
        return out

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        cpos = {c: k for k, c in enumerate(cols)}
        out = []
        for i in rows:
            r = self._rows[i]
            out.append({cpos[j]: v for j, v in r.items() if j in cpos})
        return RationalMatrix(len(rows), len(cols), out)

    @staticmethod
    def hstack(mats: Sequence["RationalMatrix"], nrows: int | None = None) -> "RationalMatrix":
        if not mats:
            return RationalMatrix(nrows or 0, 0)
        n = mats[0].nrows
        rows: list[dict] = [{} for _ in range(n)]
        off = 0
        for m in mats:
            if m.nrows != n:
                raise ValueError("hstack row mismatch")
            for i, r in enumerate(m._rows):
                for j, v in r.items():
                    rows[i][off + j] = v
            off += m.ncols
        return RationalMatrix(n, off, rows)

    @staticmethod
    def vstack(mats: Sequence["RationalMatrix"], ncols: int | None = None) -> "RationalMatrix":
        if not mats:
            return RationalMatrix(0, ncols or 0)
        n = mats[0].ncols
        rows = []
        for m in mats:
            if m.ncols != n:
                raise ValueError("vstack column mismatch")
            rows.extend(m._rows)
        return RationalMatrix(len(rows), n, rows)

    @staticmethod
    def block_diag(mats: Sequence["RationalMatrix"]) -> "RationalMatrix":
        rows = []
        off = 0
        for m in mats:
            for r in m._rows:
                rows.append({off + j: v for j, v in r.items()})
            off += m.ncols
        return RationalMatrix(len(rows), off, rows)

    def trace(self) -> Fraction:
        if self._nrows != self._ncols:
            raise ValueError("trace of a non-square matrix")
        return sum((r.get(i, Fraction(0)) for i, r in enumerate(self._rows)), Fraction(0))

    def power(self, k: int) -> "RationalMatrix":
        if self._nrows != self._ncols:
            raise ValueError("power of a non-square matrix")
        out = RationalMatrix.identity(self._nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out


# ---------------------------------------------------------------------------
# elimination kernels


def _to_int_row(r: Mapping[int, Fraction]) -> dict[int, int]:
    den = 1
    for v in r.values():
        den = den * v.denominator // gcd(den, v.denominator)
    return {j: int(v * den) for j, v in r.items()}


def _primitive(r: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in r.values():
        g = gcd(g, v)
        if g == 1:
            return r
    if g > 1:
        return {j: v // g for j, v in r.items()}
    return r


def _int_rank(rows: Iterable[Mapping[int, Fraction]]) -> int:
    """Fraction-free incremental echelon form; returns the rank."""
    pivots: dict[int, dict[int, int]] = {}
    for r in rows:
        if not r:
            continue
        cur = _primitive(_to_int_row(r))
        while cur:
            c = min(cur)
            p = pivots.get(c)
            if p is None:
                pivots[c] = cur
                break
            a, b = p[c], cur[c]
            nxt = {j: a * v for j, v in cur.items()}
            for j, v in p.items():
                w = nxt.get(j, 0) - b * v
                if w:
                    nxt[j] = w
                else:
                    nxt.pop(j, None)
            cur = _primitive(nxt)
    return len(pivots)


def rank(m: RationalMatrix) -> int:
    """Exact rank over Q."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    # eliminate along the shorter side
    rows = m.rows() if m.nrows <= m.ncols else m.columns()
    return _int_rank(rows)


def span_rank(vectors: Iterable[Mapping[int, object] | Sequence[object]]) -> int:
    """Dimension of the span of the given vectors."""
    rows = []
    for v in vectors:
        items = v.items() if isinstance(v, Mapping) else enumerate(v)
        rows.append({j: _frac(x) for j, x in items if x})
    return _int_rank(rows)


def rref(rows: Iterable[Mapping[int, object]]) -> tuple[list[int], list[dict[int, Fraction]]]:
    """Reduced row echelon form of a list of sparse rows.

    Returns ``(pivot_columns, rows)`` with each pivot entry normalised to 1 and
    pivot columns cleared in every other row.  Rows come back sorted by pivot.
    """
    pivots: dict[int, dict[int, Fraction]] = {}
    for r in rows:
        cur = {j: _frac(v) for j, v in r.items() if v}
        # pivot rows are zero in every other pivot column, so one pass suffices
        for c in [c for c in cur if c in pivots]:
            f = cur[c]
            for j, v in pivots[c].items():
                w = cur.get(j, 0) - f * v
                if w:
                    cur[j] = w
                else:
                    cur.pop(j, None)
        if not cur:
            continue
        c = min(cur)
        inv = 1 / cur[c]
        cur = {j: v * inv for j, v in cur.items()}
        for pr in pivots.values():
            f = pr.get(c)
            if f:
                for j, v in cur.items():
                    w = pr.get(j, 0) - f * v
                    if w:
                        pr[j] = w
                    else:
                        pr.pop(j, None)
        pivots[c] = cur
    order = sorted(pivots)
    return order, [pivots[c] for c in order]


def kernel_basis(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the null space ``{v : m v = 0}`` as dense tuples."""
    return [tuple(v.get(j, Fraction(0)) for j in range(m.ncols)) for v in _kernel_sparse(m)]


def _kernel_sparse(m: RationalMatrix) -> list[dict[int, Fraction]]:
    piv, rows = rref(m.rows())
    pset = set(piv)
    out = []
    for f in range(m.ncols):
        if f in pset:
            continue
        v = {f: Fraction(1)}
        for c, r in zip(piv, rows):
            x = r.get(f)
            if x:
                v[c] = -x
        out.append(v)
    return out


def image_basis(m: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Reduced basis of the column space."""
    _, rows = rref(m.columns())
    return [tuple(r.get(i, Fraction(0)) for i in range(m.nrows)) for r in rows]


def intersect_spans(u: Sequence[Mapping[int, Fraction]], w: Sequence[Mapping[int, Fraction]], n: int) -> list[dict[int, Fraction]]:
    """Basis of span(u) ∩ span(w) inside Q^n (sparse vectors)."""
    if not u or not w:
        return []
    cols = [dict(x) for x in u] + [{i: -v for i, v in x.items()} for x in w]
    mat = RationalMatrix.from_columns(n, cols)
    out = []
    for k in _kernel_sparse(mat):
        vec: dict[int, Fraction] = {}
        for idx, coef in k.items():
            if idx < len(u):
                for i, v in u[idx].items():
                    vec[i] = vec.get(i, 0) + coef * v
        vec = {i: v for i, v in vec.items() if v}
        if vec:
            out.append(vec)
    _, basis = rref(out)
    return basis


def solve(m: RationalMatrix, b: Mapping[int, object] | Sequence[object]) -> tuple[Fraction, ...] | None:
    """One exact solution of ``m x = b``, or ``None`` when inconsistent."""
    items = b.items() if isinstance(b, Mapping) else enumerate(b)
    bb = {i: _frac(v) for i, v in items if v}
    aug = [dict(r) for r in m.rows()]
    n = m.ncols
    for i, r in enumerate(aug):
        if i in bb:
            r[n] = bb[i]
    piv, rows = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for c, r in zip(piv, rows):
        x[c] = r.get(n, Fraction(0))
    return tuple(x)


# ---------------------------------------------------------------------------
# cochain complexes


class MatrixComplex:
    """A bounded cochain complex of finite-dimensional Q-vector spaces.

    ``dims[k]`` is the dimension of the cochain group in degree
    ``offset + k``; ``differentials[k]`` maps degree ``offset + k`` to
    ``offset + k + 1`` and has shape ``(dims[k+1], dims[k])``.  Missing
    trailing differentials are zero.

    With ``periodic=True`` the complex is Z/2-graded: ``dims`` has two entries
    (even, odd) and ``differentials`` two maps even->odd, odd->even.
    """

    def __init__(self, dims: Sequence[int], differentials: Sequence[RationalMatrix | None] = (),
                 offset: int = 0, periodic: bool = False, check: bool = True):
        self.dims = tuple(int(d) for d in dims)
        self.offset = offset
        self.periodic = periodic
        n = len(self.dims)
        if periodic and n != 2:
            raise ComplexError("a periodic complex has exactly two terms")
        nd = n if periodic else max(n - 1, 0)
        diffs = list(differentials) + [None] * (nd - len(differentials))
        if len(diffs) > nd:
            raise ComplexError(f"{len(diffs)} differentials for {n} terms")
        full = []
        for k, d in enumerate(diffs):
            src, tgt = self.dims[k], self.dims[(k + 1) % n]
            if d is None:
                d = RationalMatrix.zeros(tgt, src)
            if d.shape != (tgt, src):
                raise ComplexError(f"differential {k} has shape {d.shape}, expected {(tgt, src)}")
            full.append(d)
        self.differentials = tuple(full)
        if check:
            bad = self.square_defects()
            if bad:
                raise ComplexError(f"d^2 != 0 at degree(s) {bad}")

    def degrees(self) -> range:
        return range(self.offset, self.offset + len(self.dims))

    def differential(self, degree: int) -> RationalMatrix:
        """The map out of ``degree`` (zero matrix if absent)."""
        n = len(self.dims)
        if self.periodic:
            return self.differentials[degree % 2]
        k = degree - self.offset
        if 0 <= k < len(self.differentials):
            return self.differentials[k]
        src = self.dims[k] if 0 <= k < n else 0
        tgt = self.dims[k + 1] if 0 <= k + 1 < n else 0
        return RationalMatrix.zeros(tgt, src)

    def square_defects(self) -> list[int]:
        bad = []
        ds = self.differentials
        pairs = range(len(ds)) if self.periodic else range(len(ds) - 1)
        for k in pairs:
            nxt = ds[(k + 1) % len(ds)]
            if not (nxt @ ds[k]).is_zero():
                bad.append(k if self.periodic else self.offset + k)
        return bad

    def euler_characteristic(self) -> int:
        return sum((-1) ** (self.offset + k) * d for k, d in enumerate(self.dims))


def cohomology_dims(c: MatrixComplex) -> dict[int, int]:
    """dim H^k = dim ker d_k - rank d_{k-1}; keys are degrees (0/1 if periodic)."""
    bad = c.square_defects()
    if bad:
        raise ComplexError(f"d^2 != 0 at degree(s) {bad}")
    ranks = [rank(d) for d in c.differentials]
    out = {}
    if c.periodic:
        for k in (0, 1):
            out[k] = c.dims[k] - ranks[k] - ranks[(k + 1) % 2]
        return out
    for k, dim in enumerate(c.dims):
        r_out = ranks[k] if k < len(ranks) else 0
        r_in = ranks[k - 1] if 0 < k <= len(ranks) else 0
        out[c.offset + k] = dim - r_out - r_in
    return out
