"""Auxiliary functions vanishing at chosen points at infinity of ``y_l^p = f_l(x)``.

A monomial ``x^i0 y_1^i1 ... y_r^ir`` is expanded along a branch assignment
``(j_1..j_r)``; requiring every nonnegative power ``x^(i/p)`` to cancel gives a
linear system over ``Q(zeta_p)`` whose nullspace is computed exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
from mpmath import iv

from .exact_arith import CycloElement, RationalPoly, poly_height
from .puiseux import monomial_series
from .runge_bounds import LogBound, _ivprec, monomials, working_precision

Branches = tuple[int, ...]


# ---------------------------------------------------------------------------
# points at infinity
# ---------------------------------------------------------------------------


def canonical_branches(p: int, degs: Sequence[int], branches: Sequence[int]) -> Branches:
    """Smallest representative of ``branches`` under ``j_l -> j_l + s d_l (mod p)``.

    Changing the branch of ``x^(1/p)`` by ``zeta^s`` turns the leading term of
    ``y_l`` by ``zeta^(s d_l)``; assignments in one orbit give the same point.
    """
    if len(branches) != len(degs):
        raise ValueError("branch assignment length must equal the number of polynomials")
    if any(not 0 <= j < p for j in branches):
        raise ValueError("branch indices must lie in 0..p-1")
    return min(tuple((j + s * d) % p for j, d in zip(branches, degs)) for s in range(p))


def points_at_infinity(p: int, degs: Sequence[int]) -> list[Branches]:
    """One canonical branch assignment per point at infinity."""
    seen = {canonical_branches(p, degs, js) for js in itertools.product(range(p), repeat=len(degs))}
    return sorted(seen)


def dedupe_branch_set(p: int, degs: Sequence[int], branch_set: Iterable[Sequence[int]]) -> list[Branches]:
    out = sorted({canonical_branches(p, degs, b) for b in branch_set})
    if not out:
        raise ValueError("branch set must be nonempty")
    return out


# ---------------------------------------------------------------------------
# the branch matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BranchMatrix:
    p: int
    degs: tuple[int, ...]
    delta: int
    entries: tuple[tuple[CycloElement, ...], ...]
    row_index: tuple[tuple[Branches, int], ...]
    col_index: tuple[tuple[int, ...], ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_index), len(self.col_index)

    def rows(self) -> list[list[CycloElement]]:
        return [list(r) for r in self.entries]

    def apply(self, vec: Sequence[CycloElement]) -> list[CycloElement]:
        out = []
        for row in self.entries:
            acc = CycloElement.zero(self.p)
            for a, c in zip(row, vec):
                if a and c:
                    acc = acc + a * c
            out.append(acc)
        return out


def _series_n_terms(delta: int, p: int) -> int:
    return delta // p + 1


def build_branch_matrix(
    fs: Sequence[RationalPoly],
    p: int,
    branch_set: Iterable[Sequence[int]],
    delta: int,
    n_terms: int | None = None,
) -> BranchMatrix:
    """Rows ``(l, i)``: coefficient of ``x^(i/p)``, ``i = 0..delta``, under branch assignment ``l``.

    When ``p`` divides every degree only ``i`` divisible by ``p`` can occur, so
    the matrix has ``(delta // p + 1) e`` rows.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    degs = tuple(f.degree for f in fs)
    branches = dedupe_branch_set(p, degs, branch_set)
    need = _series_n_terms(delta, p)
    n_terms = need if n_terms is None else n_terms
    if n_terms < need - 1 or n_terms < 0:
        raise ValueError(f"truncation n_terms={n_terms} too shallow for delta={delta}")
    n_terms = max(n_terms, need)
    cols = monomials(delta, p, degs)
    # with every d_l divisible by p all exponents are integers: only x^0, x^1, ... rows
    step = p if all(d % p == 0 for d in degs) else 1
    cache: dict = {}
    zero = CycloElement.zero(p)
    rows = []
    row_index = []
    for js in branches:
        series = [monomial_series(m[0], m[1:], fs, js, p, n_terms, cache) for m in cols]
        for i in range(0, delta + 1, step):
            row = []
            for s in series:
                e = s.lead_num
                if e >= i and (e - i) % p == 0:
                    row.append(s.coeffs[(e - i) // p])
                else:
                    row.append(zero)
            rows.append(tuple(row))
            row_index.append((js, i))
    return BranchMatrix(p, degs, delta, tuple(rows), tuple(row_index), tuple(cols))


@dataclass(frozen=True)
class RungeSystem:
    fs: tuple[RationalPoly, ...]
    p: int
    branch_set: tuple[Branches, ...]
    delta: int
    monomial_degree: int
    matrix: BranchMatrix

    @property
    def expected_dimension(self) -> int:
        """Lower bound ``m - (rows per point) * e`` on the nullspace dimension."""
        m = len(self.matrix.col_index)
        return m - len(self.matrix.row_index)


def runge_system(
    fs: Sequence[RationalPoly], p: int, t: int, branch_set: Iterable[Sequence[int]] | None = None
) -> RungeSystem:
    """The linear system for ``t`` points at infinity with the degree chosen by the height theorem."""
    from .runge_bounds import MainthParams, delta_choice

    fs = tuple(fs)
    degs = tuple(f.degree for f in fs)
    delta = delta_choice(MainthParams(p, degs, t))
    top = delta if any(d % p for d in degs) else p * delta
    if branch_set is None:
        branch_set = points_at_infinity(p, degs)[:t]
    branches = dedupe_branch_set(p, degs, branch_set)
    if len(branches) != t:
        raise ValueError(f"branch set gives {len(branches)} points, expected t={t}")
    return RungeSystem(fs, p, tuple(branches), delta, top, build_branch_matrix(fs, p, branches, top))


# ---------------------------------------------------------------------------
# exact nullspace
# ---------------------------------------------------------------------------


def _integral_row(row: list[CycloElement]) -> list[CycloElement]:
    """Clear denominators and remove the rational-integer content of a row."""
    den = 1
    for a in row:
        den = math.lcm(den, a.denominator())
    row = [a * den for a in row] if den != 1 else row
    g = 0
    for a in row:
        for c in a.coords:
            g = math.gcd(g, c.numerator)
    if g > 1:
        row = [a * Fraction(1, g) for a in row]
    return row


@dataclass(frozen=True)
class AuxFunction:
    """``g = sum c_m x^i0 y_1^i1 ... y_r^ir`` with coefficients in ``Q(zeta_p)``."""

    p: int
    degs: tuple[int, ...]
    coeffs: tuple[tuple[tuple[int, ...], CycloElement], ...]

    def vector(self, cols: Sequence[tuple[int, ...]]) -> list[CycloElement]:
        lookup = dict(self.coeffs)
        return [lookup.get(m, CycloElement.zero(self.p)) for m in cols]

    def is_zero(self) -> bool:
        return not any(c for _, c in self.coeffs)

    def evaluate(self, x, ys: Sequence) -> CycloElement:
        """Value at an affine point ``(x, y_1..y_r)`` with rational coordinates."""
        x = Fraction(x)
        ys = [Fraction(y) for y in ys]
        total = CycloElement.zero(self.p)
        for m, c in self.coeffs:
            if c:
                val = x ** m[0]
                for y, e in zip(ys, m[1:]):
                    val *= y**e
                total = total + c * val
        return total


def nullspace(A: BranchMatrix) -> list[AuxFunction]:
    """Basis of ``{c : A c = 0}`` by fraction-free elimination over ``Z[zeta_p]``."""
    p = A.p
    ncols = len(A.col_index)
    rows = [_integral_row(list(r)) for r in A.entries if any(r)]
    pivots: list[tuple[int, int]] = []  # (row position, column)
    used = 0
    for col in range(ncols):
        best = None
        for ri in range(used, len(rows)):
            a = rows[ri][col]
            if a:
                h = a.max_abs_coord()
                if best is None or h < best[0]:
                    best = (h, ri)
        if best is None:
            continue
        ri = best[1]
        rows[used], rows[ri] = rows[ri], rows[used]
        prow = rows[used]
        piv = prow[col]
        for other in range(len(rows)):
            if other == used:
                continue
            b = rows[other][col]
            if not b:
                continue
            rows[other] = _integral_row([piv * x - b * y for x, y in zip(rows[other], prow)])
        pivots.append((used, col))
        used += 1
        if used == len(rows):
            break
    pivot_cols = {c for _, c in pivots}
    free = [c for c in range(ncols) if c not in pivot_cols]
    basis = []
    for f in free:
        vec = [CycloElement.zero(p) for _ in range(ncols)]
        prod_all = CycloElement.one(p)
        for r, c in pivots:
            prod_all = prod_all * rows[r][c]
        vec[f] = prod_all
        for r, c in pivots:
            coeff = rows[r][f]
            if not coeff:
                continue
            others = CycloElement.one(p)
            for r2, c2 in pivots:
                if r2 != r:
                    others = others * rows[r2][c2]
            vec[c] = -(coeff * others)
        vec = _integral_row(vec)
        basis.append(AuxFunction(p, A.degs, tuple(zip(A.col_index, vec))))
    return basis


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def substituted_coefficients(
    g: AuxFunction, fs: Sequence[RationalPoly], branches: Sequence[int], n_terms: int
) -> dict[int, CycloElement]:
    """Coefficients of ``g(x, y_(1,j_1), ...)`` keyed by ``p * exponent``, truncated at depth ``n_terms``."""
    p = g.p
    cache: dict = {}
    out: dict[int, CycloElement] = {}
    for m, c in g.coeffs:
        if not c:
            continue
        s = monomial_series(m[0], m[1:], fs, branches, p, n_terms, cache)
        for k, a in enumerate(s.coeffs):
            if a:
                key = s.lead_num - p * k
                out[key] = out.get(key, CycloElement.zero(p)) + c * a
    return out


def aux_degree(g: AuxFunction) -> int:
    """Largest ``p i0 + sum i_l d_l`` among the monomials with nonzero coefficient."""
    return max((g.p * m[0] + sum(e * d for e, d in zip(m[1:], g.degs)) for m, c in g.coeffs if c), default=0)


def verify_aux(
    g: AuxFunction,
    fs: Sequence[RationalPoly],
    p: int,
    branch_set: Iterable[Sequence[int]],
    depth: int,
) -> bool:
    """Every nonnegative power of ``x`` cancels under each branch assignment."""
    delta = aux_degree(g)
    if depth < delta + 1:
        raise ValueError(f"depth {depth} below delta+1 = {delta + 1}")
    if g.is_zero():
        return False
    for js in dedupe_branch_set(p, g.degs, branch_set):
        coeffs = substituted_coefficients(g, fs, js, depth)
        if any(c for key, c in coeffs.items() if key >= 0):
            return False
    return True


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------


def _hnf_index(vectors: list[list[int]], n: int) -> int:
    """Index in ``Z^n`` of the lattice spanned by ``vectors`` (0 if not full rank)."""
    rows = [list(v) for v in vectors if any(v)]
    det = 1
    for col in range(n):
        while True:
            nz = [r for r in rows if r[col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[col] // piv[col]
                for i in range(n):
                    r[i] -= q * piv[i]
        nz = [r for r in rows if r[col]]
        if not nz:
            return 0
        piv = nz[0]
        det *= abs(piv[col])
        rows = [r for r in rows if r is not piv and any(r)]
    return det


def ideal_norm(elements: Sequence[CycloElement]) -> int:
    """Norm of the ideal of ``Z[zeta_p]`` generated by integral ``elements``."""
    p = elements[0].p
    n = p - 1
    zeta = CycloElement.zeta_power(p, 1)
    vecs = []
    for a in elements:
        if not a.is_integral():
            raise ValueError("ideal generators must be integral")
        b = a
        for _ in range(n):
            vecs.append([int(c) for c in b.coords])
            b = b * zeta
    return _hnf_index(vecs, n)


def _abs2_embedding(a: CycloElement, k: int):
    """Interval for ``|sigma_k(a)|^2`` where ``sigma_k(zeta) = exp(2 pi i k / p)``."""
    p = a.p
    re = iv.mpf(0)
    im = iv.mpf(0)
    for j, c in enumerate(a.coords):
        if c:
            ang = 2 * iv.pi * ((k * j) % p) / p
            cv = iv.mpf(c.numerator) / c.denominator
            re += cv * iv.cos(ang)
            im += cv * iv.sin(ang)
    return re**2 + im**2


@dataclass(frozen=True)
class MatrixHeight:
    exact: LogBound
    a_priori: LogBound
    within_a_priori: bool


def projective_log_height(elements: Sequence[CycloElement], prec: int | None = None) -> LogBound:
    """Absolute logarithmic height of the projective point ``(elements)`` over ``Q(zeta_p)``."""
    nz = [a for a in elements if a]
    if not nz:
        raise ValueError("height of the zero vector is undefined")
    p = nz[0].p
    n = p - 1
    den = 1
    for a in nz:
        den = math.lcm(den, a.denominator())
    ints = [a * den for a in nz]
    norm = ideal_norm(ints)
    prec = prec or working_precision()
    with _ivprec(prec):
        lo_total = iv.mpf(0)
        hi_total = iv.mpf(0)
        for k in range(1, p):
            sqs = [_abs2_embedding(a, k) for a in ints]
            lo = max(mpmath.mpf(s.a) for s in sqs)
            hi = max(mpmath.mpf(s.b) for s in sqs)
            if lo <= 0:
                raise ArithmeticError("precision too low to separate an embedding from zero")
            lo_total += iv.log(iv.mpf(lo)) / 2
            hi_total += iv.log(iv.mpf(hi)) / 2
        nlog = iv.log(iv.mpf(norm))
        lower = (iv.mpf(lo_total.a) - nlog) / n
        upper = (iv.mpf(hi_total.b) - nlog) / n
        return LogBound.from_interval(iv.mpf([lower.a, upper.b]), "height:projective", prec)


def a_priori_matrix_height(p: int, delta: int, B, prec: int | None = None) -> LogBound:
    """Log of ``(2 p^2 B)^(delta/p) / p``."""
    from .runge_bounds import _evaluate

    return _evaluate([(Fraction(delta, p), 2 * p * p * Fraction(B)), (-1, p)], "height:a-priori", prec)


def matrix_height(A: BranchMatrix, fs: Sequence[RationalPoly] | None = None, B=None) -> MatrixHeight:
    """Exact projective height of the entries of ``A`` and the a-priori bound.

    ``B`` defaults to ``H + 1`` with ``H`` the largest height among ``fs``.
    """
    entries = [a for row in A.entries for a in row]
    if not any(entries):
        raise ValueError("zero matrix has no projective height")
    exact = projective_log_height(entries)
    if B is None:
        H = max((poly_height(f)[0] for f in fs), default=1) if fs else 1
        B = H + 1
    bound = a_priori_matrix_height(A.p, A.delta, B)
    return MatrixHeight(exact, bound, exact.log_value <= bound.log_value)
