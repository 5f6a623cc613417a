"""Exact rational linear algebra and polytope geometry.

Everything here is exact: matrices store a common positive denominator and
integer entries, vectors are tuples of ``fractions.Fraction``.  Polytope
conversions use the double description method on rational cones; hull
membership is decided by an exact phase-1 simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

Vector = tuple[Fraction, ...]


def vec(entries) -> Vector:
    """Coerce an iterable of numbers into an exact vector."""
    return tuple(Fraction(e) for e in entries)


def vec_add(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a: Vector) -> Vector:
    c = Fraction(c)
    return tuple(c * x for x in a)


def vec_dot(a: Vector, b: Vector) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def vec_is_zero(a: Vector) -> bool:
    return all(x == 0 for x in a)


def kron_vec(a: Vector, b: Vector) -> Vector:
    """Kronecker product of vectors, index (i, j) -> i*len(b) + j."""
    return tuple(x * y for x in a for y in b)


def primitive_ray(a: Vector) -> Vector:
    """Scale by a positive factor to an integer vector with content 1.

    Orientation is preserved: a and -a normalize to different vectors.
    """
    if vec_is_zero(a):
        return tuple(Fraction(0) for _ in a)
    denom_lcm = 1
    for x in a:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in a]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    return tuple(Fraction(v, g) for v in ints)


def primitive(a: Vector) -> Vector:
    """Scale to an integer vector with content 1 and positive leading entry."""
    r = primitive_ray(a)
    lead = next((v for v in r if v != 0), None)
    if lead is not None and lead < 0:
        r = tuple(-v for v in r)
    return r


class Matrix:
    """Immutable exact rational matrix: integer entries over a common
    positive denominator, normalized so gcd(entries, den) = 1."""

    __slots__ = ("rows", "cols", "den", "num", "_perm", "_hash")

    def __init__(self, rows: int, cols: int, den: int, num: tuple):
        if den < 0:
            den = -den
            num = tuple(tuple(-v for v in r) for r in num)
        g = den
        for r in num:
            for v in r:
                g = gcd(g, abs(v))
                if g == 1:
                    break
            if g == 1:
                break
        if g > 1:
            den //= g
            num = tuple(tuple(v // g for v in r) for r in num)
        self.rows = rows
        self.cols = cols
        self.den = den
        self.num = num
        self._perm = -1  # lazily computed; -1 = unknown, None = not a perm
        self._hash = None

    # ---- constructors ----

    @classmethod
    def from_rows(cls, rows) -> "Matrix":
        rows = [[Fraction(v) for v in r] for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        den = 1
        for r in rows:
            if len(r) != nc:
                raise ValueError("ragged rows")
            for v in r:
                den = den * v.denominator // gcd(den, v.denominator)
        num = tuple(tuple(int(v * den) for v in r) for r in rows)
        return cls(nr, nc, den, num)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, 1, tuple(tuple(1 if i == j else 0 for j in range(n))
                                  for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, 1, tuple(tuple(0 for _ in range(cols))
                                        for _ in range(rows)))

    @classmethod
    def from_perm(cls, perm: tuple[int, ...]) -> "Matrix":
        """Permutation matrix M with M e_j = e_{perm[j]}."""
        n = len(perm)
        num = [[0] * n for _ in range(n)]
        for j, i in enumerate(perm):
            num[i][j] = 1
        m = cls(n, n, 1, tuple(tuple(r) for r in num))
        m._perm = tuple(perm)
        return m

    @classmethod
    def from_columns(cls, columns) -> "Matrix":
        cols = [vec(c) for c in columns]
        return cls.from_rows(list(zip(*cols))) if cols else cls.zeros(0, 0)

    # ---- accessors ----

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(self.num[i][j], self.den)

    def row(self, i: int) -> Vector:
        return tuple(Fraction(v, self.den) for v in self.num[i])

    def column(self, j: int) -> Vector:
        return tuple(Fraction(r[j], self.den) for r in self.num)

    def to_rows(self) -> list[list[Fraction]]:
        return [[Fraction(v, self.den) for v in r] for r in self.num]

    def as_permutation(self) -> tuple[int, ...] | None:
        """The permutation p with M e_j = e_{p[j]}, or None."""
        if self._perm != -1:
            return self._perm
        perm = None
        if self.rows == self.cols and self.den == 1:
            p = []
            ok = True
            for j in range(self.cols):
                hits = [i for i in range(self.rows) if self.num[i][j] != 0]
                if len(hits) != 1 or self.num[hits[0]][j] != 1:
                    ok = False
                    break
                p.append(hits[0])
            if ok and len(set(p)) == self.rows:
                perm = tuple(p)
        self._perm = perm
        return perm

    # ---- algebra ----

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        pa, pb = self.as_permutation(), other.as_permutation()
        if pa is not None and pb is not None:
            return Matrix.from_perm(tuple(pa[pb[j]] for j in range(len(pb))))
        bt = tuple(zip(*other.num))
        num = tuple(tuple(sum(x * y for x, y in zip(arow, bcol)) for bcol in bt)
                    for arow in self.num)
        return Matrix(self.rows, other.cols, self.den * other.den, num)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        da, db = self.den, other.den
        num = tuple(tuple(x * db + y * da for x, y in zip(ra, rb))
                    for ra, rb in zip(self.num, other.num))
        return Matrix(self.rows, self.cols, da * db, num)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(-1)

    def scale(self, c) -> "Matrix":
        c = Fraction(c)
        num = tuple(tuple(v * c.numerator for v in r) for r in self.num)
        return Matrix(self.rows, self.cols, self.den * c.denominator, num)

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows, self.den, tuple(zip(*self.num)))

    def apply(self, v: Vector) -> Vector:
        """Matrix-vector product."""
        p = self.as_permutation()
        if p is not None:
            out = [Fraction(0)] * self.rows
            for j, x in enumerate(v):
                out[p[j]] = x
            return tuple(out)
        return tuple(sum((Fraction(rv * x.numerator, x.denominator)
                          for rv, x in zip(r, v) if rv), Fraction(0)) / self.den
                     for r in self.num)

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.num for v in r)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.den == other.den
                and self.num == other.num)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.den, self.num))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols}, den={self.den})"

    # ---- elimination-based queries ----

    def rref(self) -> tuple[list[list[Fraction]], list[int]]:
        """Reduced row echelon form and pivot column indices."""
        m = self.to_rows()
        nr, nc = self.rows, self.cols
        pivots: list[int] = []
        r = 0
        for c in range(nc):
            if r == nr:
                break
            pr = next((i for i in range(r, nr) if m[i][c] != 0), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = 1 / m[r][c]
            m[r] = [v * inv for v in m[r]]
            for i in range(nr):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[Vector]:
        """Basis of the right kernel, primitive integer vectors."""
        m, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [Fraction(0)] * self.cols
            v[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -m[r][fc]
            basis.append(primitive(tuple(v)))
        return basis

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("not square")
        n = self.rows
        aug = [row + [Fraction(1 if i == j else 0) for j in range(n)]
               for i, row in enumerate(self.to_rows())]
        for c in range(n):
            pr = next((i for i in range(c, n) if aug[i][c] != 0), None)
            if pr is None:
                raise ValueError("singular matrix")
            aug[c], aug[pr] = aug[pr], aug[c]
            inv = 1 / aug[c][c]
            aug[c] = [v * inv for v in aug[c]]
            for i in range(n):
                if i != c and aug[i][c] != 0:
                    f = aug[i][c]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
        return Matrix.from_rows([row[n:] for row in aug])


# ---------------------------------------------------------------------------
# subspaces and polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """Linear subspace given by a basis of column vectors."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Vector) -> bool:
        if vec_is_zero(v):
            return True
        m = Matrix.from_columns(list(self.basis) + [v])
        return m.rank() == len(self.basis)

    def orthogonal_rows(self) -> list[Vector]:
        """Rows N with N x = 0 iff x in the subspace."""
        if not self.basis:
            return [tuple(Fraction(1 if i == j else 0) for j in range(self.ambient_dim))
                    for i in range(self.ambient_dim)]
        bt = Matrix.from_rows(list(self.basis))  # basis vectors as rows
        return bt.nullspace()


@dataclass(frozen=True)
class Polytope:
    """Bounded convex polytope given by its vertex list."""

    ambient_dim: int
    vertices: tuple[Vector, ...]


def tensor_product(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; row index (i, j) -> i*rows(b) + j, columns alike."""
    num = []
    for ra in a.num:
        for rb in b.num:
            num.append(tuple(x * y for x in ra for y in rb))
    return Matrix(a.rows * b.rows, a.cols * b.cols, a.den * b.den, tuple(num))


def fixed_subspace(m: Matrix) -> Subspace:
    """Basis of {v : m v = v}."""
    if m.rows != m.cols:
        raise ValueError("not square")
    return Subspace(m.cols, tuple((m - Matrix.identity(m.rows)).nullspace()))


def rank_of_vectors(vectors) -> int:
    if not vectors:
        return 0
    return Matrix.from_rows([list(v) for v in vectors]).rank()


# ---------------------------------------------------------------------------
# exact LP feasibility (phase-1 simplex, Bland's rule)
# ---------------------------------------------------------------------------


def _simplex_feasible(A: list[list[Fraction]], b: list[Fraction]) -> bool:
    """Is {x >= 0 : A x = b} nonempty?  Dense tableau, exact pivots."""
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    rhs = []
    for i in range(m):
        if b[i] < 0:
            rows.append([-v for v in A[i]])
            rhs.append(-b[i])
        else:
            rows.append(list(A[i]))
            rhs.append(b[i])
    # tableau columns: n original + m artificial + rhs
    tab = [rows[i] + [Fraction(1 if j == i else 0) for j in range(m)] + [rhs[i]]
           for i in range(m)]
    basis = [n + i for i in range(m)]
    # objective: minimize sum of artificials; z-row = sum of constraint rows
    z = [sum(tab[i][j] for i in range(m)) for j in range(n + m + 1)]
    total = n + m
    while True:
        enter = next((j for j in range(total)
                      if j not in basis and z[j] > 0 and j < n), None)
        if enter is None:
            # also allow re-entering artificials is pointless; stop
            break
        ratios = [(tab[i][total] / tab[i][enter], basis[i], i)
                  for i in range(m) if tab[i][enter] > 0]
        if not ratios:
            break  # unbounded in phase 1 cannot happen; defensive
        _, _, leave = min(ratios, key=lambda t: (t[0], t[1]))
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        prow = tab[leave]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [a - f * p for a, p in zip(tab[i], prow)]
        if z[enter] != 0:
            f = z[enter]
            z = [a - f * p for a, p in zip(z, prow)]
        basis[leave] = enter
    return z[total] == 0


def hull_membership(p: Vector, poly: Polytope) -> bool:
    """Is p a convex combination of the polytope's vertices?"""
    if len(p) != poly.ambient_dim:
        raise ValueError("dimension mismatch")
    verts = poly.vertices
    if not verts:
        return False
    A = [[Fraction(v[i]) for v in verts] for i in range(poly.ambient_dim)]
    A.append([Fraction(1)] * len(verts))
    b = [Fraction(x) for x in p] + [Fraction(1)]
    return _simplex_feasible(A, b)


def is_extreme_among(p: Vector, others: list[Vector]) -> bool:
    """Is p outside conv(others)?

    When all coordinates involved are nonnegative, a convex combination
    equal to p can only use points supported inside supp(p), which prunes
    most LP calls for sparse state vectors.
    """
    if not others:
        return True
    if all(x >= 0 for x in p) and all(x >= 0 for q in others for x in q):
        supp = {i for i, x in enumerate(p) if x > 0}
        others = [q for q in others
                  if all(i in supp for i, x in enumerate(q) if x > 0)]
        if not others:
            return True
    return not hull_membership(p, Polytope(len(p), tuple(others)))


def extreme_points(points: list[Vector]) -> list[Vector]:
    """Subset of points that are not convex combinations of the others."""
    uniq = list(dict.fromkeys(points))
    return [p for i, p in enumerate(uniq)
            if is_extreme_among(p, uniq[:i] + uniq[i + 1:])]


# ---------------------------------------------------------------------------
# double description: extreme rays of {x : A x >= 0}
# ---------------------------------------------------------------------------


def _dd_pointed(rows: list[Vector]) -> list[Vector]:
    """Extreme rays of a pointed cone {x : row . x >= 0 for all rows}.

    Assumes rank(rows) == dim (pointedness).  Zero sets are kept as integer
    bitmasks over constraint indices; rays p, m are combined only when no
    third ray's zero set contains Z(p) & Z(m) (the standard combinatorial
    adjacency test).  Rays come back as primitive integer vectors, sorted.
    """
    dim = len(rows[0])
    # initial simplicial subcone from dim independent rows
    chosen: list[int] = []
    cur: list[Vector] = []
    for i, r in enumerate(rows):
        if rank_of_vectors(cur + [r]) > len(cur):
            chosen.append(i)
            cur.append(r)
        if len(cur) == dim:
            break
    if len(cur) < dim:
        raise ValueError("cone not pointed")
    B = Matrix.from_rows([list(rows[i]) for i in chosen])
    Binv = B.inverse()
    chosen_set = set(chosen)
    # rays as (vector, zero-bitmask over original row indices)
    rays: list[tuple[Vector, int]] = []
    for j in range(dim):
        mask = 0
        for k, row_idx in enumerate(chosen):
            if k != j:
                mask |= 1 << row_idx
        rays.append((primitive_ray(Binv.column(j)), mask))

    processed = list(chosen)
    min_common = dim - 2
    for i, row in enumerate(rows):
        if i in chosen_set:
            continue
        bit = 1 << i
        plus, zero, minus = [], [], []
        for (r, z) in rays:
            v = vec_dot(row, r)
            if v > 0:
                plus.append((r, z, v))
            elif v == 0:
                zero.append((r, z | bit))
            else:
                minus.append((r, z, v))
        processed.append(i)
        if not minus:
            rays = [(r, z) for r, z, _ in plus] + zero
            continue
        # adjacency is judged in the cone before the cut: all current rays
        all_masks = [z for _, z, _ in plus] + [z for _, z in zero] \
            + [z for _, z, _ in minus]
        new_rays: dict[Vector, int] = {}
        for pi, (rp, zp, vp) in enumerate(plus):
            for mi, (rm, zm, vm) in enumerate(minus):
                common = zp & zm
                if common.bit_count() < min_common:
                    continue
                skip_a = pi
                skip_b = len(plus) + len(zero) + mi
                adjacent = True
                for oi, z_other in enumerate(all_masks):
                    if oi == skip_a or oi == skip_b:
                        continue
                    if common & z_other == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                new_vec = primitive_ray(vec_sub(vec_scale(vp, rm),
                                                vec_scale(vm, rp)))
                if new_vec not in new_rays:
                    mask = bit
                    for k in processed:
                        if k != i and vec_dot(rows[k], new_vec) == 0:
                            mask |= 1 << k
                    new_rays[new_vec] = mask
        rays = [(r, z) for r, z, _ in plus] + zero + list(new_rays.items())
    return sorted({r for r, _ in rays})


def cone_extreme_rays(rows: list[Vector]) -> tuple[list[Vector], list[Vector]]:
    """Minimal description of {x : row . x >= 0}: (lineality basis, rays)."""
    rows = [vec(r) for r in rows if not vec_is_zero(vec(r))]
    if not rows:
        raise ValueError("no constraints: cone is all of space")
    dim = len(rows[0])
    row_mat = Matrix.from_rows([list(r) for r in rows])
    lineality = row_mat.nullspace()
    if not lineality:
        return [], _dd_pointed(rows)
    # restrict to the row space: x = K z with K columns spanning it
    rref_rows, _ = row_mat.rref()
    span_basis = [primitive(tuple(r)) for r in rref_rows if any(v != 0 for v in r)]
    K = Matrix.from_columns(span_basis)
    reduced = [tuple(vec_dot(r, K.column(j)) for j in range(K.cols)) for r in rows]
    inner = _dd_pointed(reduced)
    rays = sorted(primitive_ray(K.apply(z)) for z in inner)
    return lineality, rays


def polytope_facets(poly: Polytope) -> tuple[list[tuple[Vector, Fraction]],
                                             list[tuple[Vector, Fraction]]]:
    """V-to-H conversion.

    Returns (equalities, inequalities): pairs (a, c) meaning a.x = c on the
    affine hull, and facet inequalities a.x <= c.
    """
    if not poly.vertices:
        raise ValueError("facet enumeration needs a nonempty polytope")
    n = poly.ambient_dim
    rows = [tuple([-x for x in v] + [Fraction(1)]) for v in poly.vertices]
    lineality, rays = cone_extreme_rays(rows)
    equalities = []
    for l in lineality:
        a, c = l[:n], l[n]
        if not vec_is_zero(a):
            equalities.append((a, c))
    inequalities = []
    for r in rays:
        a, c = r[:n], r[n]
        if vec_is_zero(a):
            continue  # the trivial 0 <= 1 ray
        inequalities.append((a, c))
    return equalities, inequalities


def enumerate_vertices(inequalities: list[tuple[Vector, Fraction]],
                       equalities: list[tuple[Vector, Fraction]],
                       ambient_dim: int) -> list[Vector]:
    """H-to-V conversion for a bounded polytope {a.x <= c, e.x = f}."""
    rows: list[Vector] = []
    one = tuple([Fraction(1)] + [Fraction(0)] * ambient_dim)
    rows.append(one)  # homogenizing t >= 0
    for a, c in inequalities:
        rows.append(tuple([c] + [-x for x in a]))
    for e, f in equalities:
        rows.append(tuple([f] + [-x for x in e]))
        rows.append(tuple([-f] + [x for x in e]))
    lineality, rays = cone_extreme_rays(rows)
    if lineality:
        raise ValueError("input is not a bounded polytope (lineality present)")
    verts = []
    for r in rays:
        t = r[0]
        if t == 0:
            raise ValueError("input is not a bounded polytope (recession ray)")
        verts.append(tuple(x / t for x in r[1:]))
    return sorted(set(verts))


def vertices_of_slice(poly: Polytope, sub: Subspace) -> Polytope:
    """Vertices of poly intersected with a linear subspace."""
    if sub.ambient_dim != poly.ambient_dim:
        raise ValueError("dimension mismatch")
    eqs, ineqs = polytope_facets(poly)
    all_eqs = list(eqs)
    zero = Fraction(0)
    for row in sub.orthogonal_rows():
        all_eqs.append((row, zero))
    verts = enumerate_vertices(ineqs, all_eqs, poly.ambient_dim)
    return Polytope(poly.ambient_dim, tuple(verts))


# ---------------------------------------------------------------------------
# matroid components
# ---------------------------------------------------------------------------


def matroid_components(vectors: list[Vector]) -> list[list[int]]:
    """Finest partition {G_k} with span(G_1) + ... + span(G_m) direct.

    Connected components of the linear matroid: put the vectors as columns,
    reduce, and link each non-pivot column to the pivots appearing in its
    reduced representation.  Merge order cannot affect the result; indices
    inside blocks and blocks themselves come out ascending.
    """
    if not vectors:
        return []
    if any(vec_is_zero(v) for v in vectors):
        raise ValueError("zero vector has no direct-sum home")
    m = Matrix.from_columns(list(vectors))
    red, pivots = m.rref()
    n = len(vectors)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for j in range(n):
        if j in pivots:
            continue
        for r, pc in enumerate(pivots):
            if red[r][j] != 0:
                union(j, pc)
    blocks: dict[int, list[int]] = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(i)
    return [sorted(b) for _, b in sorted(blocks.items())]
