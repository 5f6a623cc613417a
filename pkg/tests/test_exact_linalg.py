"""Exact linear algebra and polytope geometry tests.

Expected values tagged non-trivial were computed by the independent
oracles in this file (subset enumeration for hull membership, basic
feasible solution enumeration for slices, partition search for matroid
components) before the implementations they check.
"""

import random
from fractions import Fraction
from itertools import combinations

import pytest

from gptparticles.exact_linalg import (
    Matrix,
    Polytope,
    Subspace,
    cone_extreme_rays,
    enumerate_vertices,
    extreme_points,
    fixed_subspace,
    hull_membership,
    kron_vec,
    matroid_components,
    polytope_facets,
    primitive,
    rank_of_vectors,
    tensor_product,
    vec,
    vertices_of_slice,
)

F = Fraction


def unit(n, i):
    return tuple(F(1) if j == i else F(0) for j in range(n))


def swap_matrix(d):
    """Exchange of tensor factors on R^d x R^d, built by basis enumeration."""
    perm = [0] * (d * d)
    for i in range(d):
        for j in range(d):
            perm[i * d + j] = j * d + i
    return Matrix.from_perm(tuple(perm))


def simplex_poly(d):
    return Polytope(d, tuple(unit(d, i) for i in range(d)))


def pair_simplex(d):
    verts = tuple(kron_vec(unit(d, i), unit(d, j))
                  for i in range(d) for j in range(d))
    return Polytope(d * d, verts)


# ---------------------------------------------------------------------------
# Matrix basics
# ---------------------------------------------------------------------------


def test_matrix_roundtrip_and_hash():
    m = Matrix.from_rows([[F(1, 2), 1], [0, F(3)]])
    assert m.entry(0, 0) == F(1, 2)
    assert m.entry(1, 1) == 3
    assert hash(m) == hash(Matrix.from_rows([["1/2", 1], [0, 3]]))


def test_matmul_matches_manual():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.from_rows([[F(1, 2), 0], [1, -1]])
    c = a @ b
    assert c.to_rows() == [[F(5, 2), -2], [F(11, 2), -4]]


def test_permutation_fast_path():
    p = Matrix.from_perm((1, 2, 0))
    q = Matrix.from_perm((2, 1, 0))
    assert (p @ q).as_permutation() == (0, 2, 1)
    assert p.apply(vec([1, 2, 3])) == vec([3, 1, 2])
    assert Matrix.from_rows([[0, 1], [1, 0]]).as_permutation() == (1, 0)
    assert Matrix.from_rows([[1, 1], [0, 1]]).as_permutation() is None


def test_inverse_and_nullspace():
    m = Matrix.from_rows([[2, 1], [1, 1]])
    assert (m @ m.inverse()) == Matrix.identity(2)
    n = Matrix.from_rows([[1, 1, 0], [0, 0, 1]])
    ns = n.nullspace()
    assert len(ns) == 1
    assert n.apply(ns[0]) == vec([0, 0])


# ---------------------------------------------------------------------------
# tensor_product
# ---------------------------------------------------------------------------


def test_tensor_identity():
    assert tensor_product(Matrix.identity(2), Matrix.identity(2)) == Matrix.identity(4)


def test_tensor_scalar():
    c = Matrix.from_rows([[F(3, 7)]])
    m = Matrix.from_rows([[1, 2], [3, 4]])
    assert tensor_product(c, m) == m.scale(F(3, 7))


def test_tensor_builds_swap():
    # P = sum_{ij} (e_j e_i^T) x (e_i e_j^T); check the action on all four
    # basis vectors of R^2 x R^2 against the defining exchange rule.
    d = 2
    P = Matrix.zeros(4, 4)
    for i in range(d):
        for j in range(d):
            eij = Matrix.zeros(d, d)
            eji = Matrix.zeros(d, d)
            rows_ij = [[1 if (r, c) == (j, i) else 0 for c in range(d)] for r in range(d)]
            rows_ji = [[1 if (r, c) == (i, j) else 0 for c in range(d)] for r in range(d)]
            P = P + tensor_product(Matrix.from_rows(rows_ij), Matrix.from_rows(rows_ji))
    for i in range(d):
        for j in range(d):
            image = P.apply(kron_vec(unit(d, i), unit(d, j)))
            assert image == kron_vec(unit(d, j), unit(d, i))
    assert P == swap_matrix(d)


def test_tensor_mixed_product_property():
    rng = random.Random(7)
    for _ in range(20):
        def rnd(r, c):
            return Matrix.from_rows([[F(rng.randint(-3, 3), rng.randint(1, 3))
                                      for _ in range(c)] for _ in range(r)])
        a, c = rnd(2, 3), rnd(3, 2)
        b, d = rnd(2, 2), rnd(2, 3)
        assert tensor_product(a, b) @ tensor_product(c, d) == \
            tensor_product(a @ c, b @ d)


# ---------------------------------------------------------------------------
# fixed_subspace
# ---------------------------------------------------------------------------


def test_fixed_subspace_identity():
    s = fixed_subspace(Matrix.identity(3))
    assert s.dim == 3


@pytest.mark.parametrize("d,expected", [(2, 3), (3, 6)])
def test_fixed_subspace_swap_dimension(d, expected):
    s = fixed_subspace(swap_matrix(d))
    assert s.dim == expected  # d(d+1)/2
    m = swap_matrix(d)
    for b in s.basis:
        assert m.apply(b) == b
    # independent check: dim of eigenvalue-1 space = n - rank(m - I)
    n = d * d
    assert s.dim == n - (m - Matrix.identity(n)).rank()


# ---------------------------------------------------------------------------
# hull_membership (+ independent feasibility oracle)
# ---------------------------------------------------------------------------


def caratheodory_member(p, verts):
    """Independent oracle: p in conv(verts) iff some affinely independent
    subset of size <= dim+1 contains it with nonnegative barycentrics."""
    dim = len(p)
    for k in range(1, min(len(verts), dim + 1) + 1):
        for sub in combinations(verts, k):
            A = Matrix.from_rows([[v[i] for v in sub] for i in range(dim)]
                                 + [[F(1)] * k])
            aug = Matrix.from_rows(
                [[v[i] for v in sub] + [p[i]] for i in range(dim)]
                + [[F(1)] * k + [F(1)]])
            if A.rank() != aug.rank():
                continue
            if A.rank() < k:
                continue  # affinely dependent subset; a smaller one covers it
            sol = _solve_exact(A, list(p) + [F(1)])
            if sol is not None and all(x >= 0 for x in sol):
                return True
    return False


def _solve_exact(A, b):
    rows = [list(r) + [bv] for r, bv in zip(A.to_rows(), b)]
    n = A.cols
    m = len(rows)
    piv = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * p_ for a, p_ in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    sol = [F(0)] * n
    for i, c in enumerate(piv):
        sol[c] = rows[i][n]
    return sol


def test_hull_vertex_and_midpoint():
    poly = simplex_poly(3)
    assert hull_membership(unit(3, 0), poly)
    mid = vec_mid(unit(3, 0), unit(3, 1))
    assert hull_membership(mid, poly)
    assert not hull_membership(vec([1, 1, -1]), poly)


def vec_mid(a, b):
    return tuple((x + y) / 2 for x, y in zip(a, b))


def test_two_bit_average_not_in_diagonal_hull():
    # ([01] + [10]) / 2 lies outside conv{[00], [11]}
    v00 = kron_vec(unit(2, 0), unit(2, 0))
    v11 = kron_vec(unit(2, 1), unit(2, 1))
    v01 = kron_vec(unit(2, 0), unit(2, 1))
    v10 = kron_vec(unit(2, 1), unit(2, 0))
    avg = vec_mid(v01, v10)
    assert not hull_membership(avg, Polytope(4, (v00, v11)))
    assert hull_membership(avg, pair_simplex(2))


def test_hull_membership_vs_caratheodory_oracle():
    rng = random.Random(123)
    agree = 0
    for _ in range(100):
        dim = rng.randint(2, 6)
        nverts = rng.randint(dim, 10)
        verts = [tuple(F(rng.randint(-4, 4), rng.randint(1, 2))
                       for _ in range(dim)) for _ in range(nverts)]
        if rng.random() < 0.5:
            w = [F(rng.randint(0, 3)) for _ in verts]
            tot = sum(w) or F(1)
            p = tuple(sum((wi * v[i] for wi, v in zip(w, verts)), F(0)) / tot
                      for i in range(dim))
        else:
            p = tuple(F(rng.randint(-5, 5), rng.randint(1, 2))
                      for _ in range(dim))
        got = hull_membership(p, Polytope(dim, tuple(verts)))
        want = caratheodory_member(p, verts)
        assert got == want
        agree += 1
    assert agree == 100


# ---------------------------------------------------------------------------
# double description round trips
# ---------------------------------------------------------------------------


def test_facets_of_square():
    square = Polytope(2, (vec([1, 1]), vec([-1, 1]), vec([-1, -1]), vec([1, -1])))
    eqs, ineqs = polytope_facets(square)
    assert eqs == []
    assert len(ineqs) == 4
    for a, c in ineqs:
        vals = [sum(ai * vi for ai, vi in zip(a, v)) for v in square.vertices]
        assert max(vals) == c  # supporting
        assert sum(1 for t in vals if t == c) == 2  # a facet touches 2 vertices


def test_h_to_v_cube():
    one = F(1)
    ineqs = []
    for i in range(3):
        a = [F(0)] * 3
        a[i] = F(1)
        ineqs.append((tuple(a), one))
        a2 = [F(0)] * 3
        a2[i] = F(-1)
        ineqs.append((tuple(a2), one))
    verts = enumerate_vertices(ineqs, [], 3)
    assert len(verts) == 8
    assert all(all(abs(x) == 1 for x in v) for v in verts)


def test_v_h_v_roundtrip_cross_polytope():
    verts = []
    for i in range(3):
        for s in (1, -1):
            v = [F(0)] * 3
            v[i] = F(s)
            verts.append(tuple(v))
    poly = Polytope(3, tuple(verts))
    eqs, ineqs = polytope_facets(poly)
    assert len(ineqs) == 8
    back = enumerate_vertices(ineqs, eqs, 3)
    assert sorted(back) == sorted(verts)


def test_lower_dimensional_polytope_roundtrip():
    # a segment embedded in R^3
    poly = Polytope(3, (vec([1, 0, 2]), vec([0, 1, 2])))
    eqs, ineqs = polytope_facets(poly)
    assert len(eqs) == 2  # affine hull has codimension 2
    back = enumerate_vertices(ineqs, eqs, 3)
    assert sorted(back) == sorted(poly.vertices)


def test_empty_slice_gives_empty_vertex_list():
    poly = simplex_poly(2)
    # subspace orthogonal to the affine hull of the simplex
    sub = Subspace(2, (vec([1, -1]),))
    sliced = vertices_of_slice(poly, sub)
    assert sliced.vertices == ()


def test_slice_by_full_space_returns_vertices():
    poly = pair_simplex(2)
    full = Subspace(4, tuple(unit(4, i) for i in range(4)))
    sliced = vertices_of_slice(poly, full)
    assert sorted(sliced.vertices) == sorted(poly.vertices)


def test_two_bit_symmetric_slice():
    poly = pair_simplex(2)
    sub = fixed_subspace(swap_matrix(2))
    sliced = vertices_of_slice(poly, sub)
    v00 = kron_vec(unit(2, 0), unit(2, 0))
    v11 = kron_vec(unit(2, 1), unit(2, 1))
    avg = vec_mid(kron_vec(unit(2, 0), unit(2, 1)), kron_vec(unit(2, 1), unit(2, 0)))
    assert sorted(sliced.vertices) == sorted([v00, v11, avg])


def brute_force_slice_vertices(d):
    """Oracle: basic feasible solutions of the symmetric-slice system for a
    two-party d-simplex pair, filtered to extreme points."""
    n = d * d
    sw = swap_matrix(d)
    eq_rows = [[F(1)] * n]
    diff = sw - Matrix.identity(n)
    eq_rows += [list(r) for r in diff.to_rows()]
    A = Matrix.from_rows(eq_rows)
    rank = A.rank()
    cands = set()
    for support in combinations(range(n), rank):
        Asub = Matrix.from_rows([[row[c] for c in support] for row in eq_rows])
        b = [F(1)] + [F(0)] * (len(eq_rows) - 1)
        sol = _solve_exact(Asub, b)
        if sol is None or any(x < 0 for x in sol):
            continue
        full = [F(0)] * n
        for c, x in zip(support, sol):
            full[c] = x
        cands.add(tuple(full))
    return extreme_points(sorted(cands))


def test_two_trit_symmetric_slice_matches_bruteforce():
    d = 3
    poly = pair_simplex(d)
    sliced = vertices_of_slice(poly, fixed_subspace(swap_matrix(d)))
    assert len(sliced.vertices) == 6  # 3 diagonal + 3 averaged pairs
    oracle = brute_force_slice_vertices(d)
    assert sorted(sliced.vertices) == sorted(oracle)


def test_slice_vertices_are_extremal_and_inside():
    d = 3
    poly = pair_simplex(d)
    sub = fixed_subspace(swap_matrix(d))
    sliced = vertices_of_slice(poly, sub)
    for i, v in enumerate(sliced.vertices):
        assert sub.contains(v)
        assert hull_membership(v, poly)
        others = sliced.vertices[:i] + sliced.vertices[i + 1:]
        assert not hull_membership(v, Polytope(poly.ambient_dim, others))


# ---------------------------------------------------------------------------
# matroid components
# ---------------------------------------------------------------------------


def test_matroid_standard_basis():
    vs = [unit(4, i) for i in range(4)]
    assert matroid_components(vs) == [[0], [1], [2], [3]]


def test_matroid_dependent_triple():
    vs = [unit(2, 0), unit(2, 1), vec([1, 1])]
    assert matroid_components(vs) == [[0, 1, 2]]


def test_matroid_two_bit_slice_blocks():
    v00 = kron_vec(unit(2, 0), unit(2, 0))
    v11 = kron_vec(unit(2, 1), unit(2, 1))
    avg = vec_mid(kron_vec(unit(2, 0), unit(2, 1)), kron_vec(unit(2, 1), unit(2, 0)))
    assert matroid_components([v00, v11, avg]) == [[0], [1], [2]]


def all_partitions(idxs):
    if not idxs:
        yield []
        return
    first, rest = idxs[0], idxs[1:]
    for sub in all_partitions(rest):
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1:]
        yield [[first]] + sub


def is_direct_sum(vectors, blocks):
    total = rank_of_vectors(vectors)
    return sum(rank_of_vectors([vectors[i] for i in b]) for b in blocks) == total


def test_matroid_blocks_are_finest_direct_sum():
    rng = random.Random(99)
    for _ in range(60):
        dim = rng.randint(2, 4)
        nv = rng.randint(2, 6)
        vs = []
        for _ in range(nv):
            v = [F(rng.randint(-2, 2)) for _ in range(dim)]
            if all(x == 0 for x in v):
                v[rng.randrange(dim)] = F(1)
            vs.append(tuple(v))
        blocks = matroid_components(vs)
        assert is_direct_sum(vs, blocks)
        best = max((p for p in all_partitions(list(range(nv)))
                    if is_direct_sum(vs, p)), key=len)
        assert len(blocks) == len(best)


def test_matroid_rejects_zero_vectors():
    with pytest.raises(ValueError):
        matroid_components([vec([0, 0])])


# ---------------------------------------------------------------------------
# misc helpers
# ---------------------------------------------------------------------------


def test_primitive_normalization():
    assert primitive(vec([F(1, 2), F(-1, 3)])) == vec([3, -2])
    assert primitive(vec([-2, -4])) == vec([1, 2])


def test_cone_extreme_rays_quadrant():
    lin, rays = cone_extreme_rays([vec([1, 0]), vec([0, 1])])
    assert lin == []
    assert sorted(rays) == sorted([vec([1, 0]), vec([0, 1])])


def test_cone_with_lineality():
    lin, rays = cone_extreme_rays([vec([1, 0, 0])])
    assert len(lin) == 2
    assert rays == [vec([1, 0, 0])]
