"""Exact volumes, moments and skeleton barycenters.

Inside a chamber every vertex is a linear function of the support vector
kappa (solve the active system once, at the base kappa, and keep the
matrix).  A pulling triangulation with combinatorics fixed at the base
kappa therefore turns the volume and any first moment into honest
polynomials in kappa, valid on the whole chamber.  All identities this
package decides (mass linearity, symmetric facets, the skeleton
barycenter characterizations) are exact polynomial identities in these
variables.

Face measures use the measure induced by the integer lattice of the
face's direction space: integrate in coordinates given by a lattice
basis of that space.  A face's direction space depends only on its
conormals, so face measures are again polynomials in kappa.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Sequence

from .errors import PolytopeError
from .linalg import (
    Vec,
    det,
    frac,
    integer_kernel_basis,
    invert,
    mat_vec,
    rank,
    transpose,
    vec,
    vec_sub,
)
from .poly import MultiPoly
from .polytope import Face, HPolytope


@dataclass(frozen=True)
class ParamVertex:
    """A vertex as a linear map kappa -> point.

    rows is an n x N rational matrix supported on the columns of the
    vertex basis; evaluating at the base kappa reproduces the vertex.
    """

    basis: tuple[int, ...]
    rows: tuple[Vec, ...]

    def at(self, kappa: Sequence) -> Vec:
        return mat_vec(self.rows, kappa)

    def coordinate_polys(self, nvars: int) -> tuple[MultiPoly, ...]:
        return tuple(MultiPoly.linear(row) for row in self.rows)


@dataclass(frozen=True)
class Triangulation:
    """Simplices as vertex-id tuples with orientation signs frozen at the
    base kappa."""

    simplices: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]


def param_vertices(poly: HPolytope) -> tuple[ParamVertex, ...]:
    cached = poly.__dict__.get("_param_vertices")
    if cached is not None:
        return cached
    out = []
    N = poly.n_facets
    for v in poly.vertices:
        A = [poly.conormals[j] for j in v.basis]
        Ainv = invert(A)
        assert Ainv is not None
        rows = []
        for r in range(poly.dim):
            row = [Fraction(0)] * N
            for pos, j in enumerate(v.basis):
                row[j] = Ainv[r][pos]
            rows.append(tuple(row))
        pv = ParamVertex(v.basis, tuple(rows))
        assert pv.at(poly.support) == v.point
        out.append(pv)
    result = tuple(out)
    object.__setattr__(poly, "_param_vertices", result)
    return result


def _face_children(poly: HPolytope, face: Face) -> list[Face]:
    """Facets of a face: canonical index grows by exactly one."""
    out = []
    for key, g in poly.face_lattice.items():
        if g.dimension == face.dimension - 1 and face.index_set < key:
            out.append(g)
    return sorted(out, key=lambda f: tuple(sorted(f.index_set)))


def _pulling_simplices(poly: HPolytope, face: Face, cache: dict) -> list[tuple[int, ...]]:
    """Pulling triangulation of a face, anchored at its smallest vertex.

    Vertex ids refer to poly.vertices, which is sorted by coordinates, so
    the smallest id is the lexicographically smallest point.
    """
    key = face.index_set
    if key in cache:
        return cache[key]
    if face.dimension == 0:
        result = [face.vertex_ids]
    else:
        anchor = min(face.vertex_ids)
        result = []
        for g in _face_children(poly, face):
            if anchor in g.vertex_ids:
                continue
            for simplex in _pulling_simplices(poly, g, cache):
                result.append(simplex + (anchor,))
    cache[key] = result
    return result


def triangulate(poly: HPolytope) -> Triangulation:
    """Pulling triangulation of the whole polytope, deterministic."""
    whole = poly.face_lattice[frozenset()]
    simplices = tuple(_face_simplices(poly, whole))
    verts = poly.vertices
    signs = []
    for s in simplices:
        base = verts[s[0]].point
        M = [vec_sub(verts[i].point, base) for i in s[1:]]
        d = det(M)
        if d == 0:
            raise PolytopeError("degenerate simplex in triangulation")
        signs.append(1 if d > 0 else -1)
    return Triangulation(simplices, tuple(signs))


def _det_poly(rows: Sequence[Sequence[MultiPoly]]) -> MultiPoly:
    """Determinant of a small matrix of polynomials, by Leibniz expansion."""
    n = len(rows)
    nvars = rows[0][0].nvars
    total = MultiPoly.zero(nvars)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = MultiPoly.constant(nvars, -1 if inv % 2 else 1)
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + term
    return total


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _whole_face(poly: HPolytope) -> Face:
    return poly.face_lattice[frozenset()]


def volume_poly(poly: HPolytope) -> MultiPoly:
    """Exact volume of the polytope as a polynomial in kappa (degree <= n)."""
    vp = poly.__dict__.get("_volume_poly")
    if vp is None:
        vp, _ = face_measure_polys(poly, _whole_face(poly))
        object.__setattr__(poly, "_volume_poly", vp)
    return vp


def moment_poly(poly: HPolytope, H: Sequence) -> MultiPoly:
    """Exact first moment of <H, x> over the polytope (degree <= n+1).

    The integrand is affine, so per simplex the integral is the simplex
    volume times the average of <H, x> over the n+1 vertices.
    """
    _, mom = face_measure_polys(poly, _whole_face(poly), H)
    return mom


def _h_row(pv: ParamVertex, H: Sequence) -> Vec:
    """Row vector of <H, x(kappa)> as a linear form in kappa."""
    Hv = vec(H)
    ncols = len(pv.rows[0])
    return tuple(
        sum((Hv[r] * pv.rows[r][c] for r in range(len(pv.rows))), Fraction(0))
        for c in range(ncols)
    )


def _coordinate_moment_polys(poly: HPolytope) -> tuple[MultiPoly, ...]:
    coords = poly.__dict__.get("_coord_moment_polys")
    if coords is None:
        n = poly.dim
        coords = tuple(
            moment_poly(poly, tuple(1 if r == c else 0 for r in range(n)))
            for c in range(n)
        )
        object.__setattr__(poly, "_coord_moment_polys", coords)
    return coords


def cached_moment_poly(poly: HPolytope, H: Sequence) -> MultiPoly:
    """Moment of <H, x> assembled from per-coordinate moments, which are
    computed once per polytope (the moment is linear in H)."""
    key = tuple(frac(h) for h in H)
    store = poly.__dict__.get("_moment_polys")
    if store is None:
        store = {}
        object.__setattr__(poly, "_moment_polys", store)
    if key not in store:
        total = MultiPoly.zero(poly.n_facets)
        for h, coord in zip(key, _coordinate_moment_polys(poly)):
            if h != 0:
                total = total + coord * h
        store[key] = total
    return store[key]


def volume(poly: HPolytope) -> Fraction:
    return volume_poly(poly).eval(poly.support)


def center_of_mass(poly: HPolytope) -> Vec:
    """Exact center of mass at the base kappa."""
    m, moment = face_measure(poly, _whole_face(poly))
    if m == 0:
        raise PolytopeError("zero volume")
    return tuple(t / m for t in moment)


# --- faces and skeletons ----------------------------------------------------


def direction_lattice_basis(poly: HPolytope, face: Face) -> list[tuple[int, ...]]:
    """Integer lattice basis of the face's direction space.

    The direction space is cut out by the face's conormals alone, so it
    is the same for every kappa in the chamber.
    """
    rows = [poly.conormals[i] for i in sorted(face.index_set)]
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(poly.dim)) for j in range(poly.dim)]
    B = integer_kernel_basis(rows, poly.dim)
    assert len(B) == face.dimension, "direction space dimension mismatch"
    return B


def _face_chart(poly: HPolytope, face: Face) -> dict[int, tuple[Vec, ...]]:
    """y-coordinates of each face vertex as linear maps in kappa.

    y solves  x(kappa) = x0(kappa) + B y  where B is the lattice basis of
    the direction space, so the chart identifies the face's lattice
    measure with Lebesgue measure in y.
    """
    charts = poly.__dict__.get("_face_charts")
    if charts is None:
        charts = {}
        object.__setattr__(poly, "_face_charts", charts)
    if face.index_set in charts:
        return charts[face.index_set]
    k = face.dimension
    B = direction_lattice_basis(poly, face)
    pvs = param_vertices(poly)
    base = pvs[face.vertex_ids[0]]
    Bcols = transpose(B)  # n rows, k columns
    sel: list[int] = []
    for i in range(poly.dim):
        if rank([Bcols[j] for j in sel + [i]]) > len(sel):
            sel.append(i)
        if len(sel) == k:
            break
    Binv = invert([Bcols[i] for i in sel])
    assert Binv is not None
    N = poly.n_facets
    out = {}
    for vid in face.vertex_ids:
        diff_rows = [vec_sub(pvs[vid].rows[i], base.rows[i]) for i in sel]
        out[vid] = tuple(
            tuple(
                sum((Binv[r][c] * diff_rows[c][col] for c in range(k)), Fraction(0))
                for col in range(N)
            )
            for r in range(k)
        )
    charts[face.index_set] = out
    return out


def _face_simplices(poly: HPolytope, face: Face) -> list[tuple[int, ...]]:
    cache = poly.__dict__.get("_pulling_cache")
    if cache is None:
        cache = {}
        object.__setattr__(poly, "_pulling_cache", cache)
    return _pulling_simplices(poly, face, cache)


def _face_vol_polys(poly: HPolytope, face: Face) -> list[tuple[tuple[int, ...], MultiPoly]]:
    """Per-simplex lattice volume polynomials of a face, signs frozen at
    the base kappa."""
    cache = poly.__dict__.get("_face_vol_polys")
    if cache is None:
        cache = {}
        object.__setattr__(poly, "_face_vol_polys", cache)
    if face.index_set in cache:
        return cache[face.index_set]
    N = poly.n_facets
    k = face.dimension
    if k == 0:
        result = [(face.vertex_ids, MultiPoly.constant(N, 1))]
    else:
        y_of = _face_chart(poly, face)
        fact = _factorial(k)
        result = []
        for s in _face_simplices(poly, face):
            base_y = y_of[s[0]]
            rows_polys = [
                [MultiPoly.linear(vec_sub(y_of[vid][r], base_y[r])) for r in range(k)]
                for vid in s[1:]
            ]
            d = _det_poly(rows_polys)
            sign_val = d.eval(poly.support)
            if sign_val == 0:
                raise PolytopeError("degenerate simplex in face triangulation")
            result.append((s, d * Fraction(1 if sign_val > 0 else -1, fact)))
    cache[face.index_set] = result
    return result


def face_measure_polys(poly: HPolytope, face: Face, H: Sequence | None = None):
    """Lattice measure of a face, and optionally its <H, x> moment, as
    polynomials in kappa."""
    N = poly.n_facets
    pvs = param_vertices(poly)
    measure = MultiPoly.zero(N)
    mom = MultiPoly.zero(N) if H is not None else None
    for s, vol in _face_vol_polys(poly, face):
        measure = measure + vol
        if H is not None:
            avg = MultiPoly.zero(N)
            for vid in s:
                avg = avg + MultiPoly.linear(_h_row(pvs[vid], H))
            mom = mom + vol * (avg / len(s))
    return measure, mom


def face_measure(poly: HPolytope, face: Face) -> tuple[Fraction, Vec]:
    """Lattice k-volume of the face and its unnormalized coordinate moment
    (the integral of x over the face), both at the base kappa."""
    n = poly.dim
    verts = poly.vertices
    m = Fraction(0)
    moment = [Fraction(0)] * n
    for s, vol in _face_vol_polys(poly, face):
        v = vol.eval(poly.support)
        m += v
        for r in range(n):
            c = sum((verts[vid].point[r] for vid in s), Fraction(0)) / len(s)
            moment[r] += v * c
    return m, tuple(moment)


def _skeleton_coord_polys(poly: HPolytope, k: int):
    """Measure of the k-skeleton and its per-coordinate moments, cached
    once per polytope (the <H, x> moment is then linear in H)."""
    store = poly.__dict__.get("_skeleton_coord_polys")
    if store is None:
        store = {}
        object.__setattr__(poly, "_skeleton_coord_polys", store)
    if k not in store:
        n = poly.dim
        N = poly.n_facets
        pvs = param_vertices(poly)
        total_m = MultiPoly.zero(N)
        coords = [MultiPoly.zero(N)] * n
        for face in poly.faces_of_dimension(k):
            for s, vol in _face_vol_polys(poly, face):
                total_m = total_m + vol
                for c in range(n):
                    avg = [
                        sum((pvs[vid].rows[c][j] for vid in s), Fraction(0))
                        / len(s)
                        for j in range(N)
                    ]
                    coords[c] = coords[c] + vol * MultiPoly.linear(avg)
        store[k] = (total_m, tuple(coords))
    return store[k]


def skeleton_measure_polys(poly: HPolytope, k: int, H: Sequence):
    """Total lattice measure of the k-skeleton and total <H, x> moment over
    it, as exact polynomials in kappa."""
    if not 0 <= k <= poly.dim:
        raise ValueError("skeleton dimension out of range")
    key = (k, tuple(frac(h) for h in H))
    store = poly.__dict__.get("_skeleton_polys")
    if store is None:
        store = {}
        object.__setattr__(poly, "_skeleton_polys", store)
    if key not in store:
        total_m, coords = _skeleton_coord_polys(poly, k)
        total_mom = MultiPoly.zero(poly.n_facets)
        for h, coord in zip(key[1], coords):
            if h != 0:
                total_mom = total_mom + coord * h
        store[key] = (total_m, total_mom)
    return store[key]


def integrate_monomial(poly: HPolytope, exponents: Sequence[int]) -> Fraction:
    """Exact integral of prod_i x_i^{e_i} over the polytope at the base
    kappa.

    Per simplex, substitute x = sum_j lambda_j v_j and expand in the
    barycentric variables lambda_j; a barycentric monomial integrates in
    closed form:  int_S prod lambda^a = n! vol(S) prod(a_j!) / (n+|a|)!.
    """
    n = poly.dim
    if len(exponents) != n or any(e < 0 for e in exponents):
        raise ValueError("need one nonnegative exponent per coordinate")
    verts = poly.vertices
    tri = triangulate(poly)
    total = Fraction(0)
    for s in tri.simplices:
        base = verts[s[0]].point
        M = [vec_sub(verts[i].point, base) for i in s[1:]]
        vol = abs(det(M)) / _factorial(n)
        p = MultiPoly.constant(n + 1, 1)
        for coord, e in enumerate(exponents):
            lin = MultiPoly.linear([verts[vid].point[coord] for vid in s])
            for _ in range(e):
                p = p * lin
        for mono, c in p.terms:
            num = Fraction(_factorial(n), _factorial(n + sum(mono)))
            for a in mono:
                num *= _factorial(a)
            total += c * vol * num
    return total


def skeleton_barycenter(poly: HPolytope, k: int) -> Vec:
    """Barycenter of the union of all k-faces, in the lattice measure."""
    if not 0 <= k <= poly.dim:
        raise ValueError("skeleton dimension out of range")
    total_m = Fraction(0)
    total_mom = [Fraction(0)] * poly.dim
    for face in poly.faces_of_dimension(k):
        m, mom = face_measure(poly, face)
        total_m += m
        for r in range(poly.dim):
            total_mom[r] += mom[r]
    if total_m == 0:
        raise PolytopeError("zero skeleton measure")
    return tuple(t / total_m for t in total_mom)
