"""Half-space model of bounded rational polytopes.

A polytope is the intersection of N half-spaces ``<eta_i, x> <= kappa_i``
with primitive integer outward conormals eta_i and rational support
numbers kappa_i.  Construction validates that the data defines a bounded,
nonempty, full-dimensional polytope in which every half-space contributes
a genuine facet; redundant half-spaces are an error, not silently dropped.

Vertex enumeration is an exhaustive scan over n-element facet subsets
with invertible conormal matrix, an O(C(N, n)) bound that is perfectly
fine at this package's scale (n <= 4, N <= 14 or so).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .errors import NotSimpleError, PolytopeError
from .linalg import (
    IntVec,
    Vec,
    det,
    dot,
    frac,
    int_vec,
    invert,
    mat_vec,
    nullspace,
    primitive,
    rank,
    solve_square,
    transpose,
    unimodular_inverse,
    vec,
)


@dataclass(frozen=True)
class Vertex:
    """An extreme point together with the facets supporting it."""

    point: Vec
    basis: tuple[int, ...]


@dataclass(frozen=True)
class Face:
    """A nonempty face, keyed by the set of ALL facets containing it."""

    index_set: frozenset[int]
    vertex_ids: tuple[int, ...]
    dimension: int


def default_labels(n_facets: int) -> tuple[str, ...]:
    return tuple(f"F{i+1}" for i in range(n_facets))


def _check_bounded(conormals: Sequence[IntVec], n: int) -> None:
    if rank(conormals) < n:
        raise PolytopeError("unbounded: conormals do not span the ambient space")
    # The recession cone is pointed (full conormal rank), so if it is
    # nontrivial it has an extreme ray vanishing on some rank n-1 subset.
    for S in combinations(range(len(conormals)), n - 1):
        rows = [conormals[i] for i in S]
        if rows and rank(rows) != n - 1:
            continue
        kernel = nullspace(rows, n)
        if len(kernel) != 1:
            continue
        ray = kernel[0]
        for cand in (ray, tuple(-x for x in ray)):
            if all(dot(eta, cand) <= 0 for eta in conormals):
                raise PolytopeError(
                    f"unbounded: recession direction {tuple(cand)}"
                )


def _enumerate_basic_points(
    conormals: Sequence[IntVec], support: Sequence[Fraction], n: int
) -> dict[Vec, frozenset[int]]:
    """All feasible basic points, mapped to their full active facet sets."""
    N = len(conormals)
    points: dict[Vec, frozenset[int]] = {}
    for J in combinations(range(N), n):
        A = [conormals[j] for j in J]
        x = solve_square(A, [support[j] for j in J])
        if x is None:
            continue
        if x in points:
            continue
        active = []
        feasible = True
        for i in range(N):
            s = support[i] - dot(conormals[i], x)
            if s < 0:
                feasible = False
                break
            if s == 0:
                active.append(i)
        if feasible:
            points[x] = frozenset(active)
    return points


@dataclass(frozen=True, eq=False)
class HPolytope:
    dim: int
    conormals: tuple[IntVec, ...]
    support: tuple[Fraction, ...]
    labels: tuple[str, ...] = ()
    name: str | None = None

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise PolytopeError("dimension must be at least 1")
        conormals = tuple(int_vec(v) for v in self.conormals)
        support = tuple(frac(k) for k in self.support)
        if len(conormals) != len(support):
            raise PolytopeError("conormal and support counts differ")
        if len(conormals) < n + 1:
            raise PolytopeError("a bounded n-polytope needs at least n+1 facets")
        for v in conormals:
            if len(v) != n:
                raise PolytopeError(f"conormal {v} has wrong length")
            if primitive(v) != v:
                raise PolytopeError(f"conormal {v} is not primitive")
        labels = tuple(self.labels) if self.labels else default_labels(len(conormals))
        if len(labels) != len(conormals):
            raise PolytopeError("label count does not match facet count")
        if len(set(labels)) != len(labels):
            raise PolytopeError("facet labels must be unique")
        seen = {}
        for i, (eta, k) in enumerate(zip(conormals, support)):
            if (eta, k) in seen:
                raise PolytopeError(f"duplicate half-space at facets {seen[(eta, k)]} and {i}")
            seen[(eta, k)] = i
        object.__setattr__(self, "conormals", conormals)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "labels", labels)
        _check_bounded(conormals, n)
        pts = _enumerate_basic_points(conormals, support, n)
        if not pts:
            raise PolytopeError("empty polytope")
        pt_list = list(pts)
        if rank([tuple(frac(a) - frac(b) for a, b in zip(p, pt_list[0])) for p in pt_list]) < n:
            raise PolytopeError("polytope is not full-dimensional")
        for i in range(len(conormals)):
            on_facet = [p for p, act in pts.items() if i in act]
            if not on_facet:
                raise PolytopeError(f"facet {labels[i]} is redundant (empty)")
            diffs = [tuple(frac(a) - frac(b) for a, b in zip(p, on_facet[0])) for p in on_facet]
            if rank(diffs) < n - 1:
                raise PolytopeError(
                    f"facet {labels[i]} does not span a hyperplane (redundant half-space)"
                )
        object.__setattr__(self, "_basic", pts)

    # equality is geometric: same facet data in the same order; labels and
    # name are presentation only
    def __eq__(self, other):
        if not isinstance(other, HPolytope):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.conormals == other.conormals
            and self.support == other.support
        )

    def __hash__(self):
        return hash((self.dim, self.conormals, self.support))

    @property
    def n_facets(self) -> int:
        return len(self.conormals)

    def label_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no facet labeled {label!r}") from None

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        """All vertices, sorted by coordinates; raises if not simple."""
        verts = []
        for point, active in self._basic.items():
            if len(active) != self.dim:
                raise NotSimpleError(
                    f"vertex {tuple(point)} lies on {len(active)} facets",
                    point=point,
                    active=active,
                )
            verts.append(Vertex(point, tuple(sorted(active))))
        verts.sort(key=lambda v: v.point)
        return tuple(verts)

    def is_simple(self) -> bool:
        return all(len(active) == self.dim for active in self._basic.values())

    def is_smooth(self) -> bool:
        """Simple, and the active conormals at each vertex form a lattice basis."""
        if not self.is_simple():
            return False
        for v in self.vertices:
            if abs(det([self.conormals[i] for i in v.basis])) != 1:
                return False
        return True

    @cached_property
    def face_lattice(self) -> dict[frozenset[int], Face]:
        """All nonempty faces keyed by canonical (maximal) facet index set.

        Includes the polytope itself under the empty key.  Requires a
        simple polytope, where dimension = n - |canonical index set|.
        """
        verts = self.vertices
        faces: dict[frozenset[int], Face] = {}
        for vid, v in enumerate(verts):
            basis = v.basis
            for r in range(self.dim + 1):
                for S in combinations(basis, r):
                    key = frozenset(S)
                    if key in faces:
                        continue
                    ids = [w for w, u in enumerate(verts) if key <= set(u.basis)]
                    canonical = frozenset.intersection(
                        *[frozenset(verts[w].basis) for w in ids]
                    )
                    if canonical == key:
                        faces[key] = Face(key, tuple(ids), self.dim - len(key))
        return faces

    def face(self, index_set) -> Face | None:
        """The face cut out by the given facets, or None when empty.

        The returned Face is keyed by its canonical index set, which may
        be strictly larger than the requested one.
        """
        req = frozenset(index_set)
        ids = [
            w
            for w, u in enumerate(self.vertices)
            if req <= set(u.basis)
        ]
        if not ids:
            return None
        canonical = frozenset.intersection(
            *[frozenset(self.vertices[w].basis) for w in ids]
        )
        return self.face_lattice[canonical]

    def faces_of_dimension(self, k: int) -> list[Face]:
        return sorted(
            (f for f in self.face_lattice.values() if f.dimension == k),
            key=lambda f: tuple(sorted(f.index_set)),
        )

    @cached_property
    def _vertex_pattern(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(v.basis) for v in self.vertices)

    def with_support(self, new_support) -> "HPolytope":
        return HPolytope(self.dim, self.conormals, tuple(frac(k) for k in new_support), self.labels, self.name)

    def in_same_chamber(self, new_support) -> bool:
        """Same smooth combinatorial type at the new support numbers.

        Checks the vertex pattern at the new point and at the segment
        midpoint.  Pattern equality at sample points is necessary but not
        literally sufficient for membership in the same connected
        component; with the midpoint included this is a sufficient
        practical test at this package's scale.
        """
        if not self.is_smooth():
            raise PolytopeError("chamber test requires a smooth polytope")
        new_support = vec(new_support)
        if len(new_support) != self.n_facets:
            raise PolytopeError("support vector has wrong length")
        mid = tuple((a + b) / 2 for a, b in zip(self.support, new_support))
        for kappa in (new_support, mid):
            try:
                other = self.with_support(kappa)
            except PolytopeError:
                return False
            if not other.is_smooth():
                return False
            if other._vertex_pattern != self._vertex_pattern:
                return False
        return True

    @cached_property
    def _chamber_delta(self) -> Fraction:
        """Uniform box radius: any support perturbation bounded by this
        entrywise stays inside the chamber."""
        if not self.is_smooth():
            raise PolytopeError("chamber radius requires a smooth polytope")
        n, N = self.dim, self.n_facets
        min_gap = None
        max_sens = Fraction(0)
        for J in combinations(range(N), n):
            A = [self.conormals[j] for j in J]
            Minv = invert(A)
            if Minv is None:
                continue
            x = mat_vec(Minv, [self.support[j] for j in J])
            slacks = {
                i: self.support[i] - dot(self.conormals[i], x)
                for i in range(N)
                if i not in J
            }
            for i, s in slacks.items():
                coeffs = mat_vec(transpose(Minv), self.conormals[i])
                sens = sum(abs(c) for c in coeffs)
                if sens > max_sens:
                    max_sens = sens
            if all(s > 0 for s in slacks.values()):
                gap = min(slacks.values())
            elif any(s < 0 for s in slacks.values()):
                gap = max(-s for s in slacks.values() if s < 0)
            else:
                raise PolytopeError("degenerate basic point on a smooth polytope")
            if min_gap is None or gap < min_gap:
                min_gap = gap
        assert min_gap is not None and min_gap > 0
        return min_gap / (2 * (1 + max_sens))

    def chamber_radius(self) -> tuple[Fraction, ...]:
        """Per-facet safe perturbation radii (uniform by construction)."""
        d = self._chamber_delta
        return (d,) * self.n_facets

    def translate(self, xi) -> "HPolytope":
        xi = vec(xi)
        new_support = tuple(
            k + dot(eta, xi) for eta, k in zip(self.conormals, self.support)
        )
        return HPolytope(self.dim, self.conormals, new_support, self.labels, self.name)

    def apply_lattice_map(self, T) -> "HPolytope":
        """Transform conormals by the unimodular matrix T (support fixed).

        Points transform by the inverse transpose, so all lattice data
        (smoothness, face pattern, volumes) is preserved.
        """
        Tm = [int_vec(row) for row in T]
        if abs(det(Tm)) != 1:
            raise PolytopeError("lattice map must be unimodular")
        new_conormals = tuple(int_vec(mat_vec(Tm, eta)) for eta in self.conormals)
        return HPolytope(self.dim, new_conormals, self.support, self.labels, self.name)

    def permute_facets(self, order: Sequence[int]) -> "HPolytope":
        """Reorder facets; order[i] is the old index placed at position i."""
        if sorted(order) != list(range(self.n_facets)):
            raise PolytopeError("order must be a permutation of facet indices")
        return HPolytope(
            self.dim,
            tuple(self.conormals[i] for i in order),
            tuple(self.support[i] for i in order),
            tuple(self.labels[i] for i in order),
            self.name,
        )

    def facet_matching(self, other: "HPolytope") -> tuple[int, ...] | None:
        """Permutation sending this polytope's facets onto other's by
        exact (conormal, support) equality, or None."""
        if self.dim != other.dim or self.n_facets != other.n_facets:
            return None
        lookup = {
            (eta, k): i
            for i, (eta, k) in enumerate(zip(other.conormals, other.support))
        }
        out = []
        for eta, k in zip(self.conormals, self.support):
            j = lookup.get((eta, k))
            if j is None:
                return None
            out.append(j)
        return tuple(out)

    def __repr__(self):
        nm = f" {self.name!r}" if self.name else ""
        return f"<HPolytope{nm} dim={self.dim} facets={self.n_facets}>"


def from_halfspaces_pruned(
    dim: int,
    conormals: Sequence[Sequence[int]],
    support: Sequence,
    labels: Sequence[str] | None = None,
    name: str | None = None,
) -> tuple[HPolytope, list[int]]:
    """Build a polytope dropping redundant half-spaces.

    Returns the polytope and the list of kept input indices.  A bounded
    full-dimensional polytope equals the intersection of its
    facet-defining half-spaces, so dropping non-facet-defining ones does
    not change the point set.
    """
    n = dim
    conormals = [int_vec(v) for v in conormals]
    support = [frac(k) for k in support]
    # drop exact duplicates and dominated copies of the same conormal
    keep_map: dict[IntVec, int] = {}
    order: list[int] = []
    for i, eta in enumerate(conormals):
        j = keep_map.get(eta)
        if j is None:
            keep_map[eta] = i
            order.append(i)
        elif support[i] < support[j]:
            keep_map[eta] = i
            order[order.index(j)] = i
    idx = sorted(order)
    _check_bounded([conormals[i] for i in idx], n)
    pts = _enumerate_basic_points([conormals[i] for i in idx], [support[i] for i in idx], n)
    if not pts:
        raise PolytopeError("empty polytope")
    kept = []
    for pos, i in enumerate(idx):
        on_facet = [p for p, act in pts.items() if pos in act]
        if not on_facet:
            continue
        diffs = [
            tuple(frac(a) - frac(b) for a, b in zip(p, on_facet[0]))
            for p in on_facet
        ]
        if rank(diffs) == n - 1:
            kept.append(i)
    poly = HPolytope(
        dim,
        tuple(conormals[i] for i in kept),
        tuple(support[i] for i in kept),
        tuple(labels[i] for i in kept) if labels else (),
        name,
    )
    return poly, kept
