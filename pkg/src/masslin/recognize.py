"""Recognizers for the structured families and the classification
pipeline for 4-dimensional mass linear pairs.

A recognition certificate records how an input polytope matches one of
the constructors: which facets play which role, the recovered
constructor parameters, and a unimodular map plus translation carrying
the input into constructor coordinates.  reconstruct() reruns the
constructor on the recovered parameters and certificate_holds()
re-verifies the match, so a certificate is checkable evidence rather
than a bare claim.

classify4d() greedily blows a 4-dimensional mass linear pair down to a
terminal model, tags every blowdown step by the kind of face that had
been blown up (symmetric 2-face, cancelling-coefficient edge on a
symmetric facet, vertex, or other), and names the terminal family:

  * "a1"  segment bundle with 3-simplex fiber,
  * "a2"  segment bundle over a (triangle bundle over a segment),
  * "a3"  triangle bundle over a polygon,
  * "b"   double expansion of a polygon on which the functional is
          inessential with the four base-type facets asymmetric,

plus "inessential" and "zero" for functionals that never were essential
and "unclassified" when no structured family matches.  Replaying the
recorded trace as blowups on the terminal polytope reconstructs the
input exactly, and the support-number coefficients of the functional
are unchanged at every stage; both facts are asserted before a result
is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction

from .constructions import (
    Bundle121Spec,
    D2PolygonBundleSpec,
    YkBundleSpec,
    blowdown,
    blowup,
    bundle_121,
    bundle_D2_polygon,
    bundle_Yk,
    double_expansion,
    expansion,
)
from .errors import PolytopeError, StructuralInconsistency
from .linalg import (
    IntVec,
    Vec,
    det,
    dot,
    int_vec,
    integer_kernel_basis,
    mat_mul,
    mat_vec,
    rank,
    unimodular_inverse,
    vec,
    zero_vec,
)
from .masslinear import (
    InessentialWitness,
    MassLinearReport,
    equivalence_classes,
    is_inessential,
    mass_linear_test,
)
from .measure import direction_lattice_basis
from .polytope import Face, HPolytope


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class RecognitionCertificate:
    """How an input polytope matches one constructor family.

    base / fiber list the input facet indices playing the base(-type)
    and fiber(-type) roles.  facet_order lists input facet indices in
    the constructor's facet order, so that

        input.apply_lattice_map(transform).translate(translation)
             .permute_facets(facet_order) == reconstruct(certificate)

    params carries the recovered constructor spec for the bundle
    families; core, core_expanded and fold carry the recovered core
    polytope and expansion data for the expansion families.  A segment
    bundle whose fiber is not a simplex has no constructor parameters
    and only the role assignment is recorded.
    """

    family: str
    base: tuple[int, ...]
    fiber: tuple[int, ...]
    params: object | None = None
    core: HPolytope | None = None
    core_expanded: tuple[int, ...] = ()
    fold: int = 0
    transform: tuple[IntVec, ...] | None = None
    translation: Vec | None = None
    facet_order: tuple[int, ...] | None = None
    alternatives: tuple["RecognitionCertificate", ...] = ()


def reconstruct(cert: RecognitionCertificate) -> HPolytope:
    """Rerun the matching constructor on the recovered parameters."""
    if cert.family == "segment_bundle":
        if cert.params is None:
            raise ValueError(
                "no constructor parameters were recovered (non-simplex fiber)"
            )
        return bundle_Yk(cert.params)
    if cert.family == "bundle_121":
        return bundle_121(cert.params)
    if cert.family == "polygon_bundle":
        return bundle_D2_polygon(cert.params)
    if cert.family == "expansion":
        return expansion(cert.core, cert.core_expanded[0], cert.fold)
    if cert.family == "double_expansion":
        return double_expansion(cert.core, *cert.core_expanded)
    raise ValueError(f"unknown certificate family {cert.family!r}")


def certificate_holds(poly: HPolytope, cert: RecognitionCertificate) -> bool:
    """Re-verify a certificate against the polytope it was issued for."""
    if cert.transform is None:
        i, j = cert.base
        return (
            poly.face({i, j}) is None
            and frozenset(cert.base) in equivalence_classes(poly).classes
        )
    normalized = poly.apply_lattice_map(cert.transform).translate(cert.translation)
    return normalized.permute_facets(cert.facet_order) == reconstruct(cert)


# ---------------------------------------------------------------------------
# small linear-algebra helpers


def _cols(*vectors) -> list[tuple]:
    """The matrix with the given columns, in row representation."""
    n = len(vectors[0])
    return [tuple(v[r] for v in vectors) for r in range(n)]


def _face_slice(poly: HPolytope, face: Face) -> tuple[HPolytope, tuple[int, ...]]:
    """A face as a full-dimensional polytope in a chart of its direction
    lattice, plus the input facet cutting each slice facet."""
    B = direction_lattice_basis(poly, face)
    v0 = poly.vertices[face.vertex_ids[0]].point
    k = face.dimension
    conormals, support, origins, labels = [], [], [], []
    for j in range(poly.n_facets):
        if j in face.index_set:
            continue
        sub = poly.face(face.index_set | {j})
        if sub is None or sub.dimension != k - 1:
            continue
        eta = poly.conormals[j]
        conormals.append(int_vec(tuple(dot(b, eta) for b in B)))
        support.append(poly.support[j] - dot(eta, v0))
        origins.append(j)
        labels.append(poly.labels[j])
    out = HPolytope(k, tuple(conormals), tuple(support), tuple(labels))
    if not out.is_smooth():
        raise StructuralInconsistency("a face of a smooth polytope must be smooth")
    return out, tuple(origins)


# ---------------------------------------------------------------------------
# bundles over a segment


def recognize_bundle_over_segment(poly: HPolytope) -> RecognitionCertificate | None:
    """Detect a bundle over a segment.

    A two-facet equivalence class whose members do not meet is a base
    pair; every other facet is a fiber facet.  When the fiber is a
    simplex (facet count dim + 2) the constructor parameters are
    recovered: the last fiber facet in index order takes the all-ones
    conormal slot and the smaller base index takes the untwisted slot.
    Further base pairs are attached as alternatives in index order.
    """
    if not poly.is_smooth():
        raise PolytopeError("recognition requires a smooth polytope")
    certs = []
    for cls in equivalence_classes(poly).classes:
        if len(cls) != 2:
            continue
        i, j = sorted(cls)
        if poly.face({i, j}) is not None:
            continue
        certs.append(_segment_bundle_certificate(poly, i, j))
    if not certs:
        return None
    return replace(certs[0], alternatives=tuple(certs[1:]))


def _segment_bundle_certificate(
    poly: HPolytope, i: int, j: int
) -> RecognitionCertificate:
    n, N = poly.dim, poly.n_facets
    others = tuple(m for m in range(N) if m not in (i, j))
    if N != n + 2 or n < 2:
        return RecognitionCertificate("segment_bundle", base=(i, j), fiber=others)
    k = n - 1
    body, last = others[:-1], others[-1]
    A = _cols(*[poly.conormals[m] for m in body], poly.conormals[i])
    if abs(det(A)) != 1:
        raise StructuralInconsistency(
            "base pair of a segment bundle admits no vertex basis"
        )
    S = tuple(int_vec(tuple(-x for x in row)) for row in unimodular_inverse(A))
    if tuple(mat_vec(S, poly.conormals[last])) != (1,) * k + (0,):
        raise StructuralInconsistency(
            "fiber conormals of a segment bundle must close up to zero"
        )
    image_j = int_vec(mat_vec(S, poly.conormals[j]))
    if image_j[k] != 1:
        raise StructuralInconsistency(
            "second base conormal of a segment bundle must be a unit lift"
        )
    order = body + (last, i, j)
    spec = YkBundleSpec(k, image_j[:k], tuple(poly.support[m] for m in order))
    try:
        built = bundle_Yk(spec)
    except PolytopeError as exc:
        raise StructuralInconsistency(
            f"recovered segment-bundle parameters are not buildable: {exc}"
        ) from exc
    if poly.apply_lattice_map(S).permute_facets(order) != built:
        raise StructuralInconsistency(
            "normalized polytope differs from the rebuilt segment bundle"
        )
    return RecognitionCertificate(
        "segment_bundle",
        base=(i, j),
        fiber=others,
        params=spec,
        transform=S,
        translation=zero_vec(n),
        facet_order=order,
    )


# ---------------------------------------------------------------------------
# expansions


def _quotient_normalization(
    poly: HPolytope, b_roles, group_sums
) -> tuple[tuple[IntVec, ...], ...] | None:
    """Unimodular map splitting coordinates into core block | new block.

    The core block is the saturated span of the conormals of the facets
    outside the roles together with the per-group conormal sums (each
    lifted-slot conormal lands back in the core block only jointly with
    its group's pure-slot partners); each b_role conormal is sent to
    minus a new-block coordinate vector.  Returns None when that span
    has the wrong rank or the b_roles do not complement it unimodularly.
    """
    n, N = poly.dim, poly.n_facets
    members = set(b_roles) | {x for grp in group_sums for x in grp}
    f = len(b_roles)
    m = n - f
    core_rows = [poly.conormals[x] for x in range(N) if x not in members]
    for grp in group_sums:
        core_rows.append(
            tuple(sum(poly.conormals[x][r] for x in grp) for r in range(n))
        )
    if rank(core_rows) != m:
        return None
    killed = integer_kernel_basis(core_rows, n)
    vsat = integer_kernel_basis(killed, n)
    if len(vsat) != m:
        return None
    T = _cols(*vsat, *[tuple(-c for c in poly.conormals[b]) for b in b_roles])
    if abs(det(T)) != 1:
        return None
    return unimodular_inverse(T)


def _expansion_certificate(poly: HPolytope, I) -> RecognitionCertificate | None:
    """Verify a candidate base-type facet set by rebuilding.

    The largest index of I takes the lifted-core-conormal slot; the
    rest map to the new coordinate directions in index order.
    """
    I = tuple(I)
    bs, w = I[:-1], I[-1]
    f = len(bs)
    n = poly.dim
    m = n - f
    S = _quotient_normalization(poly, bs, (I,))
    if S is None:
        return None
    im_w = int_vec(mat_vec(S, poly.conormals[w]))
    if im_w[m:] != (1,) * f:
        return None
    mapped = poly.apply_lattice_map(S)
    xi = zero_vec(m) + tuple(mapped.support[b] for b in bs)
    shifted = mapped.translate(xi)
    fiber = tuple(x for x in range(poly.n_facets) if x not in I)
    conormals, support, labels = [], [], []
    for x in fiber:
        imx = int_vec(mat_vec(S, poly.conormals[x]))
        if any(c != 0 for c in imx[m:]):
            return None
        conormals.append(imx[:m])
        support.append(shifted.support[x])
        labels.append(poly.labels[x])
    conormals.append(im_w[:m])
    support.append(shifted.support[w])
    labels.append(poly.labels[w])
    try:
        core = HPolytope(m, tuple(conormals), tuple(support), tuple(labels))
        built = expansion(core, core.n_facets - 1, fold=f)
    except PolytopeError:
        return None
    order = fiber + bs + (w,)
    if shifted.permute_facets(order) != built:
        return None
    return RecognitionCertificate(
        "expansion",
        base=I,
        fiber=fiber,
        core=core,
        core_expanded=(core.n_facets - 1,),
        fold=f,
        transform=S,
        translation=xi,
        facet_order=order,
    )


def recognize_expansion(poly: HPolytope) -> RecognitionCertificate | None:
    """Detect an expansion along an equivalence class that cuts a face.

    Full classes are tried first (fold = class size - 1), then pairs
    inside larger classes (1-fold substructures, which is how a simplex
    is recognized); each candidate is verified by rebuilding.
    """
    if not poly.is_smooth():
        raise PolytopeError("recognition requires a smooth polytope")
    eq = equivalence_classes(poly)
    candidates = []
    for cls in eq.classes:
        if len(cls) >= 2 and poly.face(cls) is not None:
            candidates.append(tuple(sorted(cls)))
    for cls in eq.classes:
        if len(cls) >= 3:
            for pq in itertools.combinations(sorted(cls), 2):
                if poly.face(set(pq)) is not None:
                    candidates.append(pq)
    for I in candidates:
        cert = _expansion_certificate(poly, I)
        if cert is not None:
            return cert
    return None


def _double_expansion_certificate(
    poly: HPolytope, pair1, pair2
) -> RecognitionCertificate | None:
    """Verify two equivalent-and-meeting pairs as base-type facets.

    Within each pair the smaller index takes the pure new-coordinate
    slot; its partner carries the lifted core conormal.
    """
    p1, p2 = pair1
    p3, p4 = pair2
    n = poly.dim
    m = n - 2
    S = _quotient_normalization(poly, (p1, p3), (pair1, pair2))
    if S is None:
        return None
    im2 = int_vec(mat_vec(S, poly.conormals[p2]))
    im4 = int_vec(mat_vec(S, poly.conormals[p4]))
    if im2[m:] != (1, 0) or im4[m:] != (0, 1):
        return None
    mapped = poly.apply_lattice_map(S)
    xi = zero_vec(m) + (mapped.support[p1], mapped.support[p3])
    shifted = mapped.translate(xi)
    fiber = tuple(x for x in range(poly.n_facets) if x not in (p1, p2, p3, p4))
    conormals, support, labels = [], [], []
    for x in fiber:
        imx = int_vec(mat_vec(S, poly.conormals[x]))
        if any(c != 0 for c in imx[m:]):
            return None
        conormals.append(imx[:m])
        support.append(shifted.support[x])
        labels.append(poly.labels[x])
    for x, imx in ((p2, im2), (p4, im4)):
        conormals.append(imx[:m])
        support.append(shifted.support[x])
        labels.append(poly.labels[x])
    try:
        core = HPolytope(m, tuple(conormals), tuple(support), tuple(labels))
        built = double_expansion(core, core.n_facets - 2, core.n_facets - 1)
    except PolytopeError:
        return None
    order = fiber + (p1, p2, p3, p4)
    if shifted.permute_facets(order) != built:
        return None
    return RecognitionCertificate(
        "double_expansion",
        base=(p1, p2, p3, p4),
        fiber=fiber,
        core=core,
        core_expanded=(core.n_facets - 2, core.n_facets - 1),
        fold=2,
        transform=S,
        translation=xi,
        facet_order=order,
    )


def _double_expansion_candidates(poly: HPolytope):
    """All verified double-expansion structures, in index order."""
    if not poly.is_smooth():
        raise PolytopeError("recognition requires a smooth polytope")
    if poly.dim < 3:
        return
    pairs = []
    for cls in equivalence_classes(poly).classes:
        for pq in itertools.combinations(sorted(cls), 2):
            if poly.face(set(pq)) is not None:
                pairs.append(pq)
    pairs.sort()
    for P, Q in itertools.combinations(pairs, 2):
        if set(P) & set(Q):
            continue
        cert = _double_expansion_certificate(poly, P, Q)
        if cert is not None:
            yield cert


def recognize_double_expansion(poly: HPolytope) -> RecognitionCertificate | None:
    """Detect a double expansion: two disjoint pairs of equivalent,
    mutually intersecting facets.  The core is the face cut by the two
    pure-slot members, recovered as a polytope in its own lattice."""
    return next(_double_expansion_candidates(poly), None)


# ---------------------------------------------------------------------------
# the two remaining 4-dimensional bundle shapes


def _recognize_121(poly: HPolytope) -> RecognitionCertificate | None:
    """Segment bundle over a (triangle bundle over a segment).

    The segment fiber shows up as a pair of opposite parallel facets;
    slicing one of them must yield a 3-dimensional segment bundle with
    triangle fiber, whose roles fix the tower normalization.  The
    orientation of the parallel pair is chosen to make the inner
    segment twist nonnegative.
    """
    n, N = poly.dim, poly.n_facets
    if n != 4 or N != 7:
        return None
    targets = _cols((0, -1, 0, 0), (0, 0, -1, 0), (0, 0, 0, -1), (-1, 0, 0, 0))
    for p, q in itertools.combinations(range(N), 2):
        if tuple(-c for c in poly.conormals[p]) != poly.conormals[q]:
            continue
        slice3, origins = _face_slice(poly, poly.face({p}))
        inner = recognize_bundle_over_segment(slice3)
        if inner is None or inner.params is None or inner.params.k != 2:
            continue
        f2, f3, f4, f5, f6 = (origins[x] for x in inner.facet_order)
        for t0, t1 in ((p, q), (q, p)):
            A = _cols(
                poly.conormals[f2],
                poly.conormals[f3],
                poly.conormals[f5],
                poly.conormals[t1],
            )
            if abs(det(A)) != 1:
                continue
            S = tuple(
                int_vec(row) for row in mat_mul(targets, unimodular_inverse(A))
            )
            if tuple(mat_vec(S, poly.conormals[t0])) != (1, 0, 0, 0):
                continue
            v4 = int_vec(mat_vec(S, poly.conormals[f4]))
            if v4[1:] != (1, 1, 0) or v4[0] < 0:
                continue
            v6 = int_vec(mat_vec(S, poly.conormals[f6]))
            if v6[3] != 1:
                continue
            order = (t0, t1, f2, f3, f4, f5, f6)
            try:
                spec = Bundle121Spec(
                    v6[:3], v4[0], tuple(poly.support[x] for x in order)
                )
                built = bundle_121(spec)
            except PolytopeError:
                continue
            if poly.apply_lattice_map(S).permute_facets(order) != built:
                continue
            return RecognitionCertificate(
                "bundle_121",
                base=(f2, f3, f4, f5, f6),
                fiber=(t0, t1),
                params=spec,
                transform=S,
                translation=zero_vec(4),
                facet_order=order,
            )
    return None


def _recognize_polygon_bundle(poly: HPolytope) -> RecognitionCertificate | None:
    """Triangle bundle over a polygon.

    The fiber shows up as three facets whose conormals span rank 2 and
    sum to zero; the remaining facets must close into a single
    adjacency cycle.  A vertex over a polygon corner fixes the
    normalization: its two base facets start the cycle and take zero
    twists.
    """
    n, N = poly.dim, poly.n_facets
    if n != 4 or N < 6:
        return None
    for triple in itertools.combinations(range(N), 3):
        u, v, w = triple
        s = tuple(sum(poly.conormals[x][r] for x in triple) for r in range(n))
        if any(s):
            continue
        if rank([poly.conormals[u], poly.conormals[v]]) != 2:
            continue
        vert = next(
            (
                vv
                for vv in poly.vertices
                if u in vv.basis and v in vv.basis and w not in vv.basis
            ),
            None,
        )
        if vert is None:
            continue
        g, gp = sorted(x for x in vert.basis if x not in (u, v))
        A = _cols(
            poly.conormals[u], poly.conormals[v], poly.conormals[g], poly.conormals[gp]
        )
        S = tuple(int_vec(tuple(-x for x in row)) for row in unimodular_inverse(A))
        base = [x for x in range(N) if x not in triple]
        images = {x: int_vec(mat_vec(S, poly.conormals[x])) for x in base}
        if any(im[2:] == (0, 0) for im in images.values()):
            continue
        nb = {
            x: [y for y in base if y != x and poly.face({x, y}) is not None]
            for x in base
        }
        if any(len(ys) != 2 for ys in nb.values()):
            continue
        cycle = [g, gp]
        good = True
        while len(cycle) < len(base):
            nxt = [y for y in nb[cycle[-1]] if y != cycle[-2]]
            if len(nxt) != 1 or nxt[0] in cycle:
                good = False
                break
            cycle.append(nxt[0])
        if not good or cycle[0] not in nb[cycle[-1]]:
            continue
        try:
            polygon = HPolytope(
                2,
                tuple(images[x][2:] for x in cycle),
                tuple(poly.support[x] for x in cycle),
                tuple(poly.labels[x] for x in cycle),
            )
            spec = D2PolygonBundleSpec(
                polygon,
                tuple(images[x][:2] for x in cycle),
                tuple(poly.support[x] for x in triple)
                + tuple(poly.support[x] for x in cycle),
            )
            built = bundle_D2_polygon(spec)
        except PolytopeError:
            continue
        order = triple + tuple(cycle)
        if poly.apply_lattice_map(S).permute_facets(order) != built:
            continue
        return RecognitionCertificate(
            "polygon_bundle",
            base=tuple(cycle),
            fiber=triple,
            params=spec,
            transform=S,
            translation=zero_vec(4),
            facet_order=order,
        )
    return None


# ---------------------------------------------------------------------------
# family types for 4-dimensional mass linear pairs


@dataclass(frozen=True)
class TypeRecognition:
    """Family tags for a (polytope, functional) pair, with certificates.

    tags lists every matching family in preference order (a1, a2, a3
    for essential functionals; b for inessential ones); empty means no
    structured family matched.  certificates pairs each tag with its
    recognition certificate.
    """

    tags: tuple[str, ...]
    certificates: tuple[tuple[str, RecognitionCertificate], ...]


def recognize_type(poly: HPolytope, H) -> TypeRecognition:
    """Match a 4-dimensional mass linear pair against the four families.

    Essential functionals are tested against the bundle shapes a1, a2,
    a3 (a polytope may match both a2 and a3); inessential ones against
    the double-expansion shape b, which additionally requires the four
    base-type facets to be exactly the asymmetric facets.  A non
    mass-linear functional or a polytope of the wrong dimension simply
    matches nothing.
    """
    none = TypeRecognition((), ())
    if poly.dim != 4 or not poly.is_smooth():
        return none
    Hv = vec(H)
    report = mass_linear_test(poly, Hv)
    if not report.verdict:
        return none
    found = []
    if is_inessential(poly, Hv) is None:
        cert = recognize_bundle_over_segment(poly)
        if cert is not None and cert.params is not None:
            found.append(("a1", cert))
        cert = _recognize_121(poly)
        if cert is not None:
            found.append(("a2", cert))
        cert = _recognize_polygon_bundle(poly)
        if cert is not None:
            found.append(("a3", cert))
    else:
        for cert in _double_expansion_candidates(poly):
            if cert.core.dim == 2 and frozenset(cert.base) == report.asymmetric:
                found.append(("b", cert))
                break
    return TypeRecognition(tuple(t for t, _ in found), tuple(found))


# ---------------------------------------------------------------------------
# classification pipeline


@dataclass(frozen=True)
class BlowdownStep:
    """One blowdown performed during classification.

    facet and index_set are in the indexing of the polytope the step
    was applied to; label is the removed facet's label, restored when
    the trace is replayed; tag names the kind of face that had been
    blown up, judged on the blown-down polytope."""

    facet: int
    label: str
    index_set: tuple[int, ...]
    epsilon: Fraction
    tag: str


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of the 4-dimensional classification pipeline.

    type is one of a1 / a2 / a3 / b / inessential / zero /
    unclassified.  trace lists the blowdowns performed, terminal the
    polytope they ended on, with its mass-linearity report and
    inessential witness (None when essential there).  certificate backs
    the family tag; alternatives lists further matching families (a
    polytope matching both a2 and a3 is reported as a2 with the a3
    certificate here).  detail explains unclassified outcomes."""

    type: str
    trace: tuple[BlowdownStep, ...]
    terminal: HPolytope
    terminal_report: MassLinearReport
    terminal_inessential: InessentialWitness | None
    certificate: RecognitionCertificate | None
    alternatives: tuple[tuple[str, RecognitionCertificate], ...]
    detail: str = ""


def _is_edge_type(poly: HPolytope, report: MassLinearReport, i, j, g) -> bool:
    """Is the edge cut by asymmetric facets i, j and symmetric facet g
    one whose blowup keeps the functional mass linear: coefficients of
    i and j cancel and the edge meets every asymmetric facet?"""
    if g not in report.symmetric:
        return False
    if i not in report.asymmetric or j not in report.asymmetric:
        return False
    if report.gamma[i] + report.gamma[j] != 0:
        return False
    f = poly.face({i, j, g})
    if f is None or f.dimension != 1 or f.index_set != frozenset((i, j, g)):
        return False
    return all(
        x in (i, j, g) or poly.face({i, j, g, x}) is not None
        for x in report.asymmetric
    )


def _blowup_type_tag(bar: HPolytope, report: MassLinearReport, I) -> str:
    """Classify the face of bar whose blowup the removed facet was."""
    if len(I) == 2:
        if all(x in report.symmetric for x in I):
            return "symmetric_2face"
        return "other"
    if len(I) == 4:
        return "vertex"
    if len(I) == 3:
        asym = [x for x in I if x in report.asymmetric]
        sym = [x for x in I if x in report.symmetric]
        if len(asym) == 2 and _is_edge_type(bar, report, asym[0], asym[1], sym[0]):
            return "edge_type_Fij_G"
    return "other"


def _first_blowdown(cur: HPolytope, cur_report: MassLinearReport, Hv):
    """Blow down the first facet that admits it, checking that the
    functional's coefficients survive unchanged."""
    for e in range(cur.n_facets):
        rep = blowdown(cur, e)
        if not rep.ok:
            continue
        bar = rep.polytope
        bar_report = mass_linear_test(bar, Hv)
        if not bar_report.verdict:
            raise StructuralInconsistency("a blowdown broke mass linearity")
        if cur_report.gamma[e] != 0:
            raise StructuralInconsistency(
                "a removable facet carried a nonzero coefficient"
            )
        expected = tuple(g for x, g in enumerate(cur_report.gamma) if x != e)
        if bar_report.gamma != expected:
            raise StructuralInconsistency("coefficients changed across a blowdown")
        shifted = tuple(x - 1 if x > e else x for x in rep.index_set)
        tag = _blowup_type_tag(bar, bar_report, shifted)
        step = BlowdownStep(e, cur.labels[e], rep.index_set, rep.epsilon, tag)
        return step, bar, bar_report
    return None


def replay_trace(terminal: HPolytope, trace) -> HPolytope:
    """Apply the recorded blowdowns in reverse as blowups, restoring
    each removed facet at its original position with its label."""
    cur = terminal
    for step in reversed(tuple(trace)):
        e = step.facet
        shifted = tuple(x - 1 if x > e else x for x in step.index_set)
        up = blowup(cur, shifted, step.epsilon)
        order = list(range(1, e + 1)) + [0] + list(range(e + 1, up.n_facets))
        up = up.permute_facets(order)
        labels = list(up.labels)
        labels[e] = step.label
        cur = HPolytope(up.dim, up.conormals, up.support, tuple(labels), up.name)
    return cur


def classify4d(poly: HPolytope, H) -> ClassificationResult:
    """Classify a 4-dimensional mass linear pair.

    The zero functional and inessential functionals are tagged
    directly.  For an essential functional, facets are blown down
    greedily in index order (restarting after each success, with the
    coefficient vector checked invariant) until a structured family
    matches or no facet blows down; the terminal pair is then named
    a1 / a2 / a3 (still essential) or b (turned inessential on a double
    expansion with asymmetric base-type facets), else unclassified.
    """
    if poly.dim != 4:
        raise ValueError("classification works on 4-dimensional polytopes")
    if not poly.is_smooth():
        raise PolytopeError("classification requires a smooth polytope")
    Hv = vec(H)
    report = mass_linear_test(poly, Hv)
    if not report.verdict:
        raise ValueError("functional is not mass linear on this polytope")
    if all(x == 0 for x in Hv):
        return ClassificationResult(
            "zero", (), poly, report, is_inessential(poly, Hv), None, (),
            "the zero functional",
        )
    witness = is_inessential(poly, Hv)
    if witness is not None:
        return ClassificationResult(
            "inessential", (), poly, report, witness, None, (),
            "functional is inessential on the input",
        )
    cur, cur_report = poly, report
    trace: list[BlowdownStep] = []
    while True:
        rec = recognize_type(cur, Hv)
        if rec.tags:
            tag = rec.tags[0]
            cert = rec.certificates[0][1]
            alternatives = rec.certificates[1:]
            detail = ""
            break
        found = _first_blowdown(cur, cur_report, Hv)
        if found is None:
            tag, cert, alternatives = "unclassified", None, ()
            still = "inessential" if is_inessential(cur, Hv) else "essential"
            detail = (
                "terminal polytope is minimal but matches no structured "
                f"family; the functional is {still} there"
            )
            break
        step, cur, cur_report = found
        trace.append(step)
    result = ClassificationResult(
        tag,
        tuple(trace),
        cur,
        cur_report,
        is_inessential(cur, Hv),
        cert,
        alternatives,
        detail,
    )
    rebuilt = replay_trace(result.terminal, result.trace)
    if rebuilt != poly or rebuilt.labels != poly.labels:
        raise StructuralInconsistency("trace replay failed to rebuild the input")
    return result


# ---------------------------------------------------------------------------
# planning blowups that make an inessential functional essential


@dataclass(frozen=True)
class BlowupPlan:
    """A concrete sequence of edge blowups, or a reason none exists.

    Each step is (facet index set, cut depth); step indices refer to
    the polytope produced by the previous steps (the exceptional facet
    is inserted first, shifting the rest up by one).  result is the
    polytope after all steps, on which the functional is essential."""

    feasible: bool
    reason: str = ""
    steps: tuple[tuple[tuple[int, ...], Fraction], ...] = ()
    result: HPolytope | None = None


def essential_blowup_planner(poly: HPolytope, H) -> BlowupPlan:
    """Plan blowups turning an inessential functional essential.

    The input must be a double expansion of a polygon whose base-type
    facets are exactly the asymmetric facets.  A plan exists exactly
    when the four base-type coefficients share one absolute value, the
    core polygon is not a triangle, and some core edge runs between the
    two expanded edges.  One cancelling-coefficient edge blowup
    suffices when the expanded edges are inequivalent in the core; a
    second one is appended when they are equivalent.
    """
    if poly.dim != 4:
        raise ValueError("planning works on 4-dimensional polytopes")
    if not poly.is_smooth():
        raise PolytopeError("planning requires a smooth polytope")
    Hv = vec(H)
    report = mass_linear_test(poly, Hv)
    if not report.verdict:
        raise ValueError("functional is not mass linear on this polytope")
    if is_inessential(poly, Hv) is None:
        return BlowupPlan(False, "functional is already essential on the input")
    cert = None
    for cand in _double_expansion_candidates(poly):
        if cand.core.dim == 2 and frozenset(cand.base) == report.asymmetric:
            cert = cand
            break
    if cert is None:
        raise PolytopeError(
            "input is not a double expansion of a polygon whose base-type "
            "facets are the asymmetric facets"
        )
    gammas = [report.gamma[x] for x in cert.base]
    if len({abs(g) for g in gammas}) != 1:
        return BlowupPlan(
            False, "the four base-type coefficients do not share one absolute value"
        )
    core = cert.core
    if core.n_facets == 3:
        return BlowupPlan(False, "the core polygon is a triangle")
    j1, j2 = cert.core_expanded
    bridges = [
        g
        for g in range(core.n_facets)
        if g not in (j1, j2)
        and core.face({g, j1}) is not None
        and core.face({g, j2}) is not None
    ]
    if not bridges:
        return BlowupPlan(False, "no core edge runs between the two expanded edges")
    first = None
    for g in bridges:
        G = cert.fiber[g]
        for bi in cert.base[:2]:
            for bj in cert.base[2:]:
                if report.gamma[bi] + report.gamma[bj] != 0:
                    continue
                if _is_edge_type(poly, report, bi, bj, G):
                    first = (bi, bj, G)
                    break
            if first:
                break
        if first:
            break
    if first is None:
        raise StructuralInconsistency(
            "feasibility criteria hold but no admissible edge exists"
        )
    step1 = tuple(sorted(first))
    blown = blowup(poly, step1)
    eps1 = sum((poly.support[x] for x in step1), Fraction(0)) - blown.support[0]
    steps = [(step1, eps1)]
    out = blown
    tied = j2 in equivalence_classes(core).class_of(j1)
    if tied:
        rep1 = mass_linear_test(blown, Hv)
        second = None
        for shared in first[:2]:
            others = [x for x in cert.base if x not in first[:2]]
            for k in others:
                if report.gamma[shared] + report.gamma[k] != 0:
                    continue
                for gp in sorted(rep1.symmetric):
                    if _is_edge_type(blown, rep1, shared + 1, k + 1, gp):
                        second = (shared + 1, k + 1, gp)
                        break
                if second:
                    break
            if second:
                break
        if second is None:
            raise StructuralInconsistency(
                "equivalent expanded edges but no second admissible edge exists"
            )
        step2 = tuple(sorted(second))
        out = blowup(blown, step2)
        eps2 = sum((blown.support[x] for x in step2), Fraction(0)) - out.support[0]
        steps.append((step2, eps2))
    final = mass_linear_test(out, Hv)
    if not final.verdict or is_inessential(out, Hv) is not None:
        raise StructuralInconsistency(
            "planned blowups failed to make the functional essential"
        )
    return BlowupPlan(True, "", tuple(steps), out)
