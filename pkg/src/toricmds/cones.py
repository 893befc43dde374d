"""Rational polyhedral cones with exact dual descriptions.

A PolyCone carries both a generator description and a facet description,
each canonical, so cone equality is plain field equality. Conversion between
the two descriptions is the double description method run over the integers.
Cones may have lineality (they are not assumed pointed); a non-full
dimensional cone encodes its span constraints as opposite pairs of normals,
which keeps the invariant that the dual cone is generated by the facet
normals and vice versa.

All vectors are primitive integer tuples. Nothing here knows about fans;
this is the geometry substrate the toric layers build on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import linalg, lp
from .errors import InternalError, ValidationError
from .linalg import Vec, dot, is_zero, primitive, vneg


def _clean(vectors: Iterable[Sequence[int]]) -> list[Vec]:
    """Primitive, nonzero, deduplicated, input order preserved."""
    out: list[Vec] = []
    seen: set[Vec] = set()
    for v in vectors:
        p = primitive(tuple(int(x) for x in v))
        if is_zero(p) or p in seen:
            continue
        seen.add(p)
        out.append(p)
    return out


def _dd_pointed(dim: int, ineqs: list[Vec]) -> list[Vec]:
    """Extreme rays of {x in Q^dim : a.x >= 0 for all a}, pointed case.

    Requires rank(ineqs) == dim. Classic incremental double description:
    seed with a simplicial cone from dim independent rows, then cut by the
    remaining rows, combining adjacent positive/negative ray pairs.
    """
    if dim == 0:
        return []
    seed_idx: list[int] = []
    seed_rows: list[Vec] = []
    for i, a in enumerate(ineqs):
        if linalg.rank(seed_rows + [a]) > len(seed_rows):
            seed_idx.append(i)
            seed_rows.append(a)
            if len(seed_rows) == dim:
                break
    if len(seed_rows) < dim:
        raise InternalError("pointed DD called with deficient rank")

    rays: list[Vec] = []
    active: list[set[int]] = []
    for j in range(dim):
        ej = [1 if k == j else 0 for k in range(dim)]
        sol = linalg.solve(seed_rows, ej)
        if sol is None:
            raise InternalError("seed system unexpectedly singular")
        r = linalg.primitive_fraction(sol)
        rays.append(r)
        active.append({seed_idx[i] for i in range(dim) if i != j})

    processed = list(seed_idx)
    for t, a in enumerate(ineqs):
        if t in seed_idx:
            continue
        processed.append(t)
        vals = [dot(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            for i, v in enumerate(vals):
                if v == 0:
                    active[i].add(t)
            continue
        pos = [i for i, v in enumerate(vals) if v > 0]
        zer = [i for i, v in enumerate(vals) if v == 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new_rays: list[Vec] = []
        new_active: list[set[int]] = []
        seen_new: set[Vec] = set()
        for ip in pos:
            for im in neg:
                common = active[ip] & active[im]
                if dim > 2:
                    rows = [ineqs[k] for k in common]
                    if linalg.rank(rows) != dim - 2:
                        continue
                # positive combination lying on the new hyperplane
                r = primitive(tuple(
                    vals[ip] * x - vals[im] * y
                    for x, y in zip(rays[im], rays[ip])
                ))
                if r in seen_new:
                    continue
                seen_new.add(r)
                new_rays.append(r)
                # exact zero set keeps later adjacency tests honest
                new_active.append({k for k in processed if dot(ineqs[k], r) == 0})
        rays = [rays[i] for i in pos + zer] + new_rays
        active = [active[i] for i in pos] + [
            active[i] | {t} for i in zer
        ] + new_active
    return sorted(set(rays))


def _vrep(dim: int, ineqs_in: Iterable[Sequence[int]]) -> tuple[list[Vec], list[Vec]]:
    """V-representation of {x : a.x >= 0}: (lineality basis, extreme rays).

    The lineality basis is in canonical Hermite form; rays are primitive and
    sorted. With no inequalities the result is the whole space.
    """
    ineqs = _clean(ineqs_in)
    if not ineqs:
        ident = [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
        return ident, []
    lin = linalg.integer_kernel(ineqs, dim)
    k = dim - len(lin)
    if k == 0:
        return lin, []
    comp = linalg.integer_kernel(lin, dim) if lin else [
        tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)
    ]
    if len(comp) != k:
        raise InternalError("complement basis has wrong size")
    proj = []
    for a in ineqs:
        pa = tuple(dot(a, w) for w in comp)
        if is_zero(pa):
            raise InternalError("inequality vanishes on the complement")
        proj.append(primitive(pa))
    proj = _clean(proj)
    rays_c = _dd_pointed(k, proj)
    rays = sorted(
        primitive(tuple(sum(c[i] * comp[i][j] for i in range(k)) for j in range(dim)))
        for c in rays_c
    )
    return lin, rays


def _with_pairs(lin: list[Vec], rays: list[Vec]) -> tuple[Vec, ...]:
    out = list(rays)
    for v in lin:
        out.append(v)
        out.append(vneg(v))
    return tuple(sorted(set(out)))


@dataclass(frozen=True)
class PolyCone:
    """Convex rational polyhedral cone, canonical dual pair of descriptions.

    generators: extreme rays when pointed, plus opposite pairs spanning the
        lineality space otherwise. facet_normals: supporting functionals,
        plus opposite pairs spanning the orthogonal complement of the span
        when the cone is not full dimensional. Both tuples are sorted and
        primitive, so == is structural equality of cones.
    """

    ambient_dim: int
    generators: tuple[Vec, ...]
    facet_normals: tuple[Vec, ...]
    dim: int
    lineality_dim: int

    @classmethod
    def from_generators(cls, ambient_dim: int, gens: Iterable[Sequence[int]]) -> "PolyCone":
        g0 = _clean(gens)
        for v in g0:
            if len(v) != ambient_dim:
                raise ValidationError(f"generator {v} has wrong length")
        lin_n, rays_n = _vrep(ambient_dim, g0)
        normals = _with_pairs(lin_n, rays_n)
        lin_g, rays_g = _vrep(ambient_dim, normals)
        gens_c = _with_pairs(lin_g, rays_g)
        d = linalg.rank(gens_c) if gens_c else 0
        return cls(ambient_dim, gens_c, normals, d, len(lin_g))

    @classmethod
    def from_inequalities(
        cls,
        ambient_dim: int,
        normals: Iterable[Sequence[int]],
        equations: Iterable[Sequence[int]] = (),
    ) -> "PolyCone":
        ineqs = list(normals)
        for e in equations:
            ineqs.append(tuple(e))
            ineqs.append(vneg(tuple(e)))
        for v in ineqs:
            if len(v) != ambient_dim:
                raise ValidationError(f"normal {tuple(v)} has wrong length")
        lin_g, rays_g = _vrep(ambient_dim, ineqs)
        gens_c = _with_pairs(lin_g, rays_g)
        lin_n, rays_n = _vrep(ambient_dim, gens_c) if gens_c else (
            [tuple(1 if i == j else 0 for j in range(ambient_dim)) for i in range(ambient_dim)],
            [],
        )
        normals_c = _with_pairs(lin_n, rays_n)
        d = linalg.rank(gens_c) if gens_c else 0
        return cls(ambient_dim, gens_c, normals_c, d, len(lin_g))

    @classmethod
    def full_space(cls, ambient_dim: int) -> "PolyCone":
        return cls.from_inequalities(ambient_dim, [])

    @classmethod
    def zero(cls, ambient_dim: int) -> "PolyCone":
        return cls.from_generators(ambient_dim, [])

    # -- basic queries ----------------------------------------------------

    def is_pointed(self) -> bool:
        return self.lineality_dim == 0

    def lineality_basis(self) -> list[Vec]:
        """Canonical basis of the largest linear subspace inside the cone."""
        if self.lineality_dim == 0:
            return []
        return linalg.integer_kernel(
            [list(n) for n in self.facet_normals], self.ambient_dim
        )

    def contains_point(self, x: Sequence[int]) -> bool:
        return all(dot(n, x) >= 0 for n in self.facet_normals)

    def contains_point_lp(self, x: Sequence[int]) -> bool:
        """Independent membership check through the generator description."""
        return lp.in_cone(self.generators, x)

    def contains_cone(self, other: "PolyCone") -> bool:
        return all(self.contains_point(g) for g in other.generators)

    def relative_interior_point(self) -> Vec:
        if not self.generators:
            return tuple(0 for _ in range(self.ambient_dim))
        acc = [0] * self.ambient_dim
        for g in self.generators:
            acc = [a + b for a, b in zip(acc, g)]
        return tuple(acc)

    def dual(self) -> "PolyCone":
        return PolyCone(
            self.ambient_dim,
            self.facet_normals,
            self.generators,
            self.ambient_dim - self.lineality_dim,
            self.ambient_dim - self.dim,
        )

    def intersect(self, other: "PolyCone") -> "PolyCone":
        if self.ambient_dim != other.ambient_dim:
            raise ValidationError("ambient dimensions differ")
        return PolyCone.from_inequalities(
            self.ambient_dim, list(self.facet_normals) + list(other.facet_normals)
        )

    def proper_facet_normals(self) -> list[Vec]:
        """Facet normals excluding the opposite pairs that encode the span."""
        s = set(self.facet_normals)
        return [n for n in self.facet_normals if vneg(n) not in s]

    def span_rows(self) -> list[Vec]:
        """Rows spanning the linear span of the cone (the generators do)."""
        return list(self.generators)

    # -- faces -------------------------------------------------------------

    def minimal_face_containing(self, vectors: Sequence[Vec]) -> "Face":
        """Smallest face of this cone containing every given vector.

        The vectors must lie in the cone.
        """
        for v in vectors:
            if not self.contains_point(v):
                raise ValidationError(f"{v} is not in the cone")
        facets = self.proper_facet_normals()
        act = [n for n in facets if all(dot(n, v) == 0 for v in vectors)]
        gens = [
            g for g in self.generators if all(dot(n, g) == 0 for n in act)
        ]
        return Face(
            cone=PolyCone.from_generators(self.ambient_dim, gens),
            active_normals=tuple(act),
        )

    def faces_of_dim(self, k: int) -> list["Face"]:
        """All faces of the given dimension, deterministically ordered."""
        return [f for f in self.all_faces() if f.cone.dim == k]

    def all_faces(self) -> list["Face"]:
        """Every face, the cone itself and its minimal face included."""
        facets = self.proper_facet_normals()
        gens = self.generators
        top = frozenset(range(len(gens)))
        seen = {top}
        queue = [top]
        subsets: list[frozenset[int]] = [top]
        while queue:
            s = queue.pop()
            for n in facets:
                t = frozenset(i for i in s if dot(n, gens[i]) == 0)
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
                    subsets.append(t)
        faces = []
        for s in sorted(subsets, key=lambda s: tuple(sorted(s))):
            sub = [gens[i] for i in sorted(s)]
            cone = PolyCone.from_generators(self.ambient_dim, sub)
            act = tuple(
                n for n in facets if all(dot(n, g) == 0 for g in sub)
            )
            faces.append(Face(cone=cone, active_normals=act))
        return faces

    def is_face(self, sub: "PolyCone") -> bool:
        if not self.contains_cone(sub):
            return False
        mf = self.minimal_face_containing(list(sub.generators))
        return mf.cone == sub

    def __repr__(self) -> str:
        return (
            f"PolyCone(dim {self.dim} in Q^{self.ambient_dim}, "
            f"{len(self.generators)} gens, lineality {self.lineality_dim})"
        )


@dataclass(frozen=True)
class Face:
    """A face of a PolyCone: the face cone and the normals supporting it."""

    cone: PolyCone
    active_normals: tuple[Vec, ...]


def star_face(cone: PolyCone, face: PolyCone) -> PolyCone:
    """The face of the dual cone cut out by a face of the original cone.

    For a face t of c this is dual(c) intersected with the orthogonal
    complement of t. On a full dimensional pointed cone the map is an
    inclusion reversing bijection between the two face lattices.
    """
    if not cone.is_face(face):
        raise ValidationError("second argument is not a face of the first")
    return PolyCone.from_inequalities(
        cone.ambient_dim, cone.generators, equations=face.generators
    )
