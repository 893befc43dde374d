"""Complete simplicial fans: validation, walls, divisor and curve classes.

A Fan is immutable: primitive ray vectors in a fixed order (the order is part
of the fan's identity) and maximal cones as sorted index tuples. Everything
derived from a fan (walls, the class lattice, the extremal ray decomposition
of the curve cone) is computed once and cached by structural key.

Curve and divisor classes live in dual lattices of rank rho = #rays - dim.
The divisor class of a coefficient vector a is B @ a, where the rows of B are
a canonical basis of the saturated lattice of integer relations among the
rays; a curve class is stored by its coordinates in that basis, so the
intersection pairing is the plain dot product.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg, lp
from .cones import PolyCone
from .errors import InternalError, ValidationError
from .linalg import Vec, dot, primitive


@dataclass(frozen=True)
class Fan:
    """Complete simplicial fan in Z^dim."""

    dim: int
    rays: tuple[Vec, ...]
    max_cones: tuple[tuple[int, ...], ...]

    def key(self) -> tuple:
        return (self.rays, frozenset(self.max_cones))

    def cone_rays(self, cone: Sequence[int]) -> list[Vec]:
        return [self.rays[i] for i in cone]

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @property
    def rho(self) -> int:
        return len(self.rays) - self.dim

    def __repr__(self) -> str:
        return f"Fan(dim {self.dim}, {len(self.rays)} rays, {len(self.max_cones)} cones)"


def _point_in_simplicial_cone(
    rays: list[Vec], point: Sequence[int], strict: bool
) -> bool:
    sol = linalg.solve([[r[k] for r in rays] for k in range(len(point))], point)
    if sol is None:
        return False
    if strict:
        return all(x > 0 for x in sol)
    return all(x >= 0 for x in sol)


def build_fan(
    dim: int,
    rays: Iterable[Sequence[int]],
    max_cones: Iterable[Sequence[int]],
    check: str = "full",
) -> Fan:
    """Validate and construct a complete simplicial fan.

    check="full" runs the quadratic pairwise proper-intersection test on top
    of the structural checks; "fast" keeps the structural checks (simplicial,
    primitive distinct rays all used, every wall shared by exactly two cones,
    deterministic coverage samples); "none" trusts the caller.
    """
    if check not in ("none", "fast", "full"):
        raise ValidationError(f"unknown check level {check!r}")
    ray_list = [tuple(int(x) for x in v) for v in rays]
    cone_list = [tuple(sorted(int(i) for i in c)) for c in max_cones]
    fan = Fan(dim, tuple(ray_list), tuple(sorted(set(cone_list))))
    if check == "none":
        return fan
    if len(cone_list) != len(fan.max_cones):
        raise ValidationError("duplicate maximal cones")
    for v in ray_list:
        if len(v) != dim:
            raise ValidationError(f"ray {v} has length {len(v)}, expected {dim}")
        if all(x == 0 for x in v):
            raise ValidationError("zero ray")
        if primitive(v) != v:
            raise ValidationError(f"ray {v} is not primitive")
    if len(set(ray_list)) != len(ray_list):
        raise ValidationError("duplicate rays")
    used: set[int] = set()
    for c in fan.max_cones:
        if len(c) != dim or len(set(c)) != dim:
            raise ValidationError(f"cone {c} does not have {dim} distinct rays")
        if any(i < 0 or i >= len(ray_list) for i in c):
            raise ValidationError(f"cone {c} references a missing ray")
        if linalg.det([ray_list[i] for i in c]) == 0:
            raise ValidationError(f"cone {c} is not simplicial (dependent rays)")
        used.update(c)
    if used != set(range(len(ray_list))):
        raise ValidationError("some rays appear in no maximal cone")

    # every wall must be shared by exactly two maximal cones
    incidence: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for c in fan.max_cones:
        for facet in combinations(c, dim - 1):
            incidence.setdefault(facet, []).append(c)
    for facet, owners in incidence.items():
        if len(owners) != 2:
            raise ValidationError(
                f"wall {facet} belongs to {len(owners)} maximal cones, expected 2"
            )

    # deterministic generic samples: covered, and no two interiors overlap
    rng = random.Random(0xFA9)
    for _ in range(4):
        p = tuple(rng.randint(-997, 997) for _ in range(dim))
        holders = [
            c for c in fan.max_cones
            if _point_in_simplicial_cone(fan.cone_rays(c), p, strict=False)
        ]
        if not holders:
            raise ValidationError(f"fan is not complete: {p} is uncovered")
        strict = [
            c for c in holders
            if _point_in_simplicial_cone(fan.cone_rays(c), p, strict=True)
        ]
        if len(strict) > 1:
            raise ValidationError(f"cones {strict[0]} and {strict[1]} overlap")

    if check == "full":
        for ca, cb in combinations(fan.max_cones, 2):
            common = sorted(set(ca) & set(cb))
            pa = PolyCone.from_generators(dim, fan.cone_rays(ca))
            pb = PolyCone.from_generators(dim, fan.cone_rays(cb))
            inter = pa.intersect(pb)
            expected = PolyCone.from_generators(dim, fan.cone_rays(common))
            if inter != expected:
                raise ValidationError(
                    f"cones {ca} and {cb} do not meet in a common face"
                )
    return fan


@dataclass(frozen=True)
class Wall:
    """Codimension-one cone shared by two maximal cones.

    relation holds (ray index, coefficient) pairs over the n+1 involved rays,
    normalized: integer, gcd one, both opposite rays positive.
    curve_class is the class of the invariant curve of the wall, in the
    canonical curve-lattice coordinates of the fan.
    """

    shared: tuple[int, ...]
    opposite: tuple[int, int]
    relation: tuple[tuple[int, int], ...]
    curve_class: Vec

    @property
    def involved(self) -> tuple[int, ...]:
        return tuple(sorted(self.shared + self.opposite))

    def coefficient(self, ray_index: int) -> int:
        for i, c in self.relation:
            if i == ray_index:
                return c
        return 0

    def full_vector(self, n_rays: int) -> Vec:
        v = [0] * n_rays
        for i, c in self.relation:
            v[i] = c
        return tuple(v)

    @property
    def anticanonical_degree(self) -> int:
        return sum(c for _, c in self.relation)


@dataclass(frozen=True)
class ExtremalRay:
    """One extremal ray of the cone of curves, with its sign pattern.

    cls is the primitive class generating the ray; pairing[j] is its
    intersection number with the divisor of ray j. jminus/jplus are the rays
    with negative/positive pairing (the circuit of the ray).
    """

    cls: Vec
    pairing: Vec
    wall_indices: tuple[int, ...]
    jminus: tuple[int, ...]
    jplus: tuple[int, ...]
    kind: str  # "fiber", "divisorial", "small"
    exc_dim: int
    image_dim: int
    k_degree: int
    sort_key: tuple

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.jminus + self.jplus))


class FanData:
    """Derived data for one fan, computed lazily and cached per fan key."""

    def __init__(self, fan: Fan):
        self.fan = fan

    @cached_property
    def walls(self) -> list[Wall]:
        fan = self.fan
        n = fan.dim
        incidence: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
        for c in fan.max_cones:
            for facet in combinations(c, n - 1):
                incidence.setdefault(facet, []).append(c)
        out = []
        for facet in sorted(incidence):
            owners = incidence[facet]
            if len(owners) != 2:
                raise ValidationError(f"wall {facet} is not two-sided")
            extras = sorted(
                next(iter(set(c) - set(facet))) for c in owners
            )
            involved = sorted(facet + tuple(extras))
            cols = [fan.rays[i] for i in involved]
            ker = linalg.integer_kernel(
                [[v[k] for v in cols] for k in range(n)], len(involved)
            )
            if len(ker) != 1:
                raise InternalError(f"wall {facet} has a degenerate relation")
            rel = list(ker[0])
            ia, ib = involved.index(extras[0]), involved.index(extras[1])
            if rel[ia] < 0:
                rel = [-x for x in rel]
            if rel[ia] <= 0 or rel[ib] <= 0:
                raise ValidationError(
                    f"wall {facet}: opposite rays are not on opposite sides"
                )
            full = [0] * fan.n_rays
            for idx, c in zip(involved, rel):
                full[idx] = c
            out.append(
                Wall(
                    shared=facet,
                    opposite=tuple(extras),  # type: ignore[arg-type]
                    relation=tuple(zip(involved, rel)),
                    curve_class=self.curve_class_from_pairing(tuple(full)),
                )
            )
        return out

    @cached_property
    def class_basis(self) -> tuple[Vec, ...]:
        """Rows: canonical basis of the integer relation lattice of the rays."""
        fan = self.fan
        mat = [[v[k] for v in fan.rays] for k in range(fan.dim)]
        basis = linalg.integer_kernel(mat, fan.n_rays)
        if len(basis) != fan.rho:
            raise InternalError("relation lattice has unexpected rank")
        return tuple(basis)

    def divisor_class(self, coeffs: Sequence) -> tuple:
        """Class of sum(coeffs[j] * D_j) in the rank-rho divisor lattice."""
        if len(coeffs) != self.fan.n_rays:
            raise ValidationError(
                f"divisor needs {self.fan.n_rays} coefficients, got {len(coeffs)}"
            )
        return tuple(dot(row, coeffs) for row in self.class_basis)

    def curve_class_from_pairing(self, pairing: Sequence[int]) -> Vec:
        """Coordinates of a relation vector in the canonical basis."""
        b = self.class_basis
        rows = [[b[k][j] for k in range(len(b))] for j in range(self.fan.n_rays)]
        sol = linalg.solve(rows, list(pairing))
        if sol is None:
            raise InternalError("pairing vector is not a ray relation")
        out = []
        for x in sol:
            if x.denominator != 1:
                raise InternalError("relation is not integral in a saturated basis")
            out.append(int(x))
        return tuple(out)

    def pairing_vector(self, curve: Sequence) -> tuple:
        """Intersection numbers of a curve class with every ray divisor."""
        b = self.class_basis
        return tuple(
            sum(curve[k] * b[k][j] for k in range(len(b)))
            for j in range(self.fan.n_rays)
        )

    @cached_property
    def ray_classes(self) -> tuple[Vec, ...]:
        b = self.class_basis
        return tuple(
            tuple(row[j] for row in b) for j in range(self.fan.n_rays)
        )

    @cached_property
    def anticanonical(self) -> Vec:
        return tuple(sum(row) for row in self.class_basis)

    @cached_property
    def wall_classes(self) -> tuple[Vec, ...]:
        return tuple(w.curve_class for w in self.walls)

    @cached_property
    def ne_cone(self) -> PolyCone:
        return PolyCone.from_generators(self.fan.rho, self.wall_classes)

    @cached_property
    def nef_cone(self) -> PolyCone:
        return PolyCone.from_inequalities(self.fan.rho, self.wall_classes)

    @cached_property
    def eff_cone(self) -> PolyCone:
        return PolyCone.from_generators(self.fan.rho, self.ray_classes)

    @cached_property
    def mov_cone(self) -> PolyCone:
        cone = None
        for j in range(self.fan.n_rays):
            others = [c for i, c in enumerate(self.ray_classes) if i != j]
            part = PolyCone.from_generators(self.fan.rho, others)
            cone = part if cone is None else cone.intersect(part)
        if cone is None:
            raise InternalError("fan has no rays")
        return cone

    @cached_property
    def ample_class(self) -> Vec | None:
        x = lp.strictly_positive_point(self.wall_classes, self.fan.rho)
        if x is None:
            return None
        den = math.lcm(*(f.denominator for f in x)) if x else 1
        return tuple(int(f * den) for f in x)

    @property
    def is_projective(self) -> bool:
        return self.ample_class is not None

    @cached_property
    def is_smooth(self) -> bool:
        return all(
            abs(linalg.det(self.fan.cone_rays(c))) == 1 for c in self.fan.max_cones
        )

    @cached_property
    def is_fano(self) -> bool:
        return self.is_projective and all(
            w.anticanonical_degree > 0 for w in self.walls
        )

    @cached_property
    def extremal_rays(self) -> list[ExtremalRay]:
        """Extremal rays of the curve cone, each with its wall certificates.

        Wall relation vectors are primitive, so every wall class lying on an
        extremal ray equals the primitive generator of that ray exactly.
        """
        fan = self.fan
        gens = set(self.ne_cone.generators)
        by_class: dict[Vec, list[int]] = {}
        for i, w in enumerate(self.walls):
            by_class.setdefault(w.curve_class, []).append(i)
        out = []
        for g in sorted(gens):
            walls_here = by_class.get(g)
            if not walls_here:
                raise InternalError(
                    f"extremal class {g} is not realized by any wall"
                )
            pairing = self.pairing_vector(g)
            jminus = tuple(j for j, p in enumerate(pairing) if p < 0)
            jplus = tuple(j for j, p in enumerate(pairing) if p > 0)
            n = fan.dim
            if not jminus:
                kind = "fiber"
                a = n
                b = n - (len(jplus) - 1)
            elif len(jminus) == 1:
                kind = "divisorial"
                a = n - 1
                b = n - len(jplus)
            else:
                kind = "small"
                a = n - len(jminus)
                b = n - len(jminus) - len(jplus) + 1
            sort_key = min(
                tuple(sorted(self.walls[i].involved)) for i in walls_here
            )
            out.append(
                ExtremalRay(
                    cls=g,
                    pairing=tuple(int(x) for x in pairing),
                    wall_indices=tuple(walls_here),
                    jminus=jminus,
                    jplus=jplus,
                    kind=kind,
                    exc_dim=a,
                    image_dim=b,
                    k_degree=sum(pairing),
                    sort_key=(sort_key, g),
                )
            )
        out.sort(key=lambda r: r.sort_key)
        return out


_FAN_DATA: dict[tuple, FanData] = {}


def data(fan: Fan) -> FanData:
    key = fan.key()
    fd = _FAN_DATA.get(key)
    if fd is None:
        fd = FanData(fan)
        _FAN_DATA[key] = fd
    return fd


# -- convenience wrappers ---------------------------------------------------

def walls(fan: Fan) -> list[Wall]:
    return data(fan).walls


def class_group_rank(fan: Fan) -> int:
    return fan.rho


def divisor_class(fan: Fan, coeffs: Sequence) -> tuple:
    return data(fan).divisor_class(coeffs)


def anticanonical_class(fan: Fan) -> Vec:
    return data(fan).anticanonical


def is_smooth(fan: Fan) -> bool:
    return data(fan).is_smooth


def is_projective(fan: Fan) -> bool:
    return data(fan).is_projective


def is_fano(fan: Fan) -> bool:
    return data(fan).is_fano


def extremal_rays(fan: Fan) -> list[ExtremalRay]:
    return data(fan).extremal_rays


def classify_extremal_wall(fan: Fan, wall: Wall) -> ExtremalRay:
    """The extremal-ray descriptor of a wall whose class is extremal.

    Raises ValidationError if the wall's curve class does not span an
    extremal ray of the curve cone.
    """
    for ray in data(fan).extremal_rays:
        if ray.cls == wall.curve_class:
            return ray
    raise ValidationError(
        f"wall {wall.shared} has class {wall.curve_class}, "
        "which does not span an extremal ray"
    )


def star_subdivision(
    fan: Fan, cone: Sequence[int], new_ray: Sequence[int] | None = None
) -> Fan:
    """Subdivide the star of a cone of the fan at a new interior ray.

    The default new ray is the primitive sum of the cone's rays (the smooth
    blow-up when the subdivided cone is unimodular).
    """
    tau = tuple(sorted(int(i) for i in cone))
    if not tau:
        raise ValidationError("cannot subdivide the zero cone")
    if not any(set(tau) <= set(c) for c in fan.max_cones):
        raise ValidationError(f"{tau} is not a cone of the fan")
    if new_ray is None:
        acc = [0] * fan.dim
        for i in tau:
            acc = [a + b for a, b in zip(acc, fan.rays[i])]
        new = primitive(acc)
    else:
        new = primitive(tuple(int(x) for x in new_ray))
    if new in fan.rays:
        raise ValidationError(f"subdivision ray {new} already in the fan")
    sol = linalg.solve(
        [[fan.rays[i][k] for i in tau] for k in range(fan.dim)], new
    )
    if sol is None or any(x <= 0 for x in sol):
        raise ValidationError(
            f"{new} is not interior to the cone {tau}"
        )
    idx_new = fan.n_rays
    cones_out: list[tuple[int, ...]] = []
    for c in fan.max_cones:
        if set(tau) <= set(c):
            for j in tau:
                cones_out.append(
                    tuple(sorted((set(c) - {j}) | {idx_new}))
                )
        else:
            cones_out.append(c)
    return build_fan(
        fan.dim, list(fan.rays) + [new], cones_out, check="fast"
    )


def product(f1: Fan, f2: Fan) -> Fan:
    """Product fan on the direct sum of the two lattices."""
    d1, d2 = f1.dim, f2.dim
    rays = [v + (0,) * d2 for v in f1.rays] + [(0,) * d1 + v for v in f2.rays]
    off = f1.n_rays
    cones = [
        tuple(sorted(c1 + tuple(i + off for i in c2)))
        for c1 in f1.max_cones
        for c2 in f2.max_cones
    ]
    return build_fan(d1 + d2, rays, cones, check="fast")


def fans_equal(a: Fan, b: Fan) -> bool:
    """Structural equality: same rays in the same order, same cone set."""
    return a.key() == b.key()
