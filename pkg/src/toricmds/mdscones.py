"""The cone calculus of a toric Mori dream space.

Everything lives in the rank-rho class lattice of the input fan. Small
modifications keep the ray set, so their class lattices are literally the
same coordinates; the chamber decomposition of the movable cone is computed
by crossing walls with flips, and contractions are read off from faces of
the chambers by their position relative to the movable and effective cones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import fan as fanmod
from . import linalg, mmp
from .cones import PolyCone
from .errors import CapOverflowError, InternalError, ValidationError
from .fan import Fan
from .linalg import Vec, dot, primitive, primitive_fraction

MAX_CHAMBERS = 10000


@dataclass(frozen=True)
class ConeInventory:
    """The five cones of the divisor/curve class calculus."""

    fan: Fan
    nef: PolyCone
    mov: PolyCone
    eff: PolyCone
    ne: PolyCone
    me: PolyCone


def cone_inventory(fan: Fan) -> ConeInventory:
    dd = fanmod.data(fan)
    if not dd.is_projective:
        raise ValidationError("cone inventory needs a projective fan")
    rho = fan.rho
    nef, mov, eff = dd.nef_cone, dd.mov_cone, dd.eff_cone
    ne = nef.dual()
    me = eff.dual()
    for name, cone in (("nef", nef), ("mov", mov), ("eff", eff),
                       ("ne", ne), ("me", me)):
        if cone.dim != rho:
            raise InternalError(f"{name} cone has dim {cone.dim}, expected {rho}")
        if not cone.is_pointed():
            raise InternalError(f"{name} cone is not pointed")
    if not mov.contains_cone(nef):
        raise InternalError("nef cone is not inside the movable cone")
    if not eff.contains_cone(mov):
        raise InternalError("movable cone is not inside the effective cone")
    if ne != dd.ne_cone:
        raise InternalError("curve cone does not match the dual of nef")
    return ConeInventory(fan, nef, mov, eff, ne, me)


@dataclass(frozen=True)
class Chamber:
    index: int
    model: Fan
    cone: PolyCone


@dataclass(frozen=True)
class ChamberAdjacency:
    """Shared facet between two chambers, with the crossing wall data."""

    i: int
    j: int
    facet: PolyCone
    ray_class: Vec  # class of the small ray flipped when going from i to j
    jminus: tuple[int, ...]
    jplus: tuple[int, ...]


@dataclass
class ChamberAtlas:
    fan: Fan
    inventory: ConeInventory
    chambers: list[Chamber]
    adjacency: list[ChamberAdjacency]
    base_chamber: int = 0

    def chamber_of(self, div_class: Sequence) -> list[int]:
        """Indices of every chamber whose cone contains the class."""
        return [c.index for c in self.chambers if c.cone.contains_point(div_class)]


def chamber_atlas(fan: Fan, cap: int = MAX_CHAMBERS) -> ChamberAtlas:
    """All small modifications, by wall-crossing search from the nef chamber.

    Every facet of a chamber interior to the movable cone is shared with the
    flip across the corresponding small extremal ray; facets on the boundary
    of the movable cone are divisorial or fiber-type walls and are not
    crossed.
    """
    inv = cone_inventory(fan)
    chambers: list[Chamber] = [Chamber(0, fan, fanmod.data(fan).nef_cone)]
    seen: dict[tuple, int] = {fan.key(): 0}
    adjacency: dict[tuple[int, int], ChamberAdjacency] = {}
    queue = [0]
    while queue:
        i = queue.pop(0)
        model = chambers[i].model
        dd = fanmod.data(model)
        for ray in dd.extremal_rays:
            if ray.kind != "small":
                continue
            neighbor = mmp.flip(model, ray)
            key = neighbor.key()
            j = seen.get(key)
            if j is None:
                j = len(chambers)
                if j >= cap:
                    raise CapOverflowError(
                        f"chamber count exceeded the cap of {cap}"
                    )
                seen[key] = j
                chambers.append(Chamber(j, neighbor, fanmod.data(neighbor).nef_cone))
                queue.append(j)
            pair = (min(i, j), max(i, j))
            if pair not in adjacency:
                facet = chambers[i].cone.intersect(chambers[j].cone)
                if facet.dim != fan.rho - 1:
                    raise InternalError(
                        f"chambers {i} and {j} do not share a facet"
                    )
                adjacency[pair] = ChamberAdjacency(
                    i=pair[0],
                    j=pair[1],
                    facet=facet,
                    ray_class=ray.cls if pair[0] == i else tuple(-x for x in ray.cls),
                    jminus=ray.jminus if pair[0] == i else ray.jplus,
                    jplus=ray.jplus if pair[0] == i else ray.jminus,
                )
    return ChamberAtlas(
        fan, inv, chambers, [adjacency[k] for k in sorted(adjacency)]
    )


@dataclass(frozen=True)
class RationalContractionDescriptor:
    """One cone of the chamber fan, with its contraction classification.

    target_rho is the rank of the target's class lattice (= dim sigma).
    kind follows the position of sigma: the full chambers are the small
    modifications; lower faces interior to the movable cone are small, on
    its boundary divisorial, on the boundary of the effective cone of fiber
    type. regular means the contraction is a morphism on the input fan.
    """

    sigma: PolyCone
    target_rho: int
    kind: str  # "sqm", "small", "divisorial", "fiber-type"
    regular: bool
    host_chamber: int
    host_chambers: tuple[int, ...]

    @property
    def elementary(self) -> bool:
        return self.sigma.ambient_dim - self.target_rho == 1


def _touches_boundary(cone: PolyCone, point: Sequence) -> bool:
    return any(dot(h, point) == 0 for h in cone.proper_facet_normals())


def _classify_position(inv: ConeInventory, sigma: PolyCone) -> str:
    if sigma.dim == inv.fan.rho:
        return "sqm"
    p = sigma.relative_interior_point()
    if _touches_boundary(inv.eff, p):
        return "fiber-type"
    if _touches_boundary(inv.mov, p):
        return "divisorial"
    return "small"


def describe_face(atlas: ChamberAtlas, sigma: PolyCone) -> RationalContractionDescriptor:
    """Descriptor of a chamber-fan cone given as an explicit cone."""
    hosts = tuple(
        c.index for c in atlas.chambers if c.cone.contains_cone(sigma)
    )
    if not hosts:
        raise ValidationError("cone is not contained in any chamber")
    inv = atlas.inventory
    return RationalContractionDescriptor(
        sigma=sigma,
        target_rho=sigma.dim,
        kind=_classify_position(inv, sigma),
        regular=inv.nef.contains_cone(sigma),
        host_chamber=hosts[0],
        host_chambers=hosts,
    )


def rational_contractions(
    atlas: ChamberAtlas, max_codim: int | None = None
) -> list[RationalContractionDescriptor]:
    """Every cone of the chamber fan down to the requested codimension,
    each face reported once no matter how many chambers share it."""
    rho = atlas.fan.rho
    found: dict[tuple, tuple[PolyCone, set[int]]] = {}
    for chamber in atlas.chambers:
        for face in chamber.cone.all_faces():
            if max_codim is not None and rho - face.cone.dim > max_codim:
                continue
            key = face.cone.generators
            if key in found:
                found[key][1].add(chamber.index)
            else:
                found[key] = (face.cone, {chamber.index})
    inv = atlas.inventory
    out = []
    for key in sorted(found):
        sigma, hosts = found[key]
        out.append(
            RationalContractionDescriptor(
                sigma=sigma,
                target_rho=sigma.dim,
                kind=_classify_position(inv, sigma),
                regular=inv.nef.contains_cone(sigma),
                host_chamber=min(hosts),
                host_chambers=tuple(sorted(hosts)),
            )
        )
    out.sort(key=lambda d: (d.target_rho, d.sigma.generators))
    return out


def _span_equations(sigma: PolyCone) -> list[Vec]:
    """Integer functionals cutting out the linear span of the cone."""
    gens = [list(g) for g in sigma.generators]
    if not gens:
        return [tuple(1 if k == i else 0 for k in range(sigma.ambient_dim))
                for i in range(sigma.ambient_dim)]
    return linalg.integer_kernel(gens, sigma.ambient_dim)


@dataclass(frozen=True)
class QuasiElementaryResult:
    verdict: bool
    condition_iii: bool
    condition_iv: bool
    condition_v: bool
    minimal_eff_face_dim: int
    contracted_curves_dim: int


def is_quasi_elementary(
    atlas: ChamberAtlas, desc: RationalContractionDescriptor
) -> QuasiElementaryResult:
    """Quasi-elementary test for a fiber-type cone, three ways.

    The verdict is the face-dimension condition: the minimal face of the
    effective cone containing sigma has the dimension of sigma. Two
    independent computations cross-check it: the cone of contracted curve
    classes (the mobile dual cone cut to the orthogonal complement of sigma)
    must have
    dimension rho - dim sigma, and the effective cone must meet the span of
    sigma in a face. Disagreement raises, since the three are equivalent.
    """
    if desc.kind != "fiber-type":
        raise ValidationError(
            f"quasi-elementary test needs a fiber-type cone, got {desc.kind}"
        )
    inv = atlas.inventory
    rho = atlas.fan.rho
    sigma = desc.sigma

    min_face = inv.eff.minimal_face_containing(list(sigma.generators))
    cond_iv = min_face.cone.dim == sigma.dim

    span_perp = PolyCone.from_inequalities(
        rho, [], equations=list(sigma.generators)
    )
    me_f = inv.me.intersect(span_perp)
    cond_iii = me_f.dim == rho - sigma.dim

    flat = PolyCone.from_inequalities(rho, [], equations=_span_equations(sigma))
    eff_slice = inv.eff.intersect(flat)
    cond_v = eff_slice.dim == sigma.dim and inv.eff.is_face(eff_slice)

    if not (cond_iii == cond_iv == cond_v):
        raise InternalError(
            "equivalent quasi-elementary conditions disagree: "
            f"iii={cond_iii} iv={cond_iv} v={cond_v}"
        )
    return QuasiElementaryResult(
        verdict=cond_iv,
        condition_iii=cond_iii,
        condition_iv=cond_iv,
        condition_v=cond_v,
        minimal_eff_face_dim=min_face.cone.dim,
        contracted_curves_dim=me_f.dim,
    )


def find_quasi_elementary(
    atlas: ChamberAtlas, r: int
) -> list[RationalContractionDescriptor]:
    """All chamber-fan cones of dimension r giving quasi-elementary
    contractions, via the face-pair criterion: an r-dimensional face of the
    movable cone inside an r-dimensional face of the effective cone."""
    rho = atlas.fan.rho
    if not 1 <= r <= rho - 1:
        raise ValidationError(f"rank {r} out of range 1..{rho - 1}")
    inv = atlas.inventory
    eff_faces = [f.cone for f in inv.eff.faces_of_dim(r)]
    mov_faces = [f.cone for f in inv.mov.faces_of_dim(r)]
    hits: list[PolyCone] = []
    for mf in mov_faces:
        if any(ef.contains_cone(mf) for ef in eff_faces):
            hits.append(mf)
    out: dict[tuple, RationalContractionDescriptor] = {}
    if hits:
        for desc in rational_contractions(atlas):
            if desc.target_rho != r:
                continue
            if any(mf.contains_cone(desc.sigma) for mf in hits):
                qe = is_quasi_elementary(atlas, desc)
                if not qe.verdict:
                    raise InternalError(
                        "face-pair criterion hit a non-quasi-elementary cone"
                    )
                out[desc.sigma.generators] = desc
    return [out[k] for k in sorted(out)]


def nonmovable_prime_divisors(fan: Fan) -> list[tuple[int, Vec]]:
    """Invariant prime divisors spanning effective-cone rays outside the
    movable cone, as (ray index, class) pairs; exactly one divisor per ray."""
    inv = cone_inventory(fan)
    dd = fanmod.data(fan)
    out = []
    for g in inv.eff.generators:
        if inv.mov.contains_point(g):
            continue
        owners = [
            j for j in range(fan.n_rays)
            if primitive(dd.ray_classes[j]) == g
        ]
        if len(owners) != 1:
            raise InternalError(
                f"effective ray {g} carried by {len(owners)} divisors"
            )
        out.append((owners[0], g))
    return out


# -- target models of quasi-elementary contractions --------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class TargetModel:
    """A fiber-type contraction target realized as a fan, with the pullback.

    pullback is a rho_X by rho_Y matrix sending target classes into the
    source class lattice; ray_map sends source ray indices to target ray
    indices (None for rays collapsed by the contraction).
    """

    source: Fan
    fan: Fan
    pullback: tuple[Vec, ...]
    ray_map: tuple[int | None, ...]

    def pull_class(self, y_class: Sequence) -> tuple:
        return tuple(dot(row, y_class) for row in self.pullback)


def target_model(
    atlas: ChamberAtlas, desc: RationalContractionDescriptor
) -> TargetModel:
    """Construct the target fan of a quasi-elementary contraction.

    Maximal cones of the host model are merged across the walls whose curve
    class vanishes against sigma; each merged piece has a common lineality
    space (the kernel of the lattice projection), and the quotient fan is the
    target. The pullback matrix is computed from support functions of the
    target's ray divisors and certified: it must carry the target's nef cone
    exactly onto sigma and the target's effective cone onto the face of the
    source effective cone spanned by sigma.
    """
    qe = is_quasi_elementary(atlas, desc)
    if not qe.verdict:
        raise ValidationError("target models need a quasi-elementary cone")
    if desc.target_rho == 0:
        raise ValidationError("the contraction to a point has no fan model")
    model = atlas.chambers[desc.host_chamber].model
    dd = fanmod.data(model)
    n = model.dim
    d_rep = desc.sigma.relative_interior_point()

    cones = list(model.max_cones)
    pos = {c: k for k, c in enumerate(cones)}
    uf = _UnionFind(len(cones))
    for w in dd.walls:
        if dot(d_rep, w.curve_class) == 0:
            ca = tuple(sorted(w.shared + (w.opposite[0],)))
            cb = tuple(sorted(w.shared + (w.opposite[1],)))
            uf.union(pos[ca], pos[cb])
    pieces: dict[int, list[tuple[int, ...]]] = {}
    for k, c in enumerate(cones):
        pieces.setdefault(uf.find(k), []).append(c)

    piece_cones = []
    lineality: list[Vec] | None = None
    for root in sorted(pieces):
        members = pieces[root]
        rays = sorted({i for c in members for i in c})
        cone = PolyCone.from_generators(n, [model.rays[i] for i in rays])
        piece_cones.append((cone, rays))
        if lineality is None:
            lineality = cone.lineality_basis()
        elif cone.lineality_basis() != lineality:
            raise InternalError("merged pieces disagree on the collapsed space")
    if lineality is None:
        raise InternalError("no maximal cones to merge")
    if not lineality:
        raise InternalError("fiber-type contraction collapses nothing")

    proj = linalg.integer_kernel([list(v) for v in lineality], n)
    dim_y = len(proj)

    def project(v: Sequence[int]) -> tuple:
        return tuple(dot(w, v) for w in proj)

    ray_map: list[int | None] = []
    y_rays: list[Vec] = []
    for j in range(model.n_rays):
        img = project(model.rays[j])
        if all(x == 0 for x in img):
            ray_map.append(None)
            continue
        img = primitive(img)
        if img in y_rays:
            ray_map.append(y_rays.index(img))
        else:
            ray_map.append(len(y_rays))
            y_rays.append(img)
    y_cones = []
    for cone, rays in piece_cones:
        idxs = sorted({ray_map[i] for i in rays if ray_map[i] is not None})
        y_cones.append(tuple(idxs))
    y_fan = fanmod.build_fan(dim_y, y_rays, y_cones, check="fast")
    y_dd = fanmod.data(y_fan)
    rho_y = y_fan.rho
    if rho_y != desc.sigma.dim:
        raise InternalError(
            f"target rank {rho_y} does not match the cone dimension {desc.sigma.dim}"
        )

    # pullback coefficients of each target ray divisor via support functions:
    # express the projection of every source ray in its target cone, then the
    # coefficient for ray divisor rho is the barycentric weight of rho there
    homes = []
    for j in range(model.n_rays):
        img = project(model.rays[j])
        home = None
        for c in y_fan.max_cones:
            sol = linalg.solve(
                [[y_fan.rays[i][k] for i in c] for k in range(dim_y)], img
            )
            if sol is not None and all(x >= 0 for x in sol):
                home = (c, sol)
                break
        if home is None:
            raise InternalError("projected ray escapes the target fan")
        homes.append(home)
    pull_coeff = []
    for rho_idx in range(y_fan.n_rays):
        coeffs = []
        for c, sol in homes:
            if rho_idx in c:
                coeffs.append(sol[c.index(rho_idx)])
            else:
                coeffs.append(Fraction(0))
        pull_coeff.append(tuple(coeffs))

    pull_classes = [dd.divisor_class(a) for a in pull_coeff]
    rows_y = [
        [y_dd.class_basis[l][j] for l in range(rho_y)]
        for j in range(y_fan.n_rays)
    ]
    f_rows = []
    for k in range(atlas.fan.rho):
        rhs = [pull_classes[j][k] for j in range(y_fan.n_rays)]
        sol = linalg.solve(rows_y, rhs)
        if sol is None:
            raise InternalError("pullback does not factor through target classes")
        f_rows.append(tuple(sol))
    tm = TargetModel(
        source=atlas.fan,
        fan=y_fan,
        pullback=tuple(f_rows),
        ray_map=tuple(ray_map),
    )

    # certificates
    nef_img = PolyCone.from_generators(
        atlas.fan.rho,
        [primitive_fraction(tm.pull_class(g)) for g in y_dd.nef_cone.generators],
    )
    if nef_img != desc.sigma:
        raise InternalError("pullback of the target nef cone is not sigma")
    eff_img = PolyCone.from_generators(
        atlas.fan.rho,
        [primitive_fraction(tm.pull_class(g)) for g in y_dd.eff_cone.generators],
    )
    flat = PolyCone.from_inequalities(
        atlas.fan.rho, [], equations=_span_equations(desc.sigma)
    )
    if eff_img != atlas.inventory.eff.intersect(flat):
        raise InternalError(
            "pullback of the target effective cone is not the effective face"
        )
    return tm


def compose_quasi_elementary(
    atlas: ChamberAtlas,
    f_desc: RationalContractionDescriptor,
    g_atlas: ChamberAtlas,
    g_desc: RationalContractionDescriptor,
) -> RationalContractionDescriptor:
    """Composite of a quasi-elementary contraction with one on its target.

    g_atlas must be the chamber atlas of f's target model (as produced by
    target_model); g may also be the identity cone (the target's full nef
    chamber), in which case the composite is f itself.
    """
    tm = target_model(atlas, f_desc)
    if g_atlas.fan.key() != tm.fan.key():
        raise ValidationError("second contraction is not on the target model")
    identity = g_desc.sigma == fanmod.data(tm.fan).nef_cone
    if not identity:
        qe_g = is_quasi_elementary(g_atlas, g_desc)
        if not qe_g.verdict:
            raise ValidationError("second contraction is not quasi-elementary")
    gens = [
        primitive_fraction(tm.pull_class(g)) for g in g_desc.sigma.generators
    ]
    sigma = PolyCone.from_generators(atlas.fan.rho, gens)
    desc = describe_face(atlas, sigma)
    qe = is_quasi_elementary(atlas, desc)
    if not qe.verdict:
        raise InternalError("composite contraction is not quasi-elementary")
    return desc
