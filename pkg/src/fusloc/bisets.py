"""Twisted-diagonal two-sided P-sets at desk scale.

A biset is stored as a multiplicity table over canonical orbit types
(T, eta), with Delta_eta(T) = {(eta(u), u)} the twisted diagonal; the
concrete model realizes it on points (block, label) in [k] x P with a
free right action.  Stability checks reduce to orbit-type multisets,
and the thick stable constructor equalizes fixed-point marks level by
level (largest T first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConstructionFailed, FreenessViolated, NotRealizable, NotSubgroup
from .fusion import FusionSystem
from .groups import FiniteGroup, GroupHom, Permutation


@dataclass(frozen=True)
class OrbitType:
    """Canonical class of a transitive A x P-set (A x P)/Delta_eta(T)."""

    T: FiniteGroup
    eta: GroupHom  # T -> A, injective

    def delta_pairs(self) -> tuple[tuple[Permutation, Permutation], ...]:
        return tuple((self.eta(u), u) for u in self.T.elements)

    def sort_key(self):
        return (-self.T.order, self.T.sort_key(), self.eta.sort_key())

    def __lt__(self, other: "OrbitType") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        return f"OrbitType(|T|={self.T.order})"


_CANON_CACHE: dict = {}


def canonical_type(A: FiniteGroup, P: FiniteGroup, pairs):
    """Canonical form of the twisted diagonal {(q, y)} <= A x P.

    pairs is a sequence of (q, y) with q = eta(y).  Returns
    (OrbitType, (a, n)) where conjugating by (a, n) in A x P carries
    the given diagonal onto the canonical one.
    """
    key = (A, P, tuple(sorted(pairs)))
    if key in _CANON_CACHE:
        return _CANON_CACHE[key]
    eta_of = {y: q for q, y in pairs}
    if len(eta_of) != len(pairs):
        raise FreenessViolated("stabilizer meets 1 x P nontrivially")
    best = None
    subcache: dict[frozenset, FiniteGroup] = {}
    for n in P.elements:
        ni = n.inverse()
        moved = {n * y * ni: q for y, q in eta_of.items()}
        fs = frozenset(moved)
        if fs not in subcache:
            subcache[fs] = P.subgroup_from_set(set(moved))
        Tn = subcache[fs]
        tkey = Tn.sort_key()
        for a in A.elements:
            ai = a.inverse()
            images = tuple(a * moved[t] * ai for t in Tn.elements)
            cand = (tkey, tuple(x.images for x in images))
            if best is None or cand < best[0]:
                best = (cand, Tn, images, a, n)
    _, Tn, images, a, n = best
    eta = GroupHom(Tn, A, dict(zip(Tn.elements, images)))
    out = (OrbitType(Tn, eta), (a, n))
    _CANON_CACHE[key] = out
    return out


@dataclass(frozen=True)
class Biset:
    """Multiplicity table over canonical P x P orbit types."""

    P: FiniteGroup
    multiplicity: tuple[tuple[OrbitType, int], ...]

    def as_dict(self) -> dict[OrbitType, int]:
        return dict(self.multiplicity)

    def size(self) -> int:
        n = self.P.order
        return sum(m * (n * n // t.T.order) for t, m in self.multiplicity)

    def ratio(self) -> int:
        return self.size() // self.P.order

    def to_json(self):
        return [
            {
                "T": [list(x.images) for x in t.T.elements],
                "eta": [list(t.eta(x).images) for x in t.T.elements],
                "mult": m,
            }
            for t, m in self.multiplicity
        ]


def biset(P: FiniteGroup, counts: dict[OrbitType, int]) -> Biset:
    """Canonicalize keys and drop zero entries."""
    merged: dict[OrbitType, int] = {}
    for t, m in counts.items():
        if m < 0:
            raise ValueError("negative multiplicity")
        if m == 0:
            continue
        canon, _ = canonical_type(P, P, [(t.eta(y), y) for y in t.T.elements])
        merged[canon] = merged.get(canon, 0) + m
    items = tuple(sorted(merged.items(), key=lambda tm: tm[0].sort_key()))
    return Biset(P=P, multiplicity=items)


def dual_type(P: FiniteGroup, t: OrbitType) -> OrbitType:
    """Exchange factors: (T, eta) becomes the class of (eta(T), eta^{-1})."""
    out, _ = canonical_type(P, P, [(y, t.eta(y)) for y in t.T.elements])
    return out


def dualize_biset(b: Biset) -> Biset:
    counts: dict[OrbitType, int] = {}
    for t, m in b.multiplicity:
        dt = dual_type(b.P, t)
        counts[dt] = counts.get(dt, 0) + m
    return biset(b.P, counts)


# -- concrete point model -----------------------------------------------------


@dataclass(frozen=True)
class OrbitCopy:
    type: OrbitType
    offset: int  # first block index
    nblocks: int
    transversal: tuple[Permutation, ...]  # left coset reps of eta(T) in P


class ConcreteBiset:
    """Points (i, u) in [k] x P; right action (i, u) * w = (i, uw).

    The left action of x in P is (i, u) -> (sigma_x[i], label_x[i] * u);
    the two-sided action is act(x, y, pt) = x * pt * y^{-1}.
    """

    def __init__(self, P: FiniteGroup, copies: list[OrbitCopy]):
        self.P = P
        self.copies = tuple(copies)
        self.k = sum(c.nblocks for c in copies)
        self.block_copy = tuple(
            ci for ci, c in enumerate(copies) for _ in range(c.nblocks)
        )
        self.left_sigma: dict[Permutation, tuple[int, ...]] = {}
        self.left_label: dict[Permutation, tuple[Permutation, ...]] = {}
        coset_index = []
        eta_inv = []
        for c in copies:
            img = [c.type.eta(y) for y in c.type.T.elements]
            idx = {}
            for j, rep in enumerate(c.transversal):
                for h in img:
                    idx[rep * h] = j
            coset_index.append(idx)
            eta_inv.append({c.type.eta(y): y for y in c.type.T.elements})
        for x in P.elements:
            sig = []
            lab = []
            for ci, c in enumerate(copies):
                for j, rep in enumerate(c.transversal):
                    moved = x * rep
                    j2 = coset_index[ci][moved]
                    sig.append(c.offset + j2)
                    t = eta_inv[ci][c.transversal[j2].inverse() * moved]
                    lab.append(t)
            self.left_sigma[x] = tuple(sig)
            self.left_label[x] = tuple(lab)

    def size(self) -> int:
        return self.k * self.P.order

    def ratio(self) -> int:
        return self.k

    def act_left(self, x: Permutation, pt):
        i, u = pt
        return (self.left_sigma[x][i], self.left_label[x][i] * u)

    def act_right(self, pt, w: Permutation):
        i, u = pt
        return (i, u * w)

    def act(self, x: Permutation, y: Permutation, pt):
        i, u = pt
        return (self.left_sigma[x][i], self.left_label[x][i] * u * y.inverse())

    def points(self):
        for i in range(self.k):
            for u in self.P.elements:
                yield (i, u)


def realize(b: Biset) -> ConcreteBiset:
    copies = []
    offset = 0
    P = b.P
    for t, m in b.multiplicity:
        img = P.subgroup_from_set({t.eta(y) for y in t.T.elements})
        reps = sorted({min(x * h for h in img) for x in P.elements})
        for _ in range(m):
            copies.append(
                OrbitCopy(type=t, offset=offset, nblocks=len(reps), transversal=tuple(reps))
            )
            offset += len(reps)
    return ConcreteBiset(P, copies)


def dualize(omega: ConcreteBiset) -> ConcreteBiset:
    """Concrete realization of the factor-exchanged biset."""
    counts = orbit_decompose(omega, omega.P)
    dual: dict[OrbitType, int] = {}
    for t, m in counts.items():
        dt = dual_type(omega.P, t)
        dual[dt] = dual.get(dt, 0) + m
    return realize(biset(omega.P, dual))


# -- orbit decomposition ------------------------------------------------------


@dataclass(frozen=True)
class OrbitRecord:
    type: OrbitType
    blocks: tuple[int, ...]
    base_point: tuple[int, Permutation]  # stabilizer in Q x P is exactly Delta


def _block_orbits(omega: ConcreteBiset, Q: FiniteGroup, twist: GroupHom | None):
    gens = Q.generators or (Q.identity(),)
    sigmas = []
    for q in gens:
        x = twist(q) if twist is not None else q
        sigmas.append(omega.left_sigma[x])
    seen = [False] * omega.k
    orbits = []
    for start in range(omega.k):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        blk = [start]
        while stack:
            i = stack.pop()
            for sig in sigmas:
                j = sig[i]
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
                    blk.append(j)
        orbits.append(tuple(sorted(blk)))
    return orbits


def orbit_decompose(
    omega: ConcreteBiset,
    Q: FiniteGroup,
    twist: GroupHom | None = None,
) -> dict[OrbitType, int]:
    """Multiset of canonical Q x P orbit types.

    With twist phi: Q -> P, the left action is through phi (used for the
    stability comparisons); types are computed from point stabilizers.
    """
    counts: dict[OrbitType, int] = {}
    for rec in orbit_records(omega, Q, twist=twist):
        counts[rec.type] = counts.get(rec.type, 0) + 1
    return counts


def orbit_records(
    omega: ConcreteBiset,
    Q: FiniteGroup,
    twist: GroupHom | None = None,
) -> tuple[OrbitRecord, ...]:
    """Q x P-orbits with canonical types and exact-stabilizer base points."""
    if not Q.is_subgroup_of(omega.P):
        raise NotSubgroup("acting group must be a subgroup of P")
    out = []
    for blocks in _block_orbits(omega, Q, twist):
        i0 = blocks[0]
        pairs = []
        for q in Q.elements:
            x = twist(q) if twist is not None else q
            if omega.left_sigma[x][i0] == i0:
                pairs.append((q, omega.left_label[x][i0]))
        if len({y for _, y in pairs}) != len(pairs):
            raise FreenessViolated("point stabilizer is not a twisted diagonal")
        t, (a, n) = canonical_type(Q, omega.P, pairs)
        x = twist(a) if twist is not None else a
        base = omega.act(x, n, (i0, omega.P.identity()))
        out.append(OrbitRecord(type=t, blocks=blocks, base_point=base))
    return tuple(sorted(out, key=lambda r: (r.type.sort_key(), r.blocks)))


def fixed_point_count(omega: ConcreteBiset, t: OrbitType) -> int:
    """|Omega^{Delta_eta(T)}| by direct point scan."""
    pairs = [(t.eta(y), y) for y in t.T.elements]
    count = 0
    for i in range(omega.k):
        for u in omega.P.elements:
            if all(
                omega.left_sigma[q][i] == i
                and omega.left_label[q][i] * u == u * y
                for q, y in pairs
            ):
                count += 1
    return count


def orbit_mark(P: FiniteGroup, col: OrbitType, row: OrbitType) -> int:
    """Mark of (P x P)/Delta_col at the subgroup Delta_row via transporter count."""
    rpairs = [(row.eta(y), y) for y in row.T.elements]
    cset = set(zip((col.eta(y) for y in col.T.elements), col.T.elements))
    count = 0
    for a in P.elements:
        ai = a.inverse()
        for b in P.elements:
            bi = b.inverse()
            if all((ai * q * a, bi * y * b) in cset for q, y in rpairs):
                count += 1
    return count // col.T.order


# -- basicness ----------------------------------------------------------------


@dataclass(frozen=True)
class BasicReport:
    passed: bool
    thick: bool
    ratio: int
    ratio_mod_p: int
    failures: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.passed


def fusion_orbit_types(F: FusionSystem) -> tuple[OrbitType, ...]:
    """Canonical P x P types (T, phi) with phi in F(P,T), largest T first."""
    P = F.P
    seen_class: set[FiniteGroup] = set()
    types: list[OrbitType] = []
    for T in sorted(F.objects, key=lambda S: (-S.order, S.sort_key())):
        if T in seen_class:
            continue
        conj = {P.subgroup_from_set({n * t * n.inverse() for t in T}) for n in P}
        seen_class.update(conj)
        found = set()
        for phi in F.hom(P, T):
            t, _ = canonical_type(P, P, [(phi(y), y) for y in T.elements])
            found.add(t)
        types.extend(sorted(found, key=lambda t: t.sort_key()))
    return tuple(types)


def check_basic(omega: ConcreteBiset, F: FusionSystem) -> BasicReport:
    """Self-duality, parity, stability and twisted-diagonal typing."""
    from .groups import inclusion_hom

    failures: list[str] = []
    P = F.P
    counts = orbit_decompose(omega, P)

    dual: dict[OrbitType, int] = {}
    for t, m in counts.items():
        dt = dual_type(P, t)
        dual[dt] = dual.get(dt, 0) + m
    if dual != counts:
        failures.append("self-duality: orbit types of the dual differ")

    ratio = omega.k
    if ratio % F.p == 0:
        failures.append(f"parity: |Omega|/|P| = {ratio} is 0 mod {F.p}")

    fusion_types = set(fusion_orbit_types(F))
    for t in counts:
        if t not in fusion_types:
            failures.append(f"typing: orbit type with |T| = {t.T.order} not fusion-realized")

    for Q in F.objects:
        base = orbit_decompose(omega, Q, twist=inclusion_hom(P, Q))
        for phi in F.hom(P, Q):
            got = orbit_decompose(omega, Q, twist=phi)
            if got != base:
                failures.append(
                    f"stability: restriction along a morphism from |Q| = {Q.order} differs"
                )
                break

    thick = all(counts.get(t, 0) >= 2 for t in fusion_types)
    return BasicReport(
        passed=not failures,
        thick=thick,
        ratio=ratio,
        ratio_mod_p=ratio % F.p,
        failures=tuple(failures),
    )


# -- constructor --------------------------------------------------------------


def omega_group(F: FusionSystem) -> Biset:
    """The ambient group G as a P x P-biset (fully stable, self-dual)."""
    if F.G is None:
        raise NotRealizable("group biset needs a provenance group")
    G, P = F.G, F.P
    counts: dict[OrbitType, int] = {}
    seen: set[Permutation] = set()
    for g in G.elements:
        if g in seen:
            continue
        coset = {a * g * b for a in P for b in P}
        seen.update(coset)
        gi = g.inverse()
        telems = {u for u in P if g * u * gi in P}
        t, _ = canonical_type(P, P, [(g * u * gi, u) for u in telems])
        counts[t] = counts.get(t, 0) + 1
    return biset(P, counts)


def _stability_ok(
    marks: dict[tuple[OrbitType, OrbitType], int],
    m: dict[OrbitType, int],
    blocks: list[list[OrbitType]],
) -> bool:
    for blk in blocks:
        vals = set()
        for row in blk:
            vals.add(sum(marks[(col, row)] * mc for col, mc in m.items()))
        if len(vals) > 1:
            return False
    return True


@dataclass(frozen=True)
class ThickBasicSet:
    biset: Biset
    concrete: ConcreteBiset
    minimal: bool


def construct_thick_basic(F: FusionSystem, variant: int = 0) -> ThickBasicSet:
    """Deterministic thick stable set via level-by-level mark equalization.

    Processes T-levels from |P| downward; within one level the mark
    conditions are diagonal, so multiplicities follow from a minimal
    common value V fitting the congruences V = h(theta) mod d(theta).
    variant > 0 adds that many stability-preserving p-fold copies of the
    group biset (to produce distinct verified sets).
    """
    P, p = F.P, F.p
    types = fusion_orbit_types(F)
    marks = {(col, row): orbit_mark(P, col, row) for col in types for row in types}

    # group types into same-T blocks (by P-class of T, i.e. canonical T)
    blocks: list[list[OrbitType]] = []
    for t in types:
        if blocks and blocks[-1][0].T == t.T:
            blocks[-1].append(t)
        else:
            blocks.append([t])

    dual_of = {t: dual_type(P, t) for t in types}
    if any(dt not in set(types) for dt in dual_of.values()):
        raise ConstructionFailed("dual of a fusion type is not fusion-realized")

    m: dict[OrbitType, int] = {t: 0 for t in types}
    top = [t for t in types if t.T == P]
    c = 2
    while (c * len(top)) % p == 0:
        c += 1
    for t in top:
        m[t] = c

    # duality links same-order blocks; linked blocks must share one mark
    # value, so merge them before fitting the congruences
    block_of = {t: bi for bi, blk in enumerate(blocks) for t in blk}
    parent = list(range(len(blocks)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for t in types:
        a, b = find(block_of[t]), find(block_of[dual_of[t]])
        if a != b:
            parent[max(a, b)] = min(a, b)

    components: dict[int, list[OrbitType]] = {}
    for bi, blk in enumerate(blocks):
        components.setdefault(find(bi), []).extend(blk)

    for rows in components.values():
        if rows[0].T == P:
            continue
        h = {}
        d = {}
        for row in rows:
            h[row] = sum(marks[(col, row)] * m[col] for col in types if m[col])
            d[row] = marks[(row, row)]
        lo = max(h[row] + 2 * d[row] for row in rows)
        lcm = math.lcm(*(d[row] for row in rows))
        V = None
        for cand in range(lo, lo + lcm + 1):
            if all((cand - h[row]) % d[row] == 0 for row in rows):
                V = cand
                break
        if V is None:
            raise ConstructionFailed(
                f"no common mark value at level |T| = {rows[0].T.order}"
            )
        for row in rows:
            m[row] = (V - h[row]) // d[row]

    def conditions_hold(mm: dict[OrbitType, int]) -> bool:
        if any(v < 2 for v in mm.values()):
            return False
        if sum(mm[t] for t in top) % p == 0:
            return False
        if any(mm[t] != mm[dual_of[t]] for t in types):
            return False
        return _stability_ok(marks, mm, blocks)

    if not conditions_hold(m):
        raise ConstructionFailed("equalized table fails its own conditions")

    # greedy removal pass, largest types first, one dual pair at a time
    def removed(mm: dict[OrbitType, int], t: OrbitType) -> dict[OrbitType, int]:
        trial = dict(mm)
        trial[t] -= 1
        trial[dual_of[t]] -= 1
        return trial

    changed = True
    while changed:
        changed = False
        for t in types:
            trial = removed(m, t)
            if all(v >= 0 for v in trial.values()) and conditions_hold(trial):
                m = trial
                changed = True
    minimal = not any(conditions_hold(removed(m, t)) for t in types)

    if variant:
        extra = omega_group(F)
        for t, mg in extra.multiplicity:
            m[t] = m.get(t, 0) + variant * p * mg

    b = biset(P, m)
    return ThickBasicSet(biset=b, concrete=realize(b), minimal=minimal)
