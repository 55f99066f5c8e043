"""Exact finite-group kernel.

Permutation groups with full element enumeration at desk scale, subgroup
machinery, abelianization with explicit projections and sections, the
classical transfer map (Verlagerung), and homomorphisms of finite abelian
groups as integer matrices modulo orders.

Conventions: permutations act on the left, (s*t)(i) = s(t(i)); elements of a
group are always kept as a sorted tuple so equal subgroups compare equal and
every construction downstream is deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ClosureTooLarge, NotSubgroup
from .intlin import smith_solve, row_hnf, prime_power

DEFAULT_CAP = 50_000


class Permutation:
    """A permutation of {0..n-1} stored as the tuple of images."""

    __slots__ = ('images', '_hash')

    def __init__(self, images):
        images = tuple(images)
        if set(images) != set(range(len(images))):
            raise ValueError(f'not a permutation: {images}')
        self.images = images
        self._hash = hash(images)

    @staticmethod
    def identity(n):
        return Permutation(range(n))

    @staticmethod
    def from_cycles(n, cycles):
        # cycles act simultaneously, so they must be disjoint
        images = list(range(n))
        for cyc in cycles:
            cyc = list(cyc)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a] = b
        return Permutation(images)

    @property
    def degree(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i]

    def __mul__(self, other):
        return Permutation(self.images[j] for j in other.images)

    def inverse(self):
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.images < other.images

    def __le__(self, other):
        return self.images <= other.images

    def is_identity(self):
        return all(i == j for i, j in enumerate(self.images))

    def order(self):
        k = 1
        x = self
        while not x.is_identity():
            x = x * self
            k += 1
        return k

    def cycles(self):
        seen = set()
        out = []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                seen.add(i)
                continue
            cyc = [i]
            j = self.images[i]
            while j != i:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            seen.add(i)
            out.append(cyc)
        return out

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return 'id'
        return ''.join('(' + ' '.join(map(str, c)) + ')' for c in cyc)


class FiniteGroup:
    """A finite permutation group with its full element list.

    Use generate_group / from_elements to construct; the plain constructor
    trusts that elements is the sorted closure of generators.
    """

    __slots__ = ('degree', 'generators', 'elements', '_set', '_hash')

    def __init__(self, degree, generators, elements):
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = tuple(elements)
        self._set = frozenset(self.elements)
        self._hash = hash((degree, self.elements))

    @staticmethod
    def from_elements(degree, elements):
        """Group from a known-closed element set, with a small generating set."""
        elements = tuple(sorted(set(elements)))
        gens = small_generating_set(degree, elements)
        return FiniteGroup(degree, gens, elements)

    @property
    def order(self):
        return len(self.elements)

    def identity(self):
        return Permutation.identity(self.degree)

    def __contains__(self, x):
        return x in self._set

    def __iter__(self):
        return iter(self.elements)

    def __len__(self):
        return len(self.elements)

    def __eq__(self, other):
        return (isinstance(other, FiniteGroup)
                and self.degree == other.degree
                and self.elements == other.elements)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.order, self.elements) < (other.order, other.elements)

    def __repr__(self):
        return f'<group order {self.order} degree {self.degree}>'

    def sort_key(self):
        return (self.order, tuple(p.images for p in self.elements))

    def is_subgroup_of(self, other):
        return self.degree == other.degree and self._set <= other._set

    def is_normal_in(self, other):
        return all(g * h * g.inverse() in self._set
                   for g in other.generators for h in self.generators)

    def is_abelian(self):
        return all(a * b == b * a
                   for a in self.generators for b in self.generators)

    def conjugate(self, g):
        """The subgroup g * self * g^-1."""
        gi = g.inverse()
        return FiniteGroup(self.degree,
                           tuple(sorted(g * h * gi for h in self.generators))
                           or (),
                           sorted(g * x * gi for x in self.elements))

    def subgroup_from_set(self, elems):
        """Subgroup of self from a known-closed subset of self.elements."""
        return FiniteGroup.from_elements(self.degree, elems)


def generate_group(gens, degree=None, cap=DEFAULT_CAP):
    """Closure of a generator list as a FiniteGroup."""
    gens = tuple(gens)
    if degree is None:
        if not gens:
            raise ValueError('need degree for an empty generator list')
        degree = gens[0].degree
    if any(g.degree != degree for g in gens):
        raise ValueError('generators must share one degree')
    e = Permutation.identity(degree)
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x * g
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise ClosureTooLarge(
                            f'closure exceeded cap {cap}')
        frontier = nxt
    return FiniteGroup(degree, gens, sorted(seen))


def small_generating_set(degree, elements):
    """Greedy small generating set for a closed element collection."""
    gens = []
    have = {Permutation.identity(degree)}
    for x in sorted(elements):
        if x not in have:
            gens.append(x)
            have = set(generate_group(gens, degree=degree).elements)
    return tuple(gens)


def subgroups(G, cap=DEFAULT_CAP):
    """All subgroups of G by breadth-first cyclic extension.

    Sorted by (order, element list) so the result is deterministic.
    """
    triv = generate_group((), degree=G.degree)
    found = {triv.elements: triv}
    frontier = [triv]
    while frontier:
        nxt = []
        for H in frontier:
            for g in G.elements:
                if g in H:
                    continue
                K = generate_group(H.generators + (g,), degree=G.degree,
                                   cap=max(cap, G.order))
                if K.elements not in found:
                    found[K.elements] = K
                    nxt.append(K)
        frontier = nxt
    return sorted(found.values(), key=FiniteGroup.sort_key)


def normalizer(G, H):
    if not H.is_subgroup_of(G):
        raise NotSubgroup('normalizer: H is not a subgroup of G')
    elems = [g for g in G.elements
             if all(g * h * g.inverse() in H for h in H.generators)]
    return FiniteGroup.from_elements(G.degree, elems)


def centralizer(G, H):
    if not H.is_subgroup_of(G):
        raise NotSubgroup('centralizer: H is not a subgroup of G')
    elems = [g for g in G.elements
             if all(g * h == h * g for h in H.generators)]
    return FiniteGroup.from_elements(G.degree, elems)


def center(G):
    return centralizer(G, G)


def normal_closure(G, seeds):
    """Smallest subgroup of G containing seeds and normal in G."""
    current = set(generate_group(tuple(seeds), degree=G.degree).elements)
    while True:
        extra = []
        for g in G.generators:
            gi = g.inverse()
            for x in current:
                y = g * x * gi
                if y not in current:
                    extra.append(y)
        if not extra:
            break
        gens = small_generating_set(G.degree, current) + tuple(extra)
        current = set(generate_group(gens, degree=G.degree).elements)
    return FiniteGroup.from_elements(G.degree, current)


def left_coset_reps(H, K):
    """Minimal-element representatives of the left cosets hK, sorted."""
    if not K.is_subgroup_of(H):
        raise NotSubgroup('coset reps: K is not a subgroup of H')
    assigned = {}
    for h in H.elements:
        if h not in assigned:
            coset = sorted(h * k for k in K.elements)
            rep = coset[0]
            for x in coset:
                assigned[x] = rep
    return sorted(set(assigned.values())), assigned


class GroupHom:
    """A homomorphism between enumerated finite groups, stored elementwise.

    The map is verified on all (element, generator) products, which by
    induction on word length forces the homomorphism property everywhere.
    """

    __slots__ = ('source', 'target', '_map', '_hash', '_inj')

    def __init__(self, source, target, mapping):
        self.source = source
        self.target = target
        self._map = dict(mapping)
        e = source.identity()
        if self._map.get(e) != target.identity():
            raise ValueError('homomorphism must send identity to identity')
        for x in source.elements:
            fx = self._map[x]
            if fx not in target:
                raise ValueError('image outside target group')
            for g in source.generators:
                if self._map[x * g] != fx * self._map[g]:
                    raise ValueError('not a homomorphism')
        self._inj = len(set(self._map.values())) == len(source.elements)
        self._hash = hash((source, target,
                           tuple(self._map[x] for x in source.elements)))

    @staticmethod
    def from_gen_images(source, target, gen_images, cap=DEFAULT_CAP):
        """Extend generator images; fails if the images are inconsistent."""
        table = {source.identity(): target.identity()}
        frontier = [source.identity()]
        gens = list(gen_images.items())
        while frontier:
            nxt = []
            for x in frontier:
                fx = table[x]
                for g, fg in gens:
                    y = x * g
                    fy = fx * fg
                    if y in table:
                        if table[y] != fy:
                            raise ValueError('generator images inconsistent')
                    else:
                        table[y] = fy
                        nxt.append(y)
            frontier = nxt
        if len(table) != len(source.elements):
            raise ValueError('gen_images do not generate the source')
        return GroupHom(source, target, table)

    @staticmethod
    def from_callable(source, target, fn):
        return GroupHom(source, target, {x: fn(x) for x in source.elements})

    def __call__(self, x):
        return self._map[x]

    @property
    def is_injective(self):
        return self._inj

    def is_bijective(self):
        return self._inj and len(self.source) == len(self.target)

    def compose(self, other):
        """self after other (apply other first)."""
        return GroupHom(other.source, self.target,
                        {x: self._map[other(x)] for x in other.source.elements})

    def image(self):
        return FiniteGroup.from_elements(self.target.degree,
                                         set(self._map.values()))

    def kernel(self):
        e = self.target.identity()
        return FiniteGroup.from_elements(
            self.source.degree,
            [x for x in self.source.elements if self._map[x] == e])

    def inverse(self):
        if not self.is_bijective():
            raise ValueError('not bijective')
        return GroupHom(self.target, self.source,
                        {v: k for k, v in self._map.items()})

    def restrict(self, sub):
        if not sub.is_subgroup_of(self.source):
            raise NotSubgroup('restrict: not a subgroup of the source')
        return GroupHom(sub, self.target,
                        {x: self._map[x] for x in sub.elements})

    def astype(self, new_target):
        """Same map viewed into a different (containing) target group."""
        img = set(self._map.values())
        if not img <= new_target._set:
            raise NotSubgroup('astype: image not inside new target')
        return GroupHom(self.source, new_target, self._map)

    def __eq__(self, other):
        return (isinstance(other, GroupHom)
                and self.source == other.source
                and self.target == other.target
                and self._map == other._map)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return tuple(self._map[x].images for x in self.source.elements)

    def __repr__(self):
        gens = {g: self._map[g] for g in self.source.generators}
        return f'<hom {self.source.order}->{self.target.order} {gens}>'


def identity_hom(G):
    return GroupHom(G, G, {x: x for x in G.elements})


def inclusion_hom(G, H):
    """Inclusion H -> G."""
    if not H.is_subgroup_of(G):
        raise NotSubgroup('inclusion: not a subgroup')
    return GroupHom(H, G, {x: x for x in H.elements})


def conjugation_hom(Q, u, R):
    """The map R -> Q, x -> u x u^-1; requires u R u^-1 <= Q."""
    ui = u.inverse()
    table = {x: u * x * ui for x in R.elements}
    if any(v not in Q for v in table.values()):
        raise NotSubgroup('conjugation does not land in the target')
    return GroupHom(R, Q, table)


@dataclass(frozen=True)
class DirectProduct:
    """A x B realized on the disjoint union of their points."""
    group: FiniteGroup
    left_degree: int
    right_degree: int

    def pair(self, a, b):
        return Permutation(tuple(a.images)
                           + tuple(self.left_degree + i for i in b.images))

    def unpair(self, x):
        a = Permutation(x.images[:self.left_degree])
        b = Permutation(i - self.left_degree
                        for i in x.images[self.left_degree:])
        return a, b


def direct_product(A, B):
    dp_elems = []
    da, db = A.degree, B.degree
    for a in A.elements:
        pre = tuple(a.images)
        for b in B.elements:
            dp_elems.append(Permutation(pre + tuple(da + i for i in b.images)))
    G = FiniteGroup.from_elements(da + db, dp_elems)
    return DirectProduct(G, da, db)


@dataclass(frozen=True)
class Quotient:
    """G/N with the quotient realized as a permutation group on cosets."""
    group: FiniteGroup
    projection: GroupHom

    def section(self, q):
        """Minimal coset representative mapping to q."""
        return self._reps[q]

    def __post_init__(self):
        reps = {}
        for x in self.projection.source.elements:
            q = self.projection(x)
            if q not in reps or x < reps[q]:
                reps[q] = x
        object.__setattr__(self, '_reps', reps)


def quotient_group(G, N):
    """G/N for N normal in G, acting on the left cosets of N."""
    if not N.is_subgroup_of(G):
        raise NotSubgroup('quotient: N is not a subgroup')
    if not N.is_normal_in(G):
        raise NotSubgroup('quotient: N is not normal')
    _, coset_of = left_coset_reps(G, N)
    reps = sorted(set(coset_of.values()))
    index = {r: i for i, r in enumerate(reps)}
    table = {}
    for g in G.elements:
        table[g] = Permutation(index[coset_of[g * r]] for r in reps)
    Q = FiniteGroup.from_elements(len(reps), set(table.values()))
    return Quotient(Q, GroupHom(G, Q, table))


@dataclass(frozen=True)
class FinAb:
    """A finite abelian group as a direct sum of cyclic prime-power factors.

    Elements are integer tuples modulo orders.  The orders need not be sorted
    globally (direct sums keep their block structure); invariant_factors()
    gives the canonical isomorphism invariant.
    """
    orders: tuple

    def __post_init__(self):
        object.__setattr__(self, 'orders', tuple(int(d) for d in self.orders))
        for d in self.orders:
            if prime_power(d) is None:
                raise ValueError(f'order {d} is not a prime power > 1')

    @property
    def rank(self):
        return len(self.orders)

    @property
    def order(self):
        n = 1
        for d in self.orders:
            n *= d
        return n

    def is_trivial(self):
        return not self.orders

    def zero(self):
        return (0,) * len(self.orders)

    def reduce(self, v):
        return tuple(int(x) % d for x, d in zip(v, self.orders))

    def add(self, u, v):
        return tuple((x + y) % d for x, y, d in zip(u, v, self.orders))

    def neg(self, v):
        return tuple((-x) % d for x, d in zip(v, self.orders))

    def sub(self, u, v):
        return tuple((x - y) % d for x, y, d in zip(u, v, self.orders))

    def smul(self, k, v):
        return tuple((k * x) % d for x, d in zip(v, self.orders))

    def elements(self):
        return itertools.product(*[range(d) for d in self.orders])

    def invariant_factors(self):
        """Canonical form: primes ascending, powers descending per prime."""
        return tuple(sorted(self.orders,
                            key=lambda d: (prime_power(d)[0],
                                           -prime_power(d)[1])))

    def element_order(self, v):
        n = 1
        for x, d in zip(v, self.orders):
            if x % d:
                n = _lcm(n, d // _gcd(x % d, d))
        return n


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _lcm(a, b):
    return a * b // _gcd(a, b)


def finab_direct_sum(parts):
    """(sum, offsets) concatenating FinAb blocks; offsets[i] = start index."""
    orders = []
    offsets = []
    for A in parts:
        offsets.append(len(orders))
        orders.extend(A.orders)
    return FinAb(tuple(orders)), offsets


class AbHom:
    """Homomorphism of FinAb groups as an integer matrix modulo target orders.

    matrix has len(target.orders) rows; column j is the image of the jth
    source generator.  Entries are kept reduced, so equal maps have equal
    matrices.
    """

    __slots__ = ('source', 'target', 'matrix', '_hash')

    def __init__(self, source, target, matrix):
        self.source = source
        self.target = target
        rows = []
        for i, t in enumerate(target.orders):
            rows.append(tuple(int(x) % t for x in matrix[i]))
        if len(matrix) != len(target.orders):
            raise ValueError('matrix row count must match target rank')
        for row in rows:
            if len(row) != len(source.orders):
                raise ValueError('matrix column count must match source rank')
        # well-definedness: order_j * column_j must vanish in the target
        for j, d in enumerate(source.orders):
            for i, t in enumerate(target.orders):
                if (d * rows[i][j]) % t:
                    raise ValueError('matrix does not define a homomorphism')
        self.matrix = tuple(rows)
        self._hash = hash((source, target, self.matrix))

    @staticmethod
    def from_columns(source, target, cols):
        rows = [[cols[j][i] for j in range(len(source.orders))]
                for i in range(len(target.orders))]
        return AbHom(source, target, rows)

    @staticmethod
    def identity(A):
        return AbHom(A, A, [[int(i == j) for j in range(A.rank)]
                            for i in range(A.rank)])

    @staticmethod
    def zero(source, target):
        return AbHom(source, target,
                     [[0] * source.rank for _ in range(target.rank)])

    def __call__(self, v):
        return tuple(sum(a * x for a, x in zip(row, v)) % t
                     for row, t in zip(self.matrix, self.target.orders))

    def compose(self, other):
        """self after other."""
        if other.target != self.source:
            raise ValueError('composition mismatch')
        rows = [[sum(self.matrix[i][k] * other.matrix[k][j]
                     for k in range(self.source.rank))
                 for j in range(other.source.rank)]
                for i in range(self.target.rank)]
        return AbHom(other.source, self.target, rows)

    def add(self, other):
        rows = [[a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.matrix, other.matrix)]
        return AbHom(self.source, self.target, rows)

    def neg(self):
        return AbHom(self.source, self.target,
                     [[-a for a in row] for row in self.matrix])

    def sub(self, other):
        return self.add(other.neg())

    def is_zero(self):
        return all(all(a == 0 for a in row) for row in self.matrix)

    def image_order(self):
        m = self.target.rank
        if m == 0:
            return 1
        rows = [[self.matrix[i][j] for i in range(m)]
                for j in range(self.source.rank)]
        rows += [[self.target.orders[i] if k == i else 0 for k in range(m)]
                 for i in range(m)]
        H = row_hnf(rows, ncols=m)
        index = 1
        for i, row in enumerate(H):
            c = next(j for j, x in enumerate(row) if x)
            index *= row[c]
        return self.target.order // index

    def is_injective(self):
        return self.image_order() == self.source.order

    def is_surjective(self):
        return self.image_order() == self.target.order

    def is_iso(self):
        return (self.source.order == self.target.order
                and self.image_order() == self.source.order)

    def solve(self, y):
        """Canonical x with self(x) = y, or NoSolution."""
        x = smith_solve([list(r) for r in self.matrix], list(y),
                        list(self.target.orders))
        return self.source.reduce(x)

    def inverse(self):
        if not self.is_iso():
            raise ValueError('not an isomorphism')
        cols = []
        for i in range(self.target.rank):
            e = tuple(int(k == i) for k in range(self.target.rank))
            cols.append(self.solve(e))
        return AbHom.from_columns(self.target, self.source, cols)

    def __eq__(self, other):
        return (isinstance(other, AbHom)
                and self.source == other.source
                and self.target == other.target
                and self.matrix == other.matrix)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return (f'<abhom {self.source.orders}->{self.target.orders} '
                f'{self.matrix}>')


@dataclass(frozen=True, eq=False)
class Abelianization:
    """An abelian quotient H/N with explicit projection and section.

    kernel is N; for abelianization proper N = [H,H].  basis lists elements
    of H whose classes are independent generators matching ab.orders;
    section(v) is the deterministic product of basis powers.
    """
    group: FiniteGroup
    kernel: FiniteGroup
    ab: FinAb
    basis: tuple
    _table: dict

    def project(self, x):
        return self._table[x]

    def section(self, v):
        out = self.group.identity()
        for b, k in zip(self.basis, v):
            for _ in range(int(k)):
                out = out * b
        return out


def _quotient_mult_structure(elements, N_elements):
    """Coset reps (min element) and multiplication table for H/N."""
    coset_of = {}
    for x in elements:
        if x in coset_of:
            continue
        coset = sorted(x * n for n in N_elements)
        rep = coset[0]
        for y in coset:
            coset_of[y] = rep
    reps = sorted(set(coset_of.values()))
    return reps, coset_of


def _elem_order(mult, e, x):
    k = 1
    y = x
    while y != e:
        y = mult(y, x)
        k += 1
    return k


def _p_basis(elems, mult, e):
    """Basis of an abelian p-group given by reps and a mult function.

    Returns (basis elements, orders descending).  Recursive peeling: a
    maximal-order element is a direct summand; lift a basis of the quotient
    preserving orders.
    """
    if len(elems) == 1:
        return [], []
    orders = {x: _elem_order(mult, e, x) for x in elems}
    maxo = max(orders.values())
    a = min(x for x in elems if orders[x] == maxo)
    powers = [e]
    while True:
        nxt = mult(powers[-1], a)
        if nxt == e:
            break
        powers.append(nxt)
    dlog = {x: i for i, x in enumerate(powers)}
    da = len(powers)
    coset_of = {}
    for x in elems:
        if x in coset_of:
            continue
        coset = sorted(mult(x, ai) for ai in powers)
        rep = coset[0]
        for y in coset:
            coset_of[y] = rep
    qreps = sorted(set(coset_of.values()))

    def qmult(u, v):
        return coset_of[mult(u, v)]

    qe = coset_of[e]
    qbasis, qorders = _p_basis(qreps, qmult, qe)
    lifted = []
    for b, mo in zip(qbasis, qorders):
        bm = b
        for _ in range(mo - 1):
            bm = mult(bm, b)
        j = dlog[bm]
        # order(b) <= da forces mo | j, so b * a^t with t = -(j/mo) kills b^mo
        t = (-(j // mo)) % (da // mo)
        bp = b
        for _ in range(t):
            bp = mult(bp, a)
        assert _elem_order(mult, e, bp) == mo
        lifted.append(bp)
    return [a] + lifted, [da] + qorders


def abelian_quotient(H, N):
    """H/N as a FinAb with projection table and basis; N must be normal and
    contain the derived subgroup of H."""
    if not (N.is_subgroup_of(H) and N.is_normal_in(H)):
        raise NotSubgroup('abelian_quotient: N must be normal in H')
    for a in H.generators:
        for b in H.generators:
            if a * b * a.inverse() * b.inverse() not in N:
                raise ValueError('quotient is not abelian')
    reps, coset_of = _quotient_mult_structure(H.elements, N.elements)

    def mult(u, v):
        return coset_of[u * v]

    e = coset_of[H.identity()]
    q = len(reps)
    primes = sorted({prime_power(_elem_order(mult, e, x))[0]
                     for x in reps if x != e}) if q > 1 else []
    basis = []
    orders = []
    for p in primes:
        part = [x for x in reps
                if x == e or prime_power(_elem_order(mult, e, x))[0] == p]
        pb, po = _p_basis(sorted(part), mult, e)
        basis.extend(pb)
        orders.extend(po)
    total = 1
    for d in orders:
        total *= d
    if total != q:
        raise ValueError('quotient is not abelian')
    ab = FinAb(tuple(orders))
    # discrete log over the basis box
    power_tables = []
    for b, d in zip(basis, orders):
        tab = [e]
        for _ in range(d - 1):
            tab.append(mult(tab[-1], b))
        power_tables.append(tab)
    dlog = {}
    for vec in itertools.product(*[range(d) for d in orders]):
        x = e
        for tab, k in zip(power_tables, vec):
            x = mult(x, tab[k])
        dlog[x] = vec
    if len(dlog) != q:
        raise ValueError('quotient is not abelian')
    table = {x: dlog[coset_of[x]] for x in H.elements}
    return Abelianization(H, N, ab, tuple(basis), table)


_AB_CACHE = {}


def abelianization(H):
    """(H/[H,H], projection, section) in canonical FinAb form, cached."""
    cached = _AB_CACHE.get(H)
    if cached is not None:
        return cached
    comms = {a * b * a.inverse() * b.inverse()
             for a in H.generators for b in H.generators}
    derived = normal_closure(H, sorted(comms))
    out = abelian_quotient(H, derived)
    _AB_CACHE[H] = out
    return out


def induced_ab_hom(f, ab_src, ab_tgt):
    """The map on abelian quotients induced by a group hom f."""
    cols = [ab_tgt.project(f(b)) for b in ab_src.basis]
    return AbHom.from_columns(ab_src.ab, ab_tgt.ab, cols)


def transfer(H, K):
    """Classical transfer (Verlagerung) ab(H) -> ab(K) for K <= H."""
    if not K.is_subgroup_of(H):
        raise NotSubgroup('transfer: K is not a subgroup of H')
    abH = abelianization(H)
    abK = abelianization(K)
    reps, coset_of = left_coset_reps(H, K)
    cols = []
    for b in abH.basis:
        total = abK.ab.zero()
        for t in reps:
            ht = b * t
            t2 = coset_of[ht]
            k = t2.inverse() * ht
            total = abK.ab.add(total, abK.project(k))
        cols.append(total)
    return AbHom.from_columns(abH.ab, abK.ab, cols)


def cotransfer(f):
    """Transfer along an injective hom f: K -> H, as ab(H) -> ab(K).

    This is the contravariant abelianization functor on injective maps:
    restrict the classical transfer to the image and pull back along f.
    """
    if not f.is_injective:
        raise ValueError('cotransfer needs an injective homomorphism')
    img = f.image()
    t = transfer(f.target, img)
    iso = induced_ab_hom(GroupHom(f.source, img, {x: f(x)
                                                  for x in f.source.elements}),
                         abelianization(f.source), abelianization(img))
    return iso.inverse().compose(t)
