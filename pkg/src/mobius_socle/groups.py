"""Finite permutation groups, exhaustive subgroup enumeration, and
subgroup lattices.

Groups are given by generating permutations; elements are enumerated by
breadth-first closure and kept in canonical (lexicographic) order, so
subgroups can be stored as bitsets over element indices.  Enumeration of
all subgroups seeds with the cyclic subgroups and closes under joins,
processing one representative per conjugacy class and saturating each
class by conjugation, which keeps the join count small.

Everything is deterministic: identical inputs yield identical element
orders, bitsets, and lattice layouts.  Groups, subgroups, and lattices
are immutable once constructed.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import (
    EnumerationCapExceeded,
    InputError,
    NotAnAutomorphism,
    OrderCapExceeded,
    ParseError,
    UnsupportedDegree,
)
from .posets import Poset

DEFAULT_ORDER_CAP = 20000
DEFAULT_SUBGROUP_CAP = 50000

# full Cayley tables are only materialized below this order
_TABLE_LIMIT = 2500


def _compose(a, b):
    # (a . b)(x) = a(b(x))
    return tuple(a[i] for i in b)


def _invert_tuple(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


class Permutation:
    """A bijection of {0, ..., degree-1}, stored as the tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        d = len(images)
        if sorted(images) != list(range(d)):
            raise InputError(f"not a bijection on 0..{d - 1}: {images}")
        self.images = images

    @classmethod
    def identity(cls, degree):
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, degree, *cycles):
        """Permutation from disjoint cycles, e.g. from_cycles(5, (0, 1, 2))."""
        images = list(range(degree))
        for cyc in cycles:
            for i, v in enumerate(cyc):
                images[cyc[i]] = cyc[(i + 1) % len(cyc)]
        return cls(images)

    @property
    def degree(self):
        return len(self.images)

    def __mul__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        if self.degree != other.degree:
            raise InputError("degrees differ")
        return Permutation(_compose(self.images, other.images))

    def inverse(self):
        return Permutation(_invert_tuple(self.images))

    def __call__(self, point):
        return self.images[point]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


def generate_elements(generators, cap=DEFAULT_ORDER_CAP, degree=None):
    """Closure of the generators under composition, canonically sorted.

    Raises OrderCapExceeded as soon as the closure passes ``cap``.
    """
    gens = [g.images if isinstance(g, Permutation) else tuple(g) for g in generators]
    if degree is None:
        degree = len(gens[0]) if gens else 0
    if any(len(g) != degree for g in gens):
        raise InputError("generators act on different degrees")
    tuples = _generate_tuples(gens, degree, cap)
    return [Permutation(t) for t in tuples]


def _generate_tuples(gens, degree, cap):
    ident = tuple(range(degree))
    elems = {ident}
    frontier = [ident]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = _compose(x, g)
                if y not in elems:
                    elems.add(y)
                    if len(elems) > cap:
                        raise OrderCapExceeded(
                            f"group order exceeds cap {cap}"
                        )
                    new.append(y)
        frontier = new
    return sorted(elems)


class _LazyRows:
    """Row-of-products provider for groups too large for a full table."""

    def __init__(self, elems, index):
        self._elems = elems
        self._index = index
        self._rows = {}

    def __getitem__(self, i):
        row = self._rows.get(i)
        if row is None:
            ei = self._elems[i]
            idx = self._index
            row = [idx[_compose(ei, e)] for e in self._elems]
            self._rows[i] = row
        return row


class PermGroup:
    """Permutation group of a fixed degree, defined by generators.

    Elements are enumerated on first use (bounded by ``order_cap``) and kept
    sorted lexicographically, so index 0 is always the identity.
    """

    def __init__(self, degree, generators, name=None,
                 order_cap=DEFAULT_ORDER_CAP, _product_of=None):
        self.degree = int(degree)
        gens = []
        for g in generators:
            if not isinstance(g, Permutation):
                g = Permutation(g)
            if g.degree != self.degree:
                raise InputError("generator degree mismatch")
            gens.append(g)
        self.generators = tuple(gens)
        self.name = name or f"G(deg {degree})"
        self.order_cap = order_cap
        self.product_of = _product_of
        self._tuples = None
        self._index = None
        self._rows = None
        self._inverse = None
        self._gen_idx = None
        self._subgroups = None
        self._lattice = None

    # -- element bookkeeping ------------------------------------------------

    def _ensure_elements(self):
        if self._tuples is None:
            gens = [g.images for g in self.generators]
            self._tuples = _generate_tuples(gens, self.degree, self.order_cap)
            self._index = {t: i for i, t in enumerate(self._tuples)}
            # identity is lexicographically least among permutations
            assert self._tuples[0] == tuple(range(self.degree))

    @property
    def order(self):
        self._ensure_elements()
        return len(self._tuples)

    @property
    def elements(self):
        """All elements, canonically ordered, as Permutation objects."""
        self._ensure_elements()
        return [Permutation(t) for t in self._tuples]

    def element_tuples(self):
        self._ensure_elements()
        return self._tuples

    def element_index(self, perm):
        self._ensure_elements()
        t = perm.images if isinstance(perm, Permutation) else tuple(perm)
        try:
            return self._index[t]
        except KeyError:
            raise InputError(f"{t} is not an element of {self.name}") from None

    @property
    def identity_index(self):
        return 0

    def _mul_rows(self):
        if self._rows is None:
            self._ensure_elements()
            n = len(self._tuples)
            if n <= _TABLE_LIMIT:
                idx = self._index
                ts = self._tuples
                self._rows = [[idx[_compose(a, b)] for b in ts] for a in ts]
            else:
                self._rows = _LazyRows(self._tuples, self._index)
        return self._rows

    def mul(self, i, j):
        """Index of element i composed with element j."""
        self._ensure_elements()
        return self._index[_compose(self._tuples[i], self._tuples[j])]

    def inverse_indices(self):
        if self._inverse is None:
            self._ensure_elements()
            idx = self._index
            self._inverse = [idx[_invert_tuple(t)] for t in self._tuples]
        return self._inverse

    def generator_indices(self):
        if self._gen_idx is None:
            self._ensure_elements()
            seen = []
            for g in self.generators:
                i = self._index[g.images]
                if i not in seen and i != 0:
                    seen.append(i)
            self._gen_idx = seen
        return self._gen_idx

    def __repr__(self):
        return f"PermGroup({self.name}, degree={self.degree})"


# -- named constructors ------------------------------------------------------


def cyclic(n, order_cap=DEFAULT_ORDER_CAP):
    """Cyclic group C_n as the rotation of n points."""
    if n < 1:
        raise InputError("cyclic(n) needs n >= 1")
    if n == 1:
        return PermGroup(1, [], name="C1", order_cap=order_cap)
    rot = Permutation([(i + 1) % n for i in range(n)])
    return PermGroup(n, [rot], name=f"C{n}", order_cap=order_cap)


def symmetric(n, order_cap=DEFAULT_ORDER_CAP):
    """Symmetric group S_n via an n-cycle and a transposition."""
    if n < 1:
        raise InputError("symmetric(n) needs n >= 1")
    if n == 1:
        return PermGroup(1, [], name="S1", order_cap=order_cap)
    rot = Permutation([(i + 1) % n for i in range(n)])
    swap = Permutation.from_cycles(n, (0, 1))
    gens = [swap] if n == 2 else [swap, rot]
    return PermGroup(n, gens, name=f"S{n}", order_cap=order_cap)


def alternating(n, order_cap=DEFAULT_ORDER_CAP):
    """Alternating group A_n via a 3-cycle and a long even cycle."""
    if n < 3:
        raise InputError("alternating(n) needs n >= 3")
    three = Permutation.from_cycles(n, (0, 1, 2))
    if n == 3:
        gens = [three]
    elif n % 2 == 1:
        gens = [three, Permutation.from_cycles(n, tuple(range(n)))]
    else:
        gens = [three, Permutation.from_cycles(n, tuple(range(1, n)))]
    return PermGroup(n, gens, name=f"A{n}", order_cap=order_cap)


def direct_product(g, h, order_cap=None):
    """Direct product acting on the disjoint union of the factors' points."""
    cap = order_cap or max(g.order_cap, h.order_cap)
    if g.order * h.order > cap:
        raise OrderCapExceeded(
            f"|{g.name} x {h.name}| = {g.order * h.order} exceeds cap {cap}"
        )
    dg, dh = g.degree, h.degree
    idh = tuple(range(dg, dg + dh))
    gens = [Permutation(p.images + idh) for p in g.generators]
    idg = tuple(range(dg))
    gens += [Permutation(idg + tuple(dg + i for i in p.images))
             for p in h.generators]
    return PermGroup(dg + dh, gens, name=f"{g.name}*{h.name}",
                     order_cap=cap, _product_of=(g, h))


_TERM_RE = re.compile(r"^([CSA])(\d+)(?:\^(\d+))?$")


def parse_group_expr(text, order_cap=DEFAULT_ORDER_CAP):
    """Build a group from an expression like ``S3*A5`` or ``C2^3``.

    Grammar: terms ``C<n>``, ``S<n>``, ``A<n>``, joined with ``*``; a term
    may carry a power ``^e``.  Whitespace is ignored.
    """
    compact = re.sub(r"\s+", "", text)
    if not compact:
        raise ParseError("empty group expression")
    factories = {"C": cyclic, "S": symmetric, "A": alternating}
    factors = []
    for term in compact.split("*"):
        m = _TERM_RE.match(term)
        if not m:
            raise ParseError(f"bad term {term!r} in group expression")
        kind, n, power = m.group(1), int(m.group(2)), m.group(3)
        e = int(power) if power is not None else 1
        if e < 1:
            raise ParseError(f"exponent must be >= 1 in {term!r}")
        factors.extend([(kind, n)] * e)
    group = factories[factors[0][0]](factors[0][1], order_cap=order_cap)
    for kind, n in factors[1:]:
        group = direct_product(group, factories[kind](n, order_cap=order_cap),
                               order_cap=order_cap)
    group.name = compact
    return group


# -- subgroups ----------------------------------------------------------------


class Subgroup:
    """Subgroup of a PermGroup, stored as a bitset over element indices."""

    __slots__ = ("parent", "members")

    def __init__(self, parent, members):
        self.parent = parent
        self.members = members

    @property
    def order(self):
        return self.members.bit_count()

    def member_indices(self):
        out = []
        b = self.members
        while b:
            lsb = b & -b
            out.append(lsb.bit_length() - 1)
            b ^= lsb
        return out

    def member_permutations(self):
        ts = self.parent.element_tuples()
        return [Permutation(ts[i]) for i in self.member_indices()]

    def contains(self, other):
        return other.members | self.members == self.members

    def __contains__(self, i):
        return bool(self.members >> i & 1)

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.parent is other.parent
                and self.members == other.members)

    def __hash__(self):
        return hash((id(self.parent), self.members))

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent.name})"


def trivial_subgroup(g):
    return Subgroup(g, 1 << g.identity_index)


def full_subgroup(g):
    return Subgroup(g, (1 << g.order) - 1)


def subgroup_closure(g, seed):
    """Smallest subgroup of g containing the seed elements.

    ``seed`` may hold element indices or Permutation objects.  The seed is
    first thinned to a small generating subset, so closing a union of two
    known subgroups costs about |result| products.
    """
    idx = []
    for s in seed:
        idx.append(s if isinstance(s, int) else g.element_index(s))
    rows = g._mul_rows()
    bits = 1 << g.identity_index
    elems = [g.identity_index]
    gens = []
    for s in idx:
        if not bits >> s & 1:
            gens.append(s)
            bits, elems = _close_from_gens(rows, gens, g.order)
    return Subgroup(g, bits)


def _close_from_gens(rows, gens, order, stop_above=None):
    """Closure of ``gens`` under products; returns (bitset, element list).

    If ``stop_above`` is given and the closure grows past it, returns
    (None, None) immediately: by Lagrange the result must then be the whole
    group, and the caller knows it.
    """
    bits = 1
    elems = [0]
    for s in gens:
        if not bits >> s & 1:
            bits |= 1 << s
            elems.append(s)
    i = 0
    count = len(elems)
    while i < len(elems):
        row = rows[elems[i]]
        i += 1
        for s in gens:
            y = row[s]
            if not bits >> y & 1:
                bits |= 1 << y
                elems.append(y)
                count += 1
                if stop_above is not None and count > stop_above:
                    return None, None
    return bits, elems


def _conjugate_bits(rows, inv, bits, gen):
    row_ig = rows[inv[gen]]
    out = 0
    b = bits
    while b:
        lsb = b & -b
        x = lsb.bit_length() - 1
        b ^= lsb
        out |= 1 << rows[row_ig[x]][gen]
    return out


def all_subgroups(g, max_subgroups=DEFAULT_SUBGROUP_CAP):
    """Complete list of subgroups of g, sorted by (order, bitset).

    Seeds with every cyclic subgroup, then repeatedly joins class
    representatives with cyclic subgroups; each newly found subgroup's
    conjugacy class is filled in by conjugation.  Every subgroup is a join
    of cyclic subgroups and joins of conjugates are conjugates of joins,
    so the sweep is exhaustive.
    """
    if g._subgroups is not None:
        if len(g._subgroups) > max_subgroups:
            raise EnumerationCapExceeded(
                f"{g.name} has {len(g._subgroups)} subgroups, cap {max_subgroups}"
            )
        return list(g._subgroups)

    n = g.order
    rows = g._mul_rows()
    inv = g.inverse_indices()
    gen_idx = g.generator_indices()
    e = g.identity_index
    full = (1 << n) - 1
    half = n // 2

    # every cyclic subgroup, keyed by bitset, valued by its least generator
    cyclic_subs = {}
    for s in range(n):
        if s == e:
            continue
        b = 1 << e
        x = s
        while not b >> x & 1:
            b |= 1 << x
            x = rows[x][s]
        cyclic_subs.setdefault(b, s)
    cyc_items = sorted(cyclic_subs.items())

    def conj_orbit(bits):
        orbit = [bits]
        seen = {bits}
        qi = 0
        while qi < len(orbit):
            cur = orbit[qi]
            qi += 1
            for gg in gen_idx:
                nb = _conjugate_bits(rows, inv, cur, gg)
                if nb not in seen:
                    seen.add(nb)
                    orbit.append(nb)
        return orbit

    found = {1 << e}
    queue = []
    classed = set()
    for b, s in cyc_items:
        found.add(b)
        if b not in classed:
            classed.update(conj_orbit(b))
            queue.append((b, (s,)))
    found.update(classed)
    found.add(full)

    def register(bits, gens):
        found.add(bits)
        for ob in conj_orbit(bits):
            found.add(ob)
        if len(found) > max_subgroups:
            raise EnumerationCapExceeded(
                f"subgroup count of {g.name} exceeds cap {max_subgroups}"
            )
        if bits != full:
            queue.append((bits, gens))

    while queue:
        bits, gens = queue.pop()
        for cb, cg in cyc_items:
            if cb | bits == bits:
                continue
            jgens = gens + (cg,)
            jb, _ = _close_from_gens(rows, jgens, n, stop_above=half)
            if jb is None:
                jb = full
            if jb not in found:
                register(jb, jgens)

    subs = [Subgroup(g, b) for b in found]
    subs.sort(key=lambda s: (s.order, s.members))
    g._subgroups = subs
    return list(subs)


class SubgroupLattice:
    """All subgroups of a group, ordered by inclusion, exposed as a Poset."""

    def __init__(self, parent, subgroups, poset):
        self.parent = parent
        self.subgroups = subgroups
        self.poset = poset
        self._pos = {s.members: i for i, s in enumerate(subgroups)}

    def index_of(self, subgroup):
        try:
            return self._pos[subgroup.members]
        except KeyError:
            raise InputError("subgroup not in lattice") from None

    def __len__(self):
        return len(self.subgroups)

    def to_json(self):
        import json

        leq = self.poset.leq_matrix
        pairs = sorted((int(a), int(b)) for a, b in np.argwhere(leq))
        return json.dumps(
            {
                "group": self.parent.name,
                "group_order": self.parent.order,
                "subgroups": [
                    {"index": i, "order": s.order, "members": s.member_indices()}
                    for i, s in enumerate(self.subgroups)
                ],
                "containment": [list(p) for p in pairs],
            },
            indent=2,
        )

    def to_dot(self):
        return self.poset.to_dot(graph_name="subgroup_lattice")


def subgroup_lattice(g, max_subgroups=DEFAULT_SUBGROUP_CAP):
    """Subgroup lattice of g with trivial subgroup at the bottom."""
    if g._lattice is not None and len(g._lattice.subgroups) <= max_subgroups:
        return g._lattice
    subs = all_subgroups(g, max_subgroups=max_subgroups)
    k = len(subs)
    npoints = g.order
    membership = np.zeros((k, npoints), dtype=bool)
    for i, s in enumerate(subs):
        membership[i, s.member_indices()] = True
    # i <= j iff members(i) minus members(j) is empty
    a = membership.astype(np.float64)
    outside = (a @ (1.0 - a.T)) > 0.5
    leq = ~outside
    labels = [f"H{i}:{s.order}" for i, s in enumerate(subs)]
    lattice = SubgroupLattice(g, subs, Poset(leq, labels))
    g._lattice = lattice
    return lattice


# -- structural predicates -----------------------------------------------------


def is_normal(g, sub):
    """True iff conjugation by every generator of g fixes the subgroup."""
    if sub.parent is not g:
        raise InputError("subgroup belongs to a different group")
    rows = g._mul_rows()
    inv = g.inverse_indices()
    return all(
        _conjugate_bits(rows, inv, sub.members, gg) == sub.members
        for gg in g.generator_indices()
    )


def complements_in_group(g, sub, max_subgroups=DEFAULT_SUBGROUP_CAP):
    """All subgroups K with sub intersect K trivial and <sub, K> = g.

    When sub is normal every complement has order |g|/|sub| (it must be
    isomorphic to the quotient), so the candidate list shrinks accordingly.
    """
    subs = all_subgroups(g, max_subgroups=max_subgroups)
    ident_bit = 1 << g.identity_index
    hb = sub.members
    if is_normal(g, sub):
        quotient = g.order // sub.order
        candidates = [k for k in subs if k.order == quotient]
    else:
        candidates = subs
    full = (1 << g.order) - 1
    out = []
    for k in candidates:
        if hb & k.members != ident_bit:
            continue
        union = hb | k.members
        # subs are sorted by order, so the first superset is the join
        for z in subs:
            if union | z.members == z.members:
                if z.members == full:
                    out.append(k)
                break
    return out


# -- automorphisms and graph subgroups ----------------------------------------


def is_automorphism(g, phi):
    """Check that phi (a map on element indices) is a group automorphism."""
    n = g.order
    phi = tuple(phi)
    if len(phi) != n or sorted(phi) != list(range(n)):
        return False
    rows = g._mul_rows()
    for i in range(n):
        row = rows[i]
        fi = phi[i]
        frow = rows[fi]
        for j in range(n):
            if phi[row[j]] != frow[phi[j]]:
                return False
    return True


def graph_subgroup(g, phi):
    """Diagonal subgroup {(phi(t), t)} of a direct square g = T x T.

    ``phi`` is an automorphism of T given as a permutation of T's element
    indices; raises NotAnAutomorphism if it fails verification.
    """
    if g.product_of is None:
        raise InputError("group was not built as a direct product")
    t1, t2 = g.product_of
    if t1.element_tuples() != t2.element_tuples():
        raise InputError("graph subgroups need a direct square T x T")
    if not is_automorphism(t1, phi):
        raise NotAnAutomorphism("map does not preserve products")
    d = t1.degree
    ts = t1.element_tuples()
    bits = 0
    for i, t in enumerate(ts):
        pair = ts[phi[i]] + tuple(d + v for v in t)
        bits |= 1 << g.element_index(pair)
    return Subgroup(g, bits)


def conjugation_automorphisms(n):
    """The automorphisms of alternating(n) induced by conjugation in S_n.

    Only degree 5 is supported; there the 120 maps exhaust Aut(A5).  Each
    returned map is verified and the list is canonically sorted.
    """
    if n != 5:
        raise UnsupportedDegree("conjugation automorphisms supported for degree 5 only")
    a5 = alternating(5)
    ts = a5.element_tuples()
    index = {t: i for i, t in enumerate(ts)}
    s5 = symmetric(5)
    maps = set()
    for s in s5.element_tuples():
        si = _invert_tuple(s)
        maps.add(tuple(index[_compose(_compose(s, t), si)] for t in ts))
    out = sorted(maps)
    for m in out:
        if not is_automorphism(a5, m):
            raise NotAnAutomorphism("conjugation map failed verification")
    return out


# -- direct-product projections ------------------------------------------------


def project_subgroup(g, sub, side):
    """Element indices of a subgroup's projection onto one product factor.

    ``side`` is 0 for the left factor, 1 for the right.  Returns a set of
    element indices of that factor group.
    """
    if g.product_of is None:
        raise InputError("group was not built as a direct product")
    left, right = g.product_of
    d = left.degree
    ts = g.element_tuples()
    out = set()
    for i in sub.member_indices():
        t = ts[i]
        if side == 0:
            out.add(left.element_index(t[:d]))
        else:
            out.add(right.element_index(tuple(v - d for v in t[d:])))
    return out
