"""Finite posets and their incidence algebra over the integers.

A poset is stored as a dense boolean matrix ``leq`` on elements 0..n-1.
The incidence algebra I(P) consists of integer-valued functions on
comparable pairs; convolution makes it a ring whose identity is the
delta function.  The zeta function (indicator of <=) is invertible with
inverse the Mobius function, and mu(0,1) is the Mobius number of P.

All values are exact Python integers; numpy is used only for the boolean
relation matrices.  Posets and incidence functions are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import json
from functools import cached_property

import numpy as np

from .errors import (
    AntisymmetryViolation,
    ComparableComplements,
    InputError,
    NoBounds,
    NonUnitDiagonal,
    NotALattice,
    NotInvertible,
    PosetMismatch,
)


class Poset:
    """Finite partially ordered set on dense indices 0..size-1."""

    def __init__(self, leq, labels=None):
        m = np.array(leq, dtype=bool)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"relation matrix must be square, got {m.shape}")
        n = m.shape[0]
        if not m.diagonal().all():
            raise InputError("relation is not reflexive")
        sym = m & m.T
        np.fill_diagonal(sym, False)
        if sym.any():
            x, y = map(int, np.argwhere(sym)[0])
            raise AntisymmetryViolation(f"{x} <= {y} and {y} <= {x}")
        closed = _bool_product(m, m)
        if (closed & ~m).any():
            raise InputError("relation is not transitive")
        m.setflags(write=False)
        self._leq = m
        self.size = n
        if labels is not None:
            labels = [str(s) for s in labels]
            if len(labels) != n:
                raise InputError("label count does not match size")
        self.labels = labels

    # -- basic queries ----------------------------------------------------

    def leq(self, x, y):
        """True iff x <= y."""
        return bool(self._leq[x, y])

    @property
    def leq_matrix(self):
        """Read-only boolean matrix of the full relation."""
        return self._leq

    def label(self, x):
        return self.labels[x] if self.labels is not None else str(x)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"Poset(size={self.size})"

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return self.size == other.size and bool((self._leq == other._leq).all())

    def __hash__(self):
        return hash((self.size, self._leq.tobytes()))

    # -- derived structure (cached, computed once) ------------------------

    @cached_property
    def _linear_extension(self):
        # x < y implies |down(x)| < |down(y)|, so down-set size sorts
        # into a valid linear extension; index breaks ties.
        sizes = self._leq.sum(axis=0)
        return sorted(range(self.size), key=lambda i: (sizes[i], i))

    @cached_property
    def _down_lists(self):
        return [np.flatnonzero(self._leq[:, y]) for y in range(self.size)]

    @cached_property
    def _up_lists(self):
        return [np.flatnonzero(self._leq[x, :]) for x in range(self.size)]

    @cached_property
    def bottom(self):
        """Index of the unique minimum element."""
        below_all = np.flatnonzero(self._leq.all(axis=1))
        if len(below_all) != 1:
            raise NoBounds("poset has no unique minimum")
        return int(below_all[0])

    @cached_property
    def top(self):
        """Index of the unique maximum element."""
        above_all = np.flatnonzero(self._leq.all(axis=0))
        if len(above_all) != 1:
            raise NoBounds("poset has no unique maximum")
        return int(above_all[0])

    @cached_property
    def covers(self):
        """Boolean matrix of the cover relation (Hasse diagram edges)."""
        lt = self._leq.copy()
        np.fill_diagonal(lt, False)
        between = _bool_product(lt, lt)
        cov = lt & ~between
        cov.setflags(write=False)
        return cov

    @cached_property
    def _mu_from_bottom(self):
        """mu(0, y) for every y, as a list of ints."""
        b = self.bottom
        mu = [0] * self.size
        mu[b] = 1
        for y in self._linear_extension:
            if y == b:
                continue
            if not self._leq[b, y]:
                continue
            s = 0
            for z in self._down_lists[y]:
                if z != y:
                    s += mu[z]
            mu[y] = -s
        return mu

    @cached_property
    def _mu_to_top(self):
        """mu(z, 1) for every z, as a list of ints."""
        t = self.top
        mu = [0] * self.size
        mu[t] = 1
        for z in reversed(self._linear_extension):
            if z == t:
                continue
            if not self._leq[z, t]:
                continue
            s = 0
            for w in self._up_lists[z]:
                if w != z:
                    s += mu[w]
            mu[z] = -s
        return mu

    @cached_property
    def _common_lower_counts(self):
        # counts[x, y] = |down(x) & down(y)|; exact since n < 2**53
        f = self._leq.astype(np.float64)
        return (f.T @ f).astype(np.int64)

    @cached_property
    def _common_upper_counts(self):
        f = self._leq.astype(np.float64)
        return (f @ f.T).astype(np.int64)

    # -- intervals ---------------------------------------------------------

    def interval(self, lo, hi):
        """The induced sub-poset on {z : lo <= z <= hi}."""
        if not self._leq[lo, hi]:
            raise InputError(f"{lo} is not <= {hi}")
        idx = np.flatnonzero(self._leq[lo, :] & self._leq[:, hi])
        sub = self._leq[np.ix_(idx, idx)]
        labels = [self.label(int(i)) for i in idx] if self.labels else None
        return Interval(self, int(lo), int(hi), tuple(int(i) for i in idx),
                        Poset(sub, labels))

    # -- export ------------------------------------------------------------

    def to_json(self):
        """Full reflexive relation as sorted pairs, plus labels."""
        pairs = sorted((int(x), int(y)) for x, y in np.argwhere(self._leq))
        return json.dumps(
            {
                "size": self.size,
                "leq": [list(p) for p in pairs],
                "labels": [self.label(i) for i in range(self.size)],
            },
            indent=2,
        )

    def to_dot(self, graph_name="poset"):
        """Hasse diagram in DOT format; edges directed low -> high."""
        lines = [f"digraph {graph_name} {{", "  rankdir=BT;"]
        for i in range(self.size):
            lines.append(f'  n{i} [label="{self.label(i)}"];')
        for x, y in sorted((int(a), int(b)) for a, b in np.argwhere(self.covers)):
            lines.append(f"  n{x} -> n{y};")
        lines.append("}")
        return "\n".join(lines) + "\n"


class Interval:
    """A closed interval [lo, hi] of a parent poset, with its induced poset."""

    def __init__(self, parent, lo, hi, elements, poset):
        self.parent = parent
        self.lo = lo
        self.hi = hi
        self.elements = elements  # parent indices, ascending
        self.poset = poset

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"Interval([{self.lo}, {self.hi}], size={len(self.elements)})"


class IncidenceFunction:
    """Integer-valued function on comparable pairs of a fixed poset.

    Values are stored for every pair x <= y (zeros included); the function
    is implicitly zero on incomparable pairs.
    """

    def __init__(self, poset, values):
        self.poset = poset
        self._values = dict(values)
        leq = poset.leq_matrix
        for (x, y) in self._values:
            if not leq[x, y]:
                raise InputError(f"value assigned to incomparable pair ({x}, {y})")

    @classmethod
    def from_callable(cls, poset, fn):
        leq = poset.leq_matrix
        vals = {}
        for x in range(poset.size):
            for y in np.flatnonzero(leq[x, :]):
                vals[(x, int(y))] = int(fn(x, int(y)))
        return cls(poset, vals)

    def __call__(self, x, y):
        return self._values.get((x, y), 0)

    def __eq__(self, other):
        if not isinstance(other, IncidenceFunction):
            return NotImplemented
        if self.poset != other.poset:
            return False
        keys = set(self._values) | set(other._values)
        return all(self._values.get(k, 0) == other._values.get(k, 0) for k in keys)

    def __repr__(self):
        return f"IncidenceFunction(poset={self.poset!r}, {len(self._values)} pairs)"

    def items(self):
        return sorted(self._values.items())


# -- construction ----------------------------------------------------------


def build_poset(pairs, size, labels=None):
    """Build a Poset from arbitrary relation pairs via reflexive-transitive
    closure.  Raises AntisymmetryViolation if the closure forces two distinct
    elements to be equal."""
    m = np.eye(size, dtype=bool)
    for x, y in pairs:
        if not (0 <= x < size and 0 <= y < size):
            raise InputError(f"pair ({x}, {y}) out of range for size {size}")
        m[x, y] = True
    while True:
        closed = m | _bool_product(m, m)
        if (closed == m).all():
            break
        m = closed
    return Poset(m, labels)


def chain(n, labels=None):
    """Total order 0 < 1 < ... < n-1."""
    m = np.triu(np.ones((n, n), dtype=bool))
    return Poset(m, labels)


def divisor_lattice(n):
    """Poset of divisors of n ordered by divisibility, labeled by divisor."""
    if n < 1:
        raise InputError("n must be positive")
    divs = [d for d in range(1, n + 1) if n % d == 0]
    k = len(divs)
    m = np.zeros((k, k), dtype=bool)
    for i, a in enumerate(divs):
        for j, b in enumerate(divs):
            m[i, j] = b % a == 0
    return Poset(m, [str(d) for d in divs])


def classical_mobius(n):
    """Number-theoretic Mobius function: (-1)^k on squarefree n with k
    prime factors, 0 otherwise."""
    if n < 1:
        raise InputError("n must be positive")
    k = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            k += 1
        d += 1
    if n > 1:
        k += 1
    return (-1) ** k


# -- the incidence algebra ---------------------------------------------------


def zeta(poset):
    """Characteristic function of <=."""
    return IncidenceFunction.from_callable(poset, lambda x, y: 1)


def delta(poset):
    """Convolution identity: 1 on the diagonal, 0 elsewhere."""
    return IncidenceFunction.from_callable(poset, lambda x, y: 1 if x == y else 0)


def convolve(f, g):
    """(f * g)(x, y) = sum over x <= z <= y of f(x, z) g(z, y)."""
    if f.poset != g.poset:
        raise PosetMismatch("incidence functions live on different posets")
    p = f.poset
    leq = p.leq_matrix
    fv = f._values
    gv = g._values
    vals = {}
    for x in range(p.size):
        row = leq[x, :]
        for y in np.flatnonzero(row):
            y = int(y)
            s = 0
            for z in np.flatnonzero(row & leq[:, y]):
                z = int(z)
                s += fv.get((x, z), 0) * gv.get((z, y), 0)
            vals[(x, y)] = s
    return IncidenceFunction(p, vals)


def invert(f):
    """Convolution inverse of f, by triangular solve along a linear extension.

    Restricted to diagonals in {+1, -1} so the inverse is integral; raises
    NotInvertible on a zero diagonal entry and NonUnitDiagonal otherwise.
    """
    p = f.poset
    for x in range(p.size):
        d = f(x, x)
        if d == 0:
            raise NotInvertible(f"f({x}, {x}) = 0")
        if d not in (1, -1):
            raise NonUnitDiagonal(f"f({x}, {x}) = {d}, exact inverse needs +-1")
    leq = p.leq_matrix
    ext = p._linear_extension
    pos = {v: i for i, v in enumerate(ext)}
    vals = {}
    for y in ext:
        vals[(y, y)] = f(y, y)
        for x in sorted((int(x) for x in np.flatnonzero(leq[:, y])),
                        key=lambda v: -pos[v]):
            if x == y:
                continue
            s = 0
            for z in np.flatnonzero(leq[x, :] & leq[:, y]):
                z = int(z)
                if z != x:
                    s += f(x, z) * vals[(z, y)]
            vals[(x, y)] = -f(x, x) * s
    return IncidenceFunction(p, vals)


def mobius(poset):
    """Mobius function by the direct recursion
    mu(x, x) = 1,  mu(x, y) = -sum over x <= z < y of mu(x, z)."""
    leq = poset.leq_matrix
    ext = poset._linear_extension
    vals = {}
    for x in range(poset.size):
        vals[(x, x)] = 1
        for y in ext:
            if y == x or not leq[x, y]:
                continue
            s = 0
            for z in np.flatnonzero(leq[x, :] & leq[:, y]):
                z = int(z)
                if z != y:
                    s += vals[(x, z)]
            vals[(x, y)] = -s
    return IncidenceFunction(poset, vals)


def mobius_number(poset):
    """mu(0, 1): the Mobius number of a bounded poset."""
    return poset._mu_from_bottom[poset.top]


# -- lattice operations ------------------------------------------------------


def meet(poset, x, y):
    """Greatest lower bound of x and y; NotALattice if absent or non-unique."""
    leq = poset.leq_matrix
    lowers = np.flatnonzero(leq[:, x] & leq[:, y])
    if len(lowers) == 0:
        raise NotALattice(f"{x} and {y} have no common lower bound")
    sub = leq[np.ix_(lowers, lowers)]
    greatest = np.flatnonzero(sub.all(axis=0))
    if len(greatest) != 1:
        raise NotALattice(f"{x} and {y} have no unique greatest lower bound")
    return int(lowers[greatest[0]])


def join(poset, x, y):
    """Least upper bound of x and y; NotALattice if absent or non-unique."""
    leq = poset.leq_matrix
    uppers = np.flatnonzero(leq[x, :] & leq[y, :])
    if len(uppers) == 0:
        raise NotALattice(f"{x} and {y} have no common upper bound")
    sub = leq[np.ix_(uppers, uppers)]
    least = np.flatnonzero(sub.all(axis=1))
    if len(least) != 1:
        raise NotALattice(f"{x} and {y} have no unique least upper bound")
    return int(uppers[least[0]])


def is_lattice(poset):
    """True iff every pair has a meet and a join."""
    try:
        for x in range(poset.size):
            for y in range(x + 1, poset.size):
                meet(poset, x, y)
                join(poset, x, y)
    except NotALattice:
        return False
    return True


def complements(poset, x):
    """All y with meet(x, y) = bottom and join(x, y) = top, ascending.

    Uses the identity meet(x, y) = 0 iff x and y have exactly one common
    lower bound (and dually), so each query is a vector operation.
    """
    try:
        poset.bottom, poset.top
    except NoBounds as exc:
        raise NotALattice(str(exc)) from None
    low = poset._common_lower_counts[x]
    up = poset._common_upper_counts[x]
    out = np.flatnonzero((low == 1) & (up == 1))
    return [int(y) for y in out]


def crapo_sum(poset, x):
    """Crapo complement sum: for any lattice element x,

        sum over complements y, z of x with y <= z of  mu(0, y) mu(z, 1)

    equals the Mobius number of the lattice.  Returns 0 when x has no
    complement."""
    comp = complements(poset, x)
    mu0 = poset._mu_from_bottom
    mu1 = poset._mu_to_top
    leq = poset.leq_matrix
    total = 0
    for y in comp:
        for z in comp:
            if leq[y, z]:
                total += mu0[y] * mu1[z]
    return total


def modular_crapo_sum(poset, x):
    """Single-complement form of the Crapo sum,

        sum over complements K of x of  mu(0, K) mu(K, 1),

    valid when no two distinct complements of x are comparable (x modular);
    raises ComparableComplements otherwise."""
    comp = complements(poset, x)
    leq = poset.leq_matrix
    for i, y in enumerate(comp):
        for z in comp[i + 1:]:
            if leq[y, z] or leq[z, y]:
                raise ComparableComplements(
                    f"complements {y} and {z} of {x} are comparable"
                )
    mu0 = poset._mu_from_bottom
    mu1 = poset._mu_to_top
    return sum(mu0[k] * mu1[k] for k in comp)


def _bool_product(a, b):
    # boolean matrix product via BLAS; exact for n < 2**53
    return (a.astype(np.float64) @ b.astype(np.float64)) > 0.5
