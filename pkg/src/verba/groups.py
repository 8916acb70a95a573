"""Enumerated finite groups with coordinate-based multiplication.

A :class:`GroupHandle` stores one canonical coordinate row per element
plus a packed integer key for hash lookup; multiplication is always
coordinate arithmetic followed by a key lookup, never a stored n*n
table (a 15000-element group would already need a 450 MB table).

All operations are pure and handles are immutable after construction,
so everything here is safe to share across threads.  Vectorized index
arrays are the unit of work throughout: ``mul_indices`` maps a pair of
index arrays to the index array of products.
"""

from __future__ import annotations

import hashlib
from math import gcd

import numpy as np

from .errors import CapExceededError, InputError

ORDER_CAP = 10**5
_KEY_LIMIT = 2**62


# ---------------------------------------------------------------------------
# coordinate backends
# ---------------------------------------------------------------------------


class CoordBackend:
    """Coordinate arithmetic for one family of groups.

    ``radices`` bounds each coordinate (0 <= c < radix), which yields the
    mixed-radix packed key; lexicographic coordinate order equals numeric
    key order.
    """

    radices: np.ndarray  # (k,) int64

    def mul_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inv_coords(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def identity_coords(self) -> np.ndarray:
        raise NotImplementedError

    def pack(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self._place_values()

    def _place_values(self) -> np.ndarray:
        radices = np.asarray(self.radices, dtype=np.int64)
        if int(np.prod(radices.astype(object))) > _KEY_LIMIT:
            raise CapExceededError("coordinate space too large for 63-bit packed keys")
        pv = np.ones(len(radices), dtype=np.int64)
        for i in range(len(radices) - 2, -1, -1):
            pv[i] = pv[i + 1] * radices[i + 1]
        return pv


class PermutationBackend(CoordBackend):
    """Permutations of {0..n-1} as image rows, composed left-to-right:
    (a*b)(x) = b(a(x))."""

    def __init__(self, n: int):
        self.n = n
        self.radices = np.full(n, n, dtype=np.int64)

    def mul_coords(self, a, b):
        return np.take_along_axis(b, a, axis=1)

    def inv_coords(self, a):
        inv = np.empty_like(a)
        np.put_along_axis(inv, a, np.broadcast_to(np.arange(self.n), a.shape), axis=1)
        return inv

    def identity_coords(self):
        return np.arange(self.n, dtype=np.int64)


class ModVectorBackend(CoordBackend):
    """Additive group of a product of Z/m_i (covers cyclic groups)."""

    def __init__(self, moduli):
        self.radices = np.asarray(moduli, dtype=np.int64)

    def mul_coords(self, a, b):
        return (a + b) % self.radices

    def inv_coords(self, a):
        return (-a) % self.radices

    def identity_coords(self):
        return np.zeros(len(self.radices), dtype=np.int64)


class QuaternionBackend(CoordBackend):
    """Q8 as triples (s,a,b) encoding (-1)^s i^a j^b with ji = -ij."""

    radices = np.array([2, 2, 2], dtype=np.int64)

    def mul_coords(self, x, y):
        s1, a1, b1 = x[..., 0], x[..., 1], x[..., 2]
        s2, a2, b2 = y[..., 0], y[..., 1], y[..., 2]
        s = (s1 + s2 + b1 * a2 + (a1 + a2) // 2 + (b1 + b2) // 2) % 2
        return np.stack([s, (a1 + a2) % 2, (b1 + b2) % 2], axis=-1)

    def inv_coords(self, a):
        # exponent of Q8 is 4, so x^-1 = x^3
        sq = self.mul_coords(a, a)
        return self.mul_coords(sq, a)

    def identity_coords(self):
        return np.zeros(3, dtype=np.int64)


class ProductBackend(CoordBackend):
    """Componentwise law on concatenated coordinate blocks."""

    def __init__(self, left: CoordBackend, right: CoordBackend):
        self.left = left
        self.right = right
        self.split = len(left.radices)
        self.radices = np.concatenate([left.radices, right.radices])

    def mul_coords(self, a, b):
        k = self.split
        return np.concatenate(
            [self.left.mul_coords(a[:, :k], b[:, :k]),
             self.right.mul_coords(a[:, k:], b[:, k:])],
            axis=1,
        )

    def inv_coords(self, a):
        k = self.split
        return np.concatenate(
            [self.left.inv_coords(a[:, :k]), self.right.inv_coords(a[:, k:])], axis=1
        )

    def identity_coords(self):
        return np.concatenate([self.left.identity_coords(), self.right.identity_coords()])


class QuotientBackend(CoordBackend):
    """Cosets of a normal subgroup; the single coordinate is the parent
    index of the coset's minimum element."""

    def __init__(self, parent: "GroupHandle", rep_of: np.ndarray):
        self.parent = parent
        self.rep_of = rep_of
        self.radices = np.array([parent.order], dtype=np.int64)

    def mul_coords(self, a, b):
        prod = self.parent.mul_indices(a[:, 0], b[:, 0])
        return self.rep_of[prod][:, None]

    def inv_coords(self, a):
        return self.rep_of[self.parent.inv_indices(a[:, 0])][:, None]

    def identity_coords(self):
        return np.array([self.rep_of[self.parent.identity_index]], dtype=np.int64)


class SubgroupBackend(CoordBackend):
    """A subgroup carried by parent indices; the parent law restricts."""

    def __init__(self, parent: "GroupHandle"):
        self.parent = parent
        self.radices = np.array([parent.order], dtype=np.int64)

    def mul_coords(self, a, b):
        return self.parent.mul_indices(a[:, 0], b[:, 0])[:, None]

    def inv_coords(self, a):
        return self.parent.inv_indices(a[:, 0])[:, None]

    def identity_coords(self):
        return np.array([self.parent.identity_index], dtype=np.int64)


class CallableBackend(CoordBackend):
    """Opaque encodings with user-supplied mul/inv rules (generic BFS entry).

    The single coordinate is the element's own discovery index; products go
    through the python rules, so this path is for small groups only.
    """

    def __init__(self, elements: list, index: dict, mul_rule, inv_rule):
        self.elements = elements
        self.index = index
        self.mul_rule = mul_rule
        self.inv_rule = inv_rule
        self.radices = np.array([len(elements)], dtype=np.int64)

    def mul_coords(self, a, b):
        els, idx, mul = self.elements, self.index, self.mul_rule
        out = np.fromiter(
            (idx[mul(els[int(x)], els[int(y)])] for x, y in zip(a[:, 0], b[:, 0])),
            dtype=np.int64,
            count=len(a),
        )
        return out[:, None]

    def inv_coords(self, a):
        els, idx, inv = self.elements, self.index, self.inv_rule
        out = np.fromiter((idx[inv(els[int(x)])] for x in a[:, 0]), dtype=np.int64, count=len(a))
        return out[:, None]

    def identity_coords(self):
        for i, x in enumerate(self.elements):
            if self.index[self.mul_rule(x, x)] == i:
                return np.array([i], dtype=np.int64)
        raise InputError("no identity found among enumerated elements")


# ---------------------------------------------------------------------------
# the handle
# ---------------------------------------------------------------------------


class GroupHandle:
    """An enumerated finite group with dense element indices."""

    def __init__(self, name, coords, backend, generator_indices, *, validate=True):
        coords = np.ascontiguousarray(coords, dtype=np.int64)
        if coords.ndim != 2:
            raise InputError("coords must be a 2-d array")
        order = len(coords)
        if order == 0:
            raise InputError("a group has at least the identity")
        if order > ORDER_CAP:
            raise CapExceededError(
                f"order {order} exceeds ORDER_CAP {ORDER_CAP}", partial_count=order
            )
        self.name = name
        self.coords = coords
        self.backend = backend
        self.order = order
        keys = backend.pack(coords)
        perm = np.argsort(keys, kind="stable")
        self._sorted_keys = keys[perm]
        self._sort_perm = perm
        self._keys = keys
        if np.any(self._sorted_keys[1:] == self._sorted_keys[:-1]):
            raise InputError("duplicate element encodings; index map is not a bijection")
        self.identity_index = int(self._lookup(backend.pack(backend.identity_coords()[None, :]))[0])
        self.generators = [int(g) for g in generator_indices]
        self._index_of = None
        if validate:
            self._validate()

    @classmethod
    def from_coords(cls, backend, coords, generator_coords, name, *, sort=True, validate=True):
        coords = np.ascontiguousarray(coords, dtype=np.int64)
        if sort:
            keys = backend.pack(coords)
            coords = coords[np.argsort(keys, kind="stable")]
        handle = cls(name, coords, backend, [], validate=False)
        gen_list = list(generator_coords)
        if not gen_list:
            gen_list = [backend.identity_coords()]
        gen_idx = []
        for row in gen_list:
            row = np.asarray(row, dtype=np.int64)
            gen_idx.append(int(handle._lookup(backend.pack(row[None, :]))[0]))
        seen = set()
        handle.generators = [g for g in gen_idx if not (g in seen or seen.add(g))]
        if validate:
            handle._validate()
        return handle

    # -- lookup ---------------------------------------------------------------

    def _lookup(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._sorted_keys, keys)
        pos = np.minimum(pos, self.order - 1)
        if not np.array_equal(self._sorted_keys[pos], keys):
            raise InputError("product left the enumerated element set (law/closure bug)")
        return self._sort_perm[pos]

    def encoding(self, i: int) -> bytes:
        """Canonical opaque byte string for element i (packed key, big-endian)."""
        return int(self._keys[i]).to_bytes(8, "big")

    @property
    def index_of(self) -> dict:
        """Hash map from canonical encoding to dense index."""
        if self._index_of is None:
            self._index_of = {self.encoding(i): i for i in range(self.order)}
        return self._index_of

    def coords_of(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[i])

    # -- arithmetic on indices --------------------------------------------------

    def mul_indices(self, i, j):
        i_arr, j_arr = np.broadcast_arrays(np.asarray(i, dtype=np.int64), np.asarray(j, dtype=np.int64))
        scalar = i_arr.ndim == 0
        i_flat = np.atleast_1d(i_arr).ravel()
        j_flat = np.atleast_1d(j_arr).ravel()
        prod = self.backend.mul_coords(self.coords[i_flat], self.coords[j_flat])
        out = self._lookup(self.backend.pack(prod))
        return int(out[0]) if scalar else out.reshape(i_arr.shape)

    def inv_indices(self, i):
        i_arr = np.asarray(i, dtype=np.int64)
        scalar = i_arr.ndim == 0
        inv = self.backend.inv_coords(self.coords[np.atleast_1d(i_arr).ravel()])
        out = self._lookup(self.backend.pack(inv))
        return int(out[0]) if scalar else out.reshape(i_arr.shape)

    def mul(self, i: int, j: int) -> int:
        return int(self.mul_indices(i, j))

    def inv(self, i: int) -> int:
        return int(self.inv_indices(i))

    def pow_indices(self, i, n: int):
        i_arr = np.asarray(i, dtype=np.int64)
        scalar = i_arr.ndim == 0
        base = np.atleast_1d(i_arr).copy()
        if n < 0:
            base = self.inv_indices(base)
            n = -n
        out = np.full(base.shape, self.identity_index, dtype=np.int64)
        while n:
            if n & 1:
                out = self.mul_indices(out, base)
            if n > 1:
                base = self.mul_indices(base, base)
            n >>= 1
        return int(out[0]) if scalar else out.reshape(i_arr.shape)

    def conjugate_indices(self, i, g: int):
        """g^-1 * i * g."""
        g_inv = self.inv(g)
        return self.mul_indices(self.mul_indices(g_inv, i), g)

    def commutator_indices(self, i, j):
        """[i, j] = i^-1 j^-1 i j."""
        left = self.mul_indices(self.inv_indices(i), self.inv_indices(j))
        return self.mul_indices(self.mul_indices(left, i), j)

    def all_indices(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def element_order(self, i: int) -> int:
        n = 1
        x = i
        while x != self.identity_index:
            x = self.mul(x, i)
            n += 1
        return n

    def element_orders(self) -> np.ndarray:
        """Order of every element, via the divisors of |G|."""
        out = np.zeros(self.order, dtype=np.int64)
        for d in sorted(_divisors(self.order)):
            mask = (out == 0) & (self.pow_indices(self.all_indices(), d) == self.identity_index)
            out[mask] = d
        return out

    def exponent(self) -> int:
        result = 1
        for d in np.unique(self.element_orders()):
            result = result * int(d) // gcd(result, int(d))
        return result

    # -- construction-time sanity ----------------------------------------------

    def _validate(self):
        all_idx = self.all_indices()
        e = self.identity_index
        if not (
            np.array_equal(self.mul_indices(e, all_idx), all_idx)
            and np.array_equal(self.mul_indices(all_idx, e), all_idx)
        ):
            raise InputError(f"{self.name}: identity is not two-sided")
        if np.any(self.mul_indices(all_idx, self.inv_indices(all_idx)) != e):
            raise InputError(f"{self.name}: inverse law fails")
        n = self.order
        if n**3 <= 300_000:
            a = np.repeat(all_idx, n * n)
            b = np.tile(np.repeat(all_idx, n), n)
            c = np.tile(all_idx, n * n)
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, 100_000))
        lhs = self.mul_indices(self.mul_indices(a, b), c)
        rhs = self.mul_indices(a, self.mul_indices(b, c))
        if np.any(lhs != rhs):
            raise InputError(f"{self.name}: multiplication is not associative")

    def __repr__(self):
        return f"GroupHandle({self.name!r}, order={self.order})"


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return out


def prime_factorization(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# element sets
# ---------------------------------------------------------------------------


class ElementSet:
    """A bitset over a group's element indices."""

    __slots__ = ("group", "bits")

    def __init__(self, group: GroupHandle, bits: np.ndarray):
        if bits.shape != (group.order,):
            raise InputError("bitset length must equal group order")
        self.group = group
        self.bits = bits.astype(bool, copy=False)

    @classmethod
    def from_indices(cls, group, indices) -> "ElementSet":
        bits = np.zeros(group.order, dtype=bool)
        bits[np.asarray(indices, dtype=np.int64)] = True
        return cls(group, bits)

    @classmethod
    def identity_only(cls, group) -> "ElementSet":
        return cls.from_indices(group, [group.identity_index])

    @classmethod
    def full(cls, group) -> "ElementSet":
        return cls(group, np.ones(group.order, dtype=bool))

    @property
    def count(self) -> int:
        return int(self.bits.sum())

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def contains(self, i: int) -> bool:
        return bool(self.bits[i])

    def union(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, self.bits | other.bits)

    def intersect(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.group, self.bits & other.bits)

    def issubset(self, other: "ElementSet") -> bool:
        return not np.any(self.bits & ~other.bits)

    def same_as(self, other: "ElementSet") -> bool:
        return self.group is other.group and np.array_equal(self.bits, other.bits)

    def hash_bytes(self) -> bytes:
        """128-bit digest of the bitset (dedup key; compare fully on collision)."""
        h = hashlib.blake2b(digest_size=16)
        h.update(self.group.order.to_bytes(8, "big"))
        h.update(np.packbits(self.bits).tobytes())
        return h.digest()

    def __repr__(self):
        return f"ElementSet({self.group.name}, {self.count}/{self.group.order})"


# ---------------------------------------------------------------------------
# subgroup machinery
# ---------------------------------------------------------------------------


def _bfs_span(G: GroupHandle, gens: list[int]) -> np.ndarray:
    """Right-Cayley BFS from the identity over ``gens``; returns member bits.

    Closure under products alone suffices in a finite group (inverses are
    positive powers).
    """
    bits = np.zeros(G.order, dtype=bool)
    bits[G.identity_index] = True
    frontier = np.array([G.identity_index], dtype=np.int64)
    gen_arr = np.asarray(gens, dtype=np.int64)
    while frontier.size:
        prods = G.mul_indices(frontier[:, None], gen_arr[None, :]).ravel()
        prods = np.unique(prods)
        new = prods[~bits[prods]]
        bits[new] = True
        frontier = new
    return bits


def closure_with_generators(G: GroupHandle, seed_indices) -> tuple[ElementSet, list[int]]:
    """Least subgroup containing the seeds, plus an effective generating subset."""
    idx = np.unique(np.asarray(list(seed_indices), dtype=np.int64))
    bits = np.zeros(G.order, dtype=bool)
    bits[G.identity_index] = True
    gens: list[int] = []
    for s in idx:
        if bits[s]:
            continue
        gens.append(int(s))
        bits = _bfs_span(G, gens)
    return ElementSet(G, bits), gens


def closure(G: GroupHandle, S) -> ElementSet:
    """Least subgroup of G containing S (an ElementSet or index iterable)."""
    seed = S.indices() if isinstance(S, ElementSet) else S
    result, _ = closure_with_generators(G, seed)
    return result


def is_subgroup(G: GroupHandle, S: ElementSet) -> bool:
    if not S.contains(G.identity_index):
        return False
    return closure(G, S).same_as(S)


def is_normal(G: GroupHandle, S: ElementSet) -> bool:
    idx = S.indices()
    for g in G.generators:
        if np.any(~S.bits[G.conjugate_indices(idx, g)]):
            return False
    return True


def conjugacy_classes(G: GroupHandle) -> list[np.ndarray]:
    """Classes as sorted index arrays, ordered by minimum element."""
    visited = np.zeros(G.order, dtype=bool)
    gen_pairs = [(g, G.inv(g)) for g in G.generators]
    out = []
    for i in range(G.order):
        if visited[i]:
            continue
        members = np.zeros(G.order, dtype=bool)
        members[i] = True
        frontier = np.array([i], dtype=np.int64)
        while frontier.size:
            new_bits = np.zeros(G.order, dtype=bool)
            for g, g_inv in gen_pairs:
                img = G.mul_indices(G.mul_indices(g_inv, frontier), g)
                new_bits[img] = True
            new_bits &= ~members
            members |= new_bits
            frontier = np.flatnonzero(new_bits)
        visited |= members
        out.append(np.flatnonzero(members))
    return out


def _conjugation_orbit_closure(G: GroupHandle, bits: np.ndarray) -> np.ndarray:
    bits = bits.copy()
    gen_pairs = [(g, G.inv(g)) for g in G.generators]
    frontier = np.flatnonzero(bits)
    while frontier.size:
        new_bits = np.zeros(G.order, dtype=bool)
        for g, g_inv in gen_pairs:
            img = G.mul_indices(G.mul_indices(g_inv, frontier), g)
            new_bits[img] = True
        new_bits &= ~bits
        bits |= new_bits
        frontier = np.flatnonzero(new_bits)
    return bits


def commutator_values(G: GroupHandle) -> ElementSet:
    """The set {[a,b] : a,b in G}, exactly.

    Uses [a,b] = a^-1 * a^b: the values for fixed a form a^-1 Cl(a), and the
    union over a class is the conjugation orbit of the representative's
    contribution, so the whole set costs O(|G| * #generators) instead of
    O(|G|^2) pair enumeration.
    """
    bits = np.zeros(G.order, dtype=bool)
    for cls in conjugacy_classes(G):
        r_inv = G.inv(int(cls[0]))
        bits[G.mul_indices(r_inv, cls)] = True
    return ElementSet(G, _conjugation_orbit_closure(G, bits))


def commutator_values_bruteforce(G: GroupHandle) -> ElementSet:
    """Independent O(|G|^2) oracle for commutator_values (small groups only)."""
    if G.order > 2048:
        raise CapExceededError("brute-force commutator enumeration capped at order 2048")
    bits = np.zeros(G.order, dtype=bool)
    all_idx = G.all_indices()
    for a in range(G.order):
        bits[G.commutator_indices(a, all_idx)] = True
    return ElementSet(G, bits)


def derived_subgroup(G: GroupHandle) -> ElementSet:
    return closure(G, commutator_values(G))


def normal_closure(G: GroupHandle, S) -> ElementSet:
    """Least normal subgroup of G containing S."""
    seed = S.indices() if isinstance(S, ElementSet) else np.asarray(list(S), dtype=np.int64)
    bits = np.zeros(G.order, dtype=bool)
    bits[seed] = True
    conj_closed = _conjugation_orbit_closure(G, bits)
    return closure(G, np.flatnonzero(conj_closed))


def center(G: GroupHandle) -> ElementSet:
    all_idx = G.all_indices()
    mask = np.ones(G.order, dtype=bool)
    for g in G.generators:
        mask &= G.mul_indices(all_idx, g) == G.mul_indices(g, all_idx)
    return ElementSet(G, mask)


def is_abelian(G: GroupHandle) -> bool:
    gens = G.generators
    return all(G.mul(a, b) == G.mul(b, a) for a in gens for b in gens)


def subset_is_abelian(G: GroupHandle, S: ElementSet) -> bool:
    """Abelian test for a subgroup, via pairwise-commuting effective generators."""
    _, gens = closure_with_generators(G, S.indices())
    return all(G.mul(a, b) == G.mul(b, a) for a in gens for b in gens)


def is_perfect(G: GroupHandle) -> bool:
    return derived_subgroup(G).count == G.order


# ---------------------------------------------------------------------------
# quotients, products, subgroups
# ---------------------------------------------------------------------------


def quotient(G: GroupHandle, N: ElementSet, name: str | None = None) -> GroupHandle:
    """G/N on coset representatives (minimum parent index per coset)."""
    if not is_subgroup(G, N):
        raise InputError("N is not a subgroup")
    if not is_normal(G, N):
        raise InputError("N is not normal in G")
    n_count = N.count
    if (G.order // n_count) > ORDER_CAP:
        raise CapExceededError("quotient order exceeds ORDER_CAP")
    n_idx = N.indices()
    rep_of = np.full(G.order, -1, dtype=np.int64)
    for i in range(G.order):
        if rep_of[i] < 0:
            rep_of[G.mul_indices(i, n_idx)] = i
    reps = np.flatnonzero(rep_of == np.arange(G.order))
    backend = QuotientBackend(G, rep_of)
    gen_coords = [[int(rep_of[g])] for g in G.generators] or [[int(rep_of[G.identity_index])]]
    handle = GroupHandle.from_coords(
        backend, reps[:, None], gen_coords, name or f"{G.name}/N{n_count}"
    )
    handle.parent = G
    handle.rep_of = rep_of
    return handle


def quotient_project(Q: GroupHandle, parent_indices) -> np.ndarray:
    """Map parent element indices to quotient indices (Q built by `quotient`)."""
    reps = Q.rep_of[np.asarray(parent_indices, dtype=np.int64)]
    return Q._lookup(Q.backend.pack(np.atleast_1d(reps)[:, None]))


def subgroup_handle(G: GroupHandle, S: ElementSet, name: str | None = None) -> GroupHandle:
    if not is_subgroup(G, S):
        raise InputError("S is not a subgroup")
    _, gens = closure_with_generators(G, S.indices())
    idx = S.indices()
    handle = GroupHandle.from_coords(
        SubgroupBackend(G),
        idx[:, None],
        [[g] for g in gens] or [[G.identity_index]],
        name or f"{G.name}|sub{len(idx)}",
    )
    handle.parent = G
    handle.member_indices = idx
    return handle


def direct_product(G: GroupHandle, H: GroupHandle, name: str | None = None) -> GroupHandle:
    if G.order * H.order > ORDER_CAP:
        raise CapExceededError(f"product order {G.order * H.order} exceeds ORDER_CAP")
    backend = ProductBackend(G.backend, H.backend)
    left = np.repeat(G.coords, H.order, axis=0)
    right = np.tile(H.coords, (G.order, 1))
    coords = np.concatenate([left, right], axis=1)
    e_g = G.coords[G.identity_index]
    e_h = H.coords[H.identity_index]
    gen_coords = [np.concatenate([G.coords[g], e_h]) for g in G.generators]
    gen_coords += [np.concatenate([e_g, H.coords[h]]) for h in H.generators]
    return GroupHandle.from_coords(
        backend, coords, gen_coords, name or f"{G.name}x{H.name}"
    )


# ---------------------------------------------------------------------------
# structure predicates
# ---------------------------------------------------------------------------


def sylow_subgroup(G: GroupHandle, p: int) -> ElementSet:
    """Closure of all p-parts of elements.

    Equals the Sylow p-subgroup exactly when that subgroup is normal;
    otherwise the closure is strictly larger than p^k, which is what
    `is_nilpotent` exploits.
    """
    k = prime_factorization(G.order).get(p, 0)
    if k == 0:
        return ElementSet.identity_only(G)
    pk = p**k
    m0 = G.order // pk
    c = m0 * pow(m0, -1, pk)  # c = 0 mod m0, 1 mod p^k, so x^c is the p-part
    parts = np.unique(G.pow_indices(G.all_indices(), c))
    return closure(G, parts)


def is_nilpotent(G: GroupHandle) -> bool:
    """True iff every Sylow subgroup is normal.

    Equivalent count form: for each prime p with p^k || |G|, the set
    {x : x^(p^k) = e} of p-elements has size exactly p^k (every Sylow
    subgroup sits inside that set, so size p^k forces a unique, hence
    normal, Sylow subgroup).
    """
    all_idx = G.all_indices()
    for p, k in prime_factorization(G.order).items():
        pk = p**k
        cnt = int(np.sum(G.pow_indices(all_idx, pk) == G.identity_index))
        if cnt != pk:
            return False
    return True


def minimal_normal_subgroups(G: GroupHandle) -> list[ElementSet]:
    """All minimal nontrivial normal subgroups.

    Every normal subgroup contains the normal closure of any of its
    elements, so minimal ones arise among closures of single class
    representatives.
    """
    if G.order == 1:
        return []
    distinct: list[ElementSet] = []
    for cls in conjugacy_classes(G):
        r = int(cls[0])
        if r == G.identity_index:
            continue
        N = normal_closure(G, [r])
        if not any(M.same_as(N) for M in distinct):
            distinct.append(N)
    cands = sorted(distinct, key=lambda s: (s.count, s.hash_bytes()))
    minimal = []
    for N in cands:
        if not any(M.issubset(N) for M in minimal):
            minimal.append(N)
    return minimal


def is_semisimple(G: GroupHandle) -> bool:
    """True iff G is the internal direct product of its minimal normal
    subgroups and each of them is nonabelian.

    A nonabelian minimal normal subgroup is a direct product of isomorphic
    nonabelian simple groups, so this matches "direct product of
    non-abelian simple groups".  The trivial group is not semisimple.
    """
    if G.order == 1:
        return False
    mins = minimal_normal_subgroups(G)
    if any(subset_is_abelian(G, N) for N in mins):
        return False
    prod = 1
    union = np.zeros(G.order, dtype=bool)
    for N in mins:
        prod *= N.count
        union |= N.bits
    if prod != G.order:
        return False
    return closure(G, np.flatnonzero(union)).count == G.order


def power_map_image(G: GroupHandle, m: int) -> ElementSet:
    """The set {x^m : x in G}."""
    return ElementSet.from_indices(G, np.unique(G.pow_indices(G.all_indices(), m)))


def power_map_is_surjective(G: GroupHandle, m: int) -> bool:
    return power_map_image(G, m).count == G.order


# ---------------------------------------------------------------------------
# generic enumeration
# ---------------------------------------------------------------------------


def enumerate_group(seed_elements, mul_rule, inv_rule, name="enumerated", *, order_cap=ORDER_CAP) -> GroupHandle:
    """Breadth-first closure of opaque seed encodings under a user law.

    Indices follow discovery order (seeds first, in the given order), so
    runs are reproducible.  Closure under products alone is enough in a
    finite group.
    """
    seeds = []
    for s in seed_elements:
        if s not in seeds:
            seeds.append(s)
    if not seeds:
        raise InputError("need at least one seed element")
    elements: list = []
    index: dict = {}
    for s in seeds:
        index[s] = len(elements)
        elements.append(s)
    pos = 0
    while pos < len(elements):
        x = elements[pos]
        for s in seeds:
            y = mul_rule(x, s)
            if y not in index:
                if len(elements) >= order_cap:
                    raise CapExceededError(
                        f"closure exceeded cap {order_cap}", partial_count=len(elements)
                    )
                index[y] = len(elements)
                elements.append(y)
        pos += 1
    backend = CallableBackend(elements, index, mul_rule, inv_rule)
    coords = np.arange(len(elements), dtype=np.int64)[:, None]
    gen_coords = [[index[s]] for s in seeds]
    return GroupHandle.from_coords(backend, coords, gen_coords, name, sort=False)


def set_product(G: GroupHandle, S: ElementSet, T: ElementSet) -> ElementSet:
    """Pointwise product set S*T, iterating over the smaller operand."""
    s_idx, t_idx = S.indices(), T.indices()
    bits = np.zeros(G.order, dtype=bool)
    if len(s_idx) <= len(t_idx):
        for s in s_idx:
            bits[G.mul_indices(int(s), t_idx)] = True
    else:
        for t in t_idx:
            bits[G.mul_indices(s_idx, int(t))] = True
    return ElementSet(G, bits)
