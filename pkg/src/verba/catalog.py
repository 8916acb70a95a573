"""Named group constructors and the group-spec JSON loader.

Spec files are small JSON objects, e.g.::

    {"type": "symmetric", "n": 4}
    {"type": "sl2", "q": 5}
    {"type": "holt_k", "q": 5, "r": 1}
    {"type": "free_class2", "d": 4, "p": 3}
    {"type": "direct_product", "factors": [{"type": "cyclic", "n": 3},
                                           {"type": "cyclic", "n": 3}]}

``holt_symbolic`` specs load to a :class:`~verba.holt.SymbolicHolt`
(orders only), every other type to a :class:`~verba.groups.GroupHandle`.
"""

from __future__ import annotations

import itertools
import json
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import CapExceededError, InputError
from .groups import (
    GroupHandle,
    ModVectorBackend,
    PermutationBackend,
    QuaternionBackend,
    direct_product,
)


def permutation_mul(a: tuple, b: tuple) -> tuple:
    """Compose image tuples left-to-right: apply a first, then b."""
    return tuple(b[x] for x in a)


def permutation_inv(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def permutation_parity(a: tuple) -> int:
    """0 for even, 1 for odd."""
    seen = [False] * len(a)
    parity = 0
    for i in range(len(a)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = a[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def trivial_group() -> GroupHandle:
    return cyclic_group(1)


@lru_cache(maxsize=None)
def cyclic_group(n: int) -> GroupHandle:
    if n < 1:
        raise InputError(f"cyclic order must be positive, got {n}")
    backend = ModVectorBackend([n])
    coords = np.arange(n, dtype=np.int64)[:, None]
    gens = [[1 % n]]
    return GroupHandle.from_coords(backend, coords, gens, f"C{n}")


@lru_cache(maxsize=None)
def symmetric_group(n: int) -> GroupHandle:
    if n < 1:
        raise InputError("n must be >= 1")
    import math

    if math.factorial(n) > 10**5:
        raise CapExceededError(f"S{n} has {math.factorial(n)} elements, over the cap")
    coords = np.array(sorted(itertools.permutations(range(n))), dtype=np.int64)
    backend = PermutationBackend(n)
    ident = tuple(range(n))
    if n == 1:
        gens = [list(ident)]
    elif n == 2:
        gens = [[1, 0]]
    else:
        transposition = [1, 0] + list(range(2, n))
        cycle = list(range(1, n)) + [0]
        gens = [transposition, cycle]
    return GroupHandle.from_coords(backend, coords, gens, f"S{n}")


@lru_cache(maxsize=None)
def alternating_group(n: int) -> GroupHandle:
    if n < 3:
        raise InputError("alternating groups here start at n=3")
    perms = [p for p in itertools.permutations(range(n)) if permutation_parity(p) == 0]
    coords = np.array(sorted(perms), dtype=np.int64)
    backend = PermutationBackend(n)
    three_cycle = [1, 2, 0] + list(range(3, n))
    if n % 2 == 1:
        big = list(range(1, n)) + [0]  # n-cycle, even for odd n
    else:
        big = [0] + list(range(2, n)) + [1]  # (n-1)-cycle on 1..n-1
    gens = [three_cycle] if n == 3 else [three_cycle, big]
    return GroupHandle.from_coords(backend, coords, gens, f"A{n}")


@lru_cache(maxsize=None)
def dihedral_group(n: int) -> GroupHandle:
    """Symmetries of the regular n-gon, order 2n, as permutations."""
    if n < 3:
        raise InputError("dihedral groups here start at n=3")
    rotations = [tuple((x + i) % n for x in range(n)) for i in range(n)]
    reflections = [tuple((i - x) % n for x in range(n)) for i in range(n)]
    coords = np.array(sorted(set(rotations + reflections)), dtype=np.int64)
    backend = PermutationBackend(n)
    gens = [list(rotations[1]), list(reflections[0])]
    return GroupHandle.from_coords(backend, coords, gens, f"D{2 * n}")


@lru_cache(maxsize=None)
def quaternion_group() -> GroupHandle:
    backend = QuaternionBackend()
    coords = np.array(list(itertools.product((0, 1), repeat=3)), dtype=np.int64)
    gens = [[0, 1, 0], [0, 0, 1]]  # i and j
    return GroupHandle.from_coords(backend, coords, gens, "Q8")


# ---------------------------------------------------------------------------
# spec loading
# ---------------------------------------------------------------------------


def load_group_spec(spec):
    """Build the object described by a group-spec dict, JSON string, or path."""
    if isinstance(spec, (str, Path)):
        text = Path(spec).read_text() if Path(str(spec)).exists() else str(spec)
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad group spec JSON: {exc}") from exc
    if not isinstance(spec, dict) or "type" not in spec:
        raise InputError("group spec must be an object with a 'type' field")
    kind = spec["type"]
    try:
        if kind == "trivial":
            return trivial_group()
        if kind == "cyclic":
            return cyclic_group(int(spec["n"]))
        if kind == "symmetric":
            return symmetric_group(int(spec["n"]))
        if kind == "alternating":
            return alternating_group(int(spec["n"]))
        if kind == "dihedral":
            return dihedral_group(int(spec["n"]))
        if kind == "quaternion":
            return quaternion_group()
        if kind == "sl2":
            from .holt import sl2_group

            return sl2_group(int(spec["q"]))
        if kind == "holt_k":
            from .holt import HoltParams, holt_k_group

            return holt_k_group(HoltParams(int(spec["q"]), int(spec["r"])))
        if kind == "holt_p":
            from .holt import HoltParams, holt_p_group

            return holt_p_group(HoltParams(int(spec["q"]), int(spec["r"])))
        if kind == "holt_symbolic":
            from .holt import HoltParams, holt_symbolic

            return holt_symbolic(HoltParams(int(spec["q"]), int(spec["r"])))
        if kind == "free_class2":
            from .pgroup import free_class2_group

            return free_class2_group(int(spec["d"]), int(spec["p"]))
        if kind == "direct_product":
            factors = spec.get("factors", [])
            if len(factors) < 2:
                raise InputError("direct_product needs at least two factors")
            handle = load_group_spec(factors[0])
            for f in factors[1:]:
                handle = direct_product(handle, load_group_spec(f))
            return handle
    except KeyError as exc:
        raise InputError(f"group spec {kind!r} missing field {exc}") from exc
    raise InputError(f"unknown group spec type {kind!r}")
