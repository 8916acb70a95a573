"""Group words: parsing, evaluation, value sets, verbal subgroups, width.

Grammar (EBNF)::

    word   := factor+
    factor := atom ["^" int]
    atom   := var | "(" word ")" | "[" word "," word "]"
    var    := "x" int
    int    := ["-"] digit+

``[a,b]`` means a^-1 b^-1 a b and composition is the group's documented
left-to-right convention.  A word's arity is the highest variable index
it references.

Value sets follow the paper-style convention of containing every value
together with its inverse.  The enumeration plan matters: a top-level
concatenation whose factors use pairwise-disjoint variables is computed
factor by factor and combined with pointwise set products, which turns
the cost of words like ``[x1,x2]x3^5`` from |G|^3 into |G|^2 work and is
what makes the 15000-element Holt group feasible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InfeasibleWordError,
    InputError,
    InvarianceCertificationError,
    WordSyntaxError,
)
from .groups import (
    ElementSet,
    GroupHandle,
    closure,
    commutator_values,
    is_normal,
    is_subgroup,
    set_product,
)

EXPONENT_LIMIT = 2**31
_BRUTE_ORDER_CAP = 2048  # |G| cap for brute-force pair enumeration
_EXHAUSTIVE_ARG_BUDGET = 10**6


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Inv:
    body: "WordNode"


@dataclass(frozen=True)
class Pow:
    body: "WordNode"
    exponent: int


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Comm:
    left: "WordNode"
    right: "WordNode"


WordNode = Var | Inv | Pow | Concat | Comm


@dataclass(frozen=True)
class Word:
    """A parsed word; arity is the highest variable index referenced."""

    root: WordNode
    arity: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "arity", _max_var(self.root))

    @property
    def variables(self) -> frozenset[int]:
        return _vars(self.root)

    def text(self) -> str:
        return _to_text(self.root)

    def __str__(self) -> str:
        return self.text()


def _max_var(node: WordNode) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, (Inv, Pow)):
        return _max_var(node.body)
    if isinstance(node, Concat):
        return max(_max_var(p) for p in node.parts)
    return max(_max_var(node.left), _max_var(node.right))


def _vars(node: WordNode) -> frozenset[int]:
    if isinstance(node, Var):
        return frozenset([node.index])
    if isinstance(node, (Inv, Pow)):
        return _vars(node.body)
    if isinstance(node, Concat):
        return frozenset().union(*(_vars(p) for p in node.parts))
    return _vars(node.left) | _vars(node.right)


def _to_text(node: WordNode) -> str:
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Inv):
        return _to_text(Pow(node.body, -1))
    if isinstance(node, Pow):
        base = node.body
        inner = _to_text(base)
        if not isinstance(base, (Var, Comm)):
            inner = f"({inner})"
        return f"{inner}^{node.exponent}"
    if isinstance(node, Comm):
        return f"[{_to_text(node.left)},{_to_text(node.right)}]"
    out = []
    for p in node.parts:
        t = _to_text(p)
        if isinstance(p, Concat):
            t = f"({t})"
        out.append(t)
    return "".join(out)


def commutator_word() -> Word:
    """[x1, x2]"""
    return Word(Comm(Var(1), Var(2)))


def power_word(m: int) -> Word:
    """x1^m"""
    return Word(Pow(Var(1), m)) if m != 1 else Word(Var(1))


def holt_test_word(p: int) -> Word:
    """[x1, x2] x3^p"""
    return Word(Concat((Comm(Var(1), Var(2)), Pow(Var(3), p))))


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise WordSyntaxError(msg, self.pos)

    def peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def parse_int(self) -> int:
        self._skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        digits_start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits_start:
            self.error("expected an integer")
        value = int(self.text[start : self.pos])
        if abs(value) >= EXPONENT_LIMIT:
            self.pos = start
            self.error("exponent overflow")
        return value

    def parse_word(self) -> WordNode:
        parts = [self.parse_factor()]
        while self.peek() in ("x", "(", "["):
            parts.append(self.parse_factor())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def parse_factor(self) -> WordNode:
        atom = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            n = self.parse_int()
            return _make_pow(atom, n, self)
        return atom

    def parse_atom(self) -> WordNode:
        ch = self.peek()
        if ch == "x":
            self.pos += 1
            idx = self.parse_int()
            if idx < 1:
                self.error("variable index must be >= 1")
            return Var(idx)
        if ch == "(":
            self.pos += 1
            inner = self.parse_word()
            self.expect(")")
            return inner
        if ch == "[":
            self.pos += 1
            left = self.parse_word()
            self.expect(",")
            right = self.parse_word()
            self.expect("]")
            return Comm(left, right)
        self.error("expected a variable, '(' or '['")


def _make_pow(base: WordNode, n: int, parser: _Parser | None = None) -> WordNode:
    # normalize nested exponents: (w^a)^b = w^(ab)
    if isinstance(base, Pow):
        prod = base.exponent * n
        if abs(prod) >= EXPONENT_LIMIT:
            if parser is not None:
                parser.error("exponent overflow")
            raise WordSyntaxError("exponent overflow", 0)
        base, n = base.body, prod
    if isinstance(base, Inv):
        return _make_pow(base.body, -n, parser)
    if n == 1:
        return base
    return Pow(base, n)


def parse_word(text: str) -> Word:
    p = _Parser(text)
    root = p.parse_word()
    p._skip_ws()
    if p.pos != len(text):
        p.error("trailing input")
    return Word(root)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def evaluate_word_indices(G: GroupHandle, w: Word, args) -> np.ndarray:
    """Vectorized evaluation: args is one index array per variable."""
    if len(args) != w.arity:
        raise InputError(f"word has arity {w.arity}, got {len(args)} arguments")
    arrs = [np.asarray(a, dtype=np.int64) for a in args]

    def ev(node: WordNode) -> np.ndarray:
        if isinstance(node, Var):
            return arrs[node.index - 1]
        if isinstance(node, Inv):
            return G.inv_indices(ev(node.body))
        if isinstance(node, Pow):
            return G.pow_indices(ev(node.body), node.exponent)
        if isinstance(node, Concat):
            out = ev(node.parts[0])
            for p in node.parts[1:]:
                out = G.mul_indices(out, ev(p))
            return out
        a, b = ev(node.left), ev(node.right)
        ainv, binv = G.inv_indices(a), G.inv_indices(b)
        return G.mul_indices(G.mul_indices(G.mul_indices(ainv, binv), a), b)

    return ev(w.root)


def evaluate_word(G: GroupHandle, w: Word, args) -> int:
    """Scalar evaluation at a tuple of element indices."""
    out = evaluate_word_indices(G, w, [np.array([a], dtype=np.int64) for a in args])
    return int(out[0])


# ---------------------------------------------------------------------------
# value sets
# ---------------------------------------------------------------------------


def _image_set(G: GroupHandle, S: ElementSet, fn) -> ElementSet:
    return ElementSet.from_indices(G, np.unique(fn(S.indices())))


def _brute_force_values(G: GroupHandle, node: WordNode) -> ElementSet:
    used = sorted(_vars(node))
    if len(used) > 2:
        raise InfeasibleWordError(
            "brute-force value enumeration only supports words on <= 2 variables"
        )
    if G.order > _BRUTE_ORDER_CAP and len(used) == 2:
        raise InfeasibleWordError(
            f"brute-force pair enumeration capped at order {_BRUTE_ORDER_CAP}"
        )
    w = Word(node)
    all_idx = G.all_indices()
    bits = np.zeros(G.order, dtype=bool)
    e = G.identity_index

    def args_for(assign: dict[int, np.ndarray]) -> list[np.ndarray]:
        return [assign.get(v, np.full(G.order if assign else 1, e)) for v in range(1, w.arity + 1)]

    if len(used) == 0:
        bits[evaluate_word(G, w, [e] * w.arity)] = True
    elif len(used) == 1:
        vals = evaluate_word_indices(G, w, args_for({used[0]: all_idx}))
        bits[vals] = True
    else:
        u, v = used
        for a in range(G.order):
            assign = {u: np.full(G.order, a, dtype=np.int64), v: all_idx}
            bits[evaluate_word_indices(G, w, args_for(assign))] = True
    return ElementSet(G, bits)


def _raw_values(G: GroupHandle, node: WordNode) -> ElementSet:
    """Values of the word (no inverse closure)."""
    if isinstance(node, Var):
        return ElementSet.full(G)
    if isinstance(node, Inv):
        return _image_set(G, _raw_values(G, node.body), G.inv_indices)
    if isinstance(node, Pow):
        inner = _raw_values(G, node.body)
        return _image_set(G, inner, lambda idx: G.pow_indices(idx, node.exponent))
    if isinstance(node, Comm):
        lv, rv = _vars(node.left), _vars(node.right)
        if lv & rv:
            return _brute_force_values(G, node)
        if isinstance(node.left, Var) and isinstance(node.right, Var):
            return commutator_values(G)
        left = _raw_values(G, node.left)
        right = _raw_values(G, node.right)
        bits = np.zeros(G.order, dtype=bool)
        li, ri = left.indices(), right.indices()
        if len(li) * len(ri) > _BRUTE_ORDER_CAP**2:
            raise InfeasibleWordError("commutator-of-sets enumeration too large")
        if len(li) <= len(ri):
            for a in li:
                bits[G.commutator_indices(int(a), ri)] = True
        else:
            for b in ri:
                bits[G.commutator_indices(li, int(b))] = True
        return ElementSet(G, bits)
    # Concat: factor decomposition over pairwise-disjoint variables
    varsets = [_vars(p) for p in node.parts]
    disjoint = all(
        not (varsets[i] & varsets[j])
        for i in range(len(varsets))
        for j in range(i + 1, len(varsets))
    )
    if disjoint:
        out = _raw_values(G, node.parts[0])
        for p in node.parts[1:]:
            out = set_product(G, out, _raw_values(G, p))
        return out
    return _brute_force_values(G, node)


def value_set(G: GroupHandle, w: Word) -> ElementSet:
    """All word values together with their inverses."""
    raw = _raw_values(G, w.root)
    inv_image = _image_set(G, raw, G.inv_indices)
    return raw.union(inv_image)


def verbal_subgroup(G: GroupHandle, w: Word) -> ElementSet:
    return closure(G, value_set(G, w))


# ---------------------------------------------------------------------------
# width
# ---------------------------------------------------------------------------


@dataclass
class WidthReport:
    word: str
    group: str
    value_count: int
    subgroup_order: int
    width: int
    frontier_sizes: list[int]


def word_width(G: GroupHandle, w: Word) -> WidthReport:
    """Exact width by product-set BFS: X_1 = G_w, X_{n+1} = X_n * G_w.

    Since the identity is a value, X_{n+1} = X_n | (frontier * G_w), so each
    level only multiplies the newly reached elements.
    """
    vs = value_set(G, w)
    target = closure(G, vs)
    if vs.count == 1:
        # G_w = {1}: the verbal subgroup is trivial and the width is 0
        return WidthReport(w.text(), G.name, 1, 1, 0, [1])
    reached = vs.bits.copy()
    sizes = [int(reached.sum())]
    frontier = ElementSet(G, reached.copy())
    while not np.array_equal(reached, target.bits):
        prod = set_product(G, frontier, vs)
        new = prod.bits & ~reached
        if not new.any():
            raise AssertionError("width BFS stalled below the verbal subgroup")
        reached |= new
        sizes.append(int(reached.sum()))
        frontier = ElementSet(G, new)
    return WidthReport(w.text(), G.name, vs.count, target.count, len(sizes), sizes)


# ---------------------------------------------------------------------------
# counting lower bound
# ---------------------------------------------------------------------------


def certify_translation_invariance(
    G: GroupHandle,
    w: Word,
    N: ElementSet,
    *,
    arg_samples: int = 10_000,
    max_translation_tuples: int = 20_000,
    seed: int = 0,
) -> dict:
    """Check w(x1 n1, ..., xk nk) = w(x1, ..., xk) for n_i in N.

    Argument tuples are exhaustive when |G|^k is small, otherwise sampled
    with the given seed; translation tuples are exhaustive whenever |N|^k
    fits the budget.  Raises InvarianceCertificationError on any violation.
    """
    k = w.arity
    n_idx = N.indices()
    if G.order**k <= _EXHAUSTIVE_ARG_BUDGET:
        grids = np.meshgrid(*([G.all_indices()] * k), indexing="ij")
        args = [g.ravel() for g in grids]
        exhaustive_args = True
    else:
        rng = np.random.default_rng(seed)
        args = [rng.integers(0, G.order, size=arg_samples) for _ in range(k)]
        exhaustive_args = False
    base = evaluate_word_indices(G, w, args)
    if len(n_idx) ** k <= max_translation_tuples:
        tuples = itertools.product(n_idx, repeat=k)
        exhaustive_tuples = True
        n_tuples = len(n_idx) ** k
    else:
        rng = np.random.default_rng(seed + 1)
        tuples = (rng.choice(n_idx, size=k) for _ in range(1000))
        exhaustive_tuples = False
        n_tuples = 1000
    violations = 0
    for tup in tuples:
        shifted = [G.mul_indices(args[i], int(tup[i])) for i in range(k)]
        violations += int(np.sum(evaluate_word_indices(G, w, shifted) != base))
    if violations:
        raise InvarianceCertificationError(
            f"word {w.text()} is not invariant under N-translation "
            f"({violations} violations)"
        )
    return {
        "arg_tuples": len(base),
        "translation_tuples": n_tuples,
        "exhaustive_args": exhaustive_args,
        "exhaustive_translations": exhaustive_tuples,
        "violations": 0,
    }


def counting_width_lower_bound(
    G: GroupHandle,
    w: Word,
    N: ElementSet,
    *,
    arg_samples: int = 10_000,
    seed: int = 0,
) -> int:
    """Least f with (|G|/|N|)^(k f) >= |w(G)|; valid (and certified) because
    word values are unchanged by N-translation of the arguments, so at most
    (|G|/|N|)^k distinct values feed each of the f product slots."""
    if not is_subgroup(G, N):
        raise InputError("N is not a subgroup")
    if not is_normal(G, N):
        raise InputError("N is not normal")
    certify_translation_invariance(G, w, N, arg_samples=arg_samples, seed=seed)
    wg = verbal_subgroup(G, w).count
    if wg == 1:
        return 0
    q = G.order // N.count
    k = w.arity
    f = 1
    while q ** (k * f) < wg:
        f += 1
    return f
