"""Dyadic wavelet/quarklet indices and the tree machinery built on them.

A wavelet index ``(j, k)`` labels the dyadic interval ``2^-j [k, k+1)``.  The
generator layer ``j = -1`` is never represented as a node: its coefficient
slots belong to the root ``(0, 0)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple


class IndexRangeError(ValueError):
    """An index or refinement exceeds the configured level/degree bounds."""


class WaveletIndex(NamedTuple):
    j: int
    k: int

    @property
    def is_right(self) -> bool:
        return self.k % 2 == 1

    def interval(self) -> tuple[float, float]:
        h = 2.0 ** -self.j
        return self.k * h, (self.k + 1) * h


class QuarkletIndex(NamedTuple):
    p: int
    j: int
    k: int

    @property
    def wavelet(self) -> WaveletIndex:
        """Projection onto the space index (drops the degree)."""
        if self.j < 0:
            return ROOT
        return WaveletIndex(self.j, self.k)


ROOT = WaveletIndex(0, 0)


def check_index(lam: WaveletIndex, j_max: int | None = None) -> None:
    j, k = lam
    if j < 0 or k < 0 or k > max(0, 2**j - 1):
        raise IndexRangeError(f"{tuple(lam)} is not an index of the unit interval")
    if j_max is not None and j > j_max:
        raise IndexRangeError(f"level {j} exceeds j_max={j_max}")


def children(lam: WaveletIndex) -> tuple[WaveletIndex, WaveletIndex]:
    j, k = lam
    return WaveletIndex(j + 1, 2 * k), WaveletIndex(j + 1, 2 * k + 1)


def parent(lam: WaveletIndex) -> WaveletIndex | None:
    j, k = lam
    if j == 0:
        return None
    return WaveletIndex(j - 1, k // 2)


def ancestors(lam: WaveletIndex) -> Iterator[WaveletIndex]:
    """Strict ancestors of ``lam``, nearest first."""
    mu = parent(lam)
    while mu is not None:
        yield mu
        mu = parent(mu)


def is_descendant(lam: WaveletIndex, mu: WaveletIndex) -> bool:
    """True iff the interval of ``lam`` is a proper subset of that of ``mu``."""
    d = lam.j - mu.j
    return d > 0 and lam.k >> d == mu.k


def upsilon(lam: WaveletIndex) -> tuple[WaveletIndex, ...]:
    """Ancestor chain that shares the polynomial degree of leaf ``lam``.

    Walks from ``lam`` towards the root and stops at the first right node
    (odd ``k``); if every node on the path is a left node the chain ends at
    the root.
    """
    chain = [lam]
    mu = lam
    while not mu.is_right and mu.j > 0:
        mu = parent(mu)
        chain.append(mu)
    return tuple(chain)


class WaveletTree:
    """Immutable complete binary tree of wavelet indices rooted at ``(0, 0)``."""

    __slots__ = ("_nodes",)

    def __init__(self, nodes: Iterable[WaveletIndex] = (ROOT,)):
        nodes = frozenset(WaveletIndex(*n) for n in nodes)
        if ROOT not in nodes:
            raise ValueError("tree must contain the root (0, 0)")
        for lam in nodes:
            check_index(lam)
            mu = parent(lam)
            if mu is not None and mu not in nodes:
                raise ValueError(f"{tuple(lam)} has no parent in the tree")
            c0, c1 = children(lam)
            if (c0 in nodes) != (c1 in nodes):
                raise ValueError(f"{tuple(lam)} has exactly one child")
        self._nodes = nodes

    @classmethod
    def _trusted(cls, nodes: frozenset) -> "WaveletTree":
        tree = cls.__new__(cls)
        tree._nodes = nodes
        return tree

    def __contains__(self, lam) -> bool:
        return lam in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        return isinstance(other, WaveletTree) and self._nodes == other._nodes

    def __hash__(self) -> int:
        return hash(self._nodes)

    def __repr__(self) -> str:
        return f"WaveletTree({[tuple(n) for n in self]})"

    def __iter__(self) -> Iterator[WaveletIndex]:
        """Canonical depth-first order, left child first."""
        stack = [ROOT]
        while stack:
            lam = stack.pop()
            yield lam
            c0, c1 = children(lam)
            if c0 in self._nodes:
                stack.append(c1)
                stack.append(c0)

    @property
    def nodes(self) -> frozenset:
        return self._nodes

    def is_leaf(self, lam: WaveletIndex) -> bool:
        return lam in self._nodes and children(lam)[0] not in self._nodes

    def leaves(self) -> list[WaveletIndex]:
        return [lam for lam in self if self.is_leaf(lam)]

    def depth(self) -> int:
        return max(lam.j for lam in self._nodes)

    def subtree(self, lam: WaveletIndex) -> list[WaveletIndex]:
        """Nodes of the tree below and including ``lam``."""
        out, stack = [], [lam]
        while stack:
            mu = stack.pop()
            out.append(mu)
            c0, c1 = children(mu)
            if c0 in self._nodes:
                stack.extend((c1, c0))
        return out

    def issubset(self, other: "WaveletTree") -> bool:
        return self._nodes <= other._nodes


def refine_space(tree: WaveletTree, lam: WaveletIndex, j_max: int | None = None) -> WaveletTree:
    """Return ``tree`` with both children of the leaf ``lam`` added."""
    lam = WaveletIndex(*lam)
    if not tree.is_leaf(lam):
        raise ValueError(f"{tuple(lam)} is not a leaf of the tree")
    if j_max is not None and lam.j + 1 > j_max:
        raise IndexRangeError(f"refining {tuple(lam)} exceeds j_max={j_max}")
    return WaveletTree._trusted(tree.nodes | set(children(lam)))


def refinement_count(lam: WaveletIndex, tree: WaveletTree) -> int:
    """Number of subdivisions inside the subtree of ``tree`` rooted at ``lam``."""
    if lam not in tree:
        raise ValueError(f"{tuple(lam)} is not a node of the tree")
    return (len(tree.subtree(lam)) - 1) // 2


@dataclass(frozen=True)
class QuarkletTree:
    """Wavelet tree with a maximal polynomial degree on every node.

    ``pmax`` maps each node of the tree to its maximal degree.  Use
    :meth:`from_leaf_degrees` to obtain the degrees induced along the
    :func:`upsilon` chains of the leaves.
    """

    pmax: Mapping[WaveletIndex, int] = field(default_factory=lambda: {ROOT: 0})

    @classmethod
    def from_leaf_degrees(cls, tree: WaveletTree, leaf_degrees: Mapping) -> "QuarkletTree":
        pmax = {}
        for lam in tree.leaves():
            p = int(leaf_degrees[lam])
            if p < 0:
                raise ValueError("degrees must be nonnegative")
            for mu in upsilon(lam):
                pmax[mu] = p
        return cls({lam: pmax[lam] for lam in tree})

    @property
    def base(self) -> WaveletTree:
        return WaveletTree(self.pmax)

    def leaf_degrees(self) -> dict[WaveletIndex, int]:
        return {lam: self.pmax[lam] for lam in self.base.leaves()}

    def quarklet_indices(self) -> list[QuarkletIndex]:
        """All quarklet indices of the tree, root generator slots included."""
        out = []
        for lam in self.base:
            for p in range(self.pmax[lam] + 1):
                if lam == ROOT:
                    out.append(QuarkletIndex(p, -1, 0))
                out.append(QuarkletIndex(p, lam.j, lam.k))
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(tree_to_dict(self), **kwargs)


def validate_quarklet_tree(T) -> bool:
    """Check ancestor closure, completeness, chain-constant and complete degrees.

    ``T`` is either a :class:`QuarkletTree` or an iterable of quarklet indices.
    """
    if isinstance(T, QuarkletTree):
        pmax = dict(T.pmax)
        present = None
    else:
        present = {QuarkletIndex(*q) for q in T}
        pmax = {}
        for q in present:
            lam = q.wavelet
            pmax[lam] = max(pmax.get(lam, 0), q.p)
    try:
        tree = WaveletTree(pmax)
    except ValueError:
        return False
    if any(p < 0 for p in pmax.values()):
        return False
    for lam in tree.leaves():
        if any(pmax[mu] != pmax[lam] for mu in upsilon(lam)):
            return False
    if present is not None:
        for lam, p in pmax.items():
            for q in range(p + 1):
                if QuarkletIndex(q, lam.j, lam.k) not in present:
                    return False
    return True


def quarklet_cardinality(T: QuarkletTree) -> int:
    """Number of quarklets: node count plus the sum of all node degrees."""
    if not validate_quarklet_tree(T):
        raise ValueError("not a valid quarklet tree")
    return len(T.pmax) + sum(T.pmax.values())


def derive_pmax(tree: WaveletTree, tree_prime: WaveletTree) -> QuarkletTree:
    """Trim ``tree_prime`` to ``tree``, turning removed subdivisions into degrees."""
    if not tree.issubset(tree_prime):
        raise ValueError("tree is not a subtree of tree_prime")
    return QuarkletTree.from_leaf_degrees(
        tree, {lam: refinement_count(lam, tree_prime) for lam in tree.leaves()}
    )


def tree_to_dict(T: QuarkletTree, lam: WaveletIndex = ROOT) -> dict:
    node = {"j": lam.j, "k": lam.k, "pmax": int(T.pmax[lam]), "children": []}
    c0, c1 = children(lam)
    if c0 in T.pmax:
        node["children"] = [tree_to_dict(T, c0), tree_to_dict(T, c1)]
    return node


def tree_from_dict(data: dict) -> QuarkletTree:
    pmax = {}
    stack = [data]
    while stack:
        node = stack.pop()
        pmax[WaveletIndex(node["j"], node["k"])] = int(node["pmax"])
        stack.extend(node.get("children", []))
    return QuarkletTree(pmax)
