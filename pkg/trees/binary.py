# trees/binary.py
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Mapping, Sequence

from trees.terms import TermSyntaxError, parse_nested, render_term, walk_preorder
from trees.unranked import PLACEHOLDER, Label, UnrankedTree

NO_CHILD = -1


def counts_as_edge(label: Label) -> bool:
    """Edges into □ are never counted, in trees, dags or grammars."""
    return label != PLACEHOLDER and not getattr(label, "is_placeholder", False)


class Encoding(str, Enum):
    FCNS = "fcns"  # first child / next sibling
    LCPS = "lcps"  # last child / previous sibling


@dataclass(frozen=True)
class BinaryTree:
    """
    Binary tree in preorder with explicit □ leaves; node 0 is the root.
    Every non-□ node has exactly two children, □ nodes have none.
    """

    labels: tuple[Label, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]
    _sizes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.labels)
        if n == 0 or len(self.left) != n or len(self.right) != n:
            raise ValueError("labels, left and right must be non-empty and of equal length")
        sizes = [1] * n
        for i in range(n - 1, -1, -1):
            if self.labels[i] == PLACEHOLDER:
                if self.left[i] != NO_CHILD or self.right[i] != NO_CHILD:
                    raise ValueError("□ nodes have no children")
                continue
            lo, ro = self.left[i], self.right[i]
            if lo != i + 1 or lo >= n or ro != lo + sizes[lo] or ro >= n:
                raise ValueError("binary nodes must be numbered in preorder with two children")
            sizes[i] = 1 + sizes[lo] + sizes[ro]
        if sizes[0] != n:
            raise ValueError("nodes do not form a single binary tree")
        object.__setattr__(self, "_sizes", tuple(sizes))

    @classmethod
    def empty(cls) -> BinaryTree:
        return cls((PLACEHOLDER,), (NO_CHILD,), (NO_CHILD,))

    @classmethod
    def leaf(cls, label: Label) -> BinaryTree:
        return cls.build(label, None, None)

    @classmethod
    def build(cls, label: Label, left: BinaryTree | None, right: BinaryTree | None) -> BinaryTree:
        labels: list[Label] = [label]
        lefts: list[int] = [NO_CHILD]
        rights: list[int] = [NO_CHILD]
        slots = []
        for sub in (left or cls.empty(), right or cls.empty()):
            offset = len(labels)
            slots.append(offset)
            labels.extend(sub.labels)
            lefts.extend(c + offset if c != NO_CHILD else NO_CHILD for c in sub.left)
            rights.extend(c + offset if c != NO_CHILD else NO_CHILD for c in sub.right)
        lefts[0], rights[0] = slots
        return cls(tuple(labels), tuple(lefts), tuple(rights))

    @classmethod
    def from_links(
        cls,
        labels: Mapping[Hashable, Label] | Sequence[Label],
        links: Mapping[Hashable, tuple[Hashable, Hashable]],
        root: Hashable,
    ) -> BinaryTree:
        """Renumber a rooted left/right adjacency into canonical preorder; nodes absent from `links` are □."""
        out_labels: list[Label] = []
        lefts: list[int] = []
        rights: list[int] = []
        stack: list[tuple[Hashable, int, int]] = [(root, NO_CHILD, 0)]
        while stack:
            v, parent, side = stack.pop()
            idx = len(out_labels)
            if parent != NO_CHILD:
                (lefts if side == 0 else rights)[parent] = idx
            kids = links.get(v)
            out_labels.append(labels[v] if kids is not None else PLACEHOLDER)
            lefts.append(NO_CHILD)
            rights.append(NO_CHILD)
            if kids is not None:
                stack.append((kids[1], idx, 1))
                stack.append((kids[0], idx, 0))
        return cls(tuple(out_labels), tuple(lefts), tuple(rights))

    def is_placeholder(self, i: int) -> bool:
        return self.labels[i] == PLACEHOLDER

    @property
    def node_size(self) -> int:
        return sum(1 for label in self.labels if counts_as_edge(label))

    @property
    def edge_size(self) -> int:
        total = 0
        for i, label in enumerate(self.labels):
            if label == PLACEHOLDER:
                continue
            total += counts_as_edge(self.labels[self.left[i]])
            total += counts_as_edge(self.labels[self.right[i]])
        return total

    def subtree_size(self, i: int) -> int:
        return self._sizes[i]

    def to_term(self) -> str:
        """`_` is □ and a bare label is a node with two □ children."""

        def symbol(i: int) -> str:
            return "_" if self.is_placeholder(i) else str(self.labels[i])

        def kids(i: int) -> tuple[int, ...]:
            if self.is_placeholder(i):
                return ()
            if self.is_placeholder(self.left[i]) and self.is_placeholder(self.right[i]):
                return ()
            return (self.left[i], self.right[i])

        return render_term(0, symbol, kids)

    def __str__(self) -> str:
        return self.to_term()


def parse_binary_term(text: str) -> BinaryTree:
    root = parse_nested(text)
    labels: dict[int, Label] = {}
    links: dict[int, tuple[int, int]] = {}
    nodes = walk_preorder(root)
    counter = len(nodes)
    for node in nodes:
        key = id(node)
        if node.symbol == "_":
            if node.children:
                raise TermSyntaxError("□ cannot have children", node.offset)
            continue
        labels[key] = node.symbol
        if not node.children:
            links[key] = (-counter - 1, -counter - 2)
            counter += 2
        elif len(node.children) == 2:
            links[key] = (id(node.children[0]), id(node.children[1]))
        else:
            raise TermSyntaxError("binary nodes take zero or two children", node.offset)
    return BinaryTree.from_links(labels, links, id(root))


def mirror_binary(b: BinaryTree) -> BinaryTree:
    """Swap left and right children everywhere."""
    links = {
        i: (b.right[i], b.left[i]) for i in range(len(b.labels)) if not b.is_placeholder(i)
    }
    return BinaryTree.from_links(b.labels, links, 0)


def encode(forest: Sequence[UnrankedTree] | UnrankedTree, encoding: Encoding = Encoding.FCNS) -> BinaryTree:
    """fcns or lcps encoding of a forest; the empty forest encodes to □."""
    if isinstance(forest, UnrankedTree):
        forest = [forest]
    labels: list[Label] = []
    lefts: list[int] = []
    rights: list[int] = []

    roots = tuple((k, 0) for k in range(len(forest)))
    # task: sibling run items[lo:hi], the binary parent to attach to and the side
    stack: list[tuple[tuple[tuple[int, int], ...], int, int, int, int]] = [
        (roots, 0, len(roots), NO_CHILD, 0)
    ]
    while stack:
        items, lo, hi, parent, side = stack.pop()
        idx = len(labels)
        if parent != NO_CHILD:
            (lefts if side == 0 else rights)[parent] = idx
        lefts.append(NO_CHILD)
        rights.append(NO_CHILD)
        if lo == hi:
            labels.append(PLACEHOLDER)
            continue
        if encoding is Encoding.FCNS:
            k, v = items[lo]
            rest = (items, lo + 1, hi)
        else:
            k, v = items[hi - 1]
            rest = (items, lo, hi - 1)
        labels.append(forest[k].labels[v])
        kids = tuple((k, c) for c in forest[k].children[v])
        below = (kids, 0, len(kids))
        first, second = (below, rest) if encoding is Encoding.FCNS else (rest, below)
        stack.append((*second, idx, 1))
        stack.append((*first, idx, 0))
    return BinaryTree(tuple(labels), tuple(lefts), tuple(rights))


def decode(b: BinaryTree, encoding: Encoding = Encoding.FCNS) -> list[UnrankedTree]:
    n = len(b.labels)
    parent = [NO_CHILD] * n  # unranked parent of each non-□ binary node
    for y in range(n):
        if b.is_placeholder(y):
            continue
        if encoding is Encoding.FCNS:
            parent[b.left[y]] = y
            parent[b.right[y]] = parent[y]
        else:
            parent[b.left[y]] = parent[y]
            parent[b.right[y]] = y

    roots: list[int] = []
    kids: dict[int, list[int]] = defaultdict(list)
    for x in range(n):
        if b.is_placeholder(x):
            continue
        (roots if parent[x] == NO_CHILD else kids[parent[x]]).append(x)
    if encoding is Encoding.LCPS:
        roots.reverse()
        for run in kids.values():
            run.reverse()
    return [UnrankedTree.from_adjacency(b.labels, kids, r) for r in roots]


def fcns(forest: Sequence[UnrankedTree] | UnrankedTree) -> BinaryTree:
    return encode(forest, Encoding.FCNS)


def fcns_inverse(b: BinaryTree) -> list[UnrankedTree]:
    return decode(b, Encoding.FCNS)


def lcps(forest: Sequence[UnrankedTree] | UnrankedTree) -> BinaryTree:
    return encode(forest, Encoding.LCPS)


def lcps_inverse(b: BinaryTree) -> list[UnrankedTree]:
    return decode(b, Encoding.LCPS)
