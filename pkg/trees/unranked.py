# trees/unranked.py
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from trees.terms import parse_nested, render_term, walk_preorder

# Reserved dummy symbol of binary encodings. Never a document label.
PLACEHOLDER = "□"

# Document labels are strings; grammar encodings use tagged symbol objects.
Label = Hashable


class PositionOutOfRange(IndexError, ValueError):
    pass


def _preorder_sizes(children: Sequence[Sequence[int]]) -> tuple[int, ...]:
    n = len(children)
    sizes = [1] * n
    for i in range(n - 1, -1, -1):
        expected = i + 1
        for c in children[i]:
            if c != expected or c >= n:
                raise ValueError("children must be numbered in preorder")
            expected += sizes[c]
        sizes[i] = expected - i
    if sizes[0] != n:
        raise ValueError("nodes do not form a single rooted tree")
    return tuple(sizes)


@dataclass(frozen=True)
class UnrankedTree:
    """
    Ordered labeled tree stored flat in preorder; node 0 is the root.
    Two trees are equal iff they are structurally equal.
    """

    labels: tuple[Label, ...]
    children: tuple[tuple[int, ...], ...]
    _sizes: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("a tree needs at least one node")
        if len(self.labels) != len(self.children):
            raise ValueError("labels and children must have the same length")
        if any(label == PLACEHOLDER for label in self.labels):
            raise ValueError(f"{PLACEHOLDER!r} is reserved and cannot label a tree node")
        if any(label == "" for label in self.labels):
            raise ValueError("labels must be non-empty")
        object.__setattr__(self, "_sizes", _preorder_sizes(self.children))

    @classmethod
    def leaf(cls, label: Label) -> UnrankedTree:
        return cls((label,), ((),))

    @classmethod
    def build(cls, label: Label, subtrees: Sequence[UnrankedTree] = ()) -> UnrankedTree:
        labels: list[Label] = [label]
        children: list[tuple[int, ...]] = [()]
        roots: list[int] = []
        for sub in subtrees:
            offset = len(labels)
            roots.append(offset)
            labels.extend(sub.labels)
            children.extend(tuple(c + offset for c in kids) for kids in sub.children)
        children[0] = tuple(roots)
        return cls(tuple(labels), tuple(children))

    @classmethod
    def from_adjacency(
        cls,
        labels: Mapping[Hashable, Label] | Sequence[Label],
        children: Mapping[Hashable, Sequence[Hashable]],
        root: Hashable,
    ) -> UnrankedTree:
        """Renumber an arbitrary rooted adjacency into canonical preorder."""
        order: list[Hashable] = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(children.get(v, ())))
        index = {v: i for i, v in enumerate(order)}
        if len(index) != len(order):
            raise ValueError("adjacency shares nodes; it is not a tree")
        return cls(
            tuple(labels[v] for v in order),
            tuple(tuple(index[c] for c in children.get(v, ())) for v in order),
        )

    @property
    def node_count(self) -> int:
        return len(self.labels)

    @property
    def edge_count(self) -> int:
        return len(self.labels) - 1

    def subtree_size(self, i: int) -> int:
        return self._sizes[i]

    def is_leaf(self, i: int) -> bool:
        return not self.children[i]

    def subtree(self, i: int) -> UnrankedTree:
        hi = i + self._sizes[i]
        return UnrankedTree(
            self.labels[i:hi],
            tuple(tuple(c - i for c in kids) for kids in self.children[i:hi]),
        )

    def parents(self) -> tuple[int, ...]:
        out = [-1] * len(self.labels)
        for i, kids in enumerate(self.children):
            for c in kids:
                out[c] = i
        return tuple(out)

    def depths(self) -> tuple[int, ...]:
        out = [0] * len(self.labels)
        for i, kids in enumerate(self.children):
            for c in kids:
                out[c] = out[i] + 1
        return tuple(out)

    @property
    def depth(self) -> int:
        return max(self.depths())

    @property
    def max_children(self) -> int:
        return max(len(kids) for kids in self.children)

    @property
    def internal_count(self) -> int:
        return sum(1 for kids in self.children if kids)

    def to_term(self) -> str:
        return render_term(0, lambda i: str(self.labels[i]), lambda i: self.children[i])

    def __str__(self) -> str:
        return self.to_term()


Forest = Sequence[UnrankedTree]


def parse_term(text: str) -> UnrankedTree:
    """Parse term notation such as `f(g(a),b)` into a tree."""
    root = parse_nested(text)
    nodes = walk_preorder(root)
    index = {id(node): i for i, node in enumerate(nodes)}
    return UnrankedTree(
        tuple(node.symbol for node in nodes),
        tuple(tuple(index[id(c)] for c in node.children) for node in nodes),
    )


def _check_position(t: UnrankedTree, p: int) -> int:
    if not 1 <= p <= t.node_count:
        raise PositionOutOfRange(f"preorder position {p} outside 1..{t.node_count}")
    return p - 1


def subtree_at(t: UnrankedTree, p: int) -> UnrankedTree:
    """t/p for the 1-based preorder position p."""
    return t.subtree(_check_position(t, p))


def sibseq_at(t: UnrankedTree, p: int) -> list[UnrankedTree]:
    """The subtree at p followed by the subtrees of all its right siblings."""
    v = _check_position(t, p)
    parent = t.parents()[v]
    if parent < 0:
        return [t]
    kids = t.children[parent]
    return [t.subtree(c) for c in kids[kids.index(v):]]


def mirror(t: UnrankedTree) -> UnrankedTree:
    return UnrankedTree.from_adjacency(
        t.labels,
        {i: tuple(reversed(kids)) for i, kids in enumerate(t.children)},
        0,
    )


def mirror_forest(forest: Forest) -> list[UnrankedTree]:
    return [mirror(t) for t in reversed(forest)]

