# dags/dag.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

from trees.binary import NO_CHILD, BinaryTree, counts_as_edge
from trees.unranked import PLACEHOLDER, Label, UnrankedTree


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    node_budget: int = 10_000_000  # refuse unfoldings with more nodes

    def __post_init__(self) -> None:
        if self.node_budget <= 0:
            raise ValueError("node_budget must be > 0")


@dataclass(frozen=True)
class Dag:
    """
    Ordered labeled dag. Children always have smaller ids than their parent.
    Binary dags hold a single shared □ node and every other node has two children.
    """

    labels: tuple[Label, ...]
    children: tuple[tuple[int, ...], ...]
    roots: tuple[int, ...]
    binary: bool = False

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.children):
            raise ValueError("labels and children must have the same length")
        if not self.roots:
            raise ValueError("a dag needs at least one root")
        for v, kids in enumerate(self.children):
            if any(not 0 <= c < v for c in kids):
                raise ValueError(f"node {v} has a child that is not numbered below it")
            if self.binary and self.labels[v] != PLACEHOLDER and len(kids) != 2:
                raise ValueError(f"binary dag node {v} needs two children")
        if any(not 0 <= r < len(self.labels) for r in self.roots):
            raise ValueError("root id out of range")

    @classmethod
    def from_adjacency(
        cls,
        labels: Mapping[Hashable, Label],
        children: Mapping[Hashable, Sequence[Hashable]],
        roots: Sequence[Hashable],
        binary: bool = False,
    ) -> Dag:
        """Renumber reachable nodes in post-order of first appearance; rejects cycles."""
        ids: dict[Hashable, int] = {}
        on_path: set[Hashable] = set()
        out_labels: list[Label] = []
        out_children: list[tuple[int, ...]] = []
        for root in roots:
            if root in ids:
                continue
            on_path.add(root)
            stack = [(root, iter(children.get(root, ())))]
            while stack:
                v, pending = stack[-1]
                for c in pending:
                    if c in ids:
                        continue
                    if c in on_path:
                        raise ValueError("adjacency contains a cycle")
                    on_path.add(c)
                    stack.append((c, iter(children.get(c, ()))))
                    break
                else:
                    stack.pop()
                    on_path.discard(v)
                    ids[v] = len(out_labels)
                    out_labels.append(labels[v])
                    out_children.append(tuple(ids[c] for c in children.get(v, ())))
        return cls(tuple(out_labels), tuple(out_children), tuple(ids[r] for r in roots), binary)

    @property
    def root(self) -> int:
        if len(self.roots) != 1:
            raise ValueError("dag has several roots")
        return self.roots[0]

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def counted_children(self, v: int) -> tuple[int, ...]:
        return tuple(c for c in self.children[v] if counts_as_edge(self.labels[c]))

    def is_leaf(self, v: int) -> bool:
        return not self.counted_children(v)

    @property
    def node_size(self) -> int:
        return sum(1 for label in self.labels if counts_as_edge(label))

    @property
    def edge_size(self) -> int:
        return sum(len(self.counted_children(v)) for v in range(len(self.labels)))

    @property
    def internal_count(self) -> int:
        return sum(1 for v in range(len(self.labels)) if counts_as_edge(self.labels[v]) and not self.is_leaf(v))

    def unfolded_sizes(self) -> tuple[int, ...]:
        """Node count (□ included) of the tree each node unfolds to."""
        sizes: list[int] = []
        for kids in self.children:
            sizes.append(1 + sum(sizes[c] for c in kids))
        return tuple(sizes)


def _hash_cons(forest: Sequence[UnrankedTree | BinaryTree]) -> tuple[Dag, list[tuple[int, ...]]]:
    if not forest:
        raise ValueError("minimize needs at least one tree")
    binary = isinstance(forest[0], BinaryTree)
    if any(isinstance(t, BinaryTree) != binary for t in forest):
        raise ValueError("cannot mix binary and unranked trees")

    label_ids: dict[Label, int] = {}
    ids: dict[tuple[int, tuple[int, ...]], int] = {}
    labels: list[Label] = []
    children: list[tuple[int, ...]] = []
    classes: list[tuple[int, ...]] = []

    for tree in forest:
        if binary:
            kids_of = [
                () if tree.labels[i] == PLACEHOLDER else (tree.left[i], tree.right[i])
                for i in range(len(tree.labels))
            ]
        else:
            kids_of = tree.children
        assigned = [NO_CHILD] * len(tree.labels)
        stack: list[tuple[int, bool]] = [(0, False)]
        while stack:
            v, expanded = stack.pop()
            kids = kids_of[v]
            if kids and not expanded:
                stack.append((v, True))
                stack.extend((c, False) for c in reversed(kids))
                continue
            lid = label_ids.setdefault(tree.labels[v], len(label_ids))
            key = (lid, tuple(assigned[c] for c in kids))
            node = ids.get(key)
            if node is None:
                node = ids[key] = len(labels)
                labels.append(tree.labels[v])
                children.append(key[1])
            assigned[v] = node
        classes.append(tuple(assigned))

    dag = Dag(tuple(labels), tuple(children), tuple(c[0] for c in classes), binary)
    return dag, classes


def minimize(source: UnrankedTree | BinaryTree | Sequence[UnrankedTree | BinaryTree]) -> Dag:
    """Minimal dag of a tree or forest; nodes shared across the whole forest."""
    forest = [source] if isinstance(source, (UnrankedTree, BinaryTree)) else list(source)
    return _hash_cons(forest)[0]


def subtree_classes(t: UnrankedTree | BinaryTree) -> tuple[Dag, tuple[int, ...]]:
    """Minimal dag plus the dag node of every tree node (preorder)."""
    dag, classes = _hash_cons([t])
    return dag, classes[0]


def eval_dag(d: Dag, v: int, cfg: EvalConfig = EvalConfig()) -> UnrankedTree | BinaryTree:
    """Unfold node v into the tree it represents."""
    if not 0 <= v < d.node_count:
        raise ValueError(f"node id {v} out of range")
    size = d.unfolded_sizes()[v]
    if size > cfg.node_budget:
        raise BudgetExceeded(f"unfolding has {size} nodes, budget is {cfg.node_budget}")

    labels: list[Label] = []
    kids: list[list[int]] = []
    stack = [(v, NO_CHILD)]
    while stack:
        u, parent = stack.pop()
        idx = len(labels)
        labels.append(d.labels[u])
        kids.append([])
        if parent != NO_CHILD:
            kids[parent].append(idx)
        stack.extend((c, idx) for c in reversed(d.children[u]))

    if d.binary:
        lefts = tuple(k[0] if k else NO_CHILD for k in kids)
        rights = tuple(k[1] if k else NO_CHILD for k in kids)
        return BinaryTree(tuple(labels), lefts, rights)
    return UnrankedTree(tuple(labels), tuple(tuple(k) for k in kids))


def eval_forest(d: Dag, cfg: EvalConfig = EvalConfig()) -> list[UnrankedTree | BinaryTree]:
    return [eval_dag(d, r, cfg) for r in d.roots]


def canonicalize(d: Dag) -> Dag:
    """Re-minimize a dag directly, without unfolding it."""
    label_ids: dict[Label, int] = {}
    ids: dict[tuple[int, tuple[int, ...]], int] = {}
    new_id: dict[int, int] = {}
    labels: list[Label] = []
    children: list[tuple[int, ...]] = []
    for root in d.roots:
        stack: list[tuple[int, bool]] = [(root, False)]
        while stack:
            v, expanded = stack.pop()
            if v in new_id:
                continue
            if d.children[v] and not expanded:
                stack.append((v, True))
                stack.extend((c, False) for c in reversed(d.children[v]) if c not in new_id)
                continue
            lid = label_ids.setdefault(d.labels[v], len(label_ids))
            key = (lid, tuple(new_id[c] for c in d.children[v]))
            node = ids.get(key)
            if node is None:
                node = ids[key] = len(labels)
                labels.append(d.labels[v])
                children.append(key[1])
            new_id[v] = node
    return Dag(tuple(labels), tuple(children), tuple(new_id[r] for r in d.roots), d.binary)


def isomorphic(d1: Dag, d2: Dag) -> bool:
    return canonicalize(d1) == canonicalize(d2)


def is_minimal(d: Dag) -> bool:
    return canonicalize(d).node_count == d.node_count
