"""Binary-tree revocation: leaf assignment, KUNodes covers, authorization.

Nodes use heap indexing: the root is 1 and the children of ``x`` are ``2x``
and ``2x + 1``.  A tree of height ``h`` has leaves ``2**h .. 2**(h+1) - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable

from ringveil.errors import NotALeaf, TreeFull, UnknownPid

ROOT = 1


def parent(x: int) -> int:
    return x >> 1


def is_ancestor_or_self(a: int, x: int) -> bool:
    """True if node ``a`` lies on the path from ``x`` to the root."""
    while x >= a:
        if x == a:
            return True
        x >>= 1
    return False


@dataclass
class RevocationTree:
    height: int
    leaf_assignments: dict[int, Hashable] = field(default_factory=dict)
    _leaf_of: dict[Hashable, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.height < 1:
            raise ValueError("tree height must be >= 1")
        for leaf, pid in self.leaf_assignments.items():
            if not self.is_leaf(leaf):
                raise NotALeaf(leaf)
            if pid in self._leaf_of:
                raise ValueError("pseudonym assigned to two leaves")
            self._leaf_of[pid] = leaf

    @property
    def n_leaves(self) -> int:
        return 1 << self.height

    @property
    def first_leaf(self) -> int:
        return 1 << self.height

    def leaves(self) -> range:
        return range(self.first_leaf, 2 * self.first_leaf)

    def is_leaf(self, x: int) -> bool:
        return self.first_leaf <= x < 2 * self.first_leaf

    def is_node(self, x: int) -> bool:
        return 1 <= x < 2 * self.first_leaf

    def assign(self, pid: Hashable) -> int:
        """Put ``pid`` on the lowest free leaf and return that leaf."""
        if pid in self._leaf_of:
            raise ValueError("pseudonym already assigned")
        if len(self.leaf_assignments) >= self.n_leaves:
            raise TreeFull(f"all {self.n_leaves} leaves assigned")
        leaf = self.first_leaf + len(self.leaf_assignments)
        if leaf in self.leaf_assignments:  # only after out-of-order manual assignments
            leaf = next(x for x in self.leaves() if x not in self.leaf_assignments)
        self.leaf_assignments[leaf] = pid
        self._leaf_of[pid] = leaf
        return leaf

    def __contains__(self, pid: object) -> bool:
        return pid in self._leaf_of

    def leaf_of(self, pid: Hashable) -> int:
        try:
            return self._leaf_of[pid]
        except KeyError:
            raise UnknownPid("pseudonym not assigned to any leaf") from None

    def path(self, leaf: int) -> list[int]:
        return path(self, leaf)


def path(bt: RevocationTree, leaf: int) -> list[int]:
    """[leaf, parent(leaf), ..., root]."""
    if not bt.is_leaf(leaf):
        raise NotALeaf(f"{leaf} is not a leaf of a height-{bt.height} tree")
    out = [leaf]
    while leaf > ROOT:
        leaf >>= 1
        out.append(leaf)
    return out


@dataclass(frozen=True)
class RevocationList:
    """Ordered (leaf, revocation-period) pairs."""

    entries: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        last = None
        for leaf, t in self.entries:
            if leaf in seen:
                raise ValueError(f"leaf {leaf} listed twice")
            if last is not None and t < last:
                raise ValueError("revocation times must be non-decreasing")
            seen.add(leaf)
            last = t

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, leaf: object) -> bool:
        return any(v == leaf for v, _ in self.entries)

    def revoked_by(self, t: int) -> list[int]:
        return [v for v, ti in self.entries if ti <= t]

    def with_entry(self, leaf: int, t: int) -> RevocationList:
        if leaf in self:
            return self
        return RevocationList(self.entries + ((leaf, t),))


@dataclass(frozen=True)
class KeyUpdate:
    epoch: int
    cover: frozenset[int]

    def __post_init__(self) -> None:
        if any(x < 1 for x in self.cover):
            raise ValueError("cover holds an invalid node id")
        for a in self.cover:
            x = a >> 1
            while x >= 1:
                if x in self.cover:
                    raise ValueError(f"cover node {x} is an ancestor of {a}")
                x >>= 1

    def sorted_nodes(self) -> list[int]:
        return sorted(self.cover)


def kunodes(bt: RevocationTree, rl: RevocationList, t: int) -> KeyUpdate:
    """Minimal set of subtree roots covering exactly the leaves not revoked by ``t``.

    Fail-closed: when every leaf is revoked the cover is empty; the root is
    returned only if nothing is revoked yet.
    """
    revoked = rl.revoked_by(t)
    x: set[int] = set()
    for v in revoked:
        if not bt.is_leaf(v):
            raise NotALeaf(v)
        while v >= ROOT and v not in x:
            x.add(v)
            v >>= 1
    y = set()
    for node in x:
        if bt.is_leaf(node):
            continue
        left, right = 2 * node, 2 * node + 1
        if left not in x:
            y.add(left)
        if right not in x:
            y.add(right)
    if not y and not revoked:
        y.add(ROOT)
    return KeyUpdate(epoch=t, cover=frozenset(y))


def revoke(rl: RevocationList, bt: RevocationTree, pid: Hashable, t: int) -> RevocationList:
    return rl.with_entry(bt.leaf_of(pid), t)


def is_authorized(leaf_path: Iterable[int], ku: KeyUpdate) -> bool:
    """Exactly one node of the path is in the cover."""
    return len(set(leaf_path) & ku.cover) == 1
