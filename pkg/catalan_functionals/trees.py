"""Binary trees: enumeration, uniform sampling, additive functionals.

A tree on n nodes is stored as immutable :class:`Node` objects carrying their
subtree size. Uniform sampling grows a full binary tree with n internal nodes
by random leaf insertion and then drops the leaves.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterator, Optional, Tuple, Union

import numba as nb
import numpy as np
from scipy import stats

from .config import setting
from .errors import ArgumentError, OracleSizeError
from .tolls import toll_value
from .types import TollSpec

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator]


@dataclass(frozen=True, slots=True)
class Node:
    left: Optional["Node"]
    right: Optional["Node"]
    size: int

    @classmethod
    def make(cls, left: Optional["Node"] = None, right: Optional["Node"] = None) -> "Node":
        return cls(left, right, 1 + _size(left) + _size(right))


def _size(node: Optional[Node]) -> int:
    return 0 if node is None else node.size


@dataclass(frozen=True)
class BinaryTree:
    root: Optional[Node] = None

    @property
    def size(self) -> int:
        return _size(self.root)

    def nodes(self) -> Iterator[Node]:
        """Preorder walk, iterative so deep trees are fine."""
        stack = [self.root] if self.root is not None else []
        while stack:
            v = stack.pop()
            yield v
            if v.right is not None:
                stack.append(v.right)
            if v.left is not None:
                stack.append(v.left)


def catalan(n: int) -> int:
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _roots_of_size(n: int) -> Tuple[Optional[Node], ...]:
    if n == 0:
        return (None,)
    out = []
    for i in range(n):
        for left in _roots_of_size(i):
            for right in _roots_of_size(n - 1 - i):
                out.append(Node.make(left, right))
    return tuple(out)


def enumerate_trees(n: int) -> Iterator[BinaryTree]:
    """Every binary tree on n nodes once, ordered by left-subtree size, recursively."""
    bound = int(setting("trees.oracle_max_n"))
    if n < 0:
        raise ArgumentError(f"n must be >= 0, got {n}")
    if n > bound:
        raise OracleSizeError(f"enumeration of size {n} exceeds the oracle bound {bound}")
    for root in _roots_of_size(n):
        yield BinaryTree(root)


@nb.njit
def _grow_remy(picks, sides):
    n = picks.shape[0]
    total = 2 * n + 1
    left = np.full(total, -1, dtype=np.int64)
    right = np.full(total, -1, dtype=np.int64)
    parent = np.full(total, -1, dtype=np.int64)
    root = 0
    for k in range(n):
        x = picks[k]
        y = 2 * k + 1
        leaf = 2 * k + 2
        p = parent[x]
        if p == -1:
            root = y
        elif left[p] == x:
            left[p] = y
        else:
            right[p] = y
        parent[y] = p
        if sides[k] == 0:
            left[y] = leaf
            right[y] = x
        else:
            left[y] = x
            right[y] = leaf
        parent[x] = y
        parent[leaf] = y
    return root, left, right


@nb.njit
def _internal_sizes(root, left, right):
    total = left.shape[0]
    size = np.zeros(total, dtype=np.int64)
    order = np.empty(total, dtype=np.int64)
    stack = np.empty(total, dtype=np.int64)
    top = 0
    stack[0] = root
    count = 0
    while top >= 0:
        v = stack[top]
        top -= 1
        order[count] = v
        count += 1
        if left[v] != -1:
            top += 1
            stack[top] = left[v]
            top += 1
            stack[top] = right[v]
    for i in range(count - 1, -1, -1):
        v = order[i]
        if left[v] != -1:
            size[v] = 1 + size[left[v]] + size[right[v]]
    return size


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Counter-based stream keyed by a 64-bit seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    if not 0 <= int(seed) < 2 ** 64:
        raise ArgumentError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=int(seed)))


def _grow(n: int, rng: np.random.Generator):
    # internal nodes get the odd labels 1, 3, ..., 2n-1; leaves the even ones
    picks = rng.integers(0, 2 * np.arange(n, dtype=np.int64) + 1)
    sides = rng.integers(0, 2, size=n)
    return _grow_remy(picks.astype(np.int64), sides.astype(np.int64))


def sample_sizes(n: int, seed: SeedLike) -> np.ndarray:
    """Subtree sizes of the n nodes of a uniform random tree, without building Node objects."""
    if n < 1:
        raise ArgumentError(f"sample size must be >= 1, got {n}")
    root, left, right = _grow(n, make_rng(seed))
    return _internal_sizes(root, left, right)[1::2]


def sample_uniform(n: int, seed: SeedLike) -> BinaryTree:
    if n < 1:
        raise ArgumentError(f"sample size must be >= 1, got {n}")
    root, left, right = _grow(n, make_rng(seed))
    return _from_arrays(int(root), left, right)


def _from_arrays(root: int, left: np.ndarray, right: np.ndarray) -> BinaryTree:
    left, right = left.tolist(), right.tolist()
    order, stack = [], [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for child in (left[v], right[v]):
            if child != -1 and child % 2 == 1:
                stack.append(child)
    built: Dict[int, Node] = {}
    for v in reversed(order):
        lc, rc = left[v], right[v]
        built[v] = Node.make(built.get(lc) if lc % 2 else None, built.get(rc) if rc % 2 else None)
    return BinaryTree(built[root])


def evaluate_functional(tree: BinaryTree, toll: TollSpec) -> Any:
    """Sum of b_size(v) over the nodes v of the tree."""
    cache: Dict[int, Any] = {}
    total: Any = 0
    for v in tree.nodes():
        if v.size not in cache:
            cache[v.size] = toll_value(toll, v.size)
        total += cache[v.size]
    return total


def evaluate_recursive(tree: BinaryTree, toll: TollSpec) -> Any:
    """f(T) = f(L(T)) + f(R(T)) + b_|T|, evaluated literally."""
    def f(node: Optional[Node]) -> Any:
        if node is None:
            return 0
        return f(node.left) + f(node.right) + toll_value(toll, node.size)
    return f(tree.root)


def internal_path_length(tree: BinaryTree) -> int:
    total = 0
    stack = [(tree.root, 0)] if tree.root is not None else []
    while stack:
        v, depth = stack.pop()
        total += depth
        for child in (v.left, v.right):
            if child is not None:
                stack.append((child, depth + 1))
    return total


def shape_code(tree: BinaryTree) -> str:
    """Preorder code: '1' for a node, '0' for an absent child."""
    out = []
    stack = [tree.root]
    while stack:
        v = stack.pop()
        if v is None:
            out.append("0")
            continue
        out.append("1")
        stack.append(v.right)
        stack.append(v.left)
    return "".join(out)


def uniformity_test(n: int, samples: int, seed: int) -> Tuple[float, float]:
    """Chi-square statistic and p-value of sampled shapes against the uniform law."""
    codes = [shape_code(t) for t in enumerate_trees(n)]
    rng = make_rng(seed)
    counts = Counter(shape_code(sample_uniform(n, rng)) for _ in range(samples))
    unknown = set(counts) - set(codes)
    if unknown:
        raise ArgumentError(f"sampler produced shapes outside the enumeration: {sorted(unknown)[:3]}")
    observed = np.array([counts.get(c, 0) for c in codes], dtype=np.float64)
    result = stats.chisquare(observed)
    logger.debug("uniformity n=%d samples=%d chi2=%.3f p=%.4g", n, samples, result.statistic, result.pvalue)
    return float(result.statistic), float(result.pvalue)
