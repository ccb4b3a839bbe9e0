"""Random paths and loops on maps, shared by several test modules."""

import random

from masterfield.homology import spanning_tree, tree_path
from masterfield.maps import Path


def random_walk(m, rng: random.Random, length: int, start: int = 0) -> Path:
    v = start
    darts = []
    for _ in range(length):
        d = rng.choice(m.vertices[v])
        darts.append(d)
        v = m.head(d)
    return Path(tuple(darts), start)


def random_loop(m, rng: random.Random, length: int, root: int = 0) -> Path:
    """Random walk from ``root`` closed up along a spanning tree."""
    p = random_walk(m, rng, length, root)
    parent = spanning_tree(m, root)
    back = m.inverse(tree_path(m, parent, root, m.end(p)))
    return Path(p.darts + back.darts, root)
