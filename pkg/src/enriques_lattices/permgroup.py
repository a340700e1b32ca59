"""Deterministic Schreier-Sims for permutation groups on a few thousand points.

Permutations are int32 numpy arrays ``p`` with ``p[x]`` the image of ``x``;
``compose(a, b)`` applies ``a`` first.
"""

import numpy as np


def compose(a, b):
    return b[a]


def invert(p):
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p), dtype=p.dtype)
    return inv


class StabilizerChain:
    """Base, strong generating set and orbit transversals of a group."""

    def __init__(self, degree, base=()):
        self.degree = degree
        self.ident = np.arange(degree, dtype=np.int32)
        self.base = list(base)
        self.gens = []
        self._orbits = [None] * len(self.base)  # point -> (u, u^-1)
        self._dirty = [True] * len(self.base)

    # -- transversals --------------------------------------------------
    def _level_gens(self, i):
        fixed = self.base[:i]
        return [g for g in self.gens if all(g[b] == b for b in fixed)]

    def _orbit(self, i):
        if self._dirty[i] or self._orbits[i] is None:
            b = self.base[i]
            gens = self._level_gens(i)
            trans = {b: (self.ident, self.ident)}
            frontier = [b]
            while frontier:
                nxt = []
                for p in frontier:
                    u = trans[p][0]
                    for g in gens:
                        q = int(g[p])
                        if q not in trans:
                            v = compose(u, g)
                            trans[q] = (v, invert(v))
                            nxt.append(q)
                frontier = nxt
            self._orbits[i] = trans
            self._dirty[i] = False
        return self._orbits[i]

    def orbit_lengths(self):
        return [len(self._orbit(i)) for i in range(len(self.base))]

    def order(self):
        total = 1
        for k in self.orbit_lengths():
            total *= k
        return total

    # -- sifting --------------------------------------------------------
    def strip(self, g, start=0):
        """Sift ``g`` from level ``start``; return (residue, level reached)."""
        for i in range(start, len(self.base)):
            trans = self._orbit(i)
            y = int(g[self.base[i]])
            if y not in trans:
                return g, i
            g = compose(g, trans[y][1])
        return g, len(self.base)

    def contains(self, g):
        h, level = self.strip(g)
        return level == len(self.base) and np.array_equal(h, self.ident)

    def _add_strong(self, h, level):
        if level == len(self.base):
            moved = np.nonzero(h != self.ident)[0]
            self.base.append(int(moved[0]))
            self._orbits.append(None)
            self._dirty.append(True)
        self.gens.append(h)
        for i in range(level + 1):
            self._dirty[i] = True

    def add_generator(self, g):
        """Extend the group by ``g`` and restore the strong generating property."""
        g = np.asarray(g, dtype=np.int32)
        h, level = self.strip(g)
        if level == len(self.base) and np.array_equal(h, self.ident):
            return False
        self._add_strong(h, level)
        self._complete(level)
        return True

    def _complete(self, i):
        # Holt's SCHREIERSIMS loop: verify Schreier generators level by level
        # from ``i`` upwards, dropping back down whenever a new strong
        # generator appears.
        while i >= 0:
            restart = None
            trans = self._orbit(i)
            gens = self._level_gens(i)
            for p, (u, _) in trans.items():
                for s in gens:
                    q = int(s[p])
                    sg = compose(compose(u, s), trans[q][1])
                    if np.array_equal(sg, self.ident):
                        continue
                    h, level = self.strip(sg, i + 1)
                    if level < len(self.base) or not np.array_equal(h, self.ident):
                        self._add_strong(h, level)
                        restart = level
                        break
                if restart is not None:
                    break
            if restart is None:
                i -= 1
            else:
                i = restart


def chain_from_generators(degree, generators, base=()):
    chain = StabilizerChain(degree, base)
    for g in generators:
        chain.add_generator(g)
    return chain
