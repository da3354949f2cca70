"""Reduced ordered binary decision diagrams, sized for the formula compiler.

One manager per compilation.  Nodes are hash-consed, so two functions built
in the same manager are semantically equal iff their node ids are equal.
Variables are dense integer indices; a lower index sits nearer the root.
"""

from __future__ import annotations

FALSE = 0
TRUE = 1
_NO_VAR = 1 << 30  # pseudo-variable of the terminals, larger than any real one


class Bdd:
    """Node store plus the small operation set the compiler needs."""

    def __init__(self):
        # id -> (var, lo, hi); the two terminals take slots 0 and 1.
        self._nodes: list[tuple[int, int, int]] = [
            (_NO_VAR, -1, -1),
            (_NO_VAR, -1, -1),
        ]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._ite_memo: dict[tuple[int, int, int], int] = {}

    def __len__(self) -> int:
        return len(self._nodes)

    def const(self, value: bool) -> int:
        return TRUE if value else FALSE

    def mk(self, var: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (var, lo, hi)
        found = self._unique.get(key)
        if found is not None:
            return found
        self._nodes.append(key)
        node = len(self._nodes) - 1
        self._unique[key] = node
        return node

    def var(self, index: int) -> int:
        return self.mk(index, FALSE, TRUE)

    def top_var(self, f: int) -> int:
        return self._nodes[f][0]

    def ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        if g == TRUE and h == FALSE:
            return f
        key = (f, g, h)
        found = self._ite_memo.get(key)
        if found is not None:
            return found
        nodes = self._nodes
        v = min(nodes[f][0], nodes[g][0], nodes[h][0])

        def branch(x: int, high: bool) -> int:
            xv, lo, hi = nodes[x]
            if xv != v:
                return x
            return hi if high else lo

        hi = self.ite(branch(f, True), branch(g, True), branch(h, True))
        lo = self.ite(branch(f, False), branch(g, False), branch(h, False))
        out = self.mk(v, lo, hi)
        self._ite_memo[key] = out
        return out

    def not_(self, f: int) -> int:
        return self.ite(f, FALSE, TRUE)

    def and_(self, f: int, g: int) -> int:
        return self.ite(f, g, FALSE)

    def or_(self, f: int, g: int) -> int:
        return self.ite(f, TRUE, g)

    def implies(self, f: int, g: int) -> int:
        return self.ite(f, g, TRUE)

    def subst(self, f: int, mapping, memo: dict[int, int]) -> int:
        """Simultaneous substitution; mapping(var) returns the replacement."""
        if f <= TRUE:
            return f
        found = memo.get(f)
        if found is not None:
            return found
        var, lo, hi = self._nodes[f]
        out = self.ite(mapping(var), self.subst(hi, mapping, memo), self.subst(lo, mapping, memo))
        memo[f] = out
        return out

    def eval(self, f: int, assignment) -> bool:
        """Truth of f under assignment(var) -> bool; walks one root-to-leaf path."""
        while f > TRUE:
            var, lo, hi = self._nodes[f]
            f = hi if assignment(var) else lo
        return f == TRUE

    def cubes(self, f: int):
        """Satisfying paths as sorted (var, value) tuples, low branch first."""
        if f == FALSE:
            return
        path: list[tuple[int, bool]] = []

        def walk(node: int):
            if node == FALSE:
                return
            if node == TRUE:
                yield tuple(path)
                return
            var, lo, hi = self._nodes[node]
            path.append((var, False))
            yield from walk(lo)
            path[-1] = (var, True)
            yield from walk(hi)
            path.pop()

        yield from walk(f)
