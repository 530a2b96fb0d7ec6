"""DPLL over the Boolean skeleton with congruence and arithmetic checks.

Formulas arrive compiled to nested ("and"/"or"/"not"/"atom"/"const")
tuples whose leaves index an atom table. Atom descriptors:

    ("b", name)            Boolean constant
    ("p", fname, args)     predicate applied to uninterpreted-sort constants
    ("e", a, b)            equality between uninterpreted-sort constants
    ("a", lin, rel)        linear constraint `lin rel 0`, rel in {"=","<=","<"}

The search enumerates Boolean-skeleton assignments (first branch True,
atoms in discovery order, so results are deterministic) and validates
each candidate with a union-find congruence check plus exact linear
arithmetic. Budget exhaustion or an arithmetic "unknown" downgrade the
final verdict to unknown instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lira

BRANCH_BUDGET = 200000


@dataclass
class TheoryModel:
    booleans: dict       # atom index -> bool (assigned plus congruence-forced)
    numerics: dict       # numeric variable -> Fraction
    euf_parent: dict     # union-find parent map over usort constants

    def euf_root(self, name: str) -> str:
        parent = self.euf_parent
        while parent.get(name, name) != name:
            name = parent[name]
        return name


def eval3(node, assign):
    """Three-valued evaluation: True / False / None (undetermined)."""
    kind = node[0]
    if kind == "const":
        return node[1]
    if kind == "atom":
        return assign.get(node[1])
    if kind == "not":
        v = eval3(node[1], assign)
        return None if v is None else not v
    if kind == "and":
        undetermined = False
        for child in node[1]:
            v = eval3(child, assign)
            if v is False:
                return False
            if v is None:
                undetermined = True
        return None if undetermined else True
    if kind == "or":
        undetermined = False
        for child in node[1]:
            v = eval3(child, assign)
            if v is True:
                return True
            if v is None:
                undetermined = True
        return None if undetermined else False
    raise AssertionError(f"bad node {node!r}")


def _pick(node, assign):
    """Leftmost undetermined atom in an undetermined subtree."""
    kind = node[0]
    if kind == "const":
        return None
    if kind == "atom":
        return None if node[1] in assign else node[1]
    if kind == "not":
        return _pick(node[1], assign)
    for child in node[1]:
        if eval3(child, assign) is None:
            found = _pick(child, assign)
            if found is not None:
                return found
    return None


class _Searcher:
    def __init__(self, root, atoms, int_vars):
        self.root = root
        self.atoms = atoms
        self.int_vars = int_vars
        self.budget = BRANCH_BUDGET
        self.saw_unknown = False

    def run(self):
        model = self._dfs({})
        if model is not None:
            return "sat", model
        return ("unknown" if self.saw_unknown else "unsat"), None

    def _dfs(self, assign):
        if self.budget <= 0:
            self.saw_unknown = True
            return None
        self.budget -= 1
        value = eval3(self.root, assign)
        if value is False:
            return None
        if value is True:
            return self._theory_check(assign)
        idx = _pick(self.root, assign)
        for choice in (True, False):
            assign[idx] = choice
            model = self._dfs(assign)
            if model is not None:
                return model
            del assign[idx]
        return None

    def _theory_check(self, assign):
        """Validate the Boolean assignment; build a model or reject."""
        parent: dict[str, str] = {}

        def find(x):
            while parent.get(x, x) != x:
                parent[x] = parent.get(parent[x], parent[x])
                x = parent[x]
            return x

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        diseqs = []
        for idx, desc in enumerate(self.atoms):
            if desc[0] != "e":
                continue
            value = assign.get(idx)
            if value is True:
                union(desc[1], desc[2])
            elif value is False:
                diseqs.append((desc[1], desc[2]))
        for a, b in diseqs:
            if find(a) == find(b):
                return None

        # Predicate congruence: applications with pairwise-equal arguments
        # must agree; force don't-care atoms rather than conflict on them.
        forced: dict[int, bool] = {}

        def decided(i):
            return assign.get(i, forced.get(i))

        groups: dict[str, list[tuple[int, tuple]]] = {}
        for idx, desc in enumerate(self.atoms):
            if desc[0] == "p":
                groups.setdefault(desc[1], []).append((idx, desc[2]))
        changed = True
        while changed:
            changed = False
            for apps in groups.values():
                for i in range(len(apps)):
                    for j in range(i + 1, len(apps)):
                        ia, aargs = apps[i]
                        ib, bargs = apps[j]
                        if any(find(x) != find(y) for x, y in zip(aargs, bargs)):
                            continue
                        va, vb = decided(ia), decided(ib)
                        if va is None and vb is None:
                            continue
                        if va is None:
                            forced[ia] = vb
                            changed = True
                        elif vb is None:
                            forced[ib] = va
                            changed = True
                        elif va != vb:
                            return None

        constraints = []
        arith_diseqs = []
        for idx, desc in enumerate(self.atoms):
            if desc[0] != "a":
                continue
            value = assign.get(idx)
            if value is None:
                continue
            lin, rel = desc[1], desc[2]
            if value:
                constraints.append((lin, rel))
            elif rel == "=":
                arith_diseqs.append(lin)
            elif rel == "<=":
                constraints.append((lin.scale(-1), "<"))
            else:  # rel == "<"
                constraints.append((lin.scale(-1), "<="))
        verdict, values = lira.solve(constraints, arith_diseqs, self.int_vars)
        if verdict == lira.UNSAT:
            return None
        if verdict == lira.UNKNOWN:
            self.saw_unknown = True
            return None

        booleans = dict(assign)
        booleans.update(forced)
        return TheoryModel(booleans, dict(values or {}), dict(parent))


def search(root, atoms, int_vars):
    """Decide the compiled formula. Returns (verdict, TheoryModel|None)."""
    return _Searcher(root, atoms, set(int_vars)).run()
