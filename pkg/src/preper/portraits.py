"""Portraits of z^2 + c: canonical forms, labels and the reference catalogue."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Optional, Sequence

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher


class MalformedPortrait(ValueError):
    pass


class CatalogueMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class Portrait:
    """Functional digraph on vertices 0..N-1; succ[i] is the image of i."""

    succ: tuple

    def __post_init__(self):
        n = len(self.succ)
        for s in self.succ:
            if s is not None and not (0 <= s < n):
                raise MalformedPortrait(f"successor {s} out of range")

    @property
    def N(self) -> int:
        return len(self.succ)

    @classmethod
    def from_map(cls, points: Sequence[Hashable], image) -> "Portrait":
        """Portrait of the map P -> image(P) restricted to points."""
        index = {p: i for i, p in enumerate(points)}
        return cls(tuple(index.get(image(p)) for p in points))

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.N))
        g.add_edges_from((i, s) for i, s in enumerate(self.succ) if s is not None)
        return g

    def relabel(self, perm: Sequence[int]) -> "Portrait":
        """Portrait with vertex i renamed perm[i]."""
        out = [None] * self.N
        for i, s in enumerate(self.succ):
            out[perm[i]] = None if s is None else perm[s]
        return Portrait(tuple(out))


def _cycles(succ: Sequence[Optional[int]]) -> list[list[int]]:
    n = len(succ)
    state = [0] * n  # 0 new, 1 on stack, 2 done
    cycles = []
    for start in range(n):
        path = []
        v = start
        while v is not None and state[v] == 0:
            state[v] = 1
            path.append(v)
            v = succ[v]
        if v is not None and state[v] == 1:
            cycles.append(path[path.index(v):])
        for u in path:
            state[u] = 2
    return cycles


def _tree_code(v: int, children: dict[int, list[int]], on_cycle: set) -> str:
    kids = sorted(_tree_code(u, children, on_cycle) for u in children.get(v, ()) if u not in on_cycle)
    return "(" + "".join(kids) + ")"


def _min_rotation(seq: list[str]) -> tuple:
    return min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))


def components(g: Portrait) -> list[tuple[int, tuple]]:
    """Sorted (cycle length, minimal rotation of tree codes) per component."""
    cycles = _cycles(g.succ)
    on_cycle = {v for cyc in cycles for v in cyc}
    children: dict[int, list[int]] = {}
    for i, s in enumerate(g.succ):
        if s is not None:
            children.setdefault(s, []).append(i)
    # each weak component must contain exactly one cycle
    covered = set()
    for cyc in cycles:
        stack = list(cyc)
        while stack:
            v = stack.pop()
            if v in covered:
                continue
            covered.add(v)
            stack.extend(u for u in children.get(v, ()) if u not in covered)
    if len(covered) != g.N:
        raise MalformedPortrait("a component has no cycle")
    comps = []
    for cyc in cycles:
        codes = [_tree_code(v, children, on_cycle) for v in cyc]
        comps.append((len(cyc), _min_rotation(codes)))
    comps.sort(key=lambda t: (-t[0], t[1]))
    return comps


def canonicalize(g: Portrait) -> bytes:
    """Relabeling-invariant encoding of a portrait."""
    parts = [f"{n}:{','.join(codes)}" for n, codes in components(g)]
    return ("|".join(parts)).encode("ascii")


def base_label(g: Portrait) -> str:
    if g.N == 0:
        return "0"
    lens = [n for n, _ in components(g)]
    return f"{g.N}({','.join(str(n) for n in lens)})"


@dataclass(frozen=True)
class Label:
    base: str
    letter: str = ""
    novel: bool = False

    @property
    def text(self) -> str:
        return self.base + self.letter

    def __str__(self):
        return self.text + (" [novel]" if self.novel else "")


def split_label(text: str) -> tuple[str, str]:
    if text and text[-1].isalpha():
        return text[:-1], text[-1]
    return text, ""


@dataclass
class Catalogue:
    forms: dict = field(default_factory=dict)      # label -> canonical form
    portraits: dict = field(default_factory=dict)  # label -> representative Portrait
    by_form: dict = field(default_factory=dict)    # canonical form -> label

    def __len__(self):
        return len(self.forms)

    def register(self, label: str, g: Portrait):
        form = canonicalize(g)
        if label in self.forms:
            if self.forms[label] != form:
                raise CatalogueMismatch(f"two forms for label {label}")
            return
        if form in self.by_form:
            raise CatalogueMismatch(f"{label} duplicates {self.by_form[form]}")
        self.forms[label] = form
        self.portraits[label] = g
        self.by_form[form] = label

    def bases(self) -> dict:
        out: dict[str, list[str]] = {}
        for lab in self.forms:
            b, letter = split_label(lab)
            out.setdefault(b, []).append(letter)
        return out

    def max_vertices(self) -> int:
        return max((g.N for g in self.portraits.values()), default=0)


def label_portrait(g: Portrait, catalogue: Catalogue) -> Label:
    base = base_label(g)
    lab = catalogue.by_form.get(canonicalize(g))
    if lab is not None:
        b, letter = split_label(lab)
        return Label(b, letter, False)
    return Label(base, "", True)


def portrait_of(points: Iterable, c) -> Portrait:
    pts = list(points)
    return Portrait.from_map(pts, lambda P: P * P + c)


def contains_type(big: Portrait, small: Portrait) -> bool:
    """True when small is isomorphic to an induced subgraph of big."""
    if small.N > big.N:
        return False
    gm = DiGraphMatcher(big.to_networkx(), small.to_networkx())
    return gm.subgraph_is_isomorphic()


def to_dot(g: Portrait, names: Optional[Sequence[str]] = None, title: str = "portrait") -> str:
    names = names or [str(i) for i in range(g.N)]
    lines = [f'digraph "{title}" {{']
    for i in range(g.N):
        lines.append(f'  v{i} [label="{names[i]}"];')
    for i, s in enumerate(g.succ):
        if s is not None:
            lines.append(f"  v{i} -> v{s};")
    lines.append("}")
    return "\n".join(lines)


def build_catalogue(rows, recompute: bool = True) -> Catalogue:
    """Catalogue from reference rows; each row is checked against a fresh computation."""
    from .dynamics import preperiodic_points
    cat = Catalogue()
    for row in rows:
        pts = row.expanded_points()
        if recompute:
            S = preperiodic_points(row.c, row.K)
            if set(S.points) != set(pts):
                raise CatalogueMismatch(
                    f"row {row.label} over {row.K}: listed {len(pts)} points, computed {len(S)}")
        g = portrait_of(pts, row.c)
        if base_label(g) != split_label(row.label)[0]:
            raise CatalogueMismatch(f"row {row.label}: shape gives {base_label(g)}")
        cat.register(row.label, g)
    return cat


@lru_cache(maxsize=1)
def default_catalogue() -> Catalogue:
    from .fixtures import appendix_rows
    return build_catalogue(appendix_rows())


def label_points(points: Iterable, c, catalogue: Optional[Catalogue] = None) -> Label:
    return label_portrait(portrait_of(points, c), catalogue or default_catalogue())
