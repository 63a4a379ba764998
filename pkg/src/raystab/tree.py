"""Automaton automorphisms of the d-regular rooted tree.

Vertices are tuples of letters 0..d-1.  Every group element acts on the
right: ``act_vertex(compose(g, h), v) == act_vertex(h, act_vertex(g, v))``.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

Vertex = tuple  # tuple[int, ...]
Word = tuple  # tuple[str, ...] of generator names

INVERSE_SUFFIX = "^-1"


class GroupDefinitionError(ValueError):
    pass


class AlphabetMismatch(ValueError):
    pass


class UnknownGenerator(KeyError):
    pass


def normalize_ray(initial, period) -> tuple[Vertex, Vertex]:
    """Canonical (u, v) for the point u v v v ...

    v is reduced to its primitive root and as much of u as possible is
    folded into the period, so equal points get equal pairs.
    """
    u = tuple(initial)
    v = tuple(period)
    if not v:
        raise ValueError("ray period must be nonempty")
    n = len(v)
    for k in range(1, n + 1):
        if n % k == 0 and v[:k] * (n // k) == v:
            v = v[:k]
            break
    while u and u[-1] == v[-1]:
        v = (v[-1],) + v[:-1]
        u = u[:-1]
    return u, v


@dataclass(frozen=True)
class Ray:
    """Eventually periodic boundary point ``initial · period^ω``; always normalized."""

    initial: Vertex
    period: Vertex

    def __post_init__(self):
        u, v = normalize_ray(self.initial, self.period)
        object.__setattr__(self, "initial", u)
        object.__setattr__(self, "period", v)

    def prefix(self, n: int) -> Vertex:
        out = list(self.initial[:n])
        i = 0
        while len(out) < n:
            out.append(self.period[i % len(self.period)])
            i += 1
        return tuple(out)

    def letter(self, i: int) -> int:
        if i < len(self.initial):
            return self.initial[i]
        return self.period[(i - len(self.initial)) % len(self.period)]

    def __str__(self):
        u = "".join(map(str, self.initial))
        return f"{u}({''.join(map(str, self.period))})^w"


@dataclass(frozen=True)
class Automorphism:
    """Minimal Mealy machine; state 0 is the root, states numbered in BFS order.

    Build through :func:`from_states` (or the operations below) so that the
    canonical form holds; equality is then structural.
    """

    d: int
    perms: tuple
    sections: tuple

    @property
    def size(self) -> int:
        return len(self.perms)

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        return compose(self, other)

    def __repr__(self):
        return f"Automorphism(d={self.d}, states={self.size})"


def _canonical(d: int, perms, sections, root) -> Automorphism:
    """Prune, minimize by partition refinement and renumber from the root."""
    seen = {root}
    order = [root]
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for t in sections[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    cls = {s: perms[s] for s in order}
    ids = {}
    cls = {s: ids.setdefault(sig, len(ids)) for s, sig in cls.items()}
    while True:
        ids = {}
        new = {}
        for s in order:
            sig = (cls[s], tuple(cls[t] for t in sections[s]))
            new[s] = ids.setdefault(sig, len(ids))
        if len(ids) == len(set(cls.values())):
            cls = new
            break
        cls = new
    rep = {}
    for s in order:
        rep.setdefault(cls[s], s)
    number = {cls[root]: 0}
    queue = deque([cls[root]])
    out_perm, out_sec = [], []
    while queue:
        c = queue.popleft()
        s = rep[c]
        out_perm.append(tuple(perms[s]))
        row = []
        for t in sections[s]:
            ct = cls[t]
            if ct not in number:
                number[ct] = len(number)
                queue.append(ct)
            row.append(number[ct])
        out_sec.append(row)
    return Automorphism(d, tuple(out_perm), tuple(tuple(r) for r in out_sec))


def from_states(d: int, perms, sections, root=0) -> Automorphism:
    """Build from any (possibly redundant) machine; ``perms``/``sections``
    are indexable by state."""
    if d < 2:
        raise ValueError("alphabet size must be at least 2")
    return _canonical(d, perms, sections, root)


def identity(d: int) -> Automorphism:
    return Automorphism(d, (tuple(range(d)),), ((0,) * d,))


def is_identity(g: Automorphism) -> bool:
    triv = tuple(range(g.d))
    return all(p == triv for p in g.perms)


def minimize(g: Automorphism) -> Automorphism:
    return _canonical(g.d, g.perms, g.sections, 0)


def state_automorphism(g: Automorphism, state: int) -> Automorphism:
    return _canonical(g.d, g.perms, g.sections, state)


def compose(g: Automorphism, h: Automorphism) -> Automorphism:
    """g then h."""
    if g.d != h.d:
        raise AlphabetMismatch(f"alphabet sizes differ: {g.d} vs {h.d}")
    index = {(0, 0): 0}
    pairs = [(0, 0)]
    perms, sections = [], []
    i = 0
    while i < len(pairs):
        s, t = pairs[i]
        i += 1
        ps, pt = g.perms[s], h.perms[t]
        perms.append(tuple(pt[ps[x]] for x in range(g.d)))
        row = []
        for x in range(g.d):
            nxt = (g.sections[s][x], h.sections[t][ps[x]])
            if nxt not in index:
                index[nxt] = len(pairs)
                pairs.append(nxt)
            row.append(index[nxt])
        sections.append(row)
    return _canonical(g.d, perms, sections, 0)


def inverse(g: Automorphism) -> Automorphism:
    perms, sections = [], []
    for p, sec in zip(g.perms, g.sections):
        inv = [0] * g.d
        for x, y in enumerate(p):
            inv[y] = x
        perms.append(tuple(inv))
        sections.append([sec[inv[y]] for y in range(g.d)])
    return _canonical(g.d, perms, sections, 0)


def state_at(g: Automorphism, v) -> int:
    s = 0
    for x in v:
        s = g.sections[s][x]
    return s


def section(g: Automorphism, v) -> Automorphism:
    return state_automorphism(g, state_at(g, v))


def act_vertex(g: Automorphism, v) -> Vertex:
    out = []
    s = 0
    for x in v:
        out.append(g.perms[s][x])
        s = g.sections[s][x]
    return tuple(out)


def act_ray(g: Automorphism, r: Ray) -> Ray:
    s = 0
    out = []
    for x in r.initial:
        out.append(g.perms[s][x])
        s = g.sections[s][x]
    seen = {}
    j = 0
    while (s, j) not in seen:
        seen[(s, j)] = len(out)
        x = r.period[j]
        out.append(g.perms[s][x])
        s = g.sections[s][x]
        j = (j + 1) % len(r.period)
    start = seen[(s, j)]
    return Ray(tuple(out[:start]), tuple(out[start:]))


def equal(g: Automorphism, h: Automorphism) -> bool:
    """Equality checked two ways: canonical form and the identity test on g h^-1."""
    same = g == h
    if same != is_identity(compose(g, inverse(h))):
        raise AssertionError("canonical form and identity test disagree")
    return same


@dataclass(frozen=True)
class GeneratingSet:
    """Ordered named generators; the order defines the word alphabet."""

    d: int
    gens: dict = field(hash=False)

    @property
    def names(self) -> tuple:
        return tuple(self.gens)

    def __getitem__(self, name: str) -> Automorphism:
        try:
            return self.gens[name]
        except KeyError:
            raise UnknownGenerator(name) from None

    def inverse_name(self, name: str) -> str | None:
        target = inverse(self[name])
        for other, g in self.gens.items():
            if g == target:
                return other
        return None

    def is_symmetric(self) -> bool:
        return all(self.inverse_name(n) is not None for n in self.gens)

    def symmetrized(self) -> "GeneratingSet":
        gens = dict(self.gens)
        for name, g in self.gens.items():
            if self.inverse_name(name) is None:
                gens[name + INVERSE_SUFFIX] = inverse(g)
        return GeneratingSet(self.d, gens)

    def invert_word(self, w) -> Word:
        out = []
        for x in reversed(w):
            inv = self.inverse_name(x)
            if inv is None:
                raise ValueError(f"generator {x} has no inverse in the set")
            out.append(inv)
        return tuple(out)

    def parse_word(self, text: str) -> Word:
        """Whitespace-separated names, or a run of single-letter names."""
        text = text.strip()
        if not text or text in ("eps", "ε"):
            return ()
        tokens = text.split()
        if len(tokens) == 1 and text not in self.gens and all(c in self.gens for c in text):
            tokens = list(text)
        for t in tokens:
            if t not in self.gens:
                raise UnknownGenerator(t)
        return tuple(tokens)


def word_to_automorphism(X: GeneratingSet, w) -> Automorphism:
    g = identity(X.d)
    for x in w:
        g = compose(g, X[x])
    return g


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(\^-1)?$")


def parse_group(text: str) -> GeneratingSet:
    """Parse the line-oriented group definition format."""
    d = None
    defs = {}
    gen_order = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "alphabet":
            if d is not None:
                raise GroupDefinitionError(f"line {lineno}: alphabet declared twice")
            if defs:
                raise GroupDefinitionError(f"line {lineno}: alphabet must come first")
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 2:
                raise GroupDefinitionError(f"line {lineno}: expected 'alphabet <d>' with d >= 2")
            d = int(parts[1])
            continue
        if parts[0] not in ("gen", "state"):
            raise GroupDefinitionError(f"line {lineno}: unknown directive {parts[0]!r}")
        if d is None:
            raise GroupDefinitionError(f"line {lineno}: alphabet must come first")
        if len(parts) != 4:
            raise GroupDefinitionError(f"line {lineno}: expected '{parts[0]} <name> perm=... sections=...'")
        name = parts[1]
        if not _NAME.match(name) or name == "1":
            raise GroupDefinitionError(f"line {lineno}: bad name {name!r}")
        if name in defs:
            raise GroupDefinitionError(f"line {lineno}: {name} defined twice")
        kv = {}
        for item in parts[2:]:
            if "=" not in item:
                raise GroupDefinitionError(f"line {lineno}: expected key=value, got {item!r}")
            k, v = item.split("=", 1)
            kv[k] = v.split(",")
        if set(kv) != {"perm", "sections"}:
            raise GroupDefinitionError(f"line {lineno}: need exactly perm= and sections=")
        try:
            perm = tuple(int(x) for x in kv["perm"])
        except ValueError:
            raise GroupDefinitionError(f"line {lineno}: perm entries must be integers") from None
        if sorted(perm) != list(range(d)):
            raise GroupDefinitionError(f"line {lineno}: perm is not a permutation of 0..{d - 1}")
        if len(kv["sections"]) != d:
            raise GroupDefinitionError(f"line {lineno}: expected {d} sections")
        defs[name] = (perm, kv["sections"], lineno)
        if parts[0] == "gen":
            gen_order.append(name)
    if d is None:
        raise GroupDefinitionError("missing alphabet line")
    names = ["1"] + list(defs)
    index = {n: i for i, n in enumerate(names)}
    perms = [tuple(range(d))]
    sections = [[0] * d]
    for name, (perm, secs, lineno) in defs.items():
        for s in secs:
            if s not in index:
                raise GroupDefinitionError(f"line {lineno}: unknown section state {s!r}")
        perms.append(perm)
        sections.append([index[s] for s in secs])
    gens = {n: from_states(d, perms, sections, index[n]) for n in gen_order}
    return GeneratingSet(d, gens)


def format_vertex(v) -> str:
    return "".join(map(str, v)) if v else "eps"


def parse_vertex(text: str, d: int | None = None) -> Vertex:
    text = text.strip()
    if text in ("", "eps", "ε"):
        return ()
    if "," in text or " " in text:
        letters = tuple(int(x) for x in re.split(r"[,\s]+", text) if x)
    else:
        letters = tuple(int(c) for c in text)
    if d is not None and any(x >= d or x < 0 for x in letters):
        raise ValueError(f"vertex {text!r} uses letters outside 0..{d - 1}")
    return letters
