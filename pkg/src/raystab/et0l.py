"""ET0L grammars: tables, rational control, bounded generation, derivation counts."""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache

from .automata import (
    Automaton,
    EPS,
    accepts_empty,
    compile_regex,
    determinize,
    is_empty,
    symbols,
    words,
)


class GrammarError(ValueError):
    pass


class InfiniteDerivations(RuntimeError):
    """A word has infinitely many derivations (a cycle of empty pieces)."""


class NonLimitingDetected(RuntimeError):
    pass


class NoFixpoint(RuntimeError):
    pass


class Table:
    """Map from nonterminals to automata over symbols; anything unlisted maps to itself."""

    def __init__(self, name: str, images: dict | None = None):
        self.name = name
        self.images = dict(images or {})
        self._det = {}

    def image(self, symbol) -> Automaton | None:
        return self.images.get(symbol)

    def det_image(self, symbol) -> Automaton | None:
        """Deterministic version, so words rather than paths get counted."""
        if symbol not in self._det:
            aut = self.image(symbol)
            if aut is not None and not aut.deterministic:
                aut = determinize(aut)
            self._det[symbol] = aut
        return self._det[symbol]

    def listed(self):
        return list(self.images)

    def __repr__(self):
        return f"Table({self.name!r})"


@dataclass
class Et0lGrammar:
    terminals: tuple
    nonterminals: frozenset | None  # None: discovered lazily from the start symbol
    tables: dict
    control: Automaton
    start: object

    def __post_init__(self):
        self.terminals = tuple(self.terminals)
        self._term = frozenset(self.terminals)
        self._order = {x: i for i, x in enumerate(self.terminals)}
        if self.nonterminals is not None:
            self.nonterminals = frozenset(self.nonterminals)
            if self.nonterminals & self._term:
                raise GrammarError("terminals and nonterminals overlap")
            if self.start not in self.nonterminals:
                raise GrammarError("start symbol is not a nonterminal")
        elif self.start in self._term:
            raise GrammarError("start symbol is a terminal")
        bad = symbols(self.control) - set(self.tables)
        if bad:
            raise GrammarError(f"control uses unknown tables {sorted(bad)}")

    def is_terminal(self, s) -> bool:
        return s in self._term

    def symbol_key(self, s):
        if s in self._term:
            return (0, self._order[s], "")
        return (1, 0, str(s))

    def word_key(self, w):
        return (len(w), tuple(self.symbol_key(s) for s in w))

    def sorted_words(self, ws):
        return sorted(ws, key=self.word_key)

    def reachable_nonterminals(self) -> list:
        seen = {self.start}
        order = [self.start]
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for t in self.tables.values():
                aut = t.image(v)
                if aut is None:
                    continue
                for s in symbols(aut):
                    if s not in self._term and s not in seen:
                        seen.add(s)
                        order.append(s)
        return order


ALPHA, BETA, GAMMA = "alpha", "beta", "gamma"


class LimitingGrammar(Et0lGrammar):
    """Three tables alpha, beta, gamma with control alpha beta* gamma."""

    def __init__(self, terminals, nonterminals, alpha: Table, beta: Table, gamma: Table, start, verify=True):
        tables = {ALPHA: alpha, BETA: beta, GAMMA: gamma}
        control = compile_regex(f"{ALPHA} {BETA}* {GAMMA}")
        super().__init__(terminals, nonterminals, tables, control, start)
        if verify:
            problems = structural_violations(self)
            if problems:
                raise GrammarError("; ".join(p.message for p in problems))

    @property
    def alpha(self) -> Table:
        return self.tables[ALPHA]

    @property
    def beta(self) -> Table:
        return self.tables[BETA]

    @property
    def gamma(self) -> Table:
        return self.tables[GAMMA]

    def beta_closure(self) -> list:
        """Nonterminals reachable from alpha(start) through beta."""
        first = self.alpha.image(self.start)
        todo = [self.start] if first is None else sorted(
            (s for s in symbols(first) if not self.is_terminal(s)), key=self.symbol_key
        )
        seen = set(todo)
        order = list(todo)
        i = 0
        while i < len(order):
            aut = self.beta.image(order[i])
            i += 1
            if aut is None:
                continue
            for s in sorted(symbols(aut) - seen, key=self.symbol_key):
                if not self.is_terminal(s):
                    seen.add(s)
                    order.append(s)
        return order


# ---------------------------------------------------------------- path sums


def path_sum(aut: Automaton, key0, step, final_key=None) -> Counter:
    """Weighted count of accepting runs.

    Nodes are (state, key); ``step(symbol, key)`` yields (next_key, weight).
    Returns total weight per key over accepting nodes (optionally only
    ``final_key``).  Cycles among nodes that can still reach acceptance mean
    infinitely many runs and raise InfiniteDerivations.
    """
    start = (aut.start, key0)
    succ = {}
    order = [start]
    seen = {start}
    i = 0
    while i < len(order):
        node = order[i]
        i += 1
        s, k = node
        out = []
        for x, t in aut.arcs(s):
            if x is EPS:
                moves = ((k, 1),)
            else:
                moves = step(x, k)
            for k2, c in moves:
                if not c:
                    continue
                nxt = (t, k2)
                out.append((nxt, c))
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
        succ[node] = out

    def good(node):
        return aut.is_final(node[0]) and (final_key is None or node[1] == final_key)

    pred = {}
    for node, out in succ.items():
        for nxt, _ in out:
            pred.setdefault(nxt, []).append(node)
    useful = {n for n in order if good(n)}
    todo = list(useful)
    while todo:
        n = todo.pop()
        for p in pred.get(n, ()):
            if p not in useful:
                useful.add(p)
                todo.append(p)
    if start not in useful:
        return Counter()
    indeg = Counter()
    for n in useful:
        for nxt, _ in succ[n]:
            if nxt in useful:
                indeg[nxt] += 1
    total = {start: 1}
    queue = deque(n for n in useful if indeg[n] == 0)
    done = 0
    result = Counter()
    while queue:
        n = queue.popleft()
        done += 1
        c = total.get(n, 0)
        if good(n) and c:
            result[n[1]] += c
        for nxt, w in succ[n]:
            if nxt not in useful:
                continue
            total[nxt] = total.get(nxt, 0) + c * w
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                queue.append(nxt)
    if done != len(useful):
        stuck = [n for n in useful if indeg[n] > 0]
        raise InfiniteDerivations(f"cycle of empty derivation pieces near key {stuck[0][1]!r}")
    return result


def _expand(aut: Automaton, piece, cap: int) -> Counter:
    """Words (with derivation counts) obtained by replacing each symbol of each
    word of ``aut`` by a word of ``piece(symbol)``, total length <= cap."""

    def step(x, w):
        for u, c in piece(x).items():
            if len(w) + len(u) <= cap:
                yield w + u, c

    return path_sum(aut, (), step)


# ---------------------------------------------------------------- tables


def symbol_language(E: Et0lGrammar, table: Table, s, cap: int) -> Counter:
    if E.is_terminal(s):
        return Counter({(s,): 1})
    aut = table.det_image(s)
    if aut is None:
        return Counter({(s,): 1})
    return words(aut, cap)


def apply_table(E: Et0lGrammar, w, table: Table, len_cap: int, counts=False):
    """All w' with w -> w' under the table and |w'| <= len_cap."""
    partial = Counter({(): 1})
    for s in w:
        lang = symbol_language(E, table, s, len_cap)
        nxt = Counter()
        for p, c in partial.items():
            for u, d in lang.items():
                if len(p) + len(u) <= len_cap:
                    nxt[p + u] += c * d
        partial = nxt
    return partial if counts else set(partial)


def generate(E: Et0lGrammar, len_cap: int, control_cap: int, form_cap: int | None = None) -> set:
    """Terminal words of length <= len_cap under control words of length <= control_cap.

    Sentential forms longer than form_cap are dropped, so for grammars whose
    forms can shrink a lot the result may be incomplete.
    """
    if form_cap is None:
        form_cap = 2 * len_cap + 2
    control = determinize(E.control)
    frontier = {(control.start, (E.start,))}
    seen = set(frontier)
    out = set()
    for step_no in range(control_cap + 1):
        nxt = set()
        for cs, form in frontier:
            if control.is_final(cs) and all(E.is_terminal(s) for s in form) and len(form) <= len_cap:
                out.add(form)
            if step_no == control_cap:
                continue
            for name, t in control.arcs(cs):
                for new in apply_table(E, form, E.tables[name], form_cap):
                    if sum(1 for s in new if E.is_terminal(s)) > len_cap:
                        continue
                    item = (t, new)
                    if item not in seen:
                        seen.add(item)
                        nxt.add(item)
        frontier = nxt
    return out


# ---------------------------------------------------------------- limiting grammars


@dataclass
class LimitingRun:
    """Per-round word counts of S alpha beta^n gamma, up to a certified fixpoint."""

    rounds: list  # rounds[n] = Counter of words from S alpha beta^n gamma
    fixpoint: int  # round from which nothing changes any more
    index: int  # first n from which the word set is constant
    closure: list = field(default_factory=list)

    @property
    def words(self) -> Counter:
        return self.rounds[-1]


def limiting_run(E: LimitingGrammar, L: int, max_rounds: int = 500) -> LimitingRun:
    """Exact L(E) ∩ Σ^{<=L} via per-nonterminal languages.

    lang_k(A) = words of length <= L derivable from A with beta^k gamma.  The
    vector (lang_k(A))_A over the beta-closure is iterated until it repeats;
    after that no round can change, which certifies completeness.
    """
    closure = E.beta_closure()
    rounds = []
    prev = None
    for vec, words_n in _rounds(E, L, closure):
        if vec == prev:
            break
        if len(rounds) > max_rounds:
            raise NoFixpoint(f"no fixpoint within {max_rounds} rounds")
        rounds.append(words_n)
        prev = vec
    final = rounds[-1]
    for n, r in enumerate(rounds):
        for w in r:
            for later in range(n + 1, len(rounds)):
                if w not in rounds[later]:
                    raise NonLimitingDetected(
                        f"word {' '.join(map(str, w)) or 'eps'} present at round {n} but not at {later}"
                    )
    index = len(rounds) - 1
    while index > 0 and set(rounds[index - 1]) == set(final):
        index -= 1
    return LimitingRun(rounds, len(rounds) - 1, index, closure)


def _rounds(E: LimitingGrammar, L: int, closure):
    """Yield (lang_k vector, words of S alpha beta^k gamma) for k = 0, 1, 2, ..."""
    empty = Counter()

    def piece_from(vec):
        def piece(x):
            if E.is_terminal(x):
                return Counter({(x,): 1})
            return vec.get(x, empty)

        return piece

    def level(table, vec):
        new = {}
        piece = piece_from(vec)
        for A in closure:
            aut = table.det_image(A)
            if aut is None:
                new[A] = Counter(vec.get(A, empty))
            else:
                new[A] = _expand(aut, piece, L)
        return new

    start_aut = E.alpha.det_image(E.start)

    def top(vec):
        if start_aut is None:
            return Counter(vec.get(E.start, empty))
        return _expand(start_aut, piece_from(vec), L)

    vec = level(E.gamma, {})
    # nonterminals left alone by gamma stay nonterminal: no terminal words
    for A in closure:
        if E.gamma.det_image(A) is None:
            vec[A] = empty
    while True:
        yield vec, top(vec)
        vec = level(E.beta, vec)


def generate_limiting(E: LimitingGrammar, L: int):
    run = limiting_run(E, L)
    return set(run.words), run.index


def words_at_round(E: LimitingGrammar, n: int, L: int) -> Counter:
    run = limiting_run(E, L)
    return run.rounds[min(n, len(run.rounds) - 1)]


# ---------------------------------------------------------------- derivation counting


def count_derivations(E: Et0lGrammar, w, r) -> int:
    """Number of derivation trees of w (over terminals and nonterminals) labelled by r."""
    w = tuple(w)
    r = tuple(r)
    tables = [E.tables[name] for name in r]

    @lru_cache(maxsize=None)
    def count(s, t, i, j):
        if E.is_terminal(s) or t == len(r):
            return 1 if j == i + 1 and w[i] == s else 0
        aut = tables[t].det_image(s)
        if aut is None:
            return count(s, t + 1, i, j)

        def step(x, p):
            for q in range(p, j + 1):
                c = count(x, t + 1, p, q)
                if c:
                    yield q, c

        return path_sum(aut, i, step, final_key=j)[j]

    return count(E.start, 0, 0, len(w))


@dataclass
class DerivationTree:
    symbol: object
    table: str | None = None
    children: tuple = ()

    def leaves(self) -> tuple:
        if self.table is None:
            return (self.symbol,)
        return tuple(x for c in self.children for x in c.leaves())

    def render(self, indent=0) -> str:
        head = "  " * indent + str(self.symbol)
        if self.table is None:
            return head
        lines = [f"{head}  [{self.table}]"]
        lines += [c.render(indent + 1) for c in self.children]
        return "\n".join(lines)


def derivation_trees(E: Et0lGrammar, w, r, production_cap: int | None = None):
    """All derivation trees by exhaustive search (productions up to production_cap symbols)."""
    w = tuple(w)
    r = tuple(r)
    if production_cap is None:
        production_cap = len(w) + 2

    def trees(s, t, i, j):
        if t == len(r):
            if j == i + 1 and w[i] == s:
                yield DerivationTree(s)
            return
        if E.is_terminal(s):
            prods = [(s,)]
        else:
            aut = E.tables[r[t]].det_image(s)
            prods = [(s,)] if aut is None else sorted(words(aut, production_cap), key=E.word_key)
        for prod in prods:
            for kids in split(prod, t + 1, i, j):
                yield DerivationTree(s, r[t], kids)

    def split(prod, t, i, j):
        if not prod:
            if i == j:
                yield ()
            return
        for q in range(i, j + 1):
            for first in trees(prod[0], t, i, q):
                for rest in split(prod[1:], t, q, j):
                    yield (first,) + rest

    return list(trees(E.start, 0, 0, len(w)))


# ---------------------------------------------------------------- validation


@dataclass
class Violation:
    item: str
    message: str
    witness: object = None


@dataclass
class ValidationReport:
    violations: list
    checked_words: int = 0
    checked_forms: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        if self.ok:
            return [f"ok: {self.checked_words} words, {self.checked_forms} sentential forms checked"]
        return [f"{v.item}: {v.message}" for v in self.violations]


def structural_violations(E: LimitingGrammar) -> list:
    out = []
    if set(E.tables) != {ALPHA, BETA, GAMMA}:
        out.append(Violation("tables", f"tables are {sorted(E.tables)}"))
    ref = determinize(compile_regex(f"{ALPHA} {BETA}* {GAMMA}"))
    ctl = determinize(E.control)
    if set(words(ref, 6)) != set(words(ctl, 6)):
        out.append(Violation("control", "control is not alpha beta* gamma"))
    names = E.nonterminals if E.nonterminals is not None else E.reachable_nonterminals()
    for v in sorted(names, key=E.symbol_key):
        b = E.beta.image(v)
        if b is not None and accepts_empty(b):
            out.append(Violation("beta-eps", f"empty word in beta({v})", v))
        g = E.gamma.image(v)
        if g is not None and is_empty(g):
            out.append(Violation("gamma-empty", f"gamma({v}) is empty", v))
    return out


def sentential_forms(E: LimitingGrammar, n: int, cap: int) -> list[Counter]:
    """Forms S alpha beta^j (j <= n) of length <= cap with derivation counts.

    beta never shortens a form, so pruning at the cap loses nothing."""
    forms = apply_table(E, (E.start,), E.alpha, cap, counts=True)
    out = [forms]
    for _ in range(n):
        nxt = Counter()
        for f, c in forms.items():
            for g, d in apply_table(E, f, E.beta, cap, counts=True).items():
                nxt[g] += c * d
        forms = nxt
        out.append(forms)
    return out


def validate_limiting(E: LimitingGrammar, L: int, N: int) -> ValidationReport:
    violations = structural_violations(E)
    report = ValidationReport(violations)
    if violations:
        return report
    try:
        rounds = limiting_run(E, L, max_rounds=max(N, 1) + 500).rounds
    except NonLimitingDetected as exc:
        violations.append(Violation("persistence", str(exc)))
        return report
    except InfiniteDerivations as exc:
        violations.append(Violation("unambiguity", str(exc)))
        return report
    except NoFixpoint as exc:
        # derivation counts that keep growing also show up as ambiguity below
        violations.append(Violation("fixpoint", str(exc)))
        gen = _rounds(E, L, E.beta_closure())
        rounds = [next(gen)[1] for _ in range(N + 1)]
    last = len(rounds) - 1
    for n in range(N + 1):
        words_n = rounds[min(n, last)]
        for w, c in words_n.items():
            report.checked_words += 1
            if c > 1:
                violations.append(
                    Violation("unambiguity", f"{c} derivations of {fmt(w)} under alpha beta^{n} gamma", (w, n))
                )
    for j, forms in enumerate(sentential_forms(E, N, L)):
        for f, c in forms.items():
            report.checked_forms += 1
            if c > 1:
                violations.append(
                    Violation("unambiguity", f"{c} derivations of form {fmt(f)} under alpha beta^{j}", (f, j))
                )
    return report


def fmt(w) -> str:
    return " ".join(map(str, w)) if w else "eps"
