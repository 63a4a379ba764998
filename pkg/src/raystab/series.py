"""Exact truncated power series and the generating-function recurrence of a limiting grammar."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .automata import Automaton, determinize, min_weight
from .et0l import LimitingGrammar

INF = math.inf
Z = "z"


class NoStabilization(RuntimeError):
    pass


@dataclass
class UniSeries:
    coeffs: list  # c_0..c_cap, ints or Fractions

    @property
    def cap(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, m):
        return self.coeffs[m]

    def __eq__(self, other):
        return isinstance(other, UniSeries) and self.coeffs == other.coeffs

    def __add__(self, other):
        n = min(self.cap, other.cap) + 1
        return UniSeries([self.coeffs[i] + other.coeffs[i] for i in range(n)])

    def __mul__(self, other):
        n = min(self.cap, other.cap) + 1
        out = [0] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a:
                for j in range(n - i):
                    out[i + j] += a * other.coeffs[j]
        return UniSeries(out)

    @classmethod
    def zero(cls, cap):
        return cls([0] * (cap + 1))

    @classmethod
    def one(cls, cap):
        return cls([1] + [0] * cap)

    @classmethod
    def z(cls, cap):
        return cls(([0, 1] + [0] * cap)[: cap + 1])


@dataclass(frozen=True)
class Truncation:
    """Keep monomials with weighted degree <= cap and at most max_symbols factors."""

    cap: int
    weights: dict = field(default_factory=dict, hash=False)
    max_symbols: int | None = None

    def weight(self, var):
        return self.weights.get(var, 1)

    def keeps(self, mono) -> bool:
        total = 0
        count = 0
        for v, e in mono:
            total += self.weight(v) * e
            count += e
        if total > self.cap:
            return False
        return self.max_symbols is None or count <= self.max_symbols


def _mono_mul(m1, m2):
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


class MultiSeries:
    """Sparse multivariate series: monomial (sorted ((var, exp), ...)) -> integer."""

    def __init__(self, terms, trunc: Truncation):
        self.trunc = trunc
        self.terms = {m: c for m, c in terms.items() if c and trunc.keeps(m)}

    @classmethod
    def constant(cls, c, trunc):
        return cls({(): c}, trunc)

    @classmethod
    def var(cls, v, trunc):
        return cls({((v, 1),): 1}, trunc)

    def __eq__(self, other):
        return isinstance(other, MultiSeries) and self.terms == other.terms

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return MultiSeries(out, self.trunc)

    def __mul__(self, other):
        out = {}
        keeps = self.trunc.keeps
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                if keeps(m):
                    out[m] = out.get(m, 0) + c1 * c2
        return MultiSeries(out, self.trunc)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def coefficient(self, **exps) -> int:
        return self.terms.get(tuple(sorted(exps.items())), 0)

    def __repr__(self):
        def mono(m):
            return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m) or "1"

        items = sorted(self.terms.items(), key=lambda t: (sum(e for _, e in t[0]), t[0]))
        return " + ".join(f"{c}*{mono(m)}" if c != 1 else mono(m) for m, c in items) or "0"


def substitute(g: MultiSeries, replacements: dict, trunc: Truncation | None = None) -> MultiSeries:
    """Replace each listed variable by a series; unlisted variables stay."""
    trunc = trunc or g.trunc
    powers = {}

    def power(v, e):
        key = (v, e)
        if key not in powers:
            if e == 1:
                powers[key] = MultiSeries(replacements[v].terms, trunc)
            else:
                powers[key] = power(v, e - 1) * power(v, 1)
        return powers[key]

    out = MultiSeries({}, trunc)
    acc = {}
    for m, c in g.terms.items():
        term = MultiSeries.constant(c, trunc)
        kept = tuple((v, e) for v, e in m if v not in replacements)
        if kept:
            term = term * MultiSeries({kept: 1}, trunc)
        for v, e in m:
            if v in replacements:
                term = term * power(v, e)
                if not term.terms:
                    break
        for mm, cc in term.terms.items():
            acc[mm] = acc.get(mm, 0) + cc
    out = MultiSeries(acc, trunc)
    return out


def regular_gf(aut: Automaton, variable_of, trunc: Truncation) -> MultiSeries:
    """Generating function of the words accepted by aut, by symbol multiplicities.

    Runs on the determinized automaton so each word is counted once.
    ``variable_of(symbol)`` names the variable for a symbol.
    """
    dfa = determinize(aut) if not aut.deterministic else aut
    frontier = {dfa.start: MultiSeries.constant(1, trunc)}
    total = MultiSeries({}, trunc)
    steps = 0
    limit = trunc.max_symbols
    if limit is None:
        positive = [w for w in trunc.weights.values()] + [1]
        if min(positive) <= 0:
            raise ValueError("zero-weight variables need a max_symbols bound")
        limit = trunc.cap
    while frontier and steps <= limit:
        nxt = {}
        for s, poly in frontier.items():
            if dfa.is_final(s):
                total = total + poly
            for x, t in dfa.arcs(s):
                step = poly * MultiSeries.var(variable_of(x), trunc)
                if step.terms:
                    nxt[t] = nxt[t] + step if t in nxt else step
        frontier = nxt
        steps += 1
    return total


def to_uni(g: MultiSeries, var=Z) -> UniSeries:
    """Coefficients of a series whose only variable is ``var``."""
    out = [0] * (g.trunc.cap + 1)
    for m, c in g.terms.items():
        if any(v != var for v, _ in m):
            raise ValueError("series has other variables")
        e = dict(m).get(var, 0)
        if e <= g.trunc.cap:
            out[e] += c
    return UniSeries(out)


def min_yields(E: LimitingGrammar, closure) -> dict:
    """Least terminal length derivable from each nonterminal over any number of beta rounds."""

    def weight_of(mu):
        def w(x):
            return 1 if E.is_terminal(x) else mu.get(x, INF)

        return w

    mu = {}
    for A in closure:
        aut = E.gamma.image(A)
        mu[A] = INF if aut is None else min_weight(aut, weight_of({}))
    while True:
        new = {}
        for A in closure:
            aut = E.beta.image(A)
            best = mu[A]
            if aut is not None:
                best = min(best, min_weight(aut, weight_of(mu)))
            new[A] = best
        if new == mu:
            return mu
        mu = new


@dataclass
class GfunResult:
    f: UniSeries
    index: int  # first n with f_n equal to the limit
    rounds: int


def gfun_recurrence(E: LimitingGrammar, L: int, collapse=True, max_symbols=None, max_rounds=500) -> GfunResult:
    """f(z) for L(E) truncated at degree L.

    g_0 = h_alpha(S), g_{n+1} = g_n with each x_A replaced by h_beta(A),
    f_n = g_n with x_A -> H_gamma(A)(z).  Iterates until g_n repeats.
    ``max_symbols`` (default 2L+2) bounds the factors per monomial, needed when
    some nonterminals can vanish.
    """
    if max_symbols is None:
        max_symbols = 2 * L + 2
    closure = E.beta_closure()
    mu = min_yields(E, closure)

    def var(x):
        if E.is_terminal(x):
            return Z if collapse else f"y:{x}"
        return f"x:{x}"

    weights = {var(A): mu[A] for A in closure}
    trunc = Truncation(L, weights, max_symbols)
    start_aut = E.alpha.image(E.start)
    if start_aut is None:
        g = MultiSeries.var(var(E.start), trunc)
    else:
        g = regular_gf(start_aut, var, trunc)
    h_beta = {}
    h_gamma = {}
    uni = Truncation(L, {}, None)
    for A in closure:
        b = E.beta.image(A)
        h_beta[var(A)] = MultiSeries.var(var(A), trunc) if b is None else regular_gf(b, var, trunc)
        c = E.gamma.image(A)
        if c is None or mu[A] == INF:
            h_gamma[var(A)] = MultiSeries({}, uni)
        else:
            full = regular_gf(c, var, Truncation(L, weights, max_symbols))
            only_terminals = {
                m: k for m, k in full.terms.items() if all(v == Z or v.startswith("y:") for v, _ in m)
            }
            h_gamma[var(A)] = _collapse(MultiSeries(only_terminals, uni))

    def evaluate(series):
        return to_uni(_collapse(substitute(series, h_gamma, uni)))

    history = [evaluate(g)]
    for n in range(max_rounds):
        nxt = substitute(g, h_beta, trunc)
        if nxt == g:
            break
        g = nxt
        history.append(evaluate(g))
    else:
        raise NoStabilization(f"no stabilization within {max_rounds} rounds")
    final = history[-1]
    index = len(history) - 1
    while index > 0 and history[index - 1] == final:
        index -= 1
    return GfunResult(final, index, len(history) - 1)


def _collapse(g: MultiSeries) -> MultiSeries:
    out = {}
    for m, c in g.terms.items():
        e = 0
        rest = []
        for v, k in m:
            if v == Z or v.startswith("y:"):
                e += k
            else:
                rest.append((v, k))
        mono = tuple(sorted(rest + ([(Z, e)] if e else [])))
        out[mono] = out.get(mono, 0) + c
    return MultiSeries(out, g.trunc)


def green_from_f(f: UniSeries, x_count: int) -> UniSeries:
    if x_count < 1:
        raise ValueError("x_count must be positive")
    return UniSeries([Fraction(c, x_count**m) for m, c in enumerate(f.coeffs)])
