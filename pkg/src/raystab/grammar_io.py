"""Text format for ET0L grammars.

    terminals: a b
    nonterminals: S A B
    start: S
    table alpha {
      S -> S S | S | A B
      A -> automaton {
        state 0
        state 1
        accept 1
        edge 0 a 1
      }
    }
    control: alpha beta* gamma

The first ``state`` of an automaton block is its start state; ``eps``
labels an empty move.  Symbols are whitespace-separated tokens.
"""
from __future__ import annotations

from .automata import EPS, Nfa, compile_regex, determinize, explicit, minimize_dfa, trim, words
from .et0l import ALPHA, BETA, GAMMA, Et0lGrammar, LimitingGrammar, Table

RESERVED = set("()|*+?") | {"eps", "empty", "ε", "∅", "->", "{", "}"}


class GrammarFormatError(ValueError):
    pass


def _check_name(tok, lineno):
    if tok in RESERVED or any(ch in tok for ch in "()|*+?{}") or not tok:
        raise GrammarFormatError(f"line {lineno}: {tok!r} cannot be used as a symbol")


def parse_grammar(text: str) -> Et0lGrammar:
    lines = text.splitlines()
    terminals = nonterminals = start = control = None
    tables = {}
    i = 0

    def err(msg):
        raise GrammarFormatError(f"line {i + 1}: {msg}")

    while i < len(lines):
        line = lines[i].split("#", 1)[0].strip()
        if not line:
            i += 1
            continue
        if line.startswith("terminals:"):
            terminals = line.split(":", 1)[1].split()
            for t in terminals:
                _check_name(t, i + 1)
        elif line.startswith("nonterminals:"):
            nonterminals = line.split(":", 1)[1].split()
            for t in nonterminals:
                _check_name(t, i + 1)
        elif line.startswith("start:"):
            start = line.split(":", 1)[1].strip()
        elif line.startswith("control:"):
            control = line.split(":", 1)[1].strip()
        elif line.startswith("table"):
            parts = line.split()
            if len(parts) != 3 or parts[2] != "{":
                err("expected 'table NAME {'")
            name = parts[1]
            if name in tables:
                err(f"table {name} defined twice")
            images = {}
            i += 1
            while True:
                if i >= len(lines):
                    err(f"unterminated table {name}")
                body = lines[i].split("#", 1)[0].strip()
                if not body:
                    i += 1
                    continue
                if body == "}":
                    break
                if "->" not in body:
                    err("expected 'V -> ...'")
                lhs, rhs = (s.strip() for s in body.split("->", 1))
                if lhs in images:
                    err(f"{lhs} has two rules in table {name}")
                if rhs == "automaton {":
                    i, aut = _parse_block(lines, i + 1)
                    images[lhs] = aut
                else:
                    try:
                        images[lhs] = compile_regex(rhs)
                    except ValueError as exc:
                        err(str(exc))
                i += 1
            tables[name] = Table(name, images)
        else:
            err(f"cannot parse {line!r}")
        i += 1
    if terminals is None or nonterminals is None or start is None or control is None:
        raise GrammarFormatError("missing one of terminals:, nonterminals:, start:, control:")
    known = set(terminals) | set(nonterminals)
    for t in tables.values():
        for lhs, aut in t.images.items():
            if lhs not in nonterminals:
                raise GrammarFormatError(f"table {t.name}: {lhs} is not a nonterminal")
            extra = {x for s in explicit(aut)._arcs.values() for x, _ in s if x is not EPS} - known
            if extra:
                raise GrammarFormatError(f"table {t.name}: unknown symbols {sorted(extra)}")
    ctl = compile_regex(control)
    if set(tables) == {ALPHA, BETA, GAMMA} and _is_limiting_control(ctl):
        return LimitingGrammar(terminals, nonterminals, tables[ALPHA], tables[BETA], tables[GAMMA], start, verify=False)
    return Et0lGrammar(terminals, frozenset(nonterminals), tables, ctl, start)


def _is_limiting_control(ctl) -> bool:
    ref = determinize(compile_regex(f"{ALPHA} {BETA}* {GAMMA}"))
    return set(words(ref, 8)) == set(words(determinize(ctl), 8))


def _parse_block(lines, i):
    states, accept, arcs = [], set(), {}
    while True:
        if i >= len(lines):
            raise GrammarFormatError("unterminated automaton block")
        body = lines[i].split("#", 1)[0].strip()
        parts = body.split()
        if not parts:
            pass
        elif parts == ["}"]:
            break
        elif parts[0] == "state" and len(parts) == 2:
            states.append(parts[1])
            arcs.setdefault(parts[1], [])
        elif parts[0] == "accept" and len(parts) == 2:
            accept.add(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            _, a, sym, b = parts
            arcs.setdefault(a, []).append((EPS if sym in ("eps", "ε") else sym, b))
        else:
            raise GrammarFormatError(f"line {i + 1}: bad automaton line {body!r}")
        i += 1
    if not states:
        raise GrammarFormatError(f"line {i + 1}: automaton without states")
    for s in list(accept) + [b for e in arcs.values() for _, b in e] + list(arcs):
        if s not in states:
            raise GrammarFormatError(f"line {i + 1}: undeclared state {s}")
    return i, Nfa(states[0], accept, arcs)


def dump_grammar(E: Et0lGrammar) -> str:
    """Explicit text for a grammar; lazily defined grammars are expanded from the start symbol."""
    nts = E.nonterminals if E.nonterminals is not None else E.reachable_nonterminals()
    nts = sorted(nts, key=E.symbol_key)
    names = [str(s) for s in nts] + [str(t) for t in E.terminals]
    if len(set(names)) != len(names):
        raise GrammarFormatError("symbol names collide in text form")
    for n in names:
        _check_name(n, 0)
    out = [
        "terminals: " + " ".join(map(str, E.terminals)),
        "nonterminals: " + " ".join(map(str, nts)),
        f"start: {E.start}",
    ]
    for tname, table in E.tables.items():
        out.append(f"table {tname} {{")
        for v in nts:
            aut = table.image(v)
            if aut is None:
                continue
            nfa = trim(aut)
            if not nfa._arcs:
                nfa = Nfa(0, [], {0: []})
            out.append(f"  {v} -> automaton {{")
            for s in sorted(nfa._arcs):
                out.append(f"    state {s}")
            for s in sorted(nfa.finals):
                out.append(f"    accept {s}")
            for s in sorted(nfa._arcs):
                for x, t in nfa._arcs[s]:
                    out.append(f"    edge {s} {'eps' if x is EPS else x} {t}")
            out.append("  }")
        out.append("}")
    if isinstance(E, LimitingGrammar):
        out.append(f"control: {ALPHA} {BETA}* {GAMMA}")
    else:
        out.append("control: " + _control_regex(E))
    return "\n".join(out) + "\n"


def _control_regex(E: Et0lGrammar) -> str:
    """Control automaton written out by state elimination on its minimal DFA."""
    nfa = minimize_dfa(E.control)
    states = sorted(nfa._arcs)
    S, F = "start", "final"
    # expressions are (text, precedence): 0 alternation, 1 concatenation, 2 atom
    EPSR = ("eps", 2)
    R = {}

    def group(r, prec):
        return r[0] if r[1] >= prec else f"( {r[0]} )"

    def alt(r1, r2):
        return r1 if r1 == r2 else (f"{r1[0]} | {r2[0]}", 0)

    def cat(*rs):
        parts = [r for r in rs if r != EPSR]
        if not parts:
            return EPSR
        if len(parts) == 1:
            return parts[0]
        return (" ".join(group(r, 1) for r in parts), 1)

    def star(r):
        return EPSR if r == EPSR else (group(r, 2) + "*", 2)

    def add(a, b, r):
        R[(a, b)] = r if (a, b) not in R else alt(R[(a, b)], r)

    add(S, nfa.start, EPSR)
    for s in states:
        for x, t in nfa._arcs[s]:
            add(s, t, (str(x), 2))
        if s in nfa.finals:
            add(s, F, EPSR)
    for k in states:
        loop = R.pop((k, k), None)
        mid = star(loop) if loop else EPSR
        ins = [(a, r) for (a, b), r in R.items() if b == k]
        outs = [(b, r) for (a, b), r in R.items() if a == k]
        for a, _ in ins:
            R.pop((a, k))
        for b, _ in outs:
            R.pop((k, b))
        for a, r1 in ins:
            for b, r2 in outs:
                add(a, b, cat(r1, mid, r2))
    return R[(S, F)][0] if (S, F) in R else "empty"


def load_grammar(path) -> Et0lGrammar:
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())

