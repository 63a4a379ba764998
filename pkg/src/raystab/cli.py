"""Command line front end.

Exit codes: 0 success or member, 1 definite negative, 2 usage or input error,
3 an internal search cap was exceeded.
"""
from __future__ import annotations

import argparse
import random
import sys

from . import __version__
from .automata import trim
from .classify import Directed, Finitary, classify, is_bounded
from .construction import build_construction
from .et0l import (
    GrammarError,
    LimitingGrammar,
    generate_limiting,
    limiting_run,
    validate_limiting,
)
from .grammar_io import GrammarFormatError, dump_grammar, load_grammar
from .schreier import closed_walk_counts, export_dot, green_coeffs, level_graph, rooted_ball, stabilized_counts
from .series import gfun_recurrence, green_from_f
from .stab import EmptyPeriod, counts_by_length, enumerate_complement, enumerate_wp, member_periodic
from .transducer import FAIL, Gsm, InjectivityViolation, restrict_to_subgroup, transform_grammar
from .tree import GroupDefinitionError, Ray, UnknownGenerator, format_vertex, parse_group, parse_vertex

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def fmt_word(w) -> str:
    return " ".join(map(str, w)) if w else "eps"


# ---------------------------------------------------------------- loading inputs


def load_group(args):
    with open(args.group, encoding="utf-8") as fh:
        X = parse_group(fh.read())
    if getattr(args, "symmetrize", False):
        X = X.symmetrized()
    return X


def ray_words(args, X):
    a = parse_vertex(args.initial, X.d)
    b = parse_vertex(args.period, X.d)
    if not b:
        raise EmptyPeriod("period must be nonempty")
    return a, b


def need_symmetric(X):
    if not X.is_symmetric():
        raise UsageError("this command needs a symmetric generating set; pass --symmetrize")


def grammar_from_args(args):
    """A grammar file if given, otherwise the constructed grammar for the group and ray."""
    if getattr(args, "grammar", None):
        return load_grammar(args.grammar)
    if not getattr(args, "group", None):
        raise UsageError("give --grammar FILE or --group FILE")
    X = load_group(args)
    need_symmetric(X)
    a, b = ray_words(args, X)
    c = build_construction(X, a, b)
    return c.E_neg if getattr(args, "variant", "e") == "eprime" else c.E


def need_limiting(E):
    if not isinstance(E, LimitingGrammar):
        raise UsageError("grammar must have tables alpha, beta, gamma and control alpha beta* gamma")
    return E


def parse_gsm(text: str) -> Gsm:
    """Transducer text: ``inputs:``/``outputs:``/``initial:`` headers and state/accept/edge lines.

    ``edge q a/x,y r`` reads a in state q, writes x y and moves to r; ``a/eps`` writes nothing.
    """
    inputs = outputs = initial = None
    states, accept, delta = [], set(), {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if line.startswith("inputs:"):
            inputs = tuple(line.split(":", 1)[1].split())
        elif line.startswith("outputs:"):
            outputs = tuple(line.split(":", 1)[1].split())
        elif line.startswith("initial:"):
            initial = line.split(":", 1)[1].strip()
        elif parts[0] == "state" and len(parts) == 2:
            states.append(parts[1])
        elif parts[0] == "accept" and len(parts) == 2:
            accept.add(parts[1])
        elif parts[0] == "edge" and len(parts) == 4 and "/" in parts[2]:
            q, label, r = parts[1], parts[2], parts[3]
            x, out = label.split("/", 1)
            word = () if out in ("eps", "") else tuple(out.split(","))
            if (x, q) in delta:
                raise GrammarFormatError(f"line {lineno}: two edges read {x} in state {q}")
            delta[(x, q)] = (word, r)
        else:
            raise GrammarFormatError(f"line {lineno}: cannot parse {line!r}")
    if not states:
        raise GrammarFormatError("transducer without states")
    if FAIL in states:
        raise GrammarFormatError(f"{FAIL!r} is reserved")
    for (x, q), (_, r) in delta.items():
        if q not in states or r not in states:
            raise GrammarFormatError(f"edge {q} {x} {r} uses an undeclared state")
    for q in accept:
        if q not in states:
            raise GrammarFormatError(f"undeclared accepting state {q}")
    initial = initial or states[0]
    if inputs is None:
        inputs = tuple(sorted({x for x, _ in delta}))
    if outputs is None:
        outputs = tuple(sorted({y for w, _ in delta.values() for y in w}))
    return Gsm(inputs, outputs, tuple(states), frozenset(accept), initial, delta)


def load_gsm(path) -> Gsm:
    with open(path, encoding="utf-8") as fh:
        return parse_gsm(fh.read())


# ---------------------------------------------------------------- commands


def cmd_classify(args, out):
    X = load_group(args)
    if args.format == "csv":
        out.append("generator,tag,depth,spine_u,spine_v,bounded")
    for name in X.names:
        g = X[name]
        c = classify(g)
        bounded = "yes" if is_bounded(g) else "no"
        depth = u = v = ""
        if isinstance(c, Finitary):
            depth = str(c.depth)
        elif isinstance(c, Directed):
            u, v = format_vertex(c.spine.initial), format_vertex(c.spine.period)
        tag = type(c).__name__
        if args.format == "csv":
            out.append(f"{name},{tag},{depth},{u},{v},{bounded}")
        elif isinstance(c, Finitary):
            out.append(f"{name}: Finitary depth={depth} bounded={bounded}")
        elif isinstance(c, Directed):
            out.append(f"{name}: Directed spine=({u},{v}) bounded={bounded}")
        else:
            out.append(f"{name}: {tag} bounded={bounded}")
    return EXIT_OK


def cmd_member(args, out):
    X = load_group(args)
    a, b = ray_words(args, X)
    w = X.parse_word(args.word)
    ok = member_periodic(X, w, a, b)
    out.append("member" if ok else "non-member")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_enum_wp(args, out):
    X = load_group(args)
    a, b = ray_words(args, X)
    words = (enumerate_complement if args.complement else enumerate_wp)(X, a, b, args.max_len)
    out.extend(fmt_word(w) for w in words)
    out.append("length,count")
    out.extend(f"{m},{c}" for m, c in enumerate(counts_by_length(words, args.max_len)))
    return EXIT_OK


def cmd_schreier(args, out):
    X = load_group(args)
    a, b = ray_words(args, X)
    base = Ray(a, b).prefix(args.level)
    G = level_graph(X, args.level, base)
    out.append(f"level {args.level}: {len(G.vertices)} vertices, {len(G.edges)} edges, base {format_vertex(base)}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(export_dot(G))
    if args.counts is not None:
        out.append("m,count")
        out.extend(f"{m},{c}" for m, c in enumerate(closed_walk_counts(G, args.counts)))
    return EXIT_OK


def cmd_green(args, out):
    out.append("m,p_numerator,p_denominator")
    if args.grammar:
        E = need_limiting(load_grammar(args.grammar))
        res = gfun_recurrence(E, args.max_len)
        coeffs = green_from_f(res.f, args.x_count or len(E.terminals)).coeffs
    else:
        X = load_group(args)
        need_symmetric(X)
        a, b = ray_words(args, X)
        _, n = stabilized_counts(X, a, b, args.max_len)
        G = level_graph(X, n, Ray(a, b).prefix(n), radius=(args.max_len + 1) // 2 + 1)
        coeffs = green_coeffs(G, args.max_len)
    out.extend(f"{m},{p.numerator},{p.denominator}" for m, p in enumerate(coeffs))
    return EXIT_OK


def grammar_stats(E) -> list[str]:
    nts = E.nonterminals if E.nonterminals is not None else E.reachable_nonterminals()
    lines = [f"nonterminals: {len(nts)}", f"terminals: {len(E.terminals)}"]
    for name, table in E.tables.items():
        states = images = 0
        for A in nts:
            aut = table.image(A)
            if aut is not None:
                images += 1
                states += len(trim(aut)._arcs)
        lines.append(f"table {name}: {images} images, {states} states")
    return lines


def cmd_grammar(args, out):
    E = grammar_from_args(args)
    if args.stats:
        out.extend(grammar_stats(E))
    else:
        out.append(dump_grammar(E).rstrip("\n"))
    return EXIT_OK


def cmd_lang(args, out):
    E = need_limiting(grammar_from_args(args))
    words, _ = generate_limiting(E, args.max_len)
    out.extend(fmt_word(w) for w in E.sorted_words(words))
    return EXIT_OK


def cmd_check_grammar(args, out):
    E = grammar_from_args(args)
    if not isinstance(E, LimitingGrammar):
        out.append("FAIL: control is not alpha beta* gamma over tables alpha, beta, gamma")
        return EXIT_NEGATIVE
    report = validate_limiting(E, args.max_len, args.rounds)
    out.extend(report.lines())
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def cmd_gfun(args, out):
    E = need_limiting(grammar_from_args(args))
    res = gfun_recurrence(E, args.max_deg)
    if args.format == "text":
        out.append(f"stabilization index {res.index}")
    out.append("m,coefficient")
    out.extend(f"{m},{c}" for m, c in enumerate(res.f.coeffs))
    return EXIT_OK


def cmd_transduce(args, out):
    E = need_limiting(load_grammar(args.grammar))
    M = load_gsm(args.gsm)
    G = transform_grammar(E, M, args.injectivity_len)
    if args.max_len is None:
        out.append(dump_grammar(G).rstrip("\n"))
    else:
        words, _ = generate_limiting(G, args.max_len)
        out.extend(fmt_word(w) for w in G.sorted_words(words))
    return EXIT_OK


def cmd_restrict(args, out):
    E = need_limiting(grammar_from_args(args))
    X = load_group(args)
    Y = {}
    for item in args.subgroup:
        if "=" not in item:
            raise UsageError(f"expected NAME=WORD, got {item!r}")
        name, word = item.split("=", 1)
        Y[name.strip()] = X.parse_word(word)
    G, code, _ = restrict_to_subgroup(E, X, Y, args.injectivity_len)
    for w, y in code.words.items():
        out.append(f"code {fmt_word(y)} = {fmt_word(w)}")
    words, _ = generate_limiting(G, args.max_len)
    out.extend(fmt_word(w) for w in G.sorted_words(words))
    return EXIT_OK


def cmd_export_dot(args, out):
    X = load_group(args)
    a, b = ray_words(args, X)
    if args.ball is not None:
        G = rooted_ball(X, Ray(a, b), args.ball)
    else:
        G = level_graph(X, args.level, Ray(a, b).prefix(args.level))
    out.append(export_dot(G, args.name).rstrip("\n"))
    return EXIT_OK


def first_difference(got: set, want: set):
    diff = sorted(got ^ want, key=lambda w: (len(w), w))
    if not diff:
        return None
    w = diff[0]
    return f"{fmt_word(w)} {'extra' if w in got else 'missing'}"


def cmd_xval(args, out):
    X = load_group(args)
    need_symmetric(X)
    a, b = ray_words(args, X)
    L = args.max_len
    k = len(X.names)
    rows = []

    def check(name, ok, detail):
        rows.append((name, "pass" if ok else "FAIL", detail))

    def vec(xs):
        return " ".join(map(str, xs))

    wp = enumerate_wp(X, a, b, L)
    wp_set = set(wp)
    oracle = counts_by_length(wp, L)
    c = None
    if args.grammar and args.grammar_neg:
        E, E_neg = load_grammar(args.grammar), load_grammar(args.grammar_neg)
    else:
        c = build_construction(X, a, b)
        E = load_grammar(args.grammar) if args.grammar else c.E
        E_neg = load_grammar(args.grammar_neg) if args.grammar_neg else c.E_neg
    E, E_neg = need_limiting(E), need_limiting(E_neg)

    run = limiting_run(E, L)
    words = set(run.words)
    counts = counts_by_length(words, L)
    check("grammar_E", words == wp_set, " ".join(filter(None, [f"oracle={vec(oracle)} grammar={vec(counts)}", first_difference(words, wp_set)])))
    walks, n = stabilized_counts(X, a, b, L)
    check("schreier", walks == oracle, f"level={n} walks={vec(walks)}")

    neg = set(generate_limiting(E_neg, L)[0])
    neg_counts = counts_by_length(neg, L)
    both = words & neg
    complement = set(enumerate_complement(X, a, b, L))
    detail = f"eprime={vec(neg_counts)}"
    if both:
        w = sorted(both, key=lambda w: (len(w), w))[0]
        detail += f" overlap {fmt_word(w)}"
    elif neg != complement:
        detail += " " + first_difference(neg, complement)
    ok = not both and neg == complement and all(x + y == k**m for m, (x, y) in enumerate(zip(counts, neg_counts)))
    check("partition", ok, detail)

    res = gfun_recurrence(E, L)
    check("gfun", res.f.coeffs == counts, f"coeffs={vec(res.f.coeffs)} index={res.index}")
    check("stabilization_index", res.index == run.index, f"gfun={res.index} generate={run.index}")
    G = level_graph(X, n, Ray(a, b).prefix(n), radius=(L + 1) // 2 + 1)
    green = green_coeffs(G, L)
    from_f = green_from_f(res.f, k).coeffs
    check("green", green == from_f, "p=" + " ".join(str(p) for p in green))
    for name, g in (("validate_E", E), ("validate_Eprime", E_neg)):
        rep = validate_limiting(g, min(L, args.validate_len), args.rounds)
        check(name, rep.ok, "ok" if rep.ok else rep.lines()[0])

    if args.format == "csv":
        out.append("check,status,detail")
        out.extend(",".join(r) for r in rows)
    else:
        width = max(len(r[0]) for r in rows)
        out.extend(f"{r[0]:<{width}}  {r[1]:<4}  {r[2]}" for r in rows)
    return EXIT_OK if all(r[1] == "pass" for r in rows) else EXIT_NEGATIVE


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "csv"], default="text")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")

    group = argparse.ArgumentParser(add_help=False)
    group.add_argument("--group", help="group definition file")
    group.add_argument("--symmetrize", action="store_true", help="add missing inverses as NAME^-1")

    ray = argparse.ArgumentParser(add_help=False)
    ray.add_argument("--initial", default="", help="preperiod of the ray, e.g. 01 or eps")
    ray.add_argument("--period", default="", help="period of the ray, e.g. 1")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--grammar", help="grammar file (overrides --group)")
    source.add_argument("--variant", choices=["e", "eprime"], default="e")

    p = argparse.ArgumentParser(prog="raystab", description="Ray stabilisers of bounded automata groups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", parents=[common, group], help="tag each generator")
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("member", parents=[common, group, ray], help="decide whether a word fixes the ray")
    s.add_argument("--word", required=True)
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("enum-wp", parents=[common, group, ray], help="brute-force stabiliser words")
    s.add_argument("--max-len", type=int, required=True)
    s.add_argument("--complement", action="store_true")
    s.set_defaults(func=cmd_enum_wp)

    s = sub.add_parser("schreier", parents=[common, group, ray], help="level Schreier graph")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--dot")
    s.add_argument("--counts", type=int)
    s.set_defaults(func=cmd_schreier)

    s = sub.add_parser("green", parents=[common, group, ray], help="return probabilities")
    s.add_argument("--max-len", type=int, required=True)
    s.add_argument("--grammar", help="compute from this grammar's generating function instead")
    s.add_argument("--x-count", type=int, help="generator count for --grammar (default: terminal count)")
    s.set_defaults(func=cmd_green)

    s = sub.add_parser("grammar", parents=[common, group, ray], help="build the stabiliser grammar")
    s.add_argument("--variant", choices=["e", "eprime"], default="e")
    s.add_argument("--stats", action="store_true")
    s.set_defaults(func=cmd_grammar, grammar=None)

    s = sub.add_parser("lang", parents=[common, group, ray, source], help="words of a grammar")
    s.add_argument("--max-len", type=int, required=True)
    s.set_defaults(func=cmd_lang)

    s = sub.add_parser("check-grammar", parents=[common, group, ray, source], help="validate a limiting grammar")
    s.add_argument("--max-len", type=int, default=6)
    s.add_argument("--rounds", type=int, default=6)
    s.set_defaults(func=cmd_check_grammar)

    s = sub.add_parser("gfun", parents=[common, group, ray, source], help="generating function coefficients")
    s.add_argument("--max-deg", type=int, required=True)
    s.set_defaults(func=cmd_gfun)

    s = sub.add_parser("transduce", parents=[common], help="apply a transducer to a grammar")
    s.add_argument("--grammar", required=True)
    s.add_argument("--gsm", required=True)
    s.add_argument("--max-len", type=int, help="print words instead of the grammar")
    s.add_argument("--injectivity-len", type=int, default=6)
    s.set_defaults(func=cmd_transduce)

    s = sub.add_parser("restrict", parents=[common, group, ray, source], help="grammar for a finitely generated subgroup")
    s.add_argument("--subgroup", action="append", required=True, metavar="NAME=WORD")
    s.add_argument("--max-len", type=int, required=True)
    s.add_argument("--injectivity-len", type=int, default=6)
    s.set_defaults(func=cmd_restrict)

    s = sub.add_parser("export-dot", parents=[common, group, ray], help="DOT for a level graph or a ball")
    s.add_argument("--level", type=int, default=1)
    s.add_argument("--ball", type=int, help="radius of a ball around the ray")
    s.add_argument("--name", default="schreier")
    s.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("xval", parents=[common, group, ray], help="cross-validation matrix")
    s.add_argument("--max-len", type=int, default=6)
    s.add_argument("--grammar", help="replace E by this file")
    s.add_argument("--grammar-neg", help="replace E' by this file")
    s.add_argument("--validate-len", type=int, default=4)
    s.add_argument("--rounds", type=int, default=4)
    s.set_defaults(func=cmd_xval)
    return p


def check_caps(args):
    for key in ("max_len", "max_deg", "level", "counts", "rounds", "ball", "validate_len"):
        v = getattr(args, key, None)
        if v is not None and v < 0:
            raise UsageError(f"--{key.replace('_', '-')} must be nonnegative")
    if getattr(args, "group", None) is None and args.command not in ("transduce",) and not getattr(args, "grammar", None):
        raise UsageError("--group FILE is required")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "csv", False):
        args.format = "csv"
    random.seed(args.seed)
    out = []
    try:
        check_caps(args)
        if args.command == "restrict" and not args.group:
            raise UsageError("restrict needs --group")
        code = args.func(args, out)
    except (OSError, UsageError, GroupDefinitionError, GrammarFormatError, UnknownGenerator, EmptyPeriod,
            GrammarError, InjectivityViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    text = "\n".join(out) + ("\n" if out else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
