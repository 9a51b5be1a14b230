"""Command-line front end: ``gact <subcommand> ...``.

Exit codes: 0 on success, 1 on domain errors (a JSON error object is written
to stderr), 2 on usage errors.  Randomness comes from ``--seed`` or, failing
that, the ``GACT_SEED`` environment variable (default 0).
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Sequence

from .errors import FormulaSyntaxError, GactError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(args, payload, text: str | None = None):
    if args.json or text is None:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    raw = os.environ.get("GACT_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GACT_SEED must be an integer, got {raw!r}") from None


def _list(text: str | None) -> list[str]:
    if not text:
        return []
    return [x.strip() for x in text.split(",") if x.strip()]


def _load_model(path: str):
    from .structure import GStructure

    try:
        with open(path) as fh:
            return GStructure.loads(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _group(name: str):
    from .group import load_group

    try:
        return load_group(name)
    except OSError:
        raise UsageError(f"unknown group {name!r}") from None


# ------------------------------------------------------------------ commands

def cmd_group(args):
    from .group import epimorphisms, frattini_subgroup, is_frattini_cover, subgroups

    g = _group(args.name)
    if args.action == "info":
        subs = subgroups(g)
        payload = {"order": g.order, "names": list(g.names),
                   "subgroups": [[g.names[x] for x in h.members] for h in subs],
                   "frattini": [g.names[x] for x in frattini_subgroup(g).members]}
        text = (f"order {g.order}\nelements {' '.join(g.names)}\n"
                f"subgroups {len(subs)}\nfrattini {{{','.join(payload['frattini'])}}}")
        _emit(args, payload, text)
    else:
        if not args.target:
            raise UsageError("frattini needs --target")
        h = _group(args.target)
        epis = epimorphisms(g, h)
        if not epis:
            raise UsageError(f"no epimorphism from {args.name} onto {args.target}")
        rows = [{"map": [h.names[x] for x in pi.map], "frattini": is_frattini_cover(pi)} for pi in epis]
        _emit(args, {"epimorphisms": rows},
              "\n".join(f"{' '.join(r['map'])}: {str(r['frattini']).lower()}" for r in rows))


def cmd_saturate(args):
    from .generic import SaturationState, saturate_empty, saturate_graph

    g = _group(args.group)
    st = SaturationState.empty(g, args.theory)
    if args.theory == "graph":
        cap = args.cap if args.cap is not None else args.cap_size
        st = saturate_graph(st, args.rounds, size_cap=cap, n_bound=args.n, n_prime_bound=args.n_prime)
    else:
        st = saturate_empty(st, copies=args.rounds)
    body = st.current.dumps()
    log = [json.dumps(entry, sort_keys=True) for entry in st.log]
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body + "\n")
        if args.log:
            with open(args.log, "w") as fh:
                fh.write("".join(line + "\n" for line in log))
        else:
            for line in log:
                print(line)
    else:
        print(body)
        if args.log:
            with open(args.log, "w") as fh:
                fh.write("".join(line + "\n" for line in log))
    summary = {"size": st.current.size, "rounds": st.round, "truncated": st.truncated}
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)


def _formula(args, group, free=None):
    from .logic import parse

    return parse(args.formula, group, free)


def cmd_qe(args):
    from .logic import qe, to_text

    g = _group(args.group)
    res = qe(_formula(args, g), g, args.theory, route=args.route)
    out = to_text(res.output, g)
    payload = {"input": to_text(res.input, g), "output": out}
    if args.certificate:
        payload["certificate"] = list(res.certificate)
    _emit(args, payload, out)


def cmd_decide(args):
    from .logic import decide_sentence

    g = _group(args.group)
    try:
        val = decide_sentence(args.theory, g, _formula(args, g), route=args.route)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, {"value": val}, str(val).lower())


def _assignment(text: str | None) -> dict[str, str]:
    out = {}
    for item in _list(text):
        if "=" not in item:
            raise UsageError(f"bad assignment {item!r}; expected var=element")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_eval(args):
    from .logic import evaluate

    m = _load_model(args.model)
    phi = _formula(args, m.group)
    val = evaluate(m, phi, _assignment(args.assign))
    _emit(args, {"value": val}, str(val).lower())


def cmd_indep(args):
    from .independence import RELATIONS, IndepQuery, indep

    m = _load_model(args.model)
    q = IndepQuery(frozenset(_list(args.a)), frozenset(_list(args.e)), frozenset(_list(args.b)), m)
    val = indep(q, RELATIONS[args.relation])
    _emit(args, {"independent": val}, str(val).lower())


def cmd_indep_axioms(args):
    from .independence import check_axioms

    groups = _list(args.group) or ["z2", "z3", "z2xz2"]
    report = check_axioms(args.theory, [_group(x) for x in groups], trials=args.trials,
                          seed=_seed(args), relation=args.relation)
    text = report.dumps()
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text + "\n")
    counts = {k: v for k, v in report.failed.items()}
    _emit(args, {"ok": report.ok, "failed": counts},
          "\n".join(f"{k}: {report.trials[k]} trials, {v} failed" for k, v in counts.items()))


def cmd_indep_amalgam(args):
    from .independence import independence_theorem_check, random_theorem_instance

    g = _group(args.group)
    rng = random.Random(_seed(args))
    rows = []
    for _ in range(args.instances):
        n, mset, a, b, c1, c2 = random_theorem_instance(g, rng, args.theory)
        res = independence_theorem_check(n, mset, a, b, c1, c2, theory=args.theory)
        rows.append({"size": res.structure.size, "c": [res.structure.universe[x] for x in res.c],
                     "independent": res.independent})
    ok = all(r["independent"] for r in rows)
    _emit(args, {"instances": rows, "ok": ok},
          f"{sum(r['independent'] for r in rows)}/{len(rows)} amalgams verified")


def cmd_galois(args):
    from .galois import FiniteExtension, aut_group, alpha, beta, galois_connection_check

    m = _load_model(args.model)
    whole = _list(args.whole) or list(m.universe)
    ext = FiniteExtension(m, frozenset(_list(args.base)), frozenset(whole), args.preserve_action)
    bound = args.cap_size if args.cap_size is not None else 12
    labels = m.universe

    def perms(h):
        return [[labels[x] for x in p] for p in sorted(h.elements)]

    if args.action == "check":
        rep = galois_connection_check(ext, bound)
        _emit(args, rep.to_json(),
              f"laws {str(rep.laws_hold).lower()}\n"
              f"full correspondence {str(rep.full_correspondence).lower()}")
        return
    aut = aut_group(ext, bound)
    if args.action == "aut":
        _emit(args, {"domain": [labels[x] for x in aut.domain], "order": aut.order,
                     "elements": perms(aut)}, f"order {aut.order}")
        return
    if args.inter is None:
        raise UsageError(f"galois {args.action} needs --inter")
    b = frozenset(_list(args.inter)) | set(_list(args.base))
    h = alpha(ext, b, aut)
    if args.action == "alpha":
        _emit(args, {"domain": [labels[x] for x in h.domain], "order": h.order,
                     "elements": perms(h)}, f"order {h.order}")
    else:
        fixed = sorted(labels[x] for x in beta(ext, h, aut))
        _emit(args, {"fixed": fixed}, ",".join(fixed))


def cmd_config(args):
    from .config import ENTRY_NAMES, Configuration, TermSet, enumerate_extensions, is_consistent

    g = _group(args.group)
    terms = TermSet(g, args.n, args.n_prime)
    if args.action == "enumerate":
        limit = args.cap_nodes
        qs = enumerate_extensions([], terms, limit=limit)
        rows = [[list(t) for t in q.to_triples()] for q in qs]
        _emit(args, {"count": len(qs), "configurations": rows}, str(len(qs)))
        return
    if not args.entries:
        raise UsageError("config check needs --entries")
    names = _list(args.entries)
    try:
        vals = [ENTRY_NAMES.index(x.upper()) for x in names]
    except ValueError:
        raise UsageError(f"entries must be among {ENTRY_NAMES}") from None
    k = terms.size * (terms.size - 1) // 2
    if len(vals) != k:
        raise UsageError(f"expected {k} entries for pairs i<j, got {len(vals)}")
    rep = is_consistent(Configuration.from_pairs(terms, vals))
    payload = {"consistent": rep.consistent, "violation": rep.violation}
    if rep.witness is not None:
        payload["witness"] = rep.witness.to_json()
    _emit(args, payload, "consistent" if rep.consistent else f"inconsistent: {rep.violation}")


def _atom_action(g, specs: Sequence[str] | None, k: int) -> dict[int, list[int]]:
    out = {}
    for spec in specs or ():
        if "=" not in spec:
            raise UsageError(f"bad --atom-action {spec!r}; expected ELT=p1,p2,...")
        name, perm = spec.split("=", 1)
        try:
            elt = g.index(name.strip())
        except KeyError:
            raise UsageError(f"unknown group element {name!r}") from None
        p = [int(x) - 1 for x in _list(perm)]
        if sorted(p) != list(range(k)):
            raise UsageError(f"{perm!r} is not a permutation of 1..{k}")
        out[elt] = p
    return out


def cmd_boolring(args):
    from .boolring import (check_diamond_axiom, find_non_atom_witness, parse_ideal,
                           powerset_ring, sigma_bar)

    g = _group(args.group)
    ring = powerset_ring(args.atoms, g, _atom_action(g, args.atom_action, args.atoms))
    if args.action == "diamond":
        if not (args.gens_i and args.gens_j):
            raise UsageError("diamond needs --gens-i and --gens-j")
        i = parse_ideal(_read_text(args.gens_i), ring, args.n)
        j = parse_ideal(_read_text(args.gens_j), ring, args.n)
        cap = args.cap_nodes if args.cap_nodes is not None else 2 ** 20
        r = check_diamond_axiom(ring, i, j, args.n, cap=cap)
        if r is None:
            _emit(args, {"witness": None}, "none")
        else:
            wit = [ring.text(x) for x in r]
            _emit(args, {"witness": wit, "sigma_bar": [ring.text(x) for x in sigma_bar(ring, r)]},
                  " ".join(wit))
        return
    if args.element is None:
        raise UsageError("nonatom needs --element")
    text = args.element.strip()
    if text in ("0", "1"):
        r = ring.one if text == "1" else 0
    else:
        r = ring.element(_list(text.strip("{}")))
    w = find_non_atom_witness(ring, r)
    _emit(args, {"atoms": list(w.ring.atoms), "y": w.ring.labels(w.y),
                 "r": w.ring.labels(w.embed(r))},
          f"y = {w.ring.text(w.y)} in a ring with {len(w.ring.atoms)} atoms")


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--cap-nodes", type=int, default=None)
    common.add_argument("--cap-size", type=int, default=None)
    common.add_argument("--json", action="store_true")

    p = _Parser(prog="gact", description="Finite group actions on structures.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    theories = ("graph", "empty")

    sp = add("group", cmd_group, "group facts and Frattini covers")
    sp.add_argument("action", choices=("info", "frattini"))
    sp.add_argument("name")
    sp.add_argument("--target")

    sp = add("saturate", cmd_saturate, "build an approximation of the generic model")
    sp.add_argument("--theory", choices=theories, default="graph")
    sp.add_argument("--group", required=True)
    sp.add_argument("--rounds", type=int, default=1)
    sp.add_argument("--cap", type=int, default=None)
    sp.add_argument("--n", type=int, default=1, help="parameter bound per axiom instance")
    sp.add_argument("--n-prime", type=int, default=1, help="witness bound per axiom instance")
    sp.add_argument("--out")
    sp.add_argument("--log")

    for name, fn, help in (("qe", cmd_qe, "eliminate quantifiers"),
                           ("decide", cmd_decide, "decide a sentence")):
        sp = add(name, fn, help)
        sp.add_argument("--theory", choices=theories, default="graph")
        sp.add_argument("--group", required=True)
        sp.add_argument("--formula", required=True)
        sp.add_argument("--route", choices=("orbit", "config"), default="orbit")
        if name == "qe":
            sp.add_argument("--certificate", action="store_true")

    sp = add("eval", cmd_eval, "evaluate a formula in a structure file")
    sp.add_argument("--model", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--assign", help="comma list var=element")

    sp = add("indep", cmd_indep, "test A independent from B over E")
    sp.add_argument("--model", required=True)
    for flag in ("--a", "--e", "--b"):
        sp.add_argument(flag, default="")
    sp.add_argument("--relation", choices=("orbit", "plain", "open-base"), default="orbit")

    sp = add("indep-axioms", cmd_indep_axioms, "randomized axiom check")
    sp.add_argument("--theory", choices=theories, default="graph")
    sp.add_argument("--group", help="comma list of groups")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--relation", choices=("orbit", "plain", "open-base"), default="orbit")
    sp.add_argument("--report")

    sp = add("indep-amalgam", cmd_indep_amalgam, "independence theorem on random instances")
    sp.add_argument("--theory", choices=theories, default="graph")
    sp.add_argument("--group", required=True)
    sp.add_argument("--instances", type=int, default=10)

    sp = add("galois", cmd_galois, "automorphism groups of finite extensions")
    sp.add_argument("action", choices=("aut", "alpha", "beta", "check"))
    sp.add_argument("--model", required=True)
    sp.add_argument("--base", default="")
    sp.add_argument("--inter")
    sp.add_argument("--whole", help="the extension C (default: the whole model)")
    sp.add_argument("--preserve-action", action="store_true")

    sp = add("config", cmd_config, "configurations over a term set")
    sp.add_argument("action", choices=("enumerate", "check"))
    sp.add_argument("--group", required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--n-prime", type=int, default=1)
    sp.add_argument("--entries", help="comma list of EQ/R/NR over pairs i<j")

    sp = add("boolring", cmd_boolring, "Boolean rings with a group action")
    sp.add_argument("action", choices=("diamond", "nonatom"))
    sp.add_argument("--atoms", type=int, required=True)
    sp.add_argument("--group", required=True)
    sp.add_argument("--atom-action", action="append", help="ELT=p1,p2,... (1-based); repeatable")
    sp.add_argument("--gens-i")
    sp.add_argument("--gens-j")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--element", help="ring element such as {1,2} or 1")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.fn(args)
    except UsageError as exc:
        print(f"gact: error: {exc}", file=sys.stderr)
        return 2
    except FormulaSyntaxError as exc:
        print(json.dumps(exc.to_json(), sort_keys=True), file=sys.stderr)
        return 2
    except GactError as exc:
        print(json.dumps(exc.to_json(), sort_keys=True), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
