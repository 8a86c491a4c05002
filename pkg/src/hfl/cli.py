"""Command-line front end.

Subcommands: songs symphony|play, hyperbox validate|compress,
grid check|homology|reduce, surgery homology|towers|check, coeff ss.
Output is deterministic (sorted TSV or JSON); exit codes: 0 success,
1 validation error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import songs as songs_mod
from . import grid as grid_mod
from . import hyperbox as hyperbox_mod
from .coeff.ring import TruncatedRing, RingMatrix, RingError
from .coeff.complexes import GradedComplex, ComplexError, homology_ranks
from .coeff.spectral import FilteredComplex, FilteredComplexError, spectral_sequence
from .coeff.towers import TowerError, infer_towers
from .surgery import lattice
from .surgery.lattice import Framing, LatticeError
from .surgery.model import (ModelError, hopf_model, model_from_json,
                            unknot_model)
from .surgery import complex as surgery_cx
from .surgery.complex import SurgeryError


class CliError(ValueError):
    pass


def parse_song(text: str):
    """Parse paper notation, e.g. (12{1,2}21); letters are single digits."""
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise CliError("songs are written between parentheses")
    items = []
    i = 1
    while i < len(text) - 1:
        ch = text[i]
        if ch == "{":
            j = text.index("}", i)
            inner = text[i + 1:j].strip()
            letters = [int(t) for t in inner.split(",") if t.strip()] if inner else []
            items.append(frozenset(letters))
            i = j + 1
        elif ch.isdigit():
            items.append(int(ch))
            i += 1
        else:
            raise CliError(f"unexpected character {ch!r} in song")
    return songs_mod.song(*items)


def parse_framing(text: str) -> Framing:
    rows = [r.strip() for r in text.split(";") if r.strip()]
    return Framing([[int(v) for v in r.split()] for r in rows])


def _print_table(rows, out):
    for row in rows:
        out.write("\t".join(str(c) for c in row) + "\n")


# -- songs ---------------------------------------------------------------------

def cmd_songs_symphony(args, out):
    alpha = songs_mod.standard_symphony(args.n)
    if args.count:
        out.write(f"{len(alpha)}\n")
        return 0
    if args.json:
        data = [songs_mod.format_song(s) for s in sorted(alpha.songs)]
        out.write(json.dumps(data, indent=1) + "\n")
        return 0
    for s in sorted(alpha.songs):
        out.write(songs_mod.format_song(s) + "\n")
    return 0


def _collection_from_json(data):
    ring = TruncatedRing(data["ring"]["num_vars"], data["ring"]["delta"])
    basis = list(data["basis"])
    alphabet = sorted(int(k) for k in data["alphabet"])
    elements = {}
    for key, entries in data["elements"].items():
        z = frozenset(int(t) for t in key.split(",") if t != "")
        mat = RingMatrix(ring)
        for e in entries:
            mat.add_entry(e["target"], e["source"],
                          ring.element([tuple(m) for m in e["monomials"]]))
        elements[z] = mat
    return songs_mod.HypercubicalCollection(alphabet, elements, basis, ring)


def cmd_songs_play(args, out):
    with open(args.file) as fh:
        data = json.load(fh)
    coll = _collection_from_json(data)
    sng = parse_song(args.song)
    register = {int(k): int(v) for k, v in
                (pair.split("=") for pair in args.register.split(","))}
    played = songs_mod.play_song(sng, coll, register)
    rows = []
    for t, s, v in sorted(played.entries(), key=lambda e: (str(e[1]), str(e[0]))):
        rows.append((s, t, v))
    if args.json:
        out.write(json.dumps([{"source": s, "target": t,
                               "monomials": [list(m) for m in v.sorted_monomials()]}
                              for s, t, v in rows], indent=1) + "\n")
    else:
        if not rows:
            out.write("0\n")
        for s, t, v in rows:
            out.write(f"{s}\t{t}\t{v}\n")
    return 0


# -- hyperbox -------------------------------------------------------------------

def cmd_hyperbox_validate(args, out):
    with open(args.file) as fh:
        box = hyperbox_mod.Hyperbox.from_json(fh.read())
    bad = box.validate()
    if bad is None:
        out.write("ok\n")
        return 0
    out.write(f"violation at (e0, e) = {bad}\n")
    return 1


def cmd_hyperbox_compress(args, out):
    with open(args.file) as fh:
        box = hyperbox_mod.Hyperbox.from_json(fh.read())
    cube = box.compress()
    out.write(cube.to_json() + "\n")
    return 0


# -- grid -----------------------------------------------------------------------

def cmd_grid_check(args, out):
    with open(args.file) as fh:
        g = grid_mod.parse_grid(fh.read())
    rows = [("n", g.n), ("components", g.ell), ("free_markings", g.q),
            ("generators", len(g.generators()))]
    for i in range(g.ell):
        for j in range(i + 1, g.ell):
            rows.append((f"lk({i + 1},{j + 1})", g.linking[i][j]))
    off = g.linking_offsets2()
    rows.append(("offsets", ",".join(grid_mod.format_s2_coord(o) for o in off)))
    if args.json:
        out.write(json.dumps(dict((str(k), v) for k, v in rows)) + "\n")
    else:
        _print_table(rows, out)
    return 0


def cmd_grid_homology(args, out):
    with open(args.file) as fh:
        g = grid_mod.parse_grid(fh.read())
    s2 = grid_mod.parse_s2(args.s, g.ell)
    cx = g.build_complex(s2, args.delta,
                         hat_variable=args.hat if args.hat >= 0 else None)
    ranks = homology_ranks(cx)
    rows = [(k, v) for k, v in sorted(ranks.items())]
    total = sum(v for _k, v in rows)
    if args.json:
        out.write(json.dumps({"ranks": {str(k): v for k, v in rows},
                              "total": total}) + "\n")
    else:
        _print_table([("grading", "rank")] + rows + [("total", total)], out)
    return 0


def cmd_grid_reduce(args, out):
    with open(args.file) as fh:
        g = grid_mod.parse_grid(fh.read())
    if args.destabilize:
        comps = [int(t) - 1 for t in args.destabilize.split(",")]
        g2 = g.quasi_destabilize(comps)
        out.write(g2.format())
        return 0
    oriented = {}
    for tok in args.orient.split(","):
        tok = tok.strip()
        sign = -1 if tok.startswith("-") else 1
        oriented[int(tok.lstrip("+-")) - 1] = sign
    marked = g.reduce(oriented)
    out.write(marked.format())
    return 0


# -- surgery --------------------------------------------------------------------

def _load_system(args):
    if args.file:
        with open(args.file) as fh:
            model, framing = model_from_json(fh.read())
        if args.framing:
            framing = parse_framing(args.framing)
        if framing is None:
            raise CliError("model file has no framing; pass --framing")
        return model, framing
    if args.model == "unknot":
        model = unknot_model()
        if not args.framing:
            raise CliError("--framing required for the unknot model")
        return model, parse_framing(args.framing)
    if args.model == "hopf":
        model, framing = hopf_model(args.p1, args.p2)
        if args.framing:
            framing = parse_framing(args.framing)
        return model, framing
    raise CliError("pass --model {unknot,hopf} or --file model.json")


def _mtilde(args):
    if args.mtilde:
        return tuple(int(t) for t in args.mtilde.split(","))
    return None


def _format_class(rep):
    return ",".join(grid_mod.format_s2_coord(v) for v in rep)


def _classes(model, framing, args):
    if args.spinc:
        s2 = grid_mod.parse_s2(args.spinc, model.ell)
        return [lattice.spinc_representative(s2, framing)]
    if framing.is_nondegenerate():
        return surgery_cx.spinc_classes(model, framing)
    raise CliError("degenerate framing: pass --spinc")


def cmd_surgery_homology(args, out):
    model, framing = _load_system(args)
    classes = _classes(model, framing, args)
    kw = {}
    if args.mode == "knot_b":
        kw["b"] = args.b
    if args.mode in ("combined", "folded"):
        kw["mtilde"] = _mtilde(args)
    rows = []
    details = {}
    for u in classes:
        sc = surgery_cx.assemble(model, framing, u, args.delta, args.mode,
                                 hat=args.hat if args.hat >= 0 else None, **kw)
        ranks = sc.homology()
        win = surgery_cx.window_rank(model, framing, u, args.delta, args.mode,
                                     **kw)
        label = _format_class(u)
        for k in sorted(ranks, key=lambda x: (x is None, x)):
            rows.append((label, "-" if k is None else k, ranks[k]))
        details[label] = {"ranks": {str(k): v for k, v in ranks.items()},
                          "total": sum(ranks.values()), "window": win}
    if args.json:
        out.write(json.dumps(details, indent=1, sort_keys=True) + "\n")
        return 0
    _print_table([("spinc", "grading", "rank")] + rows, out)
    for label in sorted(details):
        out.write(f"# window rank [{label}]: {details[label]['window']}\n")
    return 0


def cmd_surgery_towers(args, out):
    model, framing = _load_system(args)
    classes = _classes(model, framing, args)
    kw = {}
    if args.mode == "knot_b":
        kw["b"] = args.b
    if args.mode in ("combined", "folded"):
        kw["mtilde"] = _mtilde(args)
    rows = [("spinc", "window_ranks", "towers")]
    for u in classes:
        wins = []
        for d in range(1, args.dmax + 1):
            wins.append(surgery_cx.window_rank(model, framing, u, d, args.mode,
                                               **kw))
        profile = infer_towers(wins, factor=args.factor)
        rows.append((_format_class(u), ",".join(map(str, wins)),
                     profile.describe()))
    _print_table(rows, out)
    return 0


def cmd_surgery_check(args, out):
    model, framing = _load_system(args)
    classes = _classes(model, framing, args)
    kw = {}
    if args.mode == "knot_b":
        kw["b"] = args.b
    if args.mode in ("combined", "folded"):
        kw["mtilde"] = _mtilde(args)
    for u in classes:
        sc = surgery_cx.assemble(model, framing, u, args.delta, args.mode, **kw)
        sc.check_d_squared()
        graded = sc.grading() is not None
        out.write(f"{_format_class(u)}\tD^2=0\tgraded={'yes' if graded else 'no'}\n")
    if args.mode in ("combined", "folded") and framing.is_nondegenerate():
        failures = surgery_cx.check_truncation_witnesses(
            model, framing, classes[0], args.delta, args.mode,
            mtilde=_mtilde(args))
        if failures:
            out.write(f"warning: region too small; witness {failures[0]}\n")
        else:
            out.write("edge quasi-isomorphism witnesses: ok\n")
    return 0


# -- coeff ----------------------------------------------------------------------

def cmd_coeff_ss(args, out):
    with open(args.file) as fh:
        data = json.load(fh)
    ring = TruncatedRing(data["ring"]["num_vars"], data["ring"]["delta"])
    gens = [g["name"] for g in data["generators"]]
    grading = None
    if all("grading" in g for g in data["generators"]):
        grading = {g["name"]: g["grading"] for g in data["generators"]}
    level = {g["name"]: g["level"] for g in data["generators"]}
    diff = RingMatrix(ring)
    for e in data.get("differential", []):
        diff.add_entry(e["target"], e["source"],
                       ring.element([tuple(m) for m in e["monomials"]]))
    fc = FilteredComplex(GradedComplex(ring, gens, diff, grading), level)
    ss = spectral_sequence(fc)
    rows = [("page", "key", "rank")]
    for r in sorted(ss.pages):
        for key in sorted(ss.pages[r], key=str):
            rows.append((r, key, ss.pages[r][key]))
    rows.append(("infinity", "total", ss.infinity_total()))
    rows.append(("homology", "total", ss.total_homology))
    _print_table(rows, out)
    return 0


# -- driver ---------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="hfl",
                                description="Heegaard Floer link surgery "
                                            "calculator")
    sub = p.add_subparsers(dest="group", required=True)

    sp = sub.add_parser("songs").add_subparsers(dest="cmd", required=True)
    s1 = sp.add_parser("symphony")
    s1.add_argument("--n", type=int, required=True)
    s1.add_argument("--count", action="store_true")
    s1.add_argument("--json", action="store_true")
    s1.set_defaults(func=cmd_songs_symphony)
    s2 = sp.add_parser("play")
    s2.add_argument("--file", required=True)
    s2.add_argument("--song", required=True)
    s2.add_argument("--register", required=True,
                    help="letter=value pairs, e.g. 1=2,2=1")
    s2.add_argument("--json", action="store_true")
    s2.set_defaults(func=cmd_songs_play)

    hp = sub.add_parser("hyperbox").add_subparsers(dest="cmd", required=True)
    h1 = hp.add_parser("validate")
    h1.add_argument("--file", required=True)
    h1.set_defaults(func=cmd_hyperbox_validate)
    h2 = hp.add_parser("compress")
    h2.add_argument("--file", required=True)
    h2.set_defaults(func=cmd_hyperbox_compress)

    gp = sub.add_parser("grid").add_subparsers(dest="cmd", required=True)
    g1 = gp.add_parser("check")
    g1.add_argument("--file", required=True)
    g1.add_argument("--json", action="store_true")
    g1.set_defaults(func=cmd_grid_check)
    g2 = gp.add_parser("homology")
    g2.add_argument("--file", required=True)
    g2.add_argument("--s", required=True)
    g2.add_argument("--delta", type=int, default=1)
    g2.add_argument("--hat", type=int, default=-1,
                    help="variable index set to zero (hat flavor)")
    g2.add_argument("--json", action="store_true")
    g2.set_defaults(func=cmd_grid_homology)
    g3 = gp.add_parser("reduce")
    g3.add_argument("--file", required=True)
    g3.add_argument("--orient", default="",
                    help="oriented sublink, e.g. +1,-2 (1-based components)")
    g3.add_argument("--destabilize", default="",
                    help="components to quasi-destabilize, e.g. 1,2")
    g3.set_defaults(func=cmd_grid_reduce)

    up = sub.add_parser("surgery").add_subparsers(dest="cmd", required=True)
    for name, fn in (("homology", cmd_surgery_homology),
                     ("towers", cmd_surgery_towers),
                     ("check", cmd_surgery_check)):
        u = up.add_parser(name)
        u.add_argument("--model", choices=["unknot", "hopf"])
        u.add_argument("--file")
        u.add_argument("--p1", type=int, default=2)
        u.add_argument("--p2", type=int, default=2)
        u.add_argument("--framing", default="",
                       help='framing matrix, e.g. "2 1; 1 2"')
        u.add_argument("--delta", type=int, default=1)
        u.add_argument("--mode", default="folded",
                       choices=list(surgery_cx.MODES))
        u.add_argument("--b", type=int, default=None)
        u.add_argument("--mtilde", default="")
        u.add_argument("--spinc", default="")
        u.add_argument("--hat", type=int, default=-1)
        u.add_argument("--json", action="store_true")
        if name == "towers":
            u.add_argument("--dmax", type=int, default=3)
            u.add_argument("--factor", type=int, default=1)
        u.set_defaults(func=fn)

    cp = sub.add_parser("coeff").add_subparsers(dest="cmd", required=True)
    c1 = cp.add_parser("ss")
    c1.add_argument("--file", required=True)
    c1.set_defaults(func=cmd_coeff_ss)
    return p


VALIDATION_ERRORS = (CliError, RingError, ComplexError, FilteredComplexError,
                     TowerError, LatticeError, SurgeryError, ModelError,
                     grid_mod.GridError, hyperbox_mod.HyperboxError,
                     songs_mod.SongError, OSError, json.JSONDecodeError,
                     KeyError)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except VALIDATION_ERRORS as exc:
        msg = str(exc)
        if "internal invariant" in msg:
            sys.stderr.write(f"internal error: {msg}\n")
            return 2
        sys.stderr.write(f"error: {msg}\n")
        return 1
    except AssertionError as exc:  # internal invariant violations
        sys.stderr.write(f"internal error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
