"""Command-line front end.

JSON results go to stdout (or files under --out), a short human summary to
stderr. Exit codes: 0 success (an empty region is reported with
"empty": true), 2 malformed input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import sys
from pathlib import Path

from . import examples as ex
from .codec import (
    BudgetExceeded,
    Codebook,
    exact_fault_probabilities,
    monte_carlo_fault_probabilities,
    optimal_list_attack,
    overlap_statistics,
    sample_random_code,
)
from .exponents import AuxSpec, RateTuple, exponent_triple
from .io import (
    SpecError,
    aux_from_json,
    aux_list_from_json,
    channel_from_json,
    channel_to_json,
    channels_from_json,
    cond_type_from_json,
    distribution_from_json,
    distribution_to_json,
    dumps,
    load_json,
    cond_type_to_json,
    type_from_json,
    type_to_json,
)
from .measures import compose
from .polytope import LinearSystem, Polytope, membership_many, project, vertex_enumeration
from .region import (
    FAMILIES,
    gnuplot_data,
    irredundant_families,
    mi_quantities,
    raw_constraints,
    rate_region,
)
from .typeclasses import (
    TypeVector,
    enumerate_cond_types,
    enumerate_types,
    shell_size,
    type_class_size,
)

EXIT_SPEC = 2
EXIT_BUDGET = 3


def _emit(obj, out: Path | None, name: str) -> None:
    text = dumps(obj) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _unit(args):
    """Scale factor and unit name for human summaries (results stay in nats)."""
    return (1 / math.log(2), "bits") if getattr(args, "bits", False) else (1.0, "nats")


def _load_problem(args):
    ch = channels_from_json(load_json(args.channels))
    return ch["W_b"], ch["W_e"], ch.get("prefix")


def _sweep(d: dict, x_alphabet) -> list[AuxSpec]:
    """Product of candidate Q0, Q1 and Vt lists."""
    s = d["sweep"]
    q0s = [distribution_from_json(q) for q in s["Q0"]]
    q1s = [channel_from_json(q) for q in s["Q1"]]
    vts = s.get("Vt", ["identity"])
    out = []
    for Q0, Q1, vt in itertools.product(q0s, q1s, vts):
        out.append(aux_from_json({"Q0": distribution_to_json(Q0), "Q1": channel_to_json(Q1),
                                  "Vt": vt}, x_alphabet))
    return out


def _load_aux(path, x_alphabet) -> list[AuxSpec]:
    d = load_json(path)
    if isinstance(d, dict) and "sweep" in d:
        return _sweep(d, x_alphabet)
    return aux_list_from_json(d, x_alphabet)


def _with_prefix(aux: AuxSpec, prefix):
    """Fold a channels-file prefix into an aux spec whose Xt is the prefix input."""
    if prefix is None:
        return aux
    return AuxSpec(aux.Q0, aux.Q1, compose(aux.Vt, prefix))


# subcommands -----------------------------------------------------------------


def cmd_region(args) -> int:
    W_b, W_e, prefix = _load_problem(args)
    x_alph = (prefix.input_alphabet if prefix is not None else W_b.input_alphabet)
    auxes = [_with_prefix(a, prefix) for a in _load_aux(args.aux, x_alph)]
    reg = rate_region(W_b, W_e, auxes, box_cap=args.box_cap)
    out = Path(args.out) if args.out else None
    items = []
    for i, (q, sys_, poly) in enumerate(zip(reg.quantities, reg.systems, reg.polytopes)):
        vs = vertex_enumeration(poly)
        fam = irredundant_families(sys_) if not poly.empty else {f: False for f in FAMILIES}
        facet_labels = [c.label for c in poly.facets]
        items.append({"index": i, "quantities": q.as_dict(), "empty": poly.empty,
                      "irredundant_families": fam, "facets": poly.to_json(),
                      "facet_labels": facet_labels, "vertices": [list(p) for p in vs.points]})
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            (out / f"region_{i}_facets.json").write_text(dumps(poly.to_json()) + "\n")
            (out / f"region_{i}_vertices.csv").write_text(vs.to_csv())
            (out / f"region_{i}.dat").write_text(gnuplot_data(poly, vs))
        k, unit = _unit(args)
        _say(f"aux {i}: largest MI {k * q.largest:.4g} {unit}; "
             f"{'empty' if poly.empty else f'{len(poly.facets)} facets, {len(vs.points)} vertices'}")
    _emit({"variables": ["R_M", "R_L", "R_lam"], "empty": reg.empty, "regions": items,
           "label": "inner bound"}, out, "region.json")
    return 0


def cmd_exponents(args) -> int:
    W_b, W_e, prefix = _load_problem(args)
    x_alph = prefix.input_alphabet if prefix is not None else W_b.input_alphabet
    auxes = [_with_prefix(a, prefix) for a in _load_aux(args.aux, x_alph)]
    try:
        r = RateTuple(R_M=args.R_M, R_L=args.R_L, R_lam=args.R_lam, R=args.R, R_J=args.R_J)
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    results = []
    for aux in auxes:
        t = exponent_triple(W_b, W_e, aux, r, grid=args.grid, tol=args.tol)
        q = mi_quantities(W_b, W_e, aux)
        point = [r.R, r.R_J, r.R_M, r.R_L, r.R_lam]
        inside = bool(membership_many(raw_constraints(q), [point], strict=True)[0])
        results.append({
            "E_b": t.E_b, "E_e": t.E_e, "S_e": t.S_e,
            "minimizing_V": {k: channel_to_json(v.minimizer) for k, v in t.details.items()},
            "tolerance": {k: v.tolerance for k, v in t.details.items()},
            "rates_inside_positivity_region": inside,
            "label": "lower bound (inner)",
        })
        k, unit = _unit(args)
        _say(f"E_b={k * t.E_b:.6g} E_e={k * t.E_e:.6g} S_e={k * t.S_e:.6g} ({unit})")
    _emit(results[0] if len(results) == 1 else results, None, "")
    return 0


def _load_code(d: dict, x_alphabet, args=None) -> Codebook:
    """Explicit codewords, or a random constant-composition code from Q0/Q1.

    Command-line J, L, M and seed values override the ones in the file.
    """
    if "codewords" in d:
        return Codebook.from_codewords(d["codewords"], d.get("x_alphabet", list(x_alphabet)))
    d = dict(d)
    for key in ("J", "L", "M"):
        if args is not None and getattr(args, key, None) is not None:
            d[key] = getattr(args, key)
    seed = args.code_seed if args is not None and args.code_seed is not None else d.get("seed", 0)
    try:
        Q0, Q1 = type_from_json(d["Q0"]), cond_type_from_json(d["Q1"])
        if args is not None and args.n is not None and args.n != Q0.n:
            raise SpecError(f"--n {args.n} disagrees with the block length {Q0.n} of Q0")
        return sample_random_code(Q0, Q1, int(d["J"]), int(d["L"]), int(d["M"]), seed)
    except KeyError as exc:
        raise SpecError(f"code spec is missing {exc}") from exc


def _per_message_csv(per) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "l", "e_b", "e_e", "s_e"])
    for (m, l), vals in sorted(per.items()):
        w.writerow([m, l] + [str(v) for v in vals])
    return buf.getvalue()


def cmd_simulate(args) -> int:
    W_b, W_e, prefix = _load_problem(args)
    x_alph = prefix.input_alphabet if prefix is not None else W_b.input_alphabet
    cb = _load_code(load_json(args.code), x_alph, args)
    if prefix is not None:
        W_b, W_e = compose(prefix, W_b), compose(prefix, W_e)
    attack = optimal_list_attack(cb, W_e, args.lam, budget=args.budget)
    if args.samples:
        res = monte_carlo_fault_probabilities(cb, W_b, W_e, attack, args.samples, args.seed)
        _say(f"Monte Carlo ({args.samples} samples): e_b={res['e_b']:.4g} "
             f"e_e={res['e_e']:.4g} s_e={res['s_e']:.4g}")
        _emit(res, None, "")
        return 0
    rep = exact_fault_probabilities(cb, W_b, W_e, attack, budget=args.budget)
    _say(f"e_b={rep.e_b} e_e={rep.e_e} s_e={rep.s_e}")
    if args.csv:
        Path(args.csv).write_text(_per_message_csv(rep.per_message))
    _emit({"e_b": rep.e_b, "e_e": rep.e_e, "s_e": rep.s_e, "exact": rep.exact,
           "n": cb.n, "J": cb.J, "L": cb.L, "M": cb.M, "lam": args.lam}, None, "")
    return 0


def cmd_overlap(args) -> int:
    d = load_json(args.spec)
    try:
        Q0, Q1, V = type_from_json(d["Q0"]), cond_type_from_json(d["Q1"]), cond_type_from_json(d["V"])
        J = int(d["J"])
    except KeyError as exc:
        raise SpecError(f"overlap spec is missing {exc}") from exc
    rep = overlap_statistics(Q0, Q1, V, J, args.samples, args.seed, delta=args.delta)
    _say(f"mean count at z = {rep.mean_at_z:.4f} +- {rep.stderr_at_z:.4f}; "
         f"expected {float(rep.expected_at_z):.4f}")
    _emit({"J": rep.J, "samples": rep.samples, "z": list(rep.z.symbols),
           "max_histogram": rep.max_histogram, "mean_at_z": rep.mean_at_z,
           "stderr_at_z": rep.stderr_at_z, "expected_at_z": rep.expected_at_z,
           "delta": rep.delta, "tail_frequency": rep.tail_frequency,
           "tail_bound": rep.tail_bound}, None, "")
    return 0


def cmd_project(args) -> int:
    d = load_json(args.system)
    try:
        sys_ = LinearSystem.from_json(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed system: {exc}") from exc
    keep = [k.strip() for k in args.keep.split(",") if k.strip()]
    try:
        out = project(sys_, keep)
    except KeyError as exc:
        raise SpecError(str(exc)) from exc
    poly = Polytope.closure_of(out)
    res = {"system": out.to_json(), "empty": poly.empty}
    if args.vertices:
        res["vertices"] = vertex_enumeration(poly).to_json()
    _say(f"{len(out.constraints)} constraints over {', '.join(keep)}")
    _emit(res, None, "")
    return 0


def _alphabet_arg(text: str) -> list:
    alphabet = [a.strip() for a in text.split(",")]
    if len(set(alphabet)) != len(alphabet) or not all(alphabet):
        raise SpecError("alphabet labels must be distinct and non-empty")
    return alphabet


def cmd_types(args) -> int:
    alphabet = _alphabet_arg(args.alphabet)
    if args.action == "enumerate":
        if args.n is None or args.n < 1:
            raise SpecError("types enumerate needs a positive --n")
        types = enumerate_types(args.n, alphabet)
        rows = [{"type": type_to_json(t), "class_size": type_class_size(t)} for t in types]
        total = sum(r["class_size"] for r in rows)
        _say(f"{len(types)} types, total {total} = {len(alphabet)}^{args.n}")
        _emit({"n": args.n, "alphabet": alphabet, "types": rows, "total": total}, None, "")
        return 0
    if args.counts is None:
        raise SpecError("types sizes needs --counts")
    try:
        Q = TypeVector(alphabet, [int(c) for c in args.counts.split(",")])
    except ValueError as exc:
        raise SpecError(f"bad counts: {exc}") from exc
    res = {"type": type_to_json(Q), "class_size": type_class_size(Q)}
    if args.out_alphabet:
        out_alph = _alphabet_arg(args.out_alphabet)
        shells = [{"V": cond_type_to_json(V), "shell_size": shell_size(Q, V)}
                  for V in enumerate_cond_types(Q, out_alph)]
        res["shells"] = shells
        res["shell_total"] = sum(r["shell_size"] for r in shells)
        _say(f"|T_Q| = {res['class_size']}; {len(shells)} conditional types, "
             f"shell sizes sum to {res['shell_total']} = {len(out_alph)}^{Q.n}")
    else:
        _say(f"|T_Q| = {res['class_size']}")
    _emit(res, None, "")
    return 0


def cmd_examples(args) -> int:
    name = args.name
    if name == "junkdata":
        res = ex.junkdata()
        _say(f"e_b = {res['e_b']}, s_e = {res['s_e']} (Eve's error {res['eve_error']})")
    elif name == "perfect":
        res = ex.perfect()
        _say("success probability: " + ", ".join(
            f"{k}: {v['a_priori']} without / {v['a_posteriori']} with observation"
            for k, v in res.items() if k.startswith("k=")))
    elif name == "prefix":
        res = ex.prefix()
        _say(f"max row deviation of Vt W_e: {res['max_row_deviation']}; "
             f"Vt W_b identity: {res['VW_b_is_identity']}")
    else:
        W_b, W_e, aux = ex.korner()
        reg = rate_region(W_b, W_e, [aux])
        poly = reg.polytopes[0]
        fam = irredundant_families(reg.systems[0])
        res = {"quantities": reg.quantities[0].as_dict(), "irredundant_families": fam,
               "facets": poly.to_json(),
               "vertices": [list(p) for p in vertex_enumeration(poly).points]}
        _say("irredundant families: " + ", ".join(f for f, ok in fam.items() if ok))
    _emit(res, None, "")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wiretap-tradeoff", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def problem(sp):
        sp.add_argument("--channels", required=True, help="JSON with W_b, W_e and optional prefix")

    sp = sub.add_parser("region", help="rate-region polytopes in (R_M, R_L, R_lam)")
    problem(sp)
    sp.add_argument("--aux", required=True, help="aux spec, list of specs or a sweep spec")
    sp.add_argument("--out", help="directory for facets JSON, vertices CSV and gnuplot data")
    sp.add_argument("--box-cap", type=float, default=None,
                    help="rate cap for vertex enumeration (default 2x the largest MI)")
    sp.add_argument("--bits", action="store_true", help="summaries in bits (JSON stays in nats)")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("exponents", help="exponent lower bounds at a rate tuple")
    problem(sp)
    sp.add_argument("--aux", required=True)
    for name in ("R_M", "R_L", "R_lam", "R", "R_J"):
        sp.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float,
                        default=0.0, help="nats per channel use")
    sp.add_argument("--grid", type=float, default=1 / 32, help="row grid step")
    sp.add_argument("--tol", type=float, default=1e-6, help="final refinement step")
    sp.add_argument("--bits", action="store_true", help="summaries in bits (JSON stays in nats)")
    sp.set_defaults(func=cmd_exponents)

    sp = sub.add_parser("simulate", help="exact or Monte Carlo fault probabilities of a code")
    problem(sp)
    sp.add_argument("--code", required=True, help="explicit codewords or a random-code spec")
    sp.add_argument("--lam", type=int, default=1, help="eavesdropper list size")
    sp.add_argument("--samples", type=int, default=0, help="Monte Carlo samples (0: exact)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=None, help="max enumerated sequences")
    sp.add_argument("--J", type=int, default=None, help="override the code spec")
    sp.add_argument("--L", type=int, default=None, help="override the code spec")
    sp.add_argument("--M", type=int, default=None, help="override the code spec")
    sp.add_argument("--n", type=int, default=None, help="expected block length (checked)")
    sp.add_argument("--code-seed", type=int, default=None, help="seed of the random code")
    sp.add_argument("--csv", help="write per-(m,l) conditional fault probabilities here")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("overlap", help="overlap counts of sampled satellite shells")
    sp.add_argument("--spec", required=True, help="JSON with Q0, Q1, V and J")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.set_defaults(func=cmd_overlap)

    sp = sub.add_parser("project", help="Fourier-Motzkin projection of a linear system")
    sp.add_argument("--system", required=True, help="JSON linear system")
    sp.add_argument("--keep", required=True, help="comma-separated variables to keep")
    sp.add_argument("--vertices", action="store_true", help="also enumerate vertices")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("types", help="types, type classes and shells")
    sp.add_argument("action", choices=["enumerate", "sizes"])
    sp.add_argument("--alphabet", required=True, help="comma-separated labels")
    sp.add_argument("--n", type=int, help="block length (enumerate)")
    sp.add_argument("--counts", help="comma-separated type counts (sizes)")
    sp.add_argument("--out-alphabet", help="also list conditional types and shell sizes")
    sp.set_defaults(func=cmd_types)

    sp = sub.add_parser("examples", help="built-in worked examples")
    sp.add_argument("name", choices=["junkdata", "perfect", "prefix", "korner"])
    sp.set_defaults(func=cmd_examples)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        _say(f"error: {exc}")
        return EXIT_SPEC
    except BudgetExceeded as exc:
        _say(f"budget exceeded: {exc}")
        return EXIT_BUDGET
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_SPEC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
