"""JSON encoding of channels, distributions, auxiliary specs and types.

Probabilities are written as "p/q" strings when exact and as JSON numbers
otherwise. Alphabet labels may be strings, integers or nested lists; lists
are read back as tuples so that product labels round-trip.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .exponents import AuxSpec, RateTuple
from .measures import Channel, Distribution
from .typeclasses import CondType, TypeVector


class SpecError(ValueError):
    """Malformed input file or inconsistent problem specification."""


def _label_in(x):
    if isinstance(x, list):
        return tuple(_label_in(v) for v in x)
    if isinstance(x, (str, int)) and not isinstance(x, bool):
        return x
    raise SpecError(f"unsupported alphabet label {x!r}")


def _label_out(x):
    if isinstance(x, tuple):
        return [_label_out(v) for v in x]
    return x


def prob_out(p):
    if isinstance(p, Fraction):
        return str(p)
    return float(p)


def prob_in(p):
    if isinstance(p, bool):
        raise SpecError("booleans are not probabilities")
    if isinstance(p, str):
        try:
            return Fraction(p.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecError(f"cannot parse probability {p!r}") from exc
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, float):
        return p
    raise SpecError(f"cannot parse probability {p!r}")


def alphabet_in(a) -> tuple:
    if not isinstance(a, list) or not a:
        raise SpecError("an alphabet must be a non-empty list")
    return tuple(_label_in(x) for x in a)


def distribution_to_json(P: Distribution) -> dict:
    return {"alphabet": [_label_out(a) for a in P.alphabet],
            "probs": [prob_out(p) for p in P.probs]}


def distribution_from_json(d: dict) -> Distribution:
    try:
        return Distribution(alphabet_in(d["alphabet"]), [prob_in(p) for p in d["probs"]])
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed distribution: {exc}") from exc
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def channel_to_json(W: Channel) -> dict:
    return {"input": [_label_out(a) for a in W.input_alphabet],
            "output": [_label_out(b) for b in W.output_alphabet],
            "rows": [[prob_out(p) for p in r] for r in W.rows]}


def channel_from_json(d: dict) -> Channel:
    try:
        return Channel(alphabet_in(d["input"]), alphabet_in(d["output"]),
                       [[prob_in(p) for p in r] for r in d["rows"]])
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed channel: {exc}") from exc
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def aux_to_json(aux: AuxSpec) -> dict:
    return {"Q0": distribution_to_json(aux.Q0), "Q1": channel_to_json(aux.Q1),
            "Vt": channel_to_json(aux.Vt)}


def aux_from_json(d: dict, x_alphabet=None) -> AuxSpec:
    """Parse an aux spec. ``Vt`` may be the string "identity" (requires Xt = X)."""
    if d.get("trivial"):
        if x_alphabet is None:
            raise SpecError("trivial aux needs the channel input alphabet")
        dist = distribution_from_json(d["input"]) if "input" in d else None
        return AuxSpec.trivial(x_alphabet, dist)
    try:
        Q0 = distribution_from_json(d["Q0"])
        Q1 = channel_from_json(d["Q1"])
        vt = d.get("Vt", "identity")
        if vt == "identity":
            Vt = Channel.identity(Q1.output_alphabet).extend(Q0.alphabet)
        else:
            Vt = channel_from_json(vt)
        return AuxSpec(Q0, Q1, Vt)
    except KeyError as exc:
        raise SpecError(f"aux spec is missing {exc}") from exc
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def aux_list_from_json(d, x_alphabet=None) -> list[AuxSpec]:
    items = d if isinstance(d, list) else d.get("aux", [d]) if isinstance(d, dict) else None
    if not items:
        raise SpecError("expected an aux spec or a non-empty list of them")
    return [aux_from_json(a, x_alphabet) for a in items]


def channels_from_json(d: dict) -> dict:
    """{"W_b": ch, "W_e": ch, optional "prefix": ch} with a shared input alphabet."""
    if not isinstance(d, dict) or "W_b" not in d or "W_e" not in d:
        raise SpecError("channels file needs W_b and W_e")
    out = {"W_b": channel_from_json(d["W_b"]), "W_e": channel_from_json(d["W_e"])}
    if out["W_b"].input_alphabet != out["W_e"].input_alphabet:
        raise SpecError("W_b and W_e must share an input alphabet")
    if "prefix" in d:
        out["prefix"] = channel_from_json(d["prefix"])
        if out["prefix"].output_alphabet != out["W_b"].input_alphabet:
            raise SpecError("prefix output alphabet must equal the channel input alphabet")
    return out


def channels_to_json(W_b: Channel, W_e: Channel, prefix: Channel | None = None) -> dict:
    d = {"W_b": channel_to_json(W_b), "W_e": channel_to_json(W_e)}
    if prefix is not None:
        d["prefix"] = channel_to_json(prefix)
    return d


def rates_to_json(r: RateTuple) -> dict:
    return {"R_M": r.R_M, "R_L": r.R_L, "R_lam": r.R_lam, "R": r.R, "R_J": r.R_J}


def rates_from_json(d: dict) -> RateTuple:
    try:
        return RateTuple(**{k: float(d.get(k, 0.0)) for k in ("R_M", "R_L", "R_lam", "R", "R_J")})
    except (TypeError, ValueError) as exc:
        raise SpecError(f"malformed rates: {exc}") from exc


def type_to_json(t: TypeVector) -> dict:
    return {"alphabet": [_label_out(a) for a in t.alphabet], "counts": list(t.counts)}


def type_from_json(d: dict) -> TypeVector:
    try:
        return TypeVector(alphabet_in(d["alphabet"]), d["counts"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed type: {exc}") from exc


def cond_type_to_json(V: CondType) -> dict:
    return {"input": [_label_out(a) for a in V.input_alphabet],
            "output": [_label_out(b) for b in V.output_alphabet],
            "counts": [list(r) for r in V.counts]}


def cond_type_from_json(d: dict) -> CondType:
    try:
        return CondType(alphabet_in(d["input"]), alphabet_in(d["output"]), d["counts"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed conditional type: {exc}") from exc


def to_jsonable(obj: Any):
    """Fractions to strings, tuples to lists, numpy scalars to Python numbers."""
    import numpy as np

    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise SpecError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc})") from exc


def data_path(name: str) -> Path:
    return Path(__file__).parent / "data" / name


