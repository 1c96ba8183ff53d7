"""Job files, certificate serialization and the re-verification pass.

Everything is JSON with sorted keys and a ``schema`` field. Rationals are
strings ``"p"`` or ``"p/q"``; integer fields may be JSON integers. Floats and
decimal strings are rejected so nothing inexact can slip into a certificate.

Job layout::

    {"schema": 1, "kind": "untwist" | "exclude" | "enumerate" | "chi" | "lattice-query",
     "assumptions": {"condition_A": true}, "payload": {...}}

A certificate embeds its canonical job, so :func:`verify` can rerun it and
demand a byte-identical result besides rechecking every recorded relation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .lattice import MODELS, CycleClass, DivisorClass, fmt_rat, rat
from .nfi import (
    _RELATIONS,
    ExclusionCertificate,
    GraphError,
    ResolutionGraph,
    SingularityData,
    exclude,
    two_curves_exclusion,
)
from .untwist import (
    KINDS,
    SECTION_PAIR,
    CurveMark,
    Generator,
    MarkedSystem,
    UntwistCertificate,
    apply_generator,
    format_word,
    replay,
    untwist,
)

SCHEMA_VERSION = 1
JOB_KINDS = ("untwist", "exclude", "enumerate", "chi", "lattice-query")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class JobFile:
    kind: str
    payload: dict
    assumptions: dict = field(default_factory=lambda: {"condition_A": True})
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {"schema": self.schema, "kind": self.kind, "assumptions": self.assumptions,
                "payload": self.payload}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _reject_float(x):
    raise SchemaError(f"decimal number {x} in job; write rationals as \"p/q\" strings")


# ------------------------------------------------------------ field helpers


def _req(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in d:
        raise SchemaError(f"{where}: missing field '{key}'")
    return d[key]


def _int(d: dict, key: str, where: str, default=None, minimum=None) -> int:
    if key not in d and default is not None:
        return default
    v = _req(d, key, where)
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where}.{key}: expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise SchemaError(f"{where}.{key}: must be >= {minimum}, got {v}")
    return v


def _rat_str(v, where: str) -> str:
    if isinstance(v, float):
        raise SchemaError(f"{where}: decimal value {v!r}; write rationals as \"p/q\" strings")
    try:
        return fmt_rat(rat(v))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{where}: {exc}") from None


def _rat(d: dict, key: str, where: str, default=None) -> str:
    if key not in d and default is not None:
        return default
    return _rat_str(_req(d, key, where), f"{where}.{key}")


def _bool(d: dict, key: str, where: str, default: bool) -> bool:
    v = d.get(key, default)
    if not isinstance(v, bool):
        raise SchemaError(f"{where}.{key}: expected true/false")
    return v


def _model(d: dict, where: str) -> str:
    m = d.get("model", "V")
    if m not in MODELS:
        raise SchemaError(f"{where}.model: expected 'V' or 'U', got {m!r}")
    return m


# ------------------------------------------------------------ normalisation


def _norm_untwist(p: dict) -> dict:
    w = "payload"
    marks = _req(p, "marks", w)
    if not isinstance(marks, list):
        raise SchemaError(f"{w}.marks: expected a list")
    out_marks = []
    for i, mk in enumerate(marks):
        mw = f"{w}.marks[{i}]"
        kind = _req(mk, "kind", mw)
        if kind not in KINDS:
            raise SchemaError(f"{mw}.kind: unknown curve kind {kind!r}")
        entry = {
            "id": str(mk.get("id", kind)),
            "kind": kind,
            "mult": _rat(mk, "mult", mw),
            "conj_mult": _rat(mk, "conj_mult", mw, "0"),
        }
        if kind == SECTION_PAIR:
            entry["alpha"] = _rat(mk, "alpha", mw, "0")
        out_marks.append(entry)
    out = {"model": _model(p, w), "n": _rat(p, "n", w), "marks": out_marks}
    if p.get("m") is not None:
        out["m"] = _rat(p, "m", w)
    else:
        out["m"] = None
    if "max_steps" in p:
        out["max_steps"] = _int(p, "max_steps", w, minimum=1)
    return out


def _norm_graph(g: dict) -> dict:
    w = "payload.graph"
    arrows = _req(g, "arrows", w)
    if not isinstance(arrows, list) or any(not isinstance(a, list) or len(a) != 2 for a in arrows):
        raise SchemaError(f"{w}.arrows: expected a list of [i, j] pairs")
    nu = _req(g, "nu", w)
    if not isinstance(nu, list):
        raise SchemaError(f"{w}.nu: expected a list")
    out = {
        "N": _int(g, "N", w, minimum=1),
        "L": _int(g, "L", w, minimum=1),
        "L_prime": _int(g, "L_prime", w, default=1, minimum=1),
        "arrows": sorted([int(i), int(j)] for i, j in arrows),
        "nu": [_rat_str(x, f"{w}.nu[{k}]") for k, x in enumerate(nu)],
        "q": None if g.get("q") is None else _int(g, "q", w, minimum=1),
    }
    return out


def _norm_data(d: dict) -> dict:
    w = "payload.data"
    out = {
        "n": _int(d, "n", w, minimum=0),
        "m": _int(d, "m", w, minimum=0),
        "p": _int(d, "p", w, default=1),
        "alpha1": _rat(d, "alpha1", w, "0"),
        "alpha2": _rat(d, "alpha2", w, "0"),
        "mh": _rat(d, "mh", w),
        "mv": _rat(d, "mv", w),
        "on_s1": _bool(d, "on_s1", w, False),
        "b1_line_in_S": _bool(d, "b1_line_in_S", w, False),
    }
    if d.get("mh_ladder") is not None:
        out["mh_ladder"] = [_rat_str(x, f"{w}.mh_ladder") for x in d["mh_ladder"]]
    if d.get("d") is not None:
        out["d"] = [_rat_str(x, f"{w}.d") for x in d["d"]]
    if d.get("mij") is not None:
        out["mij"] = sorted([int(k), int(i), _rat_str(v, f"{w}.mij")] for k, i, v in d["mij"])
    if d.get("lemma_marks") is not None:
        lm = d["lemma_marks"]
        out["lemma_marks"] = [int(x) for x in lm] if isinstance(lm, list) else int(lm)
        out["lemma_m"] = _int(d, "lemma_m", w, default=0, minimum=0)
    return out


def _norm_exclude(p: dict) -> dict:
    if p.get("case") == "maximal-curve":
        w = "payload"
        return {"case": "maximal-curve", "n": _rat(p, "n", w), "nu1": _rat(p, "nu1", w),
                "nu2": _rat(p, "nu2", w)}
    return {"graph": _norm_graph(_req(p, "graph", "payload")), "data": _norm_data(_req(p, "data", "payload"))}


def _norm_enumerate(p: dict) -> dict:
    w = "payload"
    out = {k: _int(p, k, w, minimum=0) for k in ("N", "L", "n", "denom")}
    out["m_max"] = None if p.get("m_max") is None else _int(p, "m_max", w, minimum=0)
    out["p_max"] = _int(p, "p_max", w, default=1, minimum=1)
    return out


def _norm_chi(p: dict) -> dict:
    w = "payload"
    return {"model": _model(p, w), "n": _int(p, "n", w), "m": _int(p, "m", w)}


def _norm_lattice(p: dict) -> dict:
    w = "payload"
    op = _req(p, "op", w)
    if op not in ("pair", "triple"):
        raise SchemaError(f"{w}.op: expected 'pair' or 'triple', got {op!r}")
    divs = _req(p, "divisors", w)
    want = 1 if op == "pair" else 3
    if not isinstance(divs, list) or len(divs) != want:
        raise SchemaError(f"{w}.divisors: '{op}' takes {want} divisor(s) [n, m]")
    out = {"op": op, "model": _model(p, w), "divisors": [[int(a), int(b)] for a, b in divs]}
    if op == "pair":
        cyc = _req(p, "cycle", w)
        out["cycle"] = [_rat_str(cyc[0], f"{w}.cycle"), _rat_str(cyc[1], f"{w}.cycle")]
    return out


_NORMALISERS = {
    "untwist": _norm_untwist,
    "exclude": _norm_exclude,
    "enumerate": _norm_enumerate,
    "chi": _norm_chi,
    "lattice-query": _norm_lattice,
}


def make_job(kind: str, payload: dict, assumptions: dict | None = None) -> JobFile:
    if kind not in JOB_KINDS:
        raise SchemaError(f"unknown job kind {kind!r}")
    assumptions = {"condition_A": True} if assumptions is None else dict(assumptions)
    if not isinstance(assumptions.get("condition_A", True), bool):
        raise SchemaError("assumptions.condition_A: expected true/false")
    assumptions.setdefault("condition_A", True)
    job = JobFile(kind, _NORMALISERS[kind](payload), assumptions)
    typed(job)  # semantic validation
    return job


def parse_job(text: str) -> JobFile:
    if not text.strip():
        raise SchemaError("missing job kind")
    try:
        obj = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SchemaError("missing job kind")
    if "schema" not in obj:
        raise SchemaError("missing schema version")
    if obj["schema"] != SCHEMA_VERSION:
        raise SchemaError(f"unknown schema version {obj['schema']!r}")
    return make_job(obj["kind"], _req(obj, "payload", "job"), obj.get("assumptions"))


def serialize_job(job: JobFile) -> str:
    return dumps(job.to_dict())


# ------------------------------------------------------------ typed views


def _untwist_system(p: dict) -> MarkedSystem:
    model = p["model"]
    marks = []
    for mk in p["marks"]:
        if mk["kind"] == SECTION_PAIR:
            cls = CycleClass(1, rat(mk["alpha"]), model)
        else:
            cls = CycleClass(1, 0, model)
        marks.append(CurveMark(mk["id"], mk["kind"], cls, rat(mk["mult"]), rat(mk["conj_mult"])))
    m = None if p["m"] is None else rat(p["m"])
    return MarkedSystem(model, rat(p["n"]), m, tuple(marks))


def _exclusion_input(p: dict) -> tuple[SingularityData, ResolutionGraph]:
    g, d = p["graph"], p["data"]
    graph = ResolutionGraph(g["N"], g["L"], frozenset(tuple(a) for a in g["arrows"]), tuple(g["nu"]),
                            g["L_prime"], g["q"])
    mij = None if d.get("mij") is None else {(k, i): v for k, i, v in d["mij"]}
    lm = d.get("lemma_marks")
    data = SingularityData(
        n=d["n"], m=d["m"], alpha1=d["alpha1"], alpha2=d["alpha2"], p=d["p"], mh=d["mh"], mv=d["mv"],
        on_s1=d["on_s1"], b1_line_in_S=d["b1_line_in_S"], mh_ladder=d.get("mh_ladder"), d=d.get("d"),
        mij=mij, lemma_marks=tuple(lm) if isinstance(lm, list) else lm, lemma_m=d.get("lemma_m", 0),
    )
    return data, graph


def typed(job: JobFile):
    """Typed objects behind a job; raises :class:`SchemaError` on invariant violations."""
    try:
        if job.kind == "untwist":
            return _untwist_system(job.payload)
        if job.kind == "exclude" and "graph" in job.payload:
            return _exclusion_input(job.payload)
    except (GraphError, ValueError, TypeError) as exc:
        raise SchemaError(str(exc)) from None
    return job.payload


# ------------------------------------------------------------ certificates


def _system_dict(s: MarkedSystem) -> dict:
    return {
        "model": s.model,
        "n": fmt_rat(s.n),
        "m": None if s.m is None else fmt_rat(s.m),
        "marks": [
            {"id": mk.id, "kind": mk.kind, "mult": fmt_rat(mk.mult), "conj_mult": fmt_rat(mk.conj_mult)}
            for mk in s.marks
        ],
    }


def untwist_result(cert: UntwistCertificate) -> dict:
    return {
        "initial": _system_dict(cert.initial),
        "terminal": _system_dict(cert.terminal),
        "status": cert.status,
        "word": format_word(cert.word),
        "n_sequence": [fmt_rat(x) for x in cert.n_sequence],
        "steps": [
            {
                "line": st.line(),
                "generator": str(st.generator),
                "curve": st.curve,
                "nu": fmt_rat(st.nu),
                "n_before": fmt_rat(st.n_before),
                "n_after": fmt_rat(st.n_after),
                "nu_after": fmt_rat(st.nu_after),
            }
            for st in cert.steps
        ],
        "notes": list(cert.notes),
    }


def exclusion_result(cert: ExclusionCertificate) -> dict:
    return {
        "case": cert.case,
        "verdict": cert.verdict,
        "failed": list(cert.failed),
        "trace": [
            {"name": t.name, "lhs": fmt_rat(t.lhs), "rel": t.rel, "rhs": fmt_rat(t.rhs), "role": t.role,
             "tag": t.tag, "holds": t.holds}
            for t in cert.trace
        ],
        "lines": [t.text() for t in cert.trace],
        "notes": list(cert.notes),
    }


def emit_certificate(cert, job: JobFile | None = None) -> str:
    """Canonical JSON for an untwist or exclusion certificate."""
    if isinstance(cert, UntwistCertificate):
        body = {"certificate": "untwist", "result": untwist_result(cert)}
    elif isinstance(cert, ExclusionCertificate):
        body = {"certificate": "exclusion", "result": exclusion_result(cert)}
    else:
        raise TypeError(f"not a certificate: {type(cert).__name__}")
    body["schema"] = SCHEMA_VERSION
    if job is not None:
        body["job"] = job.to_dict()
        body["assumptions"] = job.assumptions
    return dumps(body)


def run_job(job: JobFile):
    """Run an untwist or exclude job and return its certificate object."""
    if job.kind == "untwist":
        sys = typed(job)
        _, _, cert = untwist(sys, job.payload.get("max_steps"))
        if not job.assumptions.get("condition_A", True):
            cert = UntwistCertificate(cert.initial, cert.terminal, cert.steps, cert.word, cert.status,
                                      cert.notes + ("condition (A) not assumed",))
        return cert
    if job.kind == "exclude":
        p = job.payload
        if p.get("case") == "maximal-curve":
            return two_curves_exclusion(p["n"], p["nu1"], p["nu2"])
        data, g = typed(job)
        return exclude(data, g)
    raise SchemaError(f"job kind {job.kind!r} does not produce a certificate")


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    problems: tuple


def _check_trace(result: dict) -> list[str]:
    problems = []
    for k, t in enumerate(result["trace"]):
        lhs, rhs = rat(t["lhs"]), rat(t["rhs"])
        holds = _RELATIONS[t["rel"]](lhs, rhs)
        if holds != t["holds"]:
            problems.append(f"trace[{k}] '{t['name']}': recorded holds={t['holds']}, recomputed {holds}")
    roles = {}
    for t in result["trace"]:
        if not t["holds"] and t["role"] in ("precondition", "hypothesis"):
            roles.setdefault(t["role"], []).append(t["name"])
    if roles.get("precondition"):
        verdict = "input-infeasible"
    elif roles.get("hypothesis"):
        verdict = "excluded"
    else:
        verdict = result["verdict"] if result["verdict"] in ("reduced", "not-excluded") else "not-excluded"
    if verdict != result["verdict"]:
        problems.append(f"verdict {result['verdict']!r} does not follow from the trace ({verdict!r})")
    return problems


def _check_steps(result: dict, job: JobFile) -> list[str]:
    problems = []
    sys = typed(job)
    seq = [rat(x) for x in result["n_sequence"]]
    for k, st in enumerate(result["steps"]):
        n, nu = rat(st["n_before"]), rat(st["nu"])
        if rat(st["n_after"]) != 3 * n - 2 * nu or rat(st["nu_after"]) != 4 * n - 3 * nu:
            problems.append(f"step {k}: action does not match n -> 3n - 2nu, nu -> 4n - 3nu")
        if not rat(st["n_after"]) < n:
            problems.append(f"step {k}: n does not drop")
        sys = apply_generator(sys, Generator.parse(st["generator"]))
    if seq and seq[-1] != sys.n:
        problems.append("n sequence does not end at the terminal threshold")
    word = [] if result["word"] == "[]" else [Generator.parse(x) for x in result["word"][1:-1].split(", ")]
    back = replay(sys, word)
    if back.n != typed(job).n or [mk.mult for mk in back.marks] != [mk.mult for mk in typed(job).marks]:
        problems.append("replaying the word does not reproduce the input")
    return problems


def verify(text: str) -> VerifyResult:
    """Re-parse a certificate, rerun its job, and recheck every recorded relation."""
    problems = []
    try:
        obj = json.loads(text, parse_float=_reject_float)
    except (json.JSONDecodeError, SchemaError) as exc:
        return VerifyResult(False, (f"unreadable certificate: {exc}",))
    if obj.get("schema") != SCHEMA_VERSION:
        return VerifyResult(False, (f"unknown schema version {obj.get('schema')!r}",))
    if "job" not in obj:
        return VerifyResult(False, ("certificate does not embed its job",))
    job = make_job(obj["job"]["kind"], obj["job"]["payload"], obj["job"].get("assumptions"))
    again = emit_certificate(run_job(job), job)
    if again != text:
        problems.append("rerunning the embedded job does not reproduce the certificate byte for byte")
    if obj["certificate"] == "exclusion":
        problems += _check_trace(obj["result"])
    elif obj["certificate"] == "untwist":
        problems += _check_steps(obj["result"], job)
    else:
        problems.append(f"unknown certificate type {obj['certificate']!r}")
    return VerifyResult(not problems, tuple(problems))


def divisor_from_pair(model: str, pair) -> DivisorClass:
    return DivisorClass(model, int(pair[0]), int(pair[1]))
