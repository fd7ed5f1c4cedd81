"""HTTP service exposing every operation of the package.

All endpoints are stateless POST handlers on JSON bodies; object payloads
use the document schema of :mod:`rhcube.documents`.  Content problems map
to 422 with an error code of "malformed" (unreadable document) or
"invalid-object" (well-formed data violating the object axioms where
validity is required); undecided randomized results are ordinary 200
responses with status "inconclusive" or "probably-not".
"""

from __future__ import annotations

from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import builders, documents, modalg, predmod, verdier
from .linalg import DEFAULT_RANK_TOL, DEFAULT_TOL, FundamentalDomain, LogBranchError
from .objects import (
    HypercubeObject,
    InvalidObjectError,
    MalformedObjectError,
    NonInvariantSubspaceError,
    ValidationReport,
    degenerate,
)
from .rh import inverse_rh, rh, rh_jacobian_rank
from .strata import (
    PolydiskContext,
    cover_Y_star,
    cover_Z,
    cover_Z_star,
    enumerate_strata,
    subset_of,
)
from .verdier import VerdierObject


def _error(code: str, message: str) -> HTTPException:
    return HTTPException(status_code=422, detail={"code": code, "message": message})


def _parse_object(doc: Any, where: str = "object") -> HypercubeObject:
    try:
        return documents.parse(doc)
    except documents.DocumentError as exc:
        raise _error("malformed", f"{where}: {exc}") from exc


def _complex_of(value: Any, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    raise _error("malformed", f"{where}: expected a number, [re, im], or a complex string")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# models


class ViolationModel(BaseModel):
    axiom: str
    node: list[int]
    indices: list[int]
    residual: float


class ValidateRequest(BaseModel):
    object: dict[str, Any]
    tol: float = DEFAULT_TOL


class ValidateResponse(BaseModel):
    ok: bool
    violations: list[ViolationModel]


class GoodEigRequest(BaseModel):
    object: dict[str, Any]
    tol: float = DEFAULT_TOL


class ArrowRef(BaseModel):
    node: list[int]
    direction: int


class BadPairModel(BaseModel):
    level: int
    arrow_a: ArrowRef
    arrow_b: ArrowRef
    eig_a: list[float]
    eig_b: list[float]
    integer: int


class GoodEigResponse(BaseModel):
    good: bool
    witness: BadPairModel | None = None


class TransformRequest(BaseModel):
    object: dict[str, Any]
    tol: float = DEFAULT_TOL
    sigma: float = 0.0


class ObjectResponse(BaseModel):
    object: dict[str, Any]


class JhRequest(BaseModel):
    object: dict[str, Any]
    seed: int = 0
    tol: float = DEFAULT_RANK_TOL


class FactorModel(BaseModel):
    object: dict[str, Any]
    multiplicity: int


class JhResponse(BaseModel):
    status: str
    factors: list[FactorModel] = Field(default_factory=list)
    length: int = 0
    detail: str | None = None


class SequivRequest(BaseModel):
    object_a: dict[str, Any]
    object_b: dict[str, Any]
    seed: int = 0
    tol: float = DEFAULT_RANK_TOL


class SequivResponse(BaseModel):
    status: str  # "decided" | "probably-not" | "inconclusive"
    equivalent: bool | None = None
    detail: str | None = None


class StableRequest(BaseModel):
    object: dict[str, Any]
    seed: int = 0
    tol: float = DEFAULT_RANK_TOL


class StableResponse(BaseModel):
    status: str
    stable: bool | None = None


class DegenerateRequest(BaseModel):
    object: dict[str, Any]
    filtration: dict[str, Any]
    tau: Any = 1.0
    tol: float = DEFAULT_TOL


class JacobianRequest(BaseModel):
    object: dict[str, Any] | None = None
    arrow: str | None = None
    s: list | None = None
    t: list | None = None
    step: float = 1e-5
    sv_tol: float = 1e-5
    tol: float = DEFAULT_TOL


class ArrowJacobianModel(BaseModel):
    rank: int
    expected: int
    full: bool
    singular_values: list[float]


class JacobianResponse(BaseModel):
    arrows: dict[str, ArrowJacobianModel]
    all_full: bool


class GenRequest(BaseModel):
    builder: str
    params: dict[str, Any] = Field(default_factory=dict)
    seed: int = 0


class StrataRequest(BaseModel):
    d: int
    r: int


class StratumModel(BaseModel):
    subset: list[int]
    codim: int


class StrataResponse(BaseModel):
    context: dict[str, int]
    strata: list[StratumModel]
    cover_y_star: dict[str, list[Any]]
    cover_z: dict[str, list[Any]]
    cover_z_star: dict[str, list[Any]]


app = FastAPI(
    title="rhcube",
    description="Hypercube linear algebra service: axiom validation, "
    "residue eigenvalue analysis, monodromy transforms, Jordan-Holder "
    "decomposition and rigidity checks for polydisk hypercube objects.",
    version="0.1.0",
)


def _report_response(report: ValidationReport) -> ValidateResponse:
    return ValidateResponse(
        ok=report.ok,
        violations=[
            ViolationModel(axiom=v.axiom, node=list(v.node),
                           indices=list(v.indices), residual=v.residual)
            for v in report.violations
        ],
    )


@app.post("/validate", response_model=ValidateResponse)
def validate_endpoint(req: ValidateRequest) -> ValidateResponse:
    obj = _parse_object(req.object)
    if isinstance(obj, VerdierObject):
        report = verdier.validate(obj, req.tol)
    else:
        report = predmod.validate(obj, req.tol)
    return _report_response(report)


@app.post("/monodromy-consistency", response_model=ValidateResponse)
def monodromy_consistency_endpoint(req: ValidateRequest) -> ValidateResponse:
    obj = _parse_object(req.object)
    if not isinstance(obj, VerdierObject):
        raise _error("malformed", "monodromy consistency applies to verdier objects")
    return _report_response(verdier.monodromy_consistency(obj, req.tol))


@app.post("/good-eig", response_model=GoodEigResponse)
def good_eig_endpoint(req: GoodEigRequest) -> GoodEigResponse:
    obj = _parse_object(req.object)
    if not isinstance(obj, predmod.PreDModule):
        raise _error("malformed", "good-eig applies to pre-d-modules")
    try:
        result = predmod.good_residual_eigenvalues(obj, req.tol)
    except InvalidObjectError as exc:
        raise _error("invalid-object", str(exc)) from exc
    witness = None
    if result.witness is not None:
        w = result.witness
        witness = BadPairModel(
            level=w.level,
            arrow_a=ArrowRef(node=list(w.arrow_a[0]), direction=w.arrow_a[1]),
            arrow_b=ArrowRef(node=list(w.arrow_b[0]), direction=w.arrow_b[1]),
            eig_a=_pair(w.eig_a), eig_b=_pair(w.eig_b), integer=w.integer,
        )
    return GoodEigResponse(good=result.good, witness=witness)


@app.post("/rh", response_model=ObjectResponse)
def rh_endpoint(req: TransformRequest) -> ObjectResponse:
    obj = _parse_object(req.object)
    if not isinstance(obj, predmod.PreDModule):
        raise _error("malformed", "rh expects a pre-d-module")
    try:
        out = rh(obj, req.tol)
    except InvalidObjectError as exc:
        raise _error("invalid-object", str(exc)) from exc
    return ObjectResponse(object=documents.serialize(out))


@app.post("/inv-rh", response_model=ObjectResponse)
def inv_rh_endpoint(req: TransformRequest) -> ObjectResponse:
    obj = _parse_object(req.object)
    if not isinstance(obj, VerdierObject):
        raise _error("malformed", "inv-rh expects a verdier object")
    try:
        out = inverse_rh(obj, FundamentalDomain(req.sigma), req.tol)
    except InvalidObjectError as exc:
        raise _error("invalid-object", str(exc)) from exc
    except (ValueError, LogBranchError) as exc:
        raise _error("malformed", str(exc)) from exc
    return ObjectResponse(object=documents.serialize(out))


@app.post("/jh", response_model=JhResponse)
def jh_endpoint(req: JhRequest) -> JhResponse:
    obj = _parse_object(req.object)
    try:
        report = modalg.jordan_holder(obj, req.seed, req.tol)
    except modalg.InconclusiveError as exc:
        return JhResponse(status="inconclusive", detail=str(exc))
    return JhResponse(
        status="ok",
        factors=[FactorModel(object=documents.serialize(f), multiplicity=m)
                 for f, m in report.factors],
        length=report.length,
    )


@app.post("/sequiv", response_model=SequivResponse)
def sequiv_endpoint(req: SequivRequest) -> SequivResponse:
    a = _parse_object(req.object_a, "object_a")
    b = _parse_object(req.object_b, "object_b")
    if type(a) is not type(b) or a.ctx != b.ctx:
        raise _error("malformed", "objects must share kind and context")
    try:
        ss_a = modalg.semisimplify(a, req.seed, req.tol)
        ss_b = modalg.semisimplify(b, req.seed, req.tol)
    except modalg.InconclusiveError as exc:
        return SequivResponse(status="inconclusive", detail=str(exc))
    iso = modalg.isomorphic(ss_a, ss_b, req.seed, req.tol)
    if iso.status == "yes":
        return SequivResponse(status="decided", equivalent=True)
    if iso.status == "no":
        return SequivResponse(status="decided", equivalent=False,
                              detail=iso.separating)
    return SequivResponse(status="probably-not", equivalent=None,
                          detail=iso.separating)


@app.post("/stable", response_model=StableResponse)
def stable_endpoint(req: StableRequest) -> StableResponse:
    obj = _parse_object(req.object)
    result = modalg.is_stable(obj, req.seed, req.tol)
    if result.stable is None:
        return StableResponse(status="inconclusive", stable=None)
    return StableResponse(status="decided", stable=result.stable)


@app.post("/degenerate", response_model=ObjectResponse)
def degenerate_endpoint(req: DegenerateRequest) -> ObjectResponse:
    obj = _parse_object(req.object)
    try:
        filt = documents.parse_filtration(req.filtration, obj)
    except documents.DocumentError as exc:
        raise _error("malformed", f"filtration: {exc}") from exc
    tau = _complex_of(req.tau, "tau")
    try:
        out = degenerate(obj, filt, tau, req.tol)
    except (NonInvariantSubspaceError, ValueError) as exc:
        raise _error("invalid-object", str(exc)) from exc
    return ObjectResponse(object=documents.serialize(out))


@app.post("/jacobian", response_model=JacobianResponse)
def jacobian_endpoint(req: JacobianRequest) -> JacobianResponse:
    arrows: dict[str, ArrowJacobianModel] = {}
    if req.object is not None:
        obj = _parse_object(req.object)
        if not isinstance(obj, predmod.PreDModule):
            raise _error("malformed", "jacobian expects a pre-d-module or an s/t pair")
        for (a, k) in obj.arrow_order:
            label = f"{documents.node_label(subset_of(a))}|{k}"
            if req.arrow is not None and label != req.arrow:
                continue
            rank, expected, sv = rh_jacobian_rank(
                obj.up[(a, k)], obj.down[(a, k)], req.step, req.sv_tol)
            arrows[label] = ArrowJacobianModel(
                rank=rank, expected=expected, full=rank == expected,
                singular_values=sv)
        if req.arrow is not None and not arrows:
            raise _error("malformed", f"no arrow named {req.arrow!r}")
    elif req.s is not None and req.t is not None:
        try:
            n = len(req.s)
            m = len(req.s[0]) if n else 0
            s = documents.matrix_from_json(req.s, n, m, "s")
            nt = len(req.t)
            mt = len(req.t[0]) if nt else 0
            t = documents.matrix_from_json(req.t, nt, mt, "t")
            rank, expected, sv = rh_jacobian_rank(s, t, req.step, req.sv_tol)
        except (documents.DocumentError, ValueError) as exc:
            raise _error("malformed", str(exc)) from exc
        arrows["pair"] = ArrowJacobianModel(
            rank=rank, expected=expected, full=rank == expected,
            singular_values=sv)
    else:
        raise _error("malformed", "provide either an object or an s/t pair")
    return JacobianResponse(arrows=arrows,
                            all_full=all(a.full for a in arrows.values()))


@app.post("/gen", response_model=ObjectResponse)
def gen_endpoint(req: GenRequest) -> ObjectResponse:
    try:
        obj = builders.gen(req.builder, req.params, req.seed)
    except (builders.BuilderError, MalformedObjectError, ValueError) as exc:
        raise _error("malformed", str(exc)) from exc
    return ObjectResponse(object=documents.serialize(obj))


@app.post("/strata", response_model=StrataResponse)
def strata_endpoint(req: StrataRequest) -> StrataResponse:
    try:
        ctx = PolydiskContext(req.d, req.r)
    except ValueError as exc:
        raise _error("malformed", str(exc)) from exc
    strata = [StratumModel(subset=list(s.subset), codim=s.codim)
              for s in enumerate_strata(ctx)]
    y_star = {str(c): [[list(a), k] for a, k in cover_Y_star(ctx, c)]
              for c in range(1, ctx.r + 1)}
    z = {str(c): [[list(a), list(pair)] for a, pair in cover_Z(ctx, c)]
         for c in range(2, ctx.r + 1)}
    z_star = {str(c): [[list(a), list(pair), flag]
                       for a, pair, flag in cover_Z_star(ctx, c)]
              for c in range(2, ctx.r + 1)}
    return StrataResponse(context={"d": ctx.d, "r": ctx.r}, strata=strata,
                          cover_y_star=y_star, cover_z=z, cover_z_star=z_star)
