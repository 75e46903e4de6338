from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from typing import Optional
import logging

from merozeta import __version__
from merozeta import reports
from merozeta.config import setup_logging
from merozeta.errors import (
    BlowupLimitExceeded,
    MerozetaError,
    NonLinearDenominator,
    NonRationalCenter,
)
from merozeta.germs import germ_from_file, shift_value
from merozeta.resgraph import ResolutionGraph, graph_from_file
from merozeta.resolve import ResolutionEngine
from merozeta import schemas

# 로그 설정
setup_logging()
logger = logging.getLogger(__name__)

app = FastAPI(
    title="merozeta API",
    description="Zeta functions of plane meromorphic germs",
    version=__version__,
)

# CORS 설정
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

UNSUPPORTED = (NonRationalCenter, BlowupLimitExceeded, NonLinearDenominator)


def _fail(e: Exception) -> HTTPException:
    if isinstance(e, UNSUPPORTED):
        logger.warning(f"Unsupported input: {e}")
        return HTTPException(status_code=422, detail=str(e))
    logger.info(f"Rejected input: {e}")
    return HTTPException(status_code=400, detail=str(e))


def _graph(payload: schemas.GraphFile) -> ResolutionGraph:
    try:
        return graph_from_file(payload)
    except MerozetaError as e:
        raise _fail(e)


@app.get("/", response_model=schemas.HealthResponse)
async def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "version": __version__}


@app.post("/graphs/zeta", response_model=schemas.ZetaResponse)
def graph_zeta(payload: schemas.GraphFile, include_global: bool = False):
    """Topological and monodromy zeta functions of a graph"""
    return reports.zeta_report(_graph(payload), include_global=include_global)


@app.post("/graphs/poles", response_model=schemas.PolesResponse)
def graph_poles(payload: schemas.GraphFile):
    """Candidate poles with orders, witnesses and residue contributions"""
    try:
        return reports.poles_report(_graph(payload))
    except UNSUPPORTED as e:
        raise _fail(e)


@app.post("/graphs/check", response_model=schemas.ConjectureResponse)
def graph_check(payload: schemas.GraphFile):
    """Monodromy conjecture certificate for every pole"""
    g = _graph(payload)
    report = reports.conjecture_report(g)
    if not report.certified:
        logger.error(f"Conjecture violated on a {len(g)}-component graph")
    return report


@app.post("/graphs/validate", response_model=schemas.ValidateResponse)
def graph_validate(payload: schemas.GraphFile):
    return reports.validate_report(_graph(payload))


@app.post("/graphs/audit", response_model=schemas.AuditResponse)
def graph_audit(payload: schemas.GraphFile, d: Optional[int] = Query(None, ge=1)):
    """Structure audits (bamboos, ratios, alpha bounds, C_d)"""
    return reports.audit_report(_graph(payload), d)


@app.post("/germs/resolve", response_model=schemas.ResolveResponse)
def germ_resolve(payload: schemas.GermFile, at: Optional[str] = None):
    """Embedded resolution of P/Q (or of P/Q - at)"""
    try:
        germ = germ_from_file(payload)
        if at is not None:
            germ = shift_value(germ, at)
        state = ResolutionEngine().run(germ)
    except (MerozetaError, ValueError) as e:
        raise _fail(e)
    logger.info(f"Resolved germ into {len(state.graph)} components")
    return reports.resolve_report(state)
