"""FastAPI service wrapping the experiment pipelines.

Responses are deterministic functions of the request (fixed summation
order, counter-based seeding), so identical requests produce identical
bytes; the growth endpoint also renders its table as RFC-4180 CSV with
17-significant-digit floats.
"""

from __future__ import annotations

import csv
import io

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import rng as rngmod
from ..markov import markov_decomposition_demo, schur_markov
from ..matcore import schatten_norm
from ..sqfun import SqSpec, square_function
from ..stolzexample import growth_experiment, make_diag_a, rank_one_test
from ..suites import run_suite
from .models import (
    CertificateModel,
    CheckItemModel,
    CheckRequest,
    CheckResponse,
    DecomposeRequest,
    DecomposeResponse,
    GrowthRequest,
    GrowthResponse,
    GrowthRowModel,
    GrowthSummary,
    MarkovRequest,
    MarkovResponse,
    SqfunRequest,
    SqfunResponse,
)

app = FastAPI(
    title="rittkit",
    description="Square functions and column/row decompositions for Ritt "
    "operators on truncated Schatten classes.",
    version="0.1.0",
)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _growth_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["n", "col_norm", "row_norm", "ratio"])
    for r in rows:
        writer.writerow([r.n, _fmt(r.col), _fmt(r.row), _fmt(r.ratio)])
    return buf.getvalue()


@app.get("/health")
def health():
    return {"status": "ok", "service": "rittkit", "version": app.version}


@app.post("/growth", response_model=GrowthResponse)
def growth(req: GrowthRequest) -> GrowthResponse:
    try:
        table = growth_experiment(req.p, req.n_list, threads=req.threads)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return GrowthResponse(
        p=table.p,
        rows=[
            GrowthRowModel(n=r.n, col_norm=r.col, row_norm=r.row, ratio=r.ratio)
            for r in table.rows
        ],
        summary=GrowthSummary(
            slope=table.slope,
            residual=table.residual,
            theta=table.theta,
            expected_slope=table.expected_slope,
            ratio_numerator=table.ratio_numerator,
        ),
        csv=_growth_csv(table.rows),
    )


@app.post("/decompose", response_model=DecomposeResponse)
def decompose_endpoint(req: DecomposeRequest) -> DecomposeResponse:
    from ..decomp import decompose

    _, la, _ = make_diag_a(req.n)
    x = rngmod.random_matrix(rngmod.substream(req.seed, 0), req.n)
    x /= schatten_norm(x, req.p)
    try:
        result = decompose(la, x, req.p, splitter=req.splitter, k=req.k, tol=req.tol)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return DecomposeResponse(
        p=req.p,
        n=req.n,
        seed=req.seed,
        splitter=result.splitter,
        residual=result.residual,
        constant=result.constant,
        col_sq=result.col_sq,
        row_sq=result.row_sq,
        norm_x=result.norm_x,
        k_used=result.k_used,
    )


@app.post("/sqfun", response_model=SqfunResponse)
def sqfun_endpoint(req: SqfunRequest) -> SqfunResponse:
    if req.input == "random" and req.seed is None:
        raise HTTPException(status_code=422, detail="seed is required for random input")
    _, la, ra = make_diag_a(req.n)
    op = la if req.operator == "left" else ra
    if req.input == "rank-one":
        x = rank_one_test(req.n)
    else:
        x = rngmod.random_matrix(rngmod.substream(req.seed, 0), req.n)
        x /= schatten_norm(x, req.p)
    spec = SqSpec(p=req.p, alpha=req.alpha, kind=req.kind, k_max=req.k_max, tol=req.tol, rho=req.rho)
    try:
        res = square_function(op, x, spec)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return SqfunResponse(
        p=req.p,
        alpha=req.alpha,
        kind=req.kind,
        operator=req.operator,
        value=res.value,
        lower=res.lower,
        upper=res.upper,
        k_used=res.k_used,
        tail_bound=res.tail_bound,
        converged=res.converged,
    )


@app.post("/markov", response_model=MarkovResponse)
def markov_endpoint(req: MarkovRequest) -> MarkovResponse:
    idx = np.arange(req.n)
    toeplitz = req.c ** np.abs(np.subtract.outer(idx, idx))
    try:
        markov = schur_markov(toeplitz)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    cert = markov.certificate
    spectrum = sorted(float(v) for v in np.real(markov.op.eigenvalues()))
    demo = None
    if req.demo:
        try:
            result = markov_decomposition_demo(markov, req.p, seed=req.seed, tol=req.tol)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        demo = DecomposeResponse(
            p=req.p,
            n=req.n,
            seed=req.seed,
            splitter=result.splitter,
            residual=result.residual,
            constant=result.constant,
            col_sq=result.col_sq,
            row_sq=result.row_sq,
            norm_x=result.norm_x,
            k_used=result.k_used,
        )
    return MarkovResponse(
        n=req.n,
        c=req.c,
        certificate=CertificateModel(
            unital=cert.unital,
            trace_preserving=cert.trace_preserving,
            cp=cert.cp,
            selfadjoint=cert.selfadjoint,
            minus_one_free=cert.minus_one_free,
            choi_min_eig=cert.choi_min_eig,
            distance_to_minus_one=cert.distance_to_minus_one,
            valid=cert.valid,
        ),
        spectrum=spectrum,
        demo=demo,
    )


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest) -> CheckResponse:
    try:
        results = run_suite(req.suite)
    except KeyError as exc:
        raise HTTPException(status_code=422, detail=str(exc.args[0]))
    return CheckResponse(
        suite=req.suite,
        passed=all(r.passed for r in results),
        results=[CheckItemModel(name=r.name, passed=r.passed, detail=r.detail) for r in results],
    )
