"""Request/response models for the rittkit service."""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class RittkitRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: Literal[1] = Field(default=1, alias="schema")


class GrowthRequest(RittkitRequest):
    p: float
    n_list: List[int] = Field(min_length=1)
    threads: Optional[int] = Field(default=None, ge=1)


class GrowthRowModel(BaseModel):
    n: int
    col_norm: float
    row_norm: float
    ratio: float


class GrowthSummary(BaseModel):
    slope: float
    residual: float
    theta: float
    expected_slope: float
    ratio_numerator: str


class GrowthResponse(BaseModel):
    p: float
    rows: List[GrowthRowModel]
    summary: GrowthSummary
    csv: str


class DecomposeRequest(RittkitRequest):
    p: float = Field(gt=1.0, lt=2.0)
    n: int = Field(default=6, ge=1)
    seed: int = Field(ge=0)
    splitter: Literal["all-column", "all-row", "rad-optimal", "thresholded"] = "rad-optimal"
    tol: float = Field(default=1e-6, gt=0.0)
    k: Optional[int] = Field(default=None, ge=1)


class DecomposeResponse(BaseModel):
    p: float
    n: int
    seed: int
    splitter: str
    residual: float
    constant: float
    col_sq: float
    row_sq: float
    norm_x: float
    k_used: int


class SqfunRequest(RittkitRequest):
    p: float = Field(gt=1.0)
    alpha: float = Field(default=1.0, gt=0.0)
    kind: Literal["col", "row", "rad", "split"] = "col"
    n: int = Field(default=8, ge=1)
    rho: float = Field(default=1.0, gt=0.0, le=1.0)
    operator: Literal["left", "right"] = "left"
    input: Literal["random", "rank-one"] = "random"
    seed: Optional[int] = Field(default=None, ge=0)
    tol: float = Field(default=1e-6, gt=0.0)
    k_max: int = Field(default=10**6, ge=1)


class SqfunResponse(BaseModel):
    p: float
    alpha: float
    kind: str
    operator: str
    value: float
    lower: float
    upper: float
    k_used: int
    tail_bound: float
    converged: bool


class MarkovRequest(RittkitRequest):
    n: int = Field(default=4, ge=1)
    c: float = Field(default=0.9, gt=-1.0, lt=1.0)
    p: float = Field(default=4.0 / 3.0, gt=1.0, lt=2.0)
    seed: int = Field(ge=0)
    demo: bool = True
    tol: float = Field(default=1e-6, gt=0.0)


class CertificateModel(BaseModel):
    unital: bool
    trace_preserving: bool
    cp: bool
    selfadjoint: bool
    minus_one_free: bool
    choi_min_eig: float
    distance_to_minus_one: float
    valid: bool


class MarkovResponse(BaseModel):
    n: int
    c: float
    certificate: CertificateModel
    spectrum: List[float]
    demo: Optional[DecomposeResponse] = None


class CheckRequest(RittkitRequest):
    suite: str


class CheckItemModel(BaseModel):
    name: str
    passed: bool
    detail: str


class CheckResponse(BaseModel):
    suite: str
    passed: bool
    results: List[CheckItemModel]
