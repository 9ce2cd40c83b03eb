"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class EvalRequest(BaseModel):
    law: str
    coefficients: dict[str, float] | None = None
    n_active: float
    d_tokens: float
    sparsity: float = 0.0


class EvalResponse(BaseModel):
    law: str
    loss: float


class FitRequest(BaseModel):
    law: str
    records_csv: str
    space: dict | None = None
    method: str = Field("smbo", pattern="^(grid|random|smbo)$")
    budget: int
    init_samples: int = 16
    refine: int = 0
    metric: str = Field("mse", pattern="^(mse|huber|log_mse)$")
    seed: int = 0
    workers: int = 1
    include_trace: bool = False


class TraceEntryModel(BaseModel):
    index: int
    objective: float
    coefficients: dict[str, float]


class FitResponse(BaseModel):
    law: str
    method: str
    seed: int | None = None
    objective: float
    evaluations: int
    coefficients: dict[str, float]
    trace: list[TraceEntryModel] | None = None


class PlanRequest(BaseModel):
    law: str
    coefficients: dict[str, float] | None = None
    compute: float
    sparsity: float = 0.0


class PlanResponse(BaseModel):
    law: str
    budget_flops: float
    sparsity: float
    n_opt: float
    d_opt: float
    predicted_loss: float
    method: str


class SparsityScanRequest(BaseModel):
    law: str = "generalized"
    coefficients: dict[str, float] | None = None
    compute: float
    sparsity_grid: list[float]


class SparsityScanResponse(BaseModel):
    s_best: float
    plan: PlanResponse
    evaluated: list[PlanResponse]


class IsoflopRequest(BaseModel):
    law: str
    coefficients: dict[str, float] | None = None
    compute: float
    sparsities: list[float] = [0.0]
    n_min: float | None = None
    n_max: float | None = None
    samples: int = 256
    threshold: float = 0.05


class CurveSummary(BaseModel):
    sparsity: float
    n_star: float
    d_star: float
    loss_star: float
    rise: float
    spiky: bool


class IsoflopResponse(BaseModel):
    law: str
    budget_flops: float
    threshold: float
    curves: list[CurveSummary]


class CompareRequest(BaseModel):
    law_a: str
    law_b: str
    coefficients_a: dict[str, float] | None = None
    coefficients_b: dict[str, float] | None = None
    grid: str = "hoffmann9"
    records_csv: str | None = None
    sparsity: float | None = None


class ScalePoint(BaseModel):
    n_active: float
    d_tokens: float
    sparsity: float


class ComparePoint(ScalePoint):
    loss_a: float
    loss_b: float
    diff: float


class CompareResponse(BaseModel):
    law_a: str
    law_b: str
    max_abs_diff: float
    argmax: ScalePoint
    points: list[ComparePoint]
