"""HTTP service exposing the package over JSON.

Thin handlers: each endpoint parses its request model, calls the same core
functions the CLI uses, and returns a response model.  Domain errors map to
422 (the request was well-formed but asked about an invalid point), input
errors to 400.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .. import __version__
from ..data import ModelScale, parse_records, reference_grid
from ..errors import DomainError, InputError
from ..fit import (
    FitObjectiveConfig,
    default_search_space,
    fit_result_to_doc,
    grid_search,
    local_refine,
    random_search,
    smbo_fit,
    space_from_doc,
)
from ..isoflop import (
    compare_laws,
    curve_minimum,
    curves_to_csv,
    curve_to_csv,
    curves_to_svg,
    detect_spike,
    isoflop_curve,
)
from ..laws import coeffs_from_doc, evaluate, law_of, published, published_tables_doc
from ..plan import optimal_allocation_dense, optimal_allocation_sparse, optimal_sparsity, plan_to_doc
from .schemas import (
    CompareRequest,
    ComparePoint,
    CompareResponse,
    CurveSummary,
    EvalRequest,
    EvalResponse,
    FitRequest,
    FitResponse,
    IsoflopRequest,
    IsoflopResponse,
    PlanRequest,
    PlanResponse,
    ScalePoint,
    SparsityScanRequest,
    SparsityScanResponse,
)


def _coeffs(law: str, doc: dict | None):
    if doc is None:
        return published(law)
    coeffs = coeffs_from_doc({"law": law, "coefficients": doc})
    return coeffs


def _curves(req: IsoflopRequest):
    coeffs = _coeffs(req.law, req.coefficients)
    kwargs = {"samples": req.samples}
    if (req.n_min is None) != (req.n_max is None):
        raise InputError("pass both n_min and n_max, or neither")
    if req.n_min is not None:
        kwargs["n_min"] = req.n_min
        kwargs["n_max"] = req.n_max
    return [isoflop_curve(coeffs, req.compute, s, **kwargs) for s in req.sparsities]


def create_app() -> FastAPI:
    app = FastAPI(title="scalelaw", version=__version__)

    @app.exception_handler(DomainError)
    async def domain_error(request: Request, exc: DomainError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(InputError)
    async def input_error(request: Request, exc: InputError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/tables")
    def tables() -> dict:
        return published_tables_doc()

    @app.post("/eval", response_model=EvalResponse)
    def eval_law(req: EvalRequest) -> EvalResponse:
        coeffs = _coeffs(req.law, req.coefficients)
        loss = float(evaluate(coeffs, req.n_active, req.d_tokens, req.sparsity))
        return EvalResponse(law=law_of(coeffs), loss=loss)

    @app.post("/fit", response_model=FitResponse, response_model_exclude_none=True)
    def fit(req: FitRequest) -> FitResponse:
        records = parse_records(req.records_csv)
        if req.space is not None:
            space = space_from_doc(req.law, req.space)
        else:
            space = default_search_space(req.law)
        config = FitObjectiveConfig(metric=req.metric)
        if req.method == "grid":
            result = grid_search(space, records, req.budget, config=config, workers=req.workers)
        elif req.method == "random":
            result = random_search(
                space, records, req.budget, seed=req.seed, config=config, workers=req.workers
            )
        else:
            result = smbo_fit(
                space,
                records,
                req.budget,
                init_samples=req.init_samples,
                seed=req.seed,
                config=config,
                workers=req.workers,
            )
        if req.refine > 0:
            result = local_refine(result.coefficients, records, max_iters=req.refine, config=config)
        doc = fit_result_to_doc(result)
        if not req.include_trace:
            doc.pop("trace")
        return FitResponse(**doc)

    @app.post("/plan", response_model=PlanResponse)
    def plan(req: PlanRequest) -> PlanResponse:
        coeffs = _coeffs(req.law, req.coefficients)
        if req.law == "hoffmann":
            if req.sparsity != 0.0:
                raise DomainError("law 'hoffmann' is dense; sparsity must be 0")
            result = optimal_allocation_dense(coeffs, req.compute)
        elif req.law == "generalized":
            result = optimal_allocation_sparse(coeffs, req.compute, req.sparsity)
        else:
            raise InputError("planning supports law 'hoffmann' (dense) or 'generalized' (sparse)")
        return PlanResponse(**plan_to_doc(result))

    @app.post("/plan/sparsity", response_model=SparsityScanResponse)
    def plan_sparsity(req: SparsityScanRequest) -> SparsityScanResponse:
        if req.law != "generalized":
            raise InputError("sparsity scans require law 'generalized'")
        coeffs = _coeffs(req.law, req.coefficients)
        s_best, best = optimal_sparsity(coeffs, req.compute, req.sparsity_grid)
        evaluated = [
            PlanResponse(**plan_to_doc(optimal_allocation_sparse(coeffs, req.compute, s)))
            for s in req.sparsity_grid
        ]
        return SparsityScanResponse(
            s_best=s_best, plan=PlanResponse(**plan_to_doc(best)), evaluated=evaluated
        )

    @app.post("/isoflop", response_model=IsoflopResponse)
    def isoflop(req: IsoflopRequest) -> IsoflopResponse:
        curves = _curves(req)
        summaries = []
        for curve in curves:
            n_star, d_star, loss_star = curve_minimum(curve)
            spike = detect_spike(curve, req.threshold)
            summaries.append(
                CurveSummary(
                    sparsity=curve.sparsity,
                    n_star=n_star,
                    d_star=d_star,
                    loss_star=loss_star,
                    rise=spike.rise,
                    spiky=spike.spiky,
                )
            )
        return IsoflopResponse(
            law=curves[0].law,
            budget_flops=curves[0].budget.flops,
            threshold=req.threshold,
            curves=summaries,
        )

    @app.post("/isoflop/svg")
    def isoflop_svg(req: IsoflopRequest) -> Response:
        return Response(content=curves_to_svg(_curves(req)), media_type="image/svg+xml")

    @app.post("/isoflop/csv")
    def isoflop_csv(req: IsoflopRequest) -> Response:
        curves = _curves(req)
        text = curve_to_csv(curves[0]) if len(curves) == 1 else curves_to_csv(curves)
        return Response(content=text, media_type="text/csv")

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest) -> CompareResponse:
        coeffs_a = _coeffs(req.law_a, req.coefficients_a)
        coeffs_b = _coeffs(req.law_b, req.coefficients_b)
        if req.records_csv is not None:
            scales = [r.scale for r in parse_records(req.records_csv)]
        else:
            scales = list(reference_grid(req.grid).scales)
        if req.sparsity is not None:
            scales = [ModelScale(s.n_active, s.d_tokens, req.sparsity) for s in scales]
        report = compare_laws(coeffs_a, coeffs_b, scales)
        return CompareResponse(
            law_a=report.law_a,
            law_b=report.law_b,
            max_abs_diff=report.max_abs_diff,
            argmax=ScalePoint(
                n_active=report.argmax.n_active,
                d_tokens=report.argmax.d_tokens,
                sparsity=report.argmax.sparsity,
            ),
            points=[
                ComparePoint(
                    n_active=scale.n_active,
                    d_tokens=scale.d_tokens,
                    sparsity=scale.sparsity,
                    loss_a=la,
                    loss_b=lb,
                    diff=diff,
                )
                for scale, la, lb, diff in zip(
                    report.scales, report.loss_a, report.loss_b, report.diffs
                )
            ],
        )

    return app


app = create_app()


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=8000)
