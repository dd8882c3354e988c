"""FastAPI application wrapping the numerical core.

The service keeps per-weight caches (moment tables, kernel coefficient
tables) alive across requests, which is the point of running it long-lived:
a classification or deep kernel norm against the same weight amortises to
coefficient algebra after the first call.  All handlers are thin: parse the
name grammar, call the core, shape the response.
"""

from __future__ import annotations

import json
import math
import threading

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..analytic import parse_symbol
from ..classify import GridSpec, classify
from ..config import DEFAULTS, Settings
from ..errors import BergnumError, ConfigError, DegenerateDiscError
from ..experiments import ExperimentSpec, list_experiments, run_experiment
from ..geometry import lattice
from ..kernels import kernel_lp_norm, kernel_norm_bound, kernel_series
from ..oscillation import oscillation_report
from ..transforms import (hankel_norm_lower_bound, hankel_norm_p2, project,
                          v_sup_norm, v_transform)
from ..weights import parse_weight, weight_from_json
from . import schemas as S


class _WeightCache:
    """Process-wide weight/kernel cache keyed by the spec string."""

    def __init__(self):
        self._lock = threading.Lock()
        self._weights: dict = {}
        self._series: dict = {}

    def weight(self, spec):
        if not isinstance(spec, str):
            doc = spec.model_dump() if hasattr(spec, "model_dump") else dict(spec)
            return weight_from_json(doc)
        with self._lock:
            w = self._weights.get(spec)
        if w is None:
            w = parse_weight(spec)
            with self._lock:
                self._weights.setdefault(spec, w)
        return w

    def series(self, spec, budget: float):
        key = (spec if isinstance(spec, str) else json.dumps(
            spec.model_dump(), sort_keys=True), round(budget, 12))
        with self._lock:
            entry = self._series.get(key)
        if entry is None:
            entry = kernel_series(self.weight(spec), radius_budget=budget,
                                  rel_tol=1e-9)
            with self._lock:
                self._series.setdefault(key, entry)
        return entry


def create_app(settings: Settings = DEFAULTS) -> FastAPI:
    app = FastAPI(title="bergnum",
                  description="Weighted Bergman kernels, Hankel operators and "
                              "hyperbolic-metric oscillation, as a service",
                  version=__version__)
    cache = _WeightCache()

    @app.exception_handler(BergnumError)
    async def _err(request: Request, exc: BergnumError):
        kind = type(exc).__name__
        status = 422 if isinstance(exc, (ConfigError,)) else 400
        if isinstance(exc, DegenerateDiscError):
            status = 409
        return JSONResponse(status_code=status,
                            content={"error": str(exc), "kind": kind})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "version": __version__}

    @app.post("/weights/classify", response_model=S.ClassifyResponse)
    def weights_classify(req: S.ClassifyRequest):
        w = cache.weight(req.weight)
        rep = classify(w, GridSpec(k_max=req.k_max, x_pow_max=req.x_pow_max))
        constants = {k: (v if isinstance(v, (int, float)) and math.isfinite(v)
                         else None)
                     for k, v in rep.constants.items()}
        return S.ClassifyResponse(
            weight=rep.weight_name,
            verdicts={"upper_doubling": rep.in_upper_doubling,
                      "reverse_doubling": rep.in_reverse_doubling,
                      "moment_ratio": rep.in_moment_ratio,
                      "two_sided": rep.in_two_sided},
            constants=constants)

    @app.post("/compute/kernel-norm", response_model=S.KernelNormResponse)
    def compute_kernel_norm(req: S.KernelNormRequest):
        zs = req.z if req.z else [1.0 - 2.0 ** (-k) for k in range(1, req.k_max + 1)]
        budget = min(max(zs) + 0.5 * (1.0 - max(zs)), 1.0 - 1e-12)
        budget = max(budget, 0.5)
        K = cache.series(req.weight, budget)
        nu = cache.weight(req.nu)
        w = cache.weight(req.weight)
        rows = []
        for z in zs:
            norm = kernel_lp_norm(K, nu, req.p, req.N, z, rel_tol=1e-7)
            bound = kernel_norm_bound(w, nu, req.p, req.N, z) if req.with_bound \
                else None
            rows.append(S.KernelNormRow(z=z, norm=norm, bound=bound))
        return S.KernelNormResponse(rows=rows)

    @app.post("/compute/project", response_model=S.ProjectResponse)
    def compute_project(req: S.ProjectRequest):
        w = cache.weight(req.weight)
        f = parse_symbol(req.symbol)
        pf = project(f, w, n_max=req.n_max, method="quad")
        return S.ProjectResponse(
            coefficients_re=[float(c.real) for c in pf.coeffs],
            coefficients_im=[float(c.imag) for c in pf.coeffs])

    @app.post("/compute/v-transform", response_model=S.VTransformResponse)
    def compute_v_transform(req: S.VTransformRequest):
        w = cache.weight(req.weight)
        nu = cache.weight(req.nu)
        f = parse_symbol(req.symbol)
        ims = req.z_im if req.z_im is not None else [0.0] * len(req.z_re)
        if len(ims) != len(req.z_re):
            raise ConfigError("z_re and z_im must have equal length")
        vals = [v_transform(f, w, nu, complex(a, b), n_max=req.n_max)
                for a, b in zip(req.z_re, ims)]
        sup = None
        if req.sup_over_lattice:
            lat = lattice(DEFAULTS.lattice_delta, DEFAULTS.lattice_max_level)
            sup = v_sup_norm(f, w, nu, lat, n_max=req.n_max)
        return S.VTransformResponse(
            values_re=[v.real for v in vals],
            values_im=[v.imag for v in vals], sup=sup)

    @app.post("/compute/hankel-norm", response_model=S.HankelNormResponse)
    def compute_hankel_norm(req: S.HankelNormRequest):
        w = cache.weight(req.weight)
        f = parse_symbol(req.symbol)
        if req.p == 2.0:
            rep = hankel_norm_p2(f, w, req.d)
            return S.HankelNormResponse(p=2.0, d=req.d, value=rep.value,
                                        value_half=rep.value_half,
                                        kind="exact_p2")
        lb = hankel_norm_lower_bound(f, w, req.p, req.trials, seed=req.seed)
        return S.HankelNormResponse(p=req.p, d=req.d, value=lb,
                                    kind="monte_carlo_lower_bound")

    @app.post("/compute/bmo", response_model=S.BmoResponse)
    def compute_bmo(req: S.BmoRequest):
        w = cache.weight(req.weight)
        f = parse_symbol(req.symbol)
        lat = lattice(req.lattice_delta, req.lattice_level)
        rep = oscillation_report(f, w, req.p, req.r, lat, with_bo=True)
        return S.BmoResponse(bmo=rep.bmo, ba=rep.ba, bo=rep.bo,
                             degenerate_points=len(rep.degenerate_points),
                             lattice_points=len(rep.points))

    @app.get("/experiments")
    def experiments_list():
        return {"experiments": list_experiments()}

    @app.post("/experiments/{name}/run", response_model=S.ExperimentSummary)
    def experiments_run(name: str, req: S.ExperimentRunRequest):
        out_dir = settings.output_dir if req.persist else None
        if name == "all":
            from ..experiments import run_many
            jobs = int(req.params.get("jobs", 0))
            results = run_many(list_experiments(), settings, jobs=jobs,
                               out_dir=out_dir)
            verdicts = {n: r.get("verdict", "error") for n, r in results.items()}
            agg = "pass" if all(v == "pass" for v in verdicts.values()) \
                else "partial"
            return S.ExperimentSummary(name="all", verdict=agg,
                                       tables={"verdicts": verdicts})
        spec = ExperimentSpec(
            name=name,
            weights=req.weights or [],
            symbols=req.symbols or [],
            exponents=req.exponents or [],
            params=req.params,
            depth=req.depth or settings.dyadic_depth,
            band_limit=req.band_limit or settings.band_limit,
            slope_tol=settings.slope_tol,
            seed=settings.seed)
        bundle = run_experiment(name, settings, spec, out_dir)
        return S.ExperimentSummary(name=name, verdict=bundle["verdict"],
                                   reports=bundle["reports"],
                                   tables=bundle["tables"])

    return app
