"""JSON-over-HTTP session service around datasets, models and interactions.

Datasets and fitted models are immutable once created; every interaction
writes only to a per-point working copy (current features, last feasible
position, constraints). Creation endpoints are content-addressed, so retrying
any request reproduces its response instead of duplicating state. All
handlers run on the event loop thread, which serializes requests and gives
every session a total order for free.

Error payloads are always {code, message, details} with status 400, 404, 409
or 422.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .autoencoder import AEModel, TrainConfig, TrainingDivergedError, check_feasibility, train_autoencoder
from .constraints import ConstraintError, ConstraintSet, lock_tolerances
from .dataset import CsvParseError, Dataset, load_csv
from .interactions import (
    FEASIBILITY_TOL_FACTOR,
    PlaneBounds,
    compute_feasibility_map,
    compute_proline,
    proline_lengths,
    projection_marks,
    snap_position,
)
from .pca import DegenerateFitError, PCAModel, fit_pca
from .solver import InfeasibleBoundsError


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}


@dataclass
class PointState:
    base_x: np.ndarray  # reference features that backward solves start from
    current_x: np.ndarray
    last_feasible_position: np.ndarray
    constraints: ConstraintSet


@dataclass
class ModelEntry:
    model_id: str
    dataset_id: str
    kind: str
    model: object
    base_positions: np.ndarray
    plane_bounds: PlaneBounds
    response: dict
    points: dict = field(default_factory=dict)


@dataclass
class Store:
    datasets: dict = field(default_factory=dict)
    dataset_responses: dict = field(default_factory=dict)
    models: dict = field(default_factory=dict)


def _finite(value, what: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ApiError(422, "validation_error", f"{what} is not a number", {"value": value})
    if not math.isfinite(out):
        raise ApiError(422, "validation_error", f"{what} must be finite", {"value": value})
    return out


def _stats_json(data: Dataset) -> list[dict]:
    return [
        {"name": name, "mean": s.mean, "std": s.std, "min": s.min, "max": s.max}
        for name, s in zip(data.feature_names, data.stats)
    ]


def _constraints_to_names(cs: ConstraintSet, names) -> dict:
    payload = cs.to_json()
    return {
        "features": {names[int(k)]: v for k, v in payload["features"].items()}
    }


def _constraints_from_names(payload: dict, data: Dataset) -> ConstraintSet:
    cs = ConstraintSet.empty(data.d)
    entries = payload or {}
    for name, entry in entries.items():
        if name not in data.feature_names:
            raise ApiError(422, "validation_error", f"unknown feature {name!r}")
        i = data.feature_names.index(name)
        if not isinstance(entry, dict):
            raise ApiError(422, "validation_error", f"constraint for {name!r} must be an object")
        if entry.get("locked"):
            if entry.get("lock_value") is None:
                raise ApiError(422, "validation_error", f"lock on {name!r} needs lock_value")
            cs.lock(i, _finite(entry["lock_value"], f"lock_value of {name!r}"))
        if entry.get("lower") is not None:
            cs.set_lower(i, _finite(entry["lower"], f"lower bound of {name!r}"))
        if entry.get("upper") is not None:
            cs.set_upper(i, _finite(entry["upper"], f"upper bound of {name!r}"))
    try:
        cs.validate()
    except ConstraintError as exc:
        raise ApiError(422, "invalid_constraints", str(exc))
    return cs


def create_app() -> FastAPI:
    app = FastAPI(title="drsteer service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = Store()
    app.state.store = store

    @app.exception_handler(ApiError)
    async def api_error_handler(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "validation_error",
                "message": "request failed validation",
                "details": {"errors": json.loads(json.dumps(exc.errors(), default=str))},
            },
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_error_handler(_req: Request, exc: StarletteHTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": "http_error", "message": str(exc.detail), "details": {}},
        )

    def get_dataset(dataset_id: str) -> Dataset:
        if dataset_id not in store.datasets:
            raise ApiError(404, "not_found", f"unknown dataset {dataset_id!r}")
        return store.datasets[dataset_id]

    def get_entry(model_id: str) -> ModelEntry:
        if model_id not in store.models:
            raise ApiError(404, "not_found", f"unknown model {model_id!r}")
        return store.models[model_id]

    def get_point_index(data: Dataset, point_id: str) -> int:
        try:
            return data.index_of(str(point_id))
        except KeyError:
            raise ApiError(404, "not_found", f"unknown point {point_id!r}")

    def point_state(entry: ModelEntry, data: Dataset, point_id: str) -> PointState:
        if point_id in entry.points:
            return entry.points[point_id]
        idx = data.index_of(point_id)
        return PointState(
            base_x=data.values[idx].copy(),
            current_x=data.values[idx].copy(),
            last_feasible_position=entry.base_positions[idx].copy(),
            constraints=ConstraintSet.empty(data.d),
        )

    async def read_json(request: Request) -> dict:
        try:
            payload = await request.json()
        except Exception:
            raise ApiError(400, "bad_request", "request body is not valid JSON")
        if not isinstance(payload, dict):
            raise ApiError(400, "bad_request", "request body must be a JSON object")
        return payload

    @app.post("/datasets")
    async def create_dataset(request: Request, id_column: str | None = None):
        """Load a CSV payload; the dataset id is a content hash, so retries
        return the original response."""
        body = await request.body()
        digest = hashlib.sha256(body + b"\x00" + (id_column or "").encode()).hexdigest()[:12]
        dataset_id = f"ds-{digest}"
        if dataset_id in store.datasets:
            return store.dataset_responses[dataset_id]
        try:
            data = load_csv(body, id_column=id_column)
        except CsvParseError as exc:
            raise ApiError(400, "csv_parse_error", str(exc))
        response = {
            "dataset_id": dataset_id,
            "n": data.n,
            "d": data.d,
            "feature_names": list(data.feature_names),
            "ids": list(data.ids),
            "stats": _stats_json(data),
        }
        store.datasets[dataset_id] = data
        store.dataset_responses[dataset_id] = response
        return response

    @app.get("/datasets/{dataset_id}")
    async def read_dataset(dataset_id: str):
        data = get_dataset(dataset_id)
        response = dict(store.dataset_responses[dataset_id])
        response["values"] = data.values.tolist()
        return response

    @app.post("/datasets/{dataset_id}/models")
    async def fit_model(dataset_id: str, request: Request):
        data = get_dataset(dataset_id)
        payload = await read_json(request)
        method = payload.get("method", "pca")
        if method not in ("pca", "autoencoder"):
            raise ApiError(400, "unknown_method", f"unknown method {method!r}")
        canonical = json.dumps(payload, sort_keys=True)
        digest = hashlib.sha256(f"{dataset_id}|{canonical}".encode()).hexdigest()[:12]
        model_id = f"m-{digest}"
        if model_id in store.models:
            return store.models[model_id].response

        try:
            if method == "pca":
                model = fit_pca(data, standardize=bool(payload.get("standardize", True)))
            else:
                cfg_payload = payload.get("train_config") or {}
                sizes = cfg_payload.get("layer_sizes")
                config = TrainConfig(
                    epochs=int(cfg_payload.get("epochs", 200)),
                    batch_size=int(cfg_payload.get("batch_size", min(64, data.n))),
                    learning_rate=float(cfg_payload.get("learning_rate", 1e-3)),
                    seed=int(cfg_payload.get("seed", 0)),
                    layer_sizes=tuple(sizes) if sizes else None,
                )
                model = train_autoencoder(data, config)
        except DegenerateFitError as exc:
            raise ApiError(422, "degenerate_fit", str(exc))
        except TrainingDivergedError as exc:
            raise ApiError(409, "training_diverged", str(exc))
        except ValueError as exc:
            raise ApiError(422, "validation_error", str(exc))

        base_positions = model.project_batch(data.values)
        plane_bounds = PlaneBounds.around(base_positions)
        response = {
            "model_id": model_id,
            "dataset_id": dataset_id,
            "method": method,
            "positions": base_positions.tolist(),
            "plane_bounds": plane_bounds.to_json(),
        }
        store.models[model_id] = ModelEntry(
            model_id=model_id,
            dataset_id=dataset_id,
            kind=method,
            model=model,
            base_positions=base_positions,
            plane_bounds=plane_bounds,
            response=response,
        )
        return response

    @app.get("/models/{model_id}")
    async def read_model(model_id: str):
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        positions = entry.base_positions.copy()
        for pid, st in entry.points.items():
            positions[data.index_of(pid)] = st.last_feasible_position
        response = dict(entry.response)
        response["positions"] = positions.tolist()
        response["touched"] = sorted(entry.points.keys())
        return response

    @app.post("/models/{model_id}/forward")
    async def forward(model_id: str, request: Request):
        """Set features to absolute values and report the resulting plane
        position. delta_y is relative to the point's untouched projection, so
        identical requests give identical responses."""
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        payload = await read_json(request)
        point_id = str(payload.get("point_id"))
        idx = get_point_index(data, point_id)
        edits = payload.get("features") or {}
        if not isinstance(edits, dict):
            raise ApiError(422, "validation_error", "features must be an object")

        st = point_state(entry, data, point_id)
        new_x = st.current_x.copy()
        for name, value in edits.items():
            if name not in data.feature_names:
                raise ApiError(422, "validation_error", f"unknown feature {name!r}")
            new_x[data.feature_names.index(name)] = _finite(value, f"feature {name!r}")
        position = entry.model.project(new_x)
        if edits:
            st.current_x = new_x
            st.base_x = new_x.copy()
            st.last_feasible_position = position.copy()
            entry.points[point_id] = st
        # both projections go through the same single-row path, so an edit
        # that restates the original values reports a delta of exactly zero
        delta_y = position - entry.model.project(data.values[idx])
        return {
            "point_id": point_id,
            "position": position.tolist(),
            "delta_y": delta_y.tolist(),
        }

    @app.post("/models/{model_id}/backward")
    async def backward(model_id: str, request: Request):
        """Solve for features that put the point at target_position.

        The solve always starts from the reference features established by
        the last forward edit (or the original row), so repeating a request
        cannot drift. The working copy is updated only on a feasible result.
        """
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        payload = await read_json(request)
        point_id = str(payload.get("point_id"))
        get_point_index(data, point_id)
        target = payload.get("target_position")
        if not isinstance(target, (list, tuple)) or len(target) != 2:
            raise ApiError(422, "validation_error", "target_position must be [x, y]")
        target = np.array([_finite(target[0], "target x"), _finite(target[1], "target y")])
        constrained = bool(payload.get("constrained", True))

        st = point_state(entry, data, point_id)
        tol = FEASIBILITY_TOL_FACTOR * entry.plane_bounds.width
        if entry.kind == "pca":
            model: PCAModel = entry.model
            delta_y = target - model.project(st.base_x)
            try:
                if constrained and not st.constraints.is_empty:
                    sol = model.backward_constrained(delta_y, st.constraints, st.base_x)
                    dx, residual = sol.delta_x, sol.residual
                else:
                    dx = model.backward(delta_y)
                    residual = float(np.linalg.norm(model.forward(dx) - delta_y))
            except InfeasibleBoundsError as exc:
                raise ApiError(409, "infeasible_constraints", str(exc))
            feasible = residual <= tol
            x_new = st.base_x + dx
            violations = []
        else:
            model: AEModel = entry.model
            if np.array_equal(target, st.last_feasible_position):
                # a drag that never leaves the current position is a no-op;
                # decoding anyway would swap the features for their
                # reconstruction even though nothing moved
                return {
                    "point_id": point_id,
                    "features": st.current_x.tolist(),
                    "position_feasible": True,
                    "residual": 0.0,
                    "snapped_position": target.tolist(),
                    "violations": [],
                }
            x_new = model.decode(target)
            if constrained:
                result = check_feasibility(
                    model, target, st.constraints, lock_tolerances(data.stats)
                )
                feasible = result.feasible
                violations = result.violations
                residual = float(len(violations))
            else:
                feasible, violations, residual = True, [], 0.0

        snapped = snap_position(st.last_feasible_position, target, feasible)
        if feasible:
            st.current_x = x_new
            st.last_feasible_position = snapped.copy()
            entry.points[point_id] = st
        return {
            "point_id": point_id,
            "features": x_new.tolist(),
            "position_feasible": bool(feasible),
            "residual": residual,
            "snapped_position": snapped.tolist(),
            "violations": violations,
        }

    @app.get("/models/{model_id}/prolines")
    async def prolines(model_id: str, point_id: str, top_k: int | None = None, c: float = 0.25):
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        get_point_index(data, point_id)
        if c <= 0:
            raise ApiError(422, "validation_error", "c must be positive")
        if top_k is not None and top_k < 1:
            raise ApiError(422, "validation_error", "top_k must be at least 1")
        st = point_state(entry, data, point_id)
        lengths = proline_lengths(
            entry.model, data, point_id, c=c, current_x=st.current_x, top_k=top_k
        )
        lines = []
        for i, _length in lengths:
            pro = compute_proline(
                entry.model, data, point_id, i, c=c, current_x=st.current_x
            )
            item = pro.to_json()
            item["feature_name"] = data.feature_names[i]
            lines.append(item)
        marks = projection_marks(entry.model, data, point_id, st.current_x)
        return {
            "point_id": point_id,
            "prolines": lines,
            "lengths": [[i, length] for i, length in lengths],
            "marks": [m.to_json() for m in marks],
        }

    @app.put("/models/{model_id}/constraints")
    async def put_constraints(model_id: str, request: Request):
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        payload = await read_json(request)
        point_id = str(payload.get("point_id"))
        get_point_index(data, point_id)
        cs = _constraints_from_names(payload.get("constraints") or {}, data)
        st = point_state(entry, data, point_id)
        st.constraints = cs
        entry.points[point_id] = st
        return JSONResponse(status_code=204, content=None)

    @app.get("/models/{model_id}/constraints")
    async def get_constraints(model_id: str, point_id: str):
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        get_point_index(data, point_id)
        st = point_state(entry, data, point_id)
        payload = _constraints_to_names(st.constraints, data.feature_names)
        payload["point_id"] = point_id
        return payload

    @app.post("/models/{model_id}/feasibility")
    async def feasibility(model_id: str, request: Request):
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        payload = await read_json(request)
        point_id = str(payload.get("point_id"))
        get_point_index(data, point_id)
        resolution = payload.get("resolution") or [32, 32]
        if (
            not isinstance(resolution, (list, tuple))
            or len(resolution) != 2
            or not all(isinstance(v, int) and 1 <= v <= 256 for v in resolution)
        ):
            raise ApiError(422, "validation_error", "resolution must be [nx, ny] within 1..256")
        st = point_state(entry, data, point_id)
        grid = compute_feasibility_map(
            entry.model,
            data,
            point_id,
            st.constraints,
            resolution=(resolution[0], resolution[1]),
            plane_bounds=entry.plane_bounds,
            current_x=st.base_x,
        )
        response = grid.to_json()
        response["point_id"] = point_id
        return response

    @app.get("/models/{model_id}/knn")
    async def nearest(model_id: str, point_id: str, k: int = 10):
        from .evaluation import knn as knn_oracle

        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        idx = get_point_index(data, point_id)
        if not 1 <= k <= data.n - 1:
            raise ApiError(422, "validation_error", f"k must be in [1, {data.n - 1}]")
        positions = entry.base_positions.copy()
        for pid, st in entry.points.items():
            positions[data.index_of(pid)] = st.last_feasible_position
        neighbors = knn_oracle(positions, idx, k)
        return {
            "point_id": point_id,
            "k": k,
            "neighbors": [
                {"id": data.ids[i], "distance": dist} for i, dist in neighbors
            ],
        }

    @app.get("/models/{model_id}/state")
    async def state(model_id: str, point_id: str):
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        idx = get_point_index(data, point_id)
        st = point_state(entry, data, point_id)
        position = (
            st.last_feasible_position
            if point_id in entry.points
            else entry.base_positions[idx]
        )
        return {
            "point_id": point_id,
            "touched": point_id in entry.points,
            "features": st.current_x.tolist(),
            "position": position.tolist(),
            "original_features": data.values[idx].tolist(),
            "original_position": entry.base_positions[idx].tolist(),
            "constraints": _constraints_to_names(st.constraints, data.feature_names),
        }

    @app.post("/models/{model_id}/reset")
    async def reset(model_id: str, request: Request):
        """Drop the point's working copy; the original row was never touched."""
        entry = get_entry(model_id)
        data = store.datasets[entry.dataset_id]
        payload = await read_json(request)
        point_id = str(payload.get("point_id"))
        idx = get_point_index(data, point_id)
        entry.points.pop(point_id, None)
        return {
            "point_id": point_id,
            "features": data.values[idx].tolist(),
            "position": entry.base_positions[idx].tolist(),
        }

    return app


app = create_app()
