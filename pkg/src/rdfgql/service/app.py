"""HTTP endpoint: POST /graphql runs one query, GET /healthz reports liveness."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from ..errors import BindingError, QuerySyntaxError, QueryTimeout, QueryValidationError
from ..executor import Engine
from .models import GraphQLRequest, GraphQLResponse, Health


def _errors(status: int, messages) -> JSONResponse:
    return JSONResponse({"errors": [{"message": m} for m in messages]}, status_code=status)


def create_app(engine: Engine, timeout: Optional[float] = None) -> FastAPI:
    app = FastAPI(title="rdfgql")
    app.state.engine = engine

    @app.exception_handler(RequestValidationError)
    async def bad_body(_request: Request, exc: RequestValidationError):
        return _errors(400, [f"malformed request body: {e.get('msg', e)}" for e in exc.errors()])

    @app.get("/healthz", response_model=Health)
    def healthz():
        return Health(status="ok", triples=len(engine.index), id_mode=engine.id_mode)

    # plain def: FastAPI runs it in its thread pool, so requests execute concurrently
    @app.post("/graphql", response_model=GraphQLResponse)
    def graphql(body: GraphQLRequest):
        try:
            result = engine.execute(body.query, timeout=timeout)
        except QuerySyntaxError as exc:
            return _errors(400, [str(exc)])
        except QueryValidationError as exc:
            return _errors(400, exc.errors)
        except BindingError as exc:
            return _errors(400, [str(exc)])
        except QueryTimeout as exc:
            return _errors(504, [str(exc)])
        return Response(result.serialize(), media_type="application/json")

    return app
