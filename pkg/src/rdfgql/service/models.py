from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class GraphQLRequest(BaseModel):
    model_config = ConfigDict(extra="ignore")

    query: str = Field(min_length=1)
    operationName: Optional[str] = None


class ErrorItem(BaseModel):
    message: str


class GraphQLResponse(BaseModel):
    data: Optional[dict] = None
    errors: Optional[list[ErrorItem]] = None


class Health(BaseModel):
    status: str
    triples: int
    id_mode: str
