"""Service layer: pydantic schemas, shared operation handlers, FastAPI app."""
