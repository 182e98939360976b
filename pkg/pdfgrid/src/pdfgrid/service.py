"""HTTP service: POST /extract turns PDF bytes into tables and text lines.

Stateless request handling; the X-Source-Uri request header is echoed back as
sourceUri so clients can trace derived datasets to the original file.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .extractor import extract
from .pdfread import NoContentError, PdfError

app = FastAPI(title="pdfgrid", version="0.1.0")


@app.get("/healthz")
def healthz():
    return {"status": "ok"}


@app.post("/extract")
async def extract_endpoint(request: Request):
    data = await request.body()
    source_uri = request.headers.get("X-Source-Uri", "")
    try:
        result = extract(data)
    except PdfError as exc:
        return JSONResponse({"error": f"invalid PDF: {exc}"}, status_code=400)
    except NoContentError as exc:
        return JSONResponse({"error": str(exc)}, status_code=422)
    # a valid PDF with empty text and zero tables is still a 200
    return result.to_dict(source_uri)


def serve():
    import uvicorn

    uvicorn.run(
        app,
        host=os.environ.get("PDFGRID_HOST", "127.0.0.1"),
        port=int(os.environ.get("PDFGRID_PORT", "8265")),
    )


if __name__ == "__main__":
    serve()
