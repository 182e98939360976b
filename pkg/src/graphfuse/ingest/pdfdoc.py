"""PDF ingestion through the table-and-text extraction service.

A PDF yields one JSON dataset with the main text content (line number ->
line content) and one 2d-table dataset per recognized table.  Each derived
dataset's node points back to the URI of the original PDF file through a
cl:extractedFromPDF edge, so PDF-derived datasets stay interconnected and
traceable.
"""

from __future__ import annotations

import json
import requests

from ..build import GraphBuilder
from ..model import FROM_PDF_EDGE, DataModel, Dataset
from . import DatasetError, IngestReport, ServiceError
from .grid import Grid2d, ingest_2dtable
from .jsondoc import ingest_json


def ingest_pdf(
    builder: GraphBuilder,
    pdf_bytes: bytes,
    ds: Dataset,
    endpoint: str,
    timeout: float = 120.0,
) -> IngestReport:
    """Send the PDF to the extraction service and ingest every derived
    dataset.  An unreachable service raises a retryable ServiceError; a
    single bad table is skipped and counted."""
    report = IngestReport(dataset=ds.id)
    pdf_uri = ds.prov or f"urn:pdf:{ds.id}"
    url = endpoint.rstrip("/") + "/extract"
    try:
        reply = requests.post(
            url,
            data=pdf_bytes,
            headers={"Content-Type": "application/pdf", "X-Source-Uri": pdf_uri},
            timeout=timeout,
        )
    except requests.ConnectionError as exc:
        raise ServiceError(f"pdf extractor unreachable at {url}: {exc}", retryable=True)
    except requests.RequestException as exc:
        raise ServiceError(f"pdf extractor request failed: {exc}", retryable=True)
    if reply.status_code == 400:
        raise DatasetError(f"pdf rejected by extractor: {reply.text[:200]}")
    if reply.status_code >= 500:
        raise ServiceError(
            f"pdf extractor error {reply.status_code}: {reply.text[:200]}",
            retryable=True,
        )
    if reply.status_code != 200:
        raise DatasetError(
            f"pdf extractor replied {reply.status_code}: {reply.text[:200]}"
        )
    try:
        payload = reply.json()
        lines = payload["text"]["lines"]
        tables = payload["tables"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ServiceError(f"malformed pdf extractor reply: {exc}")

    uri_node, created = builder.uri_node(pdf_uri, ds.id)
    report.created_node(created)

    # text content: one JSON dataset, line number -> line content
    text_doc = {str(number): content for number, content in lines}
    text_ds = builder.register_dataset(DataModel.JSON, prov=None)
    report.derived_datasets += 1
    builder.add_edge(text_ds.node, uri_node, FROM_PDF_EDGE, text_ds.id, 1.0)
    report.edges += 1
    report.nodes += 1  # the derived dataset node
    sub = ingest_json(builder, text_doc, text_ds)
    sub.dataset = text_ds.id
    report.merge(sub)

    for position, table in enumerate(tables, start=1):
        try:
            grid = Grid2d(
                cells=table["cells"],
                header_rows=int(table.get("headerRows", 0)),
                header_cols=int(table.get("headerCols", 0)),
                name=f"table-p{table.get('pageNumber', 0)}-{position}",
            )
            grid.validate()
        except (KeyError, TypeError, ValueError, DatasetError) as exc:
            report.skipped += 1
            report.errors.append(f"table {position}: {exc}")
            continue
        table_ds = builder.register_dataset(DataModel.TABLE2D, prov=None)
        report.derived_datasets += 1
        builder.add_edge(table_ds.node, uri_node, FROM_PDF_EDGE, table_ds.id, 1.0)
        report.edges += 1
        report.nodes += 1
        sub = ingest_2dtable(builder, grid, table_ds)
        report.merge(sub)
    return report
