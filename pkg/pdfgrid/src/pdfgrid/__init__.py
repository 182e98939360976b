"""pdfgrid: ruled-table and text extraction from PDFs, served over HTTP."""

from .extractor import ExtractedTable, ExtractedText, ExtractionResult, extract, infer_headers
from .metrics import MetricsError, derive_artifacts, evaluate
from .pdfread import NoContentError, PdfError, read_pdf

__version__ = "0.1.0"

__all__ = [
    "ExtractedTable",
    "ExtractedText",
    "ExtractionResult",
    "extract",
    "infer_headers",
    "MetricsError",
    "derive_artifacts",
    "evaluate",
    "NoContentError",
    "PdfError",
    "read_pdf",
    "__version__",
]
