import io

import pytest
from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import getSampleStyleSheet
from reportlab.platypus import (
    PageBreak,
    Paragraph,
    SimpleDocTemplate,
    Spacer,
    Table,
    TableStyle,
)

STYLES = getSampleStyleSheet()


def grid_table(cells):
    table = Table([[c if c is not None else "" for c in row] for row in cells])
    table.setStyle(
        TableStyle(
            [
                ("GRID", (0, 0), (-1, -1), 0.5, colors.black),
                ("FONTSIZE", (0, 0), (-1, -1), 9),
            ]
        )
    )
    return table


def build_pdf(flowables) -> bytes:
    buffer = io.BytesIO()
    SimpleDocTemplate(buffer, pagesize=A4).build(list(flowables))
    return buffer.getvalue()


def paragraph(text):
    return Paragraph(text, STYLES["Normal"])


@pytest.fixture
def pdf_factory():
    def make(tables=(), paragraphs=(), multipage=False):
        flowables = [paragraph(p) for p in paragraphs]
        for cells in tables:
            flowables.append(Spacer(1, 24))
            flowables.append(grid_table(cells))
            if multipage:
                flowables.append(PageBreak())
        return build_pdf(flowables or [paragraph("")])

    return make
