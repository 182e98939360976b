"""Shared test corpora: the four-dataset connection fixture and synthetic
document generators with an independent node/edge counting oracle."""

from graphfuse import DataModel, GraphBuilder
from graphfuse.extract import GazetteerExtractor
from graphfuse.ingest import (
    RelationalInput,
    ingest_json,
    ingest_ntriples,
    ingest_relational,
    ingest_text,
)
from graphfuse.model import NodeKind

GAZETTEER = {
    "P. Balkany": (NodeKind.ENTITY_PERSON, 0.98),
    "I. Balkany": (NodeKind.ENTITY_PERSON, 0.97),
    "Levallois-Perret": (NodeKind.ENTITY_LOCATION, 0.95),
    "Marrakech": (NodeKind.ENTITY_LOCATION, 0.96),
    "Morocco": (NodeKind.ENTITY_LOCATION, 0.94),
    "Africa": (NodeKind.ENTITY_LOCATION, 0.93),
    "Centrafrique": (NodeKind.ENTITY_LOCATION, 0.92),
    "Areva": (NodeKind.ENTITY_ORGANIZATION, 0.9),
}

GAZETTEER_TSV = "\n".join(
    f"{surface}\t{kind.value}\t{confidence}"
    for surface, (kind, confidence) in GAZETTEER.items()
)

ASSETS_CSV = (
    "owner,asset,city\n"
    "P. Balkany,Dar Gyucy villa,Marrakech\n"
    "I. Balkany,Giverny mill,Giverny\n"
)

OFFICIALS_JSON = (
    '[{"name": "P. Balkany", "role": "mayor", "city": "Levallois-Perret"},'
    ' {"name": "F. Ruffin", "role": "deputy", "city": "Amiens"}]'
)

ARTICLE_TEXT = (
    "P. Balkany était maire de Levallois-Perret. "
    "Areva a signé un contrat en Centrafrique."
)

PLACES_NT = "\n".join(
    [
        '<http://kb.example.org/Marrakech> <http://kb.example.org/label> "Marrakech" .',
        "<http://kb.example.org/Marrakech> <http://kb.example.org/locatedIn> <http://kb.example.org/Morocco> .",
        '<http://kb.example.org/Morocco> <http://kb.example.org/label> "Morocco" .',
        "<http://kb.example.org/Morocco> <http://kb.example.org/partOf> <http://kb.example.org/Africa> .",
        '<http://kb.example.org/Africa> <http://kb.example.org/label> "Africa" .',
        '<http://kb.example.org/Centrafrique> <http://kb.example.org/label> "Centrafrique" .',
        "<http://kb.example.org/Centrafrique> <http://kb.example.org/partOf> <http://kb.example.org/Africa> .",
    ]
)


def build_connection_fixture(builder: GraphBuilder):
    """Ingest the four miniature datasets (CSV, JSON, text, RDF)."""
    csv_ds = builder.register_dataset(DataModel.RELATIONAL, "https://data.example.org/assets.csv")
    lines = ASSETS_CSV.strip().splitlines()
    columns = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    ingest_relational(builder, RelationalInput("assets.csv", columns, rows), csv_ds)

    json_ds = builder.register_dataset(DataModel.JSON, "https://data.example.org/officials.json")
    ingest_json(builder, OFFICIALS_JSON, json_ds)

    text_ds = builder.register_dataset(DataModel.TEXT, None)
    ingest_text(builder, ARTICLE_TEXT, text_ds)

    rdf_ds = builder.register_dataset(DataModel.RDF, "https://kb.example.org/places.nt")
    ingest_ntriples(builder, PLACES_NT.splitlines(), rdf_ds)
    return csv_ds, json_ds, text_ds, rdf_ds


def gazetteer_extractor() -> GazetteerExtractor:
    return GazetteerExtractor(GAZETTEER)


def write_connection_files(directory):
    """Write the fixture datasets as files for CLI-level tests; returns
    (specs, gazetteer path) where specs are model:path strings."""
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "assets.csv").write_text(ASSETS_CSV, encoding="utf-8")
    (directory / "officials.json").write_text(OFFICIALS_JSON, encoding="utf-8")
    (directory / "article.txt").write_text(ARTICLE_TEXT, encoding="utf-8")
    (directory / "places.nt").write_text(PLACES_NT + "\n", encoding="utf-8")
    gazetteer = directory / "gazetteer.tsv"
    gazetteer.write_text(GAZETTEER_TSV + "\n", encoding="utf-8")
    specs = [
        f"csv:{directory / 'assets.csv'}",
        f"json:{directory / 'officials.json'}",
        f"text:{directory / 'article.txt'}",
        f"rdf:{directory / 'places.nt'}",
    ]
    return specs, gazetteer
