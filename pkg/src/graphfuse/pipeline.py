"""End-to-end build pipeline: ingest, extract, disambiguate, match.

Stages run in order and each one is optional after ingestion.  The build
report follows the loading-table shape: |E|, |N|, storage time, extraction
time, entity counts per type, matching time, and total time, plus a measured
cost model whose four constants correspond to edge storage, node storage plus
extraction, per-entity disambiguation, and per-pair matching.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .build import GraphBuilder
from .config import BuildConfig, EXTRACTOR_OFF, NED_OFF
from .extract import (
    ExtractionError,
    GazetteerExtractor,
    RemoteExtractor,
    attach_entities,
    load_gazetteer,
)
from .ingest import (
    DatasetError,
    Grid2d,
    IngestReport,
    ServiceError,
    ingest_2dtable,
    ingest_html,
    ingest_json,
    ingest_ntriples,
    ingest_pdf,
    ingest_relational,
    ingest_text,
    ingest_xml,
    read_csv,
)
from .match import EquivalenceStore, MatchReport, default_rules, match_nodes
from .model import EPSILON, DataModel, Dataset, NodeKind
from .ned import EntityLinker, NedClient, NedRequest
from .storage import GraphStore
from .values import NullCodeSet

LAST_REPORT_META = "last_report"

_EXTRACTION_TARGETS = (NodeKind.VALUE, NodeKind.TEXT_SEGMENT)


@dataclass(frozen=True)
class DatasetSpec:
    model: DataModel
    source: str
    prov: Optional[str] = None


@dataclass
class CostModel:
    """Measured constants of the construction cost
    c1*|E| + c2*|N| + c3*Ne + c4*|N|^2 (the last term bounded by the pairs
    actually compared after blocking)."""

    edges: int = 0
    nodes: int = 0
    entities: int = 0
    pairs_compared: int = 0
    c1: float = 0.0  # per-edge storage
    c2: float = 0.0  # per-node storage + extractor invocation
    c3: float = 0.0  # per-entity disambiguation
    c4: float = 0.0  # per-pair match record

    @classmethod
    def measure(
        cls,
        edges: int,
        nodes: int,
        entities: int,
        pairs: int,
        t_db: float,
        t_extract: float,
        t_ned: float,
        t_match: float,
    ) -> "CostModel":
        stored = max(edges + nodes, 1)
        per_record = t_db / stored
        return cls(
            edges=edges,
            nodes=nodes,
            entities=entities,
            pairs_compared=pairs,
            c1=per_record,
            c2=per_record + t_extract / max(nodes, 1),
            c3=t_ned / max(entities, 1),
            c4=t_match / max(pairs, 1),
        )

    def to_dict(self) -> dict:
        return dict(vars(self))


@dataclass
class BuildReport:
    datasets: List[dict] = field(default_factory=list)
    nodes: int = 0
    edges: int = 0
    similar: int = 0
    n_person: int = 0
    n_location: int = 0
    n_organization: int = 0
    t_db: float = 0.0
    t_extract: float = 0.0
    t_ned: float = 0.0
    t_match: float = 0.0
    t_total: float = 0.0
    extraction_failures: int = 0
    ned_failures: int = 0
    dataset_errors: int = 0
    service_errors: int = 0
    match: Optional[dict] = None
    cost: Optional[dict] = None

    def to_dict(self) -> dict:
        out = dict(vars(self))
        out["datasets"] = [dict(d) for d in self.datasets]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    COLUMNS = ("|E|", "|N|", "T_DB(s)", "T_E(s)", "N_P", "N_L", "N_O", "T_m(s)", "T(s)")

    def table(self) -> str:
        values = (
            self.edges,
            self.nodes,
            f"{self.t_db:.2f}",
            f"{self.t_extract:.2f}",
            self.n_person,
            self.n_location,
            self.n_organization,
            f"{self.t_match:.2f}",
            f"{self.t_total:.2f}",
        )
        widths = [max(len(str(v)), len(c)) for v, c in zip(values, self.COLUMNS)]
        header = "  ".join(c.rjust(w) for c, w in zip(self.COLUMNS, widths))
        row = "  ".join(str(v).rjust(w) for v, w in zip(values, widths))
        return header + "\n" + row


def make_extractor(config: BuildConfig):
    if config.extractor == EXTRACTOR_OFF:
        return None
    if config.extractor.startswith("gazetteer:"):
        path = config.extractor.split(":", 1)[1]
        return GazetteerExtractor(load_gazetteer(path))
    return RemoteExtractor(config.extractor, lang=config.lang)


def ingest_spec(
    builder: GraphBuilder, spec: DatasetSpec, config: BuildConfig
) -> Tuple[Dataset, IngestReport]:
    """Register the dataset and run the ingester for its data model."""
    ds = builder.register_dataset(spec.model, spec.prov)
    path = Path(spec.source)
    if spec.model is DataModel.RELATIONAL:
        table = read_csv(path, has_header=config.csv_has_header)
        report = ingest_relational(builder, table, ds)
    elif spec.model is DataModel.RDF:
        with open(path, encoding="utf-8") as handle:
            report = ingest_ntriples(builder, handle, ds)
    elif spec.model is DataModel.JSON:
        report = ingest_json(builder, path.read_text(encoding="utf-8"), ds)
    elif spec.model is DataModel.XML:
        report = ingest_xml(builder, path.read_text(encoding="utf-8"), ds)
    elif spec.model is DataModel.HTML:
        report = ingest_html(builder, path.read_text(encoding="utf-8"), ds)
    elif spec.model is DataModel.TEXT:
        report = ingest_text(builder, path.read_text(encoding="utf-8"), ds)
    elif spec.model is DataModel.TABLE2D:
        try:
            descriptor = json.loads(path.read_text(encoding="utf-8"))
            grid = Grid2d(
                cells=descriptor["cells"],
                header_rows=int(descriptor.get("headerRows", 0)),
                header_cols=int(descriptor.get("headerCols", 0)),
                merges=[tuple(m) for m in descriptor.get("merges", [])],
                name=descriptor.get("name", path.name),
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"bad 2d-table descriptor: {exc}") from exc
        report = ingest_2dtable(builder, grid, ds)
    elif spec.model is DataModel.PDF_DERIVED:
        report = ingest_pdf(builder, path.read_bytes(), ds, config.pdf_service)
    else:
        raise DatasetError(f"unsupported data model {spec.model}")
    report.dataset = ds.id
    return ds, report


def run_build(
    store: GraphStore, specs: List[DatasetSpec], config: BuildConfig
) -> BuildReport:
    nulls = NullCodeSet(config.null_codes)
    builder = GraphBuilder(
        store,
        policy=config.policy,
        null_codes=nulls,
        null_detection=config.null_detection,
    )
    report = BuildReport()
    started = time.perf_counter()

    for spec in specs:
        entry = {"model": spec.model.value, "source": spec.source, "prov": spec.prov}
        try:
            ds, ingest_report = ingest_spec(builder, spec, config)
            entry.update(ingest_report.to_dict())
        except ServiceError as exc:
            report.service_errors += 1
            entry["error"] = str(exc)
            entry["retryable"] = exc.retryable
        except (DatasetError, OSError) as exc:
            report.dataset_errors += 1
            entry["error"] = str(exc)
        report.datasets.append(entry)
    store.flush()
    report.t_db = time.perf_counter() - started

    # extraction: run over value and text-segment labels, memoized by label
    contexts: List[Tuple[str, list, list]] = []
    extractor = make_extractor(config)
    if extractor is not None:
        stage = time.perf_counter()
        targets = [
            (node.id, node.label, node.dataset)
            for node in store.scan_nodes()
            if node.kind in _EXTRACTION_TARGETS and node.label != EPSILON
        ]
        memo: Dict[str, Optional[list]] = {}
        for node_id, label, dataset in targets:
            if label in memo:
                occurrences = memo[label]
            else:
                try:
                    occurrences = extractor.extract(label)
                except ExtractionError:
                    occurrences = None
                    report.extraction_failures += 1
                memo[label] = occurrences
            if not occurrences:
                continue
            attached = attach_entities(builder, node_id, dataset, occurrences)
            contexts.append((label, occurrences, [entity for entity, _ in attached]))
        store.flush()
        report.t_extract = time.perf_counter() - stage

    # disambiguation: optional, per occurrence sentence, failure-tolerant
    equivalences = EquivalenceStore()
    if config.ned != NED_OFF and contexts:
        stage = time.perf_counter()
        client = NedClient(config.ned, lang=config.lang)
        linker = EntityLinker(builder, equivalences)
        for label, occurrences, entities in contexts:
            request = NedRequest(
                label,
                tuple((occ.start, occ.end, occ.entity_type) for occ in occurrences),
            )
            result = client.disambiguate(request)
            for uri, entity in zip(result.uris, entities):
                if uri is not None:
                    linker.link_entity(entity, uri)
        report.ned_failures = client.failures
        store.flush()
        report.t_ned = time.perf_counter() - stage

    # matching
    match_report: Optional[MatchReport] = None
    if config.matching != "off":
        stage = time.perf_counter()
        rules = default_rules(entity_only=(config.matching == "entity"))
        match_report = match_nodes(
            store, rules, nulls=builder.nulls, equivalences=equivalences
        )
        report.match = match_report.to_dict()
        report.t_match = time.perf_counter() - stage
    elif len(equivalences):
        equivalences.persist(store)
        store.flush()
    report.t_total = time.perf_counter() - started

    stats = store.stats()
    report.nodes = stats.nodes
    report.edges = stats.edges
    report.similar = stats.similar
    report.n_person, report.n_location, report.n_organization = stats.entity_counts()
    entities = report.n_person + report.n_location + report.n_organization
    report.cost = CostModel.measure(
        edges=report.edges,
        nodes=report.nodes,
        entities=entities,
        pairs=match_report.pairs_compared if match_report else 0,
        t_db=report.t_db,
        t_extract=report.t_extract,
        t_ned=report.t_ned,
        t_match=report.t_match,
    ).to_dict()
    store.set_meta(LAST_REPORT_META, report.to_json())
    return report
