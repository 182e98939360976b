import pytest

from graphfuse import DataModel, GraphBuilder, MemoryStore, NodeKind
from graphfuse.ingest import DatasetError, ingest_html, ingest_xml
from graphfuse.values import FactorizationPolicy


@pytest.fixture
def builder():
    return GraphBuilder(MemoryStore(), policy=FactorizationPolicy.PER_INSTANCE)


def _kinds(builder):
    return [n.kind for n in builder.store.scan_nodes() if n.kind is not NodeKind.DATASET]


def test_xml_element_attribute_text(builder):
    ds = builder.register_dataset(DataModel.XML)
    report = ingest_xml(builder, '<r a="1">t</r>', ds)
    # element + attribute + 2 value nodes
    assert report.nodes == 4
    kinds = _kinds(builder)
    assert kinds.count(NodeKind.ELEMENT) == 1
    assert kinds.count(NodeKind.ATTRIBUTE) == 1
    labels = {n.label for n in builder.store.scan_nodes()}
    assert {"r", "a", "1", "t"} <= labels


def test_xml_empty_element(builder):
    ds = builder.register_dataset(DataModel.XML)
    report = ingest_xml(builder, "<r/>", ds)
    assert report.nodes == 1
    assert _kinds(builder) == [NodeKind.ELEMENT]


def test_xml_mixed_content_two_text_children(builder):
    ds = builder.register_dataset(DataModel.XML)
    ingest_xml(builder, "<p>hi <b>x</b> bye</p>", ds)
    nodes = {n.id: n for n in builder.store.scan_nodes()}
    p_node = next(n for n in nodes.values() if n.label == "p")
    children = [
        nodes[e.target]
        for e in builder.store.scan_edges()
        if e.source == p_node.id
    ]
    texts = [c for c in children if c.kind is NodeKind.VALUE]
    assert sorted(c.label for c in texts) == ["bye", "hi"]


def test_xml_parse_failure(builder):
    ds = builder.register_dataset(DataModel.XML)
    with pytest.raises(DatasetError):
        ingest_xml(builder, "<r><unclosed></r>", ds)


def test_html_hyperlink_example(builder):
    ds = builder.register_dataset(DataModel.HTML)
    ingest_html(builder, '<a href="http://a.org">label</a>', ds)
    nodes = {n.id: n for n in builder.store.scan_nodes()}
    a_node = next(n for n in nodes.values() if n.label == "a")
    uri_node = next(n for n in nodes.values() if n.label == "http://a.org")
    assert uri_node.kind is NodeKind.URI
    href_edges = [e for e in builder.store.scan_edges() if e.label == "href"]
    assert len(href_edges) == 1
    assert href_edges[0].source == a_node.id
    assert href_edges[0].target == uri_node.id


def test_html_two_pages_share_uri_node(builder):
    ds1 = builder.register_dataset(DataModel.HTML)
    ds2 = builder.register_dataset(DataModel.HTML)
    ingest_html(builder, '<a href="http://a.org/page">one</a>', ds1)
    ingest_html(builder, '<a href="http://a.org/page">two</a>', ds2)
    shared = [n for n in builder.store.scan_nodes() if n.label == "http://a.org/page"]
    assert len(shared) == 1
    incoming = [e for e in builder.store.scan_edges() if e.target == shared[0].id]
    assert len(incoming) == 2


def test_html_plain_paragraph(builder):
    ds = builder.register_dataset(DataModel.HTML)
    report = ingest_html(builder, "<p>hi</p>", ds)
    assert report.nodes == 2  # element + value
    kinds = _kinds(builder)
    assert NodeKind.URI not in kinds


def test_html_tag_soup_recovers(builder):
    ds = builder.register_dataset(DataModel.HTML)
    report = ingest_html(builder, "<div><p>one<p>two</i></div><b>三", ds)
    assert report.nodes > 0  # no exception, lenient recovery


def test_html_attribute_without_value(builder):
    ds = builder.register_dataset(DataModel.HTML)
    report = ingest_html(builder, "<input disabled>", ds)
    assert report.nodes >= 1
