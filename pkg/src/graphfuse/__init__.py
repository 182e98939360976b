"""graphfuse: heterogeneous datasets in, one integrated property graph out."""

from .build import GraphBuilder
from .config import BuildConfig, ConfigError, load_config
from .model import (
    DataModel,
    Dataset,
    Edge,
    EdgeError,
    Node,
    NodeKind,
    ProvenanceError,
)
from .pipeline import BuildReport, DatasetSpec, run_build
from .search import find_connection
from .storage import GraphStore, MemoryStore, SqliteStore, export_graph, import_graph
from .values import (
    FactorizationPolicy,
    LabelPath,
    NullCodeSet,
    classify_value,
    factorization_key,
    frequent_values,
    is_factorizable,
)

__version__ = "0.1.0"

__all__ = [
    "GraphBuilder",
    "BuildConfig",
    "ConfigError",
    "DataModel",
    "Dataset",
    "Edge",
    "EdgeError",
    "Node",
    "NodeKind",
    "ProvenanceError",
    "BuildReport",
    "DatasetSpec",
    "run_build",
    "find_connection",
    "GraphStore",
    "MemoryStore",
    "SqliteStore",
    "export_graph",
    "import_graph",
    "FactorizationPolicy",
    "LabelPath",
    "NullCodeSet",
    "classify_value",
    "factorization_key",
    "frequent_values",
    "is_factorizable",
    "__version__",
]
