try:
    from prometheus_client import Counter, Gauge, Histogram, REGISTRY, generate_latest  # type: ignore
except Exception:  # pragma: no cover - graceful fallback for test env
    class _NoopMetric:
        def __init__(self, *args, **kwargs):
            pass
        def inc(self, *args, **kwargs):
            return None
        def set(self, *args, **kwargs):
            return None
        def observe(self, *args, **kwargs):
            return None
        def labels(self, *args, **kwargs):
            return self
        def time(self):
            import contextlib
            return contextlib.nullcontext()

    # Fallback shims
    Counter = _NoopMetric  # type: ignore
    Gauge = _NoopMetric  # type: ignore
    Histogram = _NoopMetric  # type: ignore
    REGISTRY = None  # type: ignore

    def generate_latest(*args, **kwargs):  # type: ignore
        return b""


# Metrics definitions
BFS_NODES_VISITED = Counter(
    "bfs_nodes_visited_total",
    "Group elements discovered by breadth-first searches",
    labelnames=("kind",),  # kind: closure|cayley
)
GROUP_ELEMENTS_ENUMERATED = Counter(
    "group_elements_enumerated_total", "Elements produced by full PSL2 enumeration"
)
EPI_SAMPLES_TOTAL = Counter(
    "epimorphism_samples_total",
    "Candidate tuples drawn by the epimorphism search",
    labelnames=("outcome",),  # outcome: order|generation|accepted
)
CACHE_LOOKUPS_TOTAL = Counter(
    "cache_lookups_total", "JSON cache lookups", labelnames=("result",)  # hit|miss|corrupt
)
CHARTAB_BUILD_SECONDS = Histogram(
    "chartab_build_seconds",
    "Time to build a character table",
    buckets=(0.01, 0.05, 0.1, 0.5, 1.0, 5.0),
)
LAST_ORTHOGONALITY_DEFECT = Gauge(
    "last_orthogonality_defect", "Orthogonality defect of the last table built"
)
ERRORS_TOTAL = Counter(
    "errors_total", "Total number of errors by type", labelnames=("type",)
)


def render_metrics() -> str:
    """Text exposition of the in-process registry (empty without prometheus_client)."""
    if REGISTRY is None:
        return ""
    return generate_latest(REGISTRY).decode("utf-8")
