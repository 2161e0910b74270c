import threading
from collections import defaultdict
from typing import Dict, List


class MetricsCollector:
    """
    Effort and quality counters for enclosure runs.
    Shared by worker threads, so every update takes the collector lock.
    """

    def __init__(self):
        self.counters: Dict[str, int] = defaultdict(int)
        self.histograms: Dict[str, List[float]] = defaultdict(list)
        self.gauges: Dict[str, float] = {}
        self.lock = threading.Lock()

    def counter(self, name: str) -> "Counter":
        return Counter(name, self)

    def histogram(self, name: str) -> "Histogram":
        return Histogram(name, self)

    def gauge(self, name: str) -> "Gauge":
        return Gauge(name, self)

    def reset(self):
        """Clear everything; called at the start of each CLI run"""
        with self.lock:
            self.counters.clear()
            self.histograms.clear()
            self.gauges.clear()

    def get_metrics(self) -> Dict:
        with self.lock:
            return {
                "counters": dict(self.counters),
                "histograms": {name: _summary(values) for name, values in self.histograms.items()},
                "gauges": dict(self.gauges),
            }


def _summary(values: List[float]) -> Dict:
    if not values:
        return {"count": 0, "sum": 0, "avg": 0, "min": 0, "max": 0}
    return {
        "count": len(values),
        "sum": sum(values),
        "avg": sum(values) / len(values),
        "min": min(values),
        "max": max(values),
    }


class Counter:
    """Monotonically increasing count"""

    def __init__(self, name: str, collector: MetricsCollector):
        self.name = name
        self.collector = collector

    def inc(self, value: int = 1):
        with self.collector.lock:
            self.collector.counters[self.name] += value

    def get(self) -> int:
        with self.collector.lock:
            return self.collector.counters.get(self.name, 0)


class Histogram:
    """Distribution of observed values (enclosure widths, node seconds)"""

    def __init__(self, name: str, collector: MetricsCollector):
        self.name = name
        self.collector = collector

    def observe(self, value: float):
        with self.collector.lock:
            self.collector.histograms[self.name].append(float(value))

    def get_stats(self) -> Dict:
        with self.collector.lock:
            return _summary(list(self.collector.histograms.get(self.name, [])))


class Gauge:
    """Value that can go up or down"""

    def __init__(self, name: str, collector: MetricsCollector):
        self.name = name
        self.collector = collector

    def set(self, value: float):
        with self.collector.lock:
            self.collector.gauges[self.name] = value

    def get(self) -> float:
        with self.collector.lock:
            return self.collector.gauges.get(self.name, 0.0)


# Global metrics collector
_metrics = MetricsCollector()


def get_metrics() -> MetricsCollector:
    return _metrics
