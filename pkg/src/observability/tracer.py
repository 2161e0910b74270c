import inspect
import threading
import time
import uuid
from contextlib import contextmanager
from functools import wraps
from typing import Any, Callable, Dict, List, Optional

from src.observability.logger import get_logger

logger = get_logger("tracer")


class Span:
    """
    Timed unit of work (a driver call, one tree node, one homotopy step).
    Finished spans are logged and kept on the tracer for the effort report.
    """

    def __init__(self, operation_name: str, parent_id: Optional[str] = None):
        self.span_id = str(uuid.uuid4())[:8]
        self.parent_id = parent_id
        self.operation_name = operation_name
        self.start_time = time.perf_counter()
        self.end_time: Optional[float] = None
        self.duration: Optional[float] = None
        self.tags: Dict[str, Any] = {}

    def set_tag(self, key: str, value: Any):
        self.tags[key] = value

    def finish(self):
        self.end_time = time.perf_counter()
        self.duration = self.end_time - self.start_time

        logger.info(
            f"Span completed: {self.operation_name}",
            span_id=self.span_id,
            parent_span_id=self.parent_id,
            duration_ms=round(self.duration * 1000, 2),
            **self.tags,
        )


class Tracer:
    """Tracks the active span per thread so worker spans get a parent"""

    def __init__(self):
        self._local = threading.local()
        self._lock = threading.Lock()
        self.trace_id: Optional[str] = None
        self.finished: List[Span] = []

    @property
    def active_span(self) -> Optional[Span]:
        stack = getattr(self._local, "stack", None)
        return stack[-1] if stack else None

    def start_trace(self, trace_id: Optional[str] = None) -> str:
        self.trace_id = trace_id or str(uuid.uuid4())
        with self._lock:
            self.finished = []
        return self.trace_id

    def start_span(self, operation_name: str) -> Span:
        parent = self.active_span
        span = Span(operation_name, parent.span_id if parent else None)
        if not hasattr(self._local, "stack"):
            self._local.stack = []
        self._local.stack.append(span)
        return span

    def end_span(self, span: Span):
        span.finish()
        stack = getattr(self._local, "stack", [])
        if stack and stack[-1] is span:
            stack.pop()
        with self._lock:
            self.finished.append(span)

    def spans(self, operation_name: Optional[str] = None) -> List[Span]:
        with self._lock:
            return [s for s in self.finished if operation_name is None or s.operation_name == operation_name]


# Global tracer instance
_tracer = Tracer()


def get_tracer() -> Tracer:
    return _tracer


def trace_operation(operation_name: str):
    """
    Decorator to trace function execution
    Usage: @trace_operation("hierarchical_enclose")
    """

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        async def async_wrapper(*args, **kwargs):
            tracer = get_tracer()
            span = tracer.start_span(operation_name)
            try:
                result = await func(*args, **kwargs)
                span.set_tag("status", "success")
                return result
            except Exception as e:
                span.set_tag("status", "error")
                span.set_tag("error", type(e).__name__)
                raise
            finally:
                tracer.end_span(span)

        @wraps(func)
        def sync_wrapper(*args, **kwargs):
            tracer = get_tracer()
            span = tracer.start_span(operation_name)
            try:
                result = func(*args, **kwargs)
                span.set_tag("status", "success")
                return result
            except Exception as e:
                span.set_tag("status", "error")
                span.set_tag("error", type(e).__name__)
                raise
            finally:
                tracer.end_span(span)

        if inspect.iscoroutinefunction(func):
            return async_wrapper
        return sync_wrapper

    return decorator


@contextmanager
def trace_context(operation_name: str, **tags: Any):
    """
    Context manager for tracing code blocks
    Usage:
        with trace_context("sl_node", level=2, node=0) as span:
            ...
    """
    tracer = get_tracer()
    span = tracer.start_span(operation_name)
    for key, value in tags.items():
        span.set_tag(key, value)

    try:
        yield span
        span.set_tag("status", "success")
    except Exception as e:
        span.set_tag("status", "error")
        span.set_tag("error", type(e).__name__)
        raise
    finally:
        tracer.end_span(span)
