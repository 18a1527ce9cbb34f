"""Wall-clock budget shared by the long-running constructions.

A solve installs a deadline with :func:`time_limit`; exploration loops call
:func:`check` once per processed state, which raises
:class:`ResourceExceeded` naming the stage once the deadline has passed.
"""
from __future__ import annotations

import contextvars
import time
from contextlib import contextmanager

from .errors import ResourceExceeded

_deadline = contextvars.ContextVar("bqltl_deadline", default=None)


@contextmanager
def time_limit(seconds):
    """Install a deadline ``seconds`` from now (``None`` keeps the current one)."""
    if seconds is None:
        yield
        return
    end = time.perf_counter() + seconds
    outer = _deadline.get()
    if outer is not None and outer[0] < end:
        end, seconds = outer
    token = _deadline.set((end, seconds))
    try:
        yield
    finally:
        _deadline.reset(token)


def check(stage: str):
    d = _deadline.get()
    if d is not None and time.perf_counter() > d[0]:
        raise ResourceExceeded(stage, d[1], f"time cap of {d[1]}s exceeded during stage '{stage}'")
