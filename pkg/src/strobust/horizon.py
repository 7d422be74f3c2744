"""Which evaluation times each subformula is needed at.

Temporal windows ``t + [a, b]`` are clipped to the end of the signal: an
offset ``k`` is only considered while ``t + k <= t_hi``. Without a known
``t_hi`` the windows are used as written.
"""

from __future__ import annotations

from .errors import UnboundedHorizon
from .formula import Always, And, Eventually, Or, Until


def effective_window(interval, t, t_hi=None):
    """Offsets ``(lo, hi)`` of the window at ``t``; empty when ``hi < lo``."""
    b = interval.b
    if t_hi is not None:
        b = min(b, t_hi - t)
    elif not interval.bounded:
        raise UnboundedHorizon(
            f"window {interval} at t={t} is unbounded and no signal end is known")
    return interval.a, int(b)


def _shift(times, interval, lo_from_zero, t_hi):
    out = set()
    for t in times:
        a, b = effective_window(interval, t, t_hi)
        if lo_from_zero:
            a = 0
        out.update(range(t + a, t + b + 1))
    return sorted(out)


def child_times(node, times, t_hi=None):
    """Required times of each child given the parent's required times."""
    if isinstance(node, (And, Or)):
        return [list(times) for _ in node.args]
    if isinstance(node, (Always, Eventually)):
        return [_shift(times, node.interval, False, t_hi)]
    if isinstance(node, Until):
        return [_shift(times, node.interval, True, t_hi),
                _shift(times, node.interval, False, t_hi)]
    return []


def required_times(root, t: int, t_hi=None) -> dict:
    """Map each node path to the sorted list of times it must be evaluated at."""
    out = {}

    def visit(node, path, times):
        out[path] = times
        for i, (child, ct) in enumerate(zip(node.children, child_times(node, times, t_hi))):
            visit(child, path + (i,), ct)

    visit(root, (), [t])
    return out
