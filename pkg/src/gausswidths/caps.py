"""Resource caps for enumeration-heavy operations.

Several operations enumerate index sets or evaluation grids whose size is
a priori unbounded in the parameters.  They take an optional ``cap``
argument (number of cells/items); when the requested work would exceed it
they raise :class:`ResourceCapError` instead of saturating silently.

Resolution order: explicit argument, then the ``HW_CAP`` environment
variable, then :data:`DEFAULT_CAP`.
"""

from __future__ import annotations

import os

DEFAULT_CAP = 20_000_000


class ResourceCapError(RuntimeError):
    """Requested enumeration or grid exceeds the configured resource cap."""


def resolve_cap(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get("HW_CAP")
    if env is not None:
        return int(env)
    return DEFAULT_CAP


def check_cap(requested: int, cap: int | None, what: str) -> None:
    limit = resolve_cap(cap)
    if requested > limit:
        raise ResourceCapError(
            f"{what} needs {requested} cells, cap is {limit} "
            f"(raise via cap argument or HW_CAP)"
        )
