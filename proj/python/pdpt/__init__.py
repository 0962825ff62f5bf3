"""Pickup-and-delivery with transfers: generator, LNS metaheuristics and branch-and-check."""

try:
    from ._pdpt import (
        Instance,
        Solution,
        branch_and_check,
        evaluate,
        export_master,
        gap_metrics,
        generate,
        oracle,
        search,
    )
except ImportError:  # build-tree layout: the extension sits next to the package
    from _pdpt import (
        Instance,
        Solution,
        branch_and_check,
        evaluate,
        export_master,
        gap_metrics,
        generate,
        oracle,
        search,
    )

__all__ = [
    "Instance",
    "Solution",
    "branch_and_check",
    "evaluate",
    "export_master",
    "gap_metrics",
    "generate",
    "oracle",
    "search",
]
