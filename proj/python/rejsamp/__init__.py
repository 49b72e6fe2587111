# Copyright (c) 2026 rejsamp contributors
# SPDX-License-Identifier: Apache-2.0
"""Rejection sampling with self-built, gradient-refined mixture proposals."""

try:
    # Installed layout: the extension lives inside the package.
    from ._rejsamp import (
        InitFailure,
        TargetError,
        __version__,
        cramer_two_sample,
        ks_two_sample,
        log_density,
        oracle_sample,
        run,
        run_custom,
    )
except ImportError:  # build-tree layout: extension next to the package dir
    from _rejsamp import (
        InitFailure,
        TargetError,
        __version__,
        cramer_two_sample,
        ks_two_sample,
        log_density,
        oracle_sample,
        run,
        run_custom,
    )

__all__ = [
    "InitFailure",
    "TargetError",
    "__version__",
    "cramer_two_sample",
    "ks_two_sample",
    "log_density",
    "oracle_sample",
    "run",
    "run_custom",
]
