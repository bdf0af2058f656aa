# Copyright (c) 2026, The Luthier Authors
# SPDX-License-Identifier: Apache-2.0
"""French instruction-data curation and model merging toolkit."""

from ._luthier import (
    ConfigError,
    GatewayError,
    InputError,
    IoError,
    __version__,
    bf16_to_f32,
    detect_language,
    f16_to_f32,
    f32_to_bf16,
    f32_to_f16,
    latex_balance,
    merge,
    pack,
    read_archive,
    run_cli,
    slerp,
)

__all__ = [
    "ConfigError",
    "GatewayError",
    "InputError",
    "IoError",
    "__version__",
    "bf16_to_f32",
    "detect_language",
    "f16_to_f32",
    "f32_to_bf16",
    "f32_to_f16",
    "latex_balance",
    "merge",
    "pack",
    "read_archive",
    "run_cli",
    "slerp",
]
