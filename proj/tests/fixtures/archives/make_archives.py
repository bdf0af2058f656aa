# Copyright (c) 2026, The Luthier Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes the golden archives with the reference safetensors implementation."""

import pathlib

import torch
from safetensors.torch import save_file

HERE = pathlib.Path(__file__).parent


def main() -> None:
    gen = torch.Generator().manual_seed(7)
    save_file(
        {
            "embed.weight": torch.randn(4, 6, generator=gen, dtype=torch.float32),
            "layers.0.attn.q_proj.weight": torch.randn(3, 3, generator=gen).to(torch.bfloat16),
            "layers.0.mlp.up_proj.weight": torch.randn(2, 5, generator=gen).to(torch.float16),
            "norm.weight": torch.ones(6, dtype=torch.bfloat16),
        },
        HERE / "mixed.safetensors",
        metadata={"format": "pt", "note": "golden"},
    )
    save_file({}, HERE / "empty.safetensors")
    save_file(
        {
            "scale": torch.tensor(1.5, dtype=torch.float32),
            "bias": torch.tensor(-0.25, dtype=torch.bfloat16),
        },
        HERE / "scalar.safetensors",
    )
    save_file(
        {"zero": torch.zeros(0, 4, dtype=torch.float16), "one": torch.arange(3, dtype=torch.float32)},
        HERE / "zero_size.safetensors",
    )


if __name__ == "__main__":
    main()
