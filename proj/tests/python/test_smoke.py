# Copyright (c) 2026, The Luthier Authors
# SPDX-License-Identifier: Apache-2.0

import json
import math

import numpy as np
import pytest

import luthier

safetensors_numpy = pytest.importorskip("safetensors.numpy")


def test_version():
    assert luthier.__version__.count(".") == 2


def test_bf16_scalars():
    assert luthier.f32_to_bf16(1.0) == 0x3F80
    assert luthier.bf16_to_f32(0xC000) == -2.0
    assert luthier.f16_to_f32(luthier.f32_to_f16(0.5)) == 0.5


def test_reads_reference_writer_output(tmp_path):
    path = tmp_path / "ref.safetensors"
    a = np.arange(6, dtype=np.float32).reshape(2, 3)
    b = np.array([0.5, -1.5], dtype=np.float16)
    safetensors_numpy.save_file({"a": a, "b": b}, str(path), metadata={"format": "np"})
    tensors, metadata = luthier.read_archive(path)
    assert metadata == {"format": "np"}
    assert tensors["a"]["dtype"] == "F32"
    assert tensors["a"]["shape"] == [2, 3]
    assert tensors["a"]["values"] == a.ravel().tolist()
    assert tensors["b"]["values"] == [0.5, -1.5]


def test_merge_readable_by_reference_reader(tmp_path):
    rng = np.random.default_rng(7)
    base = {"w": rng.standard_normal(16).astype(np.float32)}
    ft = {"w": rng.standard_normal(16).astype(np.float32)}
    safetensors_numpy.save_file(base, str(tmp_path / "base.st"))
    safetensors_numpy.save_file(ft, str(tmp_path / "ft.st"))
    report = luthier.merge(tmp_path / "base.st", tmp_path / "ft.st", tmp_path / "out.st", method="linear", alpha=0.25)
    assert report[0]["method"] == "linear" and report[0]["theta"] is None
    out = safetensors_numpy.load_file(str(tmp_path / "out.st"))["w"]
    want = (0.75 * base["w"].astype(np.float64) + 0.25 * ft["w"].astype(np.float64)).astype(np.float32)
    np.testing.assert_array_equal(out, want)


def test_slerp_quarter_arc():
    values, theta, fallback = luthier.slerp([1.0, 0.0], [0.0, 1.0], 0.5)
    assert not fallback
    assert theta == pytest.approx(math.pi / 2)
    assert values == pytest.approx([math.sqrt(0.5)] * 2, abs=1e-6)


def test_language_and_latex():
    lang, conf = luthier.detect_language("Le chat dort sur le canapé parce qu'il fait froid dehors.")
    assert lang == "fr" and 0 < conf <= 1
    assert luthier.latex_balance("$x^2 + \\frac{1}{2}$") is None
    assert luthier.latex_balance("\\frac{1}{2") == 8


def test_pack_hand_example():
    batches = luthier.pack([("a", 9000), ("b", 8000), ("c", 7000), ("d", 300)], 16384)
    assert batches == [(["a", "c", "d"], 16300), (["b"], 8000)]


def test_cli_and_errors(tmp_path):
    code, out, _ = luthier.run_cli(["--manifest", str(tmp_path / "m.json"), "langid", "--text", "The cat is asleep on the sofa."])
    assert code == 0
    assert json.loads(out)["language"] == "en"
    with pytest.raises(ValueError):
        luthier.merge(tmp_path / "missing.st", tmp_path / "missing.st", tmp_path / "o.st")
