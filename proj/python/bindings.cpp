// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "luthier/cli.hpp"
#include "luthier/dtype.hpp"
#include "luthier/error.hpp"
#include "luthier/langid.hpp"
#include "luthier/latex.hpp"
#include "luthier/merge.hpp"
#include "luthier/pack.hpp"
#include "luthier/tensor_archive.hpp"

namespace py = pybind11;
using namespace luthier;

namespace {

py::dict report_dict(const TensorMergeRecord& r) {
    py::dict d;
    d["name"] = r.name;
    d["method"] = std::string(method_name(r.method));
    d["alpha"] = r.alpha;
    d["theta"] = r.theta ? py::object(py::float_(*r.theta)) : py::object(py::none());
    d["fallback"] = r.fallback;
    d["max_abs_delta_from_base"] = r.max_abs_delta_from_base;
    d["copied_from"] = r.copied_from ? py::object(py::str(*r.copied_from)) : py::object(py::none());
    return d;
}

}  // namespace

PYBIND11_MODULE(_luthier, m) {
    m.doc() = "Native core of the luthier toolkit";
    m.attr("__version__") = LUTHIER_VERSION;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<GatewayError>(m, "GatewayError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("bf16_to_f32", &bf16_to_f32, py::arg("bits"));
    m.def("f32_to_bf16", &f32_to_bf16, py::arg("value"));
    m.def("f16_to_f32", &f16_to_f32, py::arg("bits"));
    m.def("f32_to_f16", &f32_to_f16, py::arg("value"));

    m.def(
        "read_archive",
        [](const std::filesystem::path& path) {
            const auto a = TensorArchive::open(path);
            py::dict tensors;
            for (const auto& name : a.names()) {
                const auto t = a.read(name);
                py::dict d;
                d["dtype"] = std::string(dtype_name(t.meta.dtype));
                d["shape"] = t.meta.shape;
                d["values"] = t.to_f32();
                tensors[py::str(name)] = d;
            }
            py::object metadata = py::none();
            if (a.metadata()) {
                py::dict md;
                for (const auto& [k, v] : *a.metadata()) md[py::str(k)] = v;
                metadata = md;
            }
            return py::make_tuple(tensors, metadata);
        },
        py::arg("path"), "Returns ({name: {dtype, shape, values}}, metadata or None).");

    m.def(
        "merge",
        [](const std::filesystem::path& base, const std::filesystem::path& fine_tuned,
           const std::filesystem::path& out, const std::string& method, double alpha, unsigned jobs) {
            MergeSpec spec;
            const auto parsed = parse_method(method);
            if (!parsed) throw ConfigError("unknown merge method '" + method + "'");
            spec.method = *parsed;
            spec.alpha = alpha;
            spec.validate();
            MergeReport report;
            {
                py::gil_scoped_release release;
                report = merge_archives(TensorArchive::open(base), TensorArchive::open(fine_tuned), spec, out, jobs);
            }
            py::list records;
            for (const auto& r : report.tensors) records.append(report_dict(r));
            return records;
        },
        py::arg("base"), py::arg("fine_tuned"), py::arg("out"), py::arg("method") = "slerp", py::arg("alpha") = 0.5,
        py::arg("jobs") = 1);

    m.def(
        "slerp",
        [](const std::vector<float>& w0, const std::vector<float>& w1, double alpha, double epsilon) {
            auto r = slerp(w0, w1, alpha, epsilon);
            return py::make_tuple(r.values, r.theta, r.fallback);
        },
        py::arg("w0"), py::arg("w1"), py::arg("alpha"), py::arg("epsilon") = 1e-6);

    m.def(
        "detect_language",
        [](const std::string& text, double min_confidence) {
            const auto v = langid::detect(text, langid::builtin_profiles(), min_confidence);
            return py::make_tuple(v.language, v.confidence);
        },
        py::arg("text"), py::arg("min_confidence") = langid::kDefaultMinConfidence);

    m.def(
        "latex_balance",
        [](const std::string& text) -> py::object {
            const auto r = latex_balance(text);
            if (r.balanced) return py::none();
            return py::int_(r.position);
        },
        py::arg("text"), "None when balanced, else the byte offset of the offending delimiter.");

    m.def(
        "pack",
        [](const std::vector<std::pair<std::string, std::uint64_t>>& items, std::uint64_t capacity) {
            std::vector<PackItem> in;
            for (const auto& [id, tokens] : items) in.push_back({id, tokens});
            py::list batches;
            for (const auto& b : pack_ffd(std::move(in), capacity)) {
                py::list ids;
                for (const auto& it : b.items) ids.append(it.id);
                batches.append(py::make_tuple(ids, b.used));
            }
            return batches;
        },
        py::arg("items"), py::arg("capacity") = kDefaultPackCapacity);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "luthier");
            std::ostringstream out, err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command; returns (exit_code, stdout, stderr).");
}
