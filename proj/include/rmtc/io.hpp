#pragma once

// Text file formats for tensors, sample sets, and gridded CSV ingestion.
//
//   TENSOR v1                      SAMPLES v1
//   dims: n1 n2 ... nN             dims: n1 n2 ... nN
//   scale: s1 s2 ... sN   (opt)    i1 i2 ... iN value   (one per entry)
//   value                          ...
//   ...  (one per line, first
//         index fastest)
//
// Indices in files are 1-based. Values are written in shortest
// round-trip decimal form, so write-then-read is value-exact and equal
// inputs produce byte-identical files. Readers reject any deviation from
// the grammar with a parse_error carrying the line number; nothing is
// guessed.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rmtc/errors.hpp"
#include "rmtc/format.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/tensor.hpp"

namespace rmtc {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline double parse_double_token(std::string_view tok, const std::string& path,
                                 std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw parse_error(path, line, "expected a number, got '" + std::string(tok) + "'");
    return v;
}

inline std::size_t parse_size_token(std::string_view tok, const std::string& path,
                                    std::size_t line) {
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw parse_error(path, line,
                          "expected a positive integer, got '" + std::string(tok) + "'");
    return v;
}

inline std::vector<std::size_t> parse_dims_line(const std::string& line_text,
                                                const std::string& path, std::size_t line) {
    const auto toks = split_ws(line_text);
    if (toks.empty() || toks[0] != "dims:")
        throw parse_error(path, line, "expected 'dims: n1 n2 ...'");
    if (toks.size() < 2) throw parse_error(path, line, "dims line lists no extents");
    std::vector<std::size_t> dims;
    for (std::size_t k = 1; k < toks.size(); ++k) {
        const std::size_t d = parse_size_token(toks[k], path, line);
        if (d == 0) throw parse_error(path, line, "extents must be >= 1");
        dims.push_back(d);
    }
    return dims;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

}  // namespace detail

struct TensorFile {
    DenseTensor tensor;
    std::vector<double> scale;  // empty when the file carries no scale line
};

inline void write_tensor(const DenseTensor& t, const std::string& path,
                         std::span<const double> scale = {}) {
    if (!scale.empty() && scale.size() != t.order())
        throw std::invalid_argument("write_tensor: scale must have one entry per mode");
    std::ofstream out = detail::open_out(path);
    out << "TENSOR v1\n";
    out << "dims:";
    for (std::size_t d : t.dims()) out << ' ' << d;
    out << '\n';
    if (!scale.empty()) {
        out << "scale:";
        for (double s : scale) out << ' ' << detail::format_double(s);
        out << '\n';
    }
    for (std::size_t j = 0; j < t.size(); ++j) out << detail::format_double(t[j]) << '\n';
    if (!out) throw std::runtime_error("write_tensor: failed writing '" + path + "'");
}

inline TensorFile read_tensor_file(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line_text;
    std::size_t line = 0;

    if (!std::getline(in, line_text)) throw parse_error(path, 1, "missing 'TENSOR v1' header");
    ++line;
    if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
    if (line_text != "TENSOR v1") throw parse_error(path, line, "missing 'TENSOR v1' header");

    if (!std::getline(in, line_text)) throw parse_error(path, line + 1, "missing dims line");
    ++line;
    const auto dims = detail::parse_dims_line(line_text, path, line);
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;

    TensorFile result;
    std::vector<double> values;
    values.reserve(total);
    while (std::getline(in, line_text)) {
        ++line;
        const auto toks = detail::split_ws(line_text);
        if (toks.empty()) continue;
        if (toks[0] == "scale:") {
            if (!values.empty() || !result.scale.empty())
                throw parse_error(path, line, "scale line must directly follow the dims line");
            if (toks.size() != dims.size() + 1)
                throw parse_error(path, line, "scale line must list one factor per mode");
            for (std::size_t k = 1; k < toks.size(); ++k)
                result.scale.push_back(detail::parse_double_token(toks[k], path, line));
            continue;
        }
        for (const auto tok : toks) {
            if (values.size() == total)
                throw parse_error(path, line,
                                  "too many values: expected " + std::to_string(total));
            values.push_back(detail::parse_double_token(tok, path, line));
        }
    }
    if (values.size() != total)
        throw parse_error(path, line,
                          "value count mismatch: expected " + std::to_string(total) + ", got " +
                              std::to_string(values.size()));
    result.tensor = DenseTensor(dims, std::move(values));
    return result;
}

inline DenseTensor read_tensor(const std::string& path) {
    return read_tensor_file(path).tensor;
}

inline void write_samples(const SampleSet& s, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "SAMPLES v1\n";
    out << "dims:";
    for (std::size_t d : s.dims()) out << ' ' << d;
    out << '\n';
    const auto vals = s.values();
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto idx = s.multi_index(k);
        for (std::size_t m = 0; m < idx.size(); ++m) out << (idx[m] + 1) << ' ';
        out << detail::format_double(vals[k]) << '\n';
    }
    if (!out) throw std::runtime_error("write_samples: failed writing '" + path + "'");
}

inline SampleSet read_samples(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line_text;
    std::size_t line = 0;

    if (!std::getline(in, line_text)) throw parse_error(path, 1, "missing 'SAMPLES v1' header");
    ++line;
    if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
    if (line_text != "SAMPLES v1") throw parse_error(path, line, "missing 'SAMPLES v1' header");

    if (!std::getline(in, line_text)) throw parse_error(path, line + 1, "missing dims line");
    ++line;
    const auto dims = detail::parse_dims_line(line_text, path, line);

    SampleSet samples(dims);
    std::vector<std::size_t> idx(dims.size());
    std::vector<bool> seen(samples.ambient_size(), false);
    while (std::getline(in, line_text)) {
        ++line;
        const auto toks = detail::split_ws(line_text);
        if (toks.empty()) continue;
        if (toks.size() != dims.size() + 1)
            throw parse_error(path, line,
                              "expected " + std::to_string(dims.size()) +
                                  " indices and a value, got " + std::to_string(toks.size()) +
                                  " fields");
        for (std::size_t m = 0; m < dims.size(); ++m) {
            const std::size_t one_based = detail::parse_size_token(toks[m], path, line);
            if (one_based < 1 || one_based > dims[m])
                throw parse_error(path, line,
                                  "index " + std::to_string(one_based) + " out of range [1, " +
                                      std::to_string(dims[m]) + "] in mode " +
                                      std::to_string(m + 1));
            idx[m] = one_based - 1;
        }
        const double value = detail::parse_double_token(toks.back(), path, line);
        std::size_t flat = 0, stride = 1;
        for (std::size_t m = 0; m < dims.size(); ++m) {
            flat += idx[m] * stride;
            stride *= dims[m];
        }
        if (seen[flat]) throw parse_error(path, line, "duplicate sample position");
        seen[flat] = true;
        samples.add_flat(flat, value);
    }
    return samples;
}

// Gridded CSV ingestion (x, y, height, value columns on a complete regular
// grid). Axis order of the result is (x, y, height). The per-mode scale is
// the uniform coordinate spacing when the grid has one, else 1.
struct GridColumnMap {
    std::string x = "x";
    std::string y = "y";
    std::string height = "height";
    std::string value = "value";
};

struct GridData {
    DenseTensor tensor;
    std::vector<double> scale;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    for (char c : s) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    out.push_back(field);
    for (auto& f : out) {
        const auto a = f.find_first_not_of(" \t");
        const auto b = f.find_last_not_of(" \t");
        f = (a == std::string::npos) ? std::string() : f.substr(a, b - a + 1);
    }
    return out;
}

inline double axis_scale(const std::vector<double>& coords) {
    if (coords.size() < 2) return 1.0;
    const double step = coords[1] - coords[0];
    if (step <= 0.0) return 1.0;
    for (std::size_t i = 1; i + 1 < coords.size(); ++i) {
        const double s = coords[i + 1] - coords[i];
        if (std::abs(s - step) > 1e-9 * std::max(std::abs(step), 1.0)) return 1.0;
    }
    return step;
}

}  // namespace detail

inline GridData ingest_grid_csv(const std::string& path, const GridColumnMap& map = {}) {
    std::ifstream in = detail::open_in(path);
    std::string line_text;
    std::size_t line = 0;

    if (!std::getline(in, line_text)) throw parse_error(path, 1, "missing CSV header row");
    ++line;
    const auto header = detail::split_csv(line_text);
    const auto find_col = [&](const std::string& name) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        throw parse_error(path, 1, "column '" + name + "' not found in CSV header");
    };
    const std::size_t cx = find_col(map.x);
    const std::size_t cy = find_col(map.y);
    const std::size_t ch = find_col(map.height);
    const std::size_t cv = find_col(map.value);

    struct Row {
        double x, y, h, v;
        std::size_t line;
    };
    std::vector<Row> rows;
    while (std::getline(in, line_text)) {
        ++line;
        if (line_text.empty()) continue;
        const auto fields = detail::split_csv(line_text);
        if (fields.size() != header.size())
            throw parse_error(path, line, "row has " + std::to_string(fields.size()) +
                                              " fields, header has " +
                                              std::to_string(header.size()));
        rows.push_back({detail::parse_double_token(fields[cx], path, line),
                        detail::parse_double_token(fields[cy], path, line),
                        detail::parse_double_token(fields[ch], path, line),
                        detail::parse_double_token(fields[cv], path, line), line});
    }
    if (rows.empty()) throw parse_error(path, line, "CSV contains no data rows");

    auto collect_axis = [&](auto get) {
        std::vector<double> axis;
        for (const auto& r : rows) axis.push_back(get(r));
        std::sort(axis.begin(), axis.end());
        axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
        return axis;
    };
    const auto xs = collect_axis([](const Row& r) { return r.x; });
    const auto ys = collect_axis([](const Row& r) { return r.y; });
    const auto hs = collect_axis([](const Row& r) { return r.h; });

    const auto axis_index = [](const std::vector<double>& axis, double v) {
        return static_cast<std::size_t>(
            std::lower_bound(axis.begin(), axis.end(), v) - axis.begin());
    };

    const std::vector<std::size_t> dims = {xs.size(), ys.size(), hs.size()};
    DenseTensor t(dims);
    std::vector<bool> filled(t.size(), false);
    for (const auto& r : rows) {
        const std::size_t flat = axis_index(xs, r.x) + axis_index(ys, r.y) * xs.size() +
                                 axis_index(hs, r.h) * xs.size() * ys.size();
        if (filled[flat])
            throw parse_error(path, r.line, "duplicate grid cell");
        filled[flat] = true;
        t[flat] = r.v;
    }
    if (rows.size() != t.size()) {
        std::string missing;
        int shown = 0;
        for (std::size_t flat = 0; flat < t.size() && shown < 10; ++flat) {
            if (filled[flat]) continue;
            const std::size_t ix = flat % xs.size();
            const std::size_t iy = (flat / xs.size()) % ys.size();
            const std::size_t ih = flat / (xs.size() * ys.size());
            missing += " (" + detail::format_double(xs[ix]) + "," +
                       detail::format_double(ys[iy]) + "," + detail::format_double(hs[ih]) + ")";
            ++shown;
        }
        throw parse_error(path, 0,
                          "incomplete grid: " + std::to_string(t.size() - rows.size()) +
                              " missing cells, first" + missing);
    }

    GridData out;
    out.tensor = std::move(t);
    out.scale = {detail::axis_scale(xs), detail::axis_scale(ys), detail::axis_scale(hs)};
    return out;
}

}  // namespace rmtc
