// Model ingestion and report emission.
//
// Model files are JSON with a "type" discriminator; loading validates the
// schema and the module invariants (Siegel grids, symplectic generators,
// residue positivity) with locations in the diagnostics.  Reports are
// deterministic: keys are sorted by the JSON library and every float is
// pinned to 12 significant digits in scientific notation before it enters
// the document.
#pragma once

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "skfib/collapse.hpp"
#include "skfib/monodromy.hpp"
#include "skfib/nilpotent_orbit.hpp"
#include "skfib/semiflat.hpp"
#include "skfib/special_kahler.hpp"

namespace skfib::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Deterministic float formatting: %.12e, parsed back into the document.

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

inline json pinned(double v) { return json::parse(format_double(v)); }

// ---------------------------------------------------------------------------
// Parsing helpers.

inline Poly parse_poly(const json& terms, int nvars, const std::string& where) {
    if (!terms.is_array()) throw io_error(where + ": expected an array of terms");
    Poly p(nvars);
    for (const auto& t : terms) {
        if (!t.contains("index")) throw io_error(where + ": term without index");
        std::vector<int> idx = t.at("index").get<std::vector<int>>();
        if (static_cast<int>(idx.size()) != nvars) throw io_error(where + ": index length mismatch");
        double re = t.value("re", 0.0), im = t.value("im", 0.0);
        p.add_term(idx, cd(re, im));
    }
    return p;
}

inline PolyMatrix parse_poly_matrix(const json& m, int rows, int cols, int nvars, const std::string& where) {
    if (!m.is_array() || static_cast<int>(m.size()) != rows) throw io_error(where + ": expected " + std::to_string(rows) + " rows");
    PolyMatrix out(rows, cols, nvars);
    for (int i = 0; i < rows; ++i) {
        const auto& row = m.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw io_error(where + ": row " + std::to_string(i) + " has wrong length");
        for (int j = 0; j < cols; ++j)
            out(i, j) = parse_poly(row.at(j), nvars, where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    return out;
}

inline Rat parse_rat(const json& v, const std::string& where) {
    if (v.is_number_integer()) return Rat(static_cast<long long>(v.get<long long>()));
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_array() && v.size() == 2) return Rat(Int(v.at(0).get<long long>()), Int(v.at(1).get<long long>()));
    throw io_error(where + ": expected integer, \"p/q\" string or [p, q]");
}

inline RatMat parse_rat_matrix(const json& m, int rows, int cols, const std::string& where) {
    RatMat out(rows, cols);
    if (!m.is_array() || static_cast<int>(m.size()) != rows) throw io_error(where + ": wrong row count");
    for (int i = 0; i < rows; ++i) {
        const auto& row = m.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != cols) throw io_error(where + ": wrong column count");
        for (int j = 0; j < cols; ++j)
            out(i, j) = parse_rat(row.at(j), where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    return out;
}

inline DomainBox parse_domain(const json& d, int n, const std::string& where) {
    DomainBox box;
    auto grab = [&](const char* key) {
        if (!d.contains(key)) throw io_error(where + ": domain missing " + key);
        auto v = d.at(key).get<std::vector<double>>();
        if (static_cast<int>(v.size()) != n) throw io_error(where + ": domain " + key + " length mismatch");
        return v;
    };
    box.re_min = grab("re_min");
    box.re_max = grab("re_max");
    box.im_min = grab("im_min");
    box.im_max = grab("im_max");
    return box;
}

inline PolarizationType parse_polarization(const json& j, int n, const std::string& where) {
    if (!j.contains("polarization")) return PolarizationType(std::vector<std::int64_t>(n, 1));
    auto v = j.at("polarization").get<std::vector<std::int64_t>>();
    if (static_cast<int>(v.size()) != n) throw io_error(where + ": polarization length mismatch");
    return PolarizationType(v);
}

// ---------------------------------------------------------------------------
// Loaded models.

struct MetricModelSpec {
    int n = 1;
    std::string kind; // euclidean | orbifold | degeneration
    std::vector<int> orders;
    double log_C = 0.0;
    double log_exp = 0.0;
    bool through_uniformizing_map = false;
    std::optional<NilpotentOrbitModel> degeneration;
    std::vector<DivisorComponent> divisor;

    ModelMetric build() const {
        if (kind == "euclidean") return euclidean_metric(n);
        if (kind == "orbifold") return orbifold_model_metric(n, orders, log_C, log_exp);
        if (kind == "degeneration") {
            if (!degeneration) throw io_error("metric_model: degeneration kind without embedded model");
            return degeneration_metric(*degeneration, through_uniformizing_map);
        }
        throw io_error("metric_model: unknown kind '" + kind + "'");
    }
};

struct LoadedModel {
    std::string type;
    json raw;
    std::string hash;
    std::optional<Prepotential> prepotential;
    std::optional<PeriodPolyModel> period_model;
    std::optional<PolarizationType> polarization;
    std::optional<NilpotentOrbitModel> orbit;
    std::optional<MonodromyRep> monodromy;
    std::optional<MetricModelSpec> metric;
};

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline NilpotentOrbitModel parse_orbit(const json& j, const std::string& where) {
    int n = j.at("n").get<int>();
    int k = j.at("k").get<int>();
    PolyMatrix Q = parse_poly_matrix(j.at("Q"), n, n, n, where + ".Q");
    std::vector<RatMat> residues;
    if (!j.contains("residues") || static_cast<int>(j.at("residues").size()) != k)
        throw io_error(where + ": need k residue matrices");
    for (int p = 0; p < k; ++p)
        residues.push_back(parse_rat_matrix(j.at("residues").at(p), n, n, where + ".residues[" + std::to_string(p) + "]"));
    PolarizationType d = parse_polarization(j, n, where);
    std::vector<int> orders = j.contains("orbifold_orders") ? j.at("orbifold_orders").get<std::vector<int>>()
                                                            : std::vector<int>(k, 1);
    PolyMatrix frame;
    if (j.contains("frame")) frame = parse_poly_matrix(j.at("frame"), n, n, n, where + ".frame");
    return NilpotentOrbitModel(n, k, std::move(Q), std::move(residues), std::move(d), std::move(orders),
                               std::move(frame));
}

// Sample-based certificate that Im Z stays positive on approach to the
// divisor (the eigenvalue lower bound of the model).
inline void certify_orbit(const NilpotentOrbitModel& model, int samples_per_decade = 4) {
    Eigen::VectorXcd t(model.n);
    for (int q = model.k; q < model.n; ++q) t(q) = cd(0.1, 0.05);
    for (int s = 1; s <= 3 * samples_per_decade; ++s) {
        double r = std::pow(10.0, -static_cast<double>(s) / samples_per_decade - 0.5);
        for (int p = 0; p < model.k; ++p) t(p) = std::polar(r, 0.3 + 0.2 * p);
        period_map_eval(model, t); // throws domain_error when invalid
    }
}

inline LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open model file '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    LoadedModel m;
    m.hash = fnv1a_hex(bytes);
    try {
        m.raw = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw io_error("parse error in '" + path.string() + "' at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!m.raw.contains("type")) throw io_error(path.string() + ": missing \"type\"");
    m.type = m.raw.at("type").get<std::string>();
    const std::string where = path.filename().string();

    if (m.type == "prepotential") {
        int n = m.raw.at("n").get<int>();
        Poly f = parse_poly(m.raw.at("terms"), n, where + ".terms");
        DomainBox box = parse_domain(m.raw.at("domain"), n, where);
        Prepotential F(std::move(f), std::move(box));
        F.certify_domain(m.raw.value("domain_grid", 5)); // names the failing corner
        m.polarization = parse_polarization(m.raw, n, where);
        m.prepotential = std::move(F);
    } else if (m.type == "period_model") {
        int n = m.raw.at("n").get<int>();
        PolyMatrix Z = parse_poly_matrix(m.raw.at("Z"), n, n, n, where + ".Z");
        DomainBox box = parse_domain(m.raw.at("domain"), n, where);
        PeriodPolyModel pm(std::move(Z), std::move(box));
        // Validity on the sampled domain.
        FibrationModel fib(pm, parse_polarization(m.raw, n, where));
        for (const auto& w : pm.domain.grid(m.raw.value("domain_grid", 3))) {
            auto sc = siegel_check(fib.period(w));
            if (!sc.valid)
                throw model_error(where + ": period matrix invalid on domain sample (min Im eigenvalue " +
                                  format_double(sc.min_im_eigenvalue) + ")");
        }
        m.polarization = parse_polarization(m.raw, n, where);
        m.period_model = std::move(pm);
    } else if (m.type == "nilpotent_orbit") {
        NilpotentOrbitModel orbit = parse_orbit(m.raw, where);
        certify_orbit(orbit);
        m.polarization = orbit.d;
        m.orbit = std::move(orbit);
    } else if (m.type == "monodromy") {
        int n = m.raw.at("n").get<int>();
        std::vector<RatMat> gens;
        for (const auto& g : m.raw.at("generators")) gens.push_back(parse_rat_matrix(g, 2 * n, 2 * n, where));
        PolarizationType d = parse_polarization(m.raw, n, where);
        m.monodromy = MonodromyRep(std::move(gens), PolarizedSymplecticForm::standard(n), d);
        m.polarization = d;
    } else if (m.type == "metric_model") {
        MetricModelSpec spec;
        spec.n = m.raw.at("n").get<int>();
        spec.kind = m.raw.at("kind").get<std::string>();
        if (m.raw.contains("orders")) spec.orders = m.raw.at("orders").get<std::vector<int>>();
        if (m.raw.contains("log_factor")) {
            spec.log_C = m.raw.at("log_factor").value("C", 1.0);
            spec.log_exp = m.raw.at("log_factor").value("exp", 1.0);
        }
        spec.through_uniformizing_map = m.raw.value("through_uniformizing_map", false);
        if (m.raw.contains("degeneration")) {
            spec.degeneration = parse_orbit(m.raw.at("degeneration"), where + ".degeneration");
            certify_orbit(*spec.degeneration);
        }
        if (m.raw.contains("divisor"))
            for (const auto& c : m.raw.at("divisor"))
                spec.divisor.push_back({c.at("coord").get<int>(), c.value("order", 1)});
        spec.build(); // validates the kind now
        m.metric = std::move(spec);
    } else {
        throw io_error(where + ": unknown model type '" + m.type + "'");
    }
    return m;
}

// ---------------------------------------------------------------------------
// Reports.

struct CheckRecord {
    std::string name;
    json inputs;
    double measured = 0.0;
    double bound = 0.0;
    std::string comparator = "<=";
    double tolerance = 0.0;
    bool pass = false;
    std::string provenance; // module.operation that produced the number
};

struct Series {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Report {
    std::string suite;
    std::string model_hash;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> records;
    json fitted = json::object();
    std::vector<Series> series;

    bool all_pass() const {
        for (const auto& r : records)
            if (!r.pass) return false;
        return true;
    }

    CheckRecord& add(const std::string& name, double measured, double bound, const std::string& comparator,
                     double tolerance, const std::string& provenance, json inputs = json::object()) {
        CheckRecord rec;
        rec.name = name;
        rec.inputs = std::move(inputs);
        rec.measured = measured;
        rec.bound = bound;
        rec.comparator = comparator;
        rec.tolerance = tolerance;
        rec.provenance = provenance;
        if (comparator == "<=") rec.pass = measured <= bound;
        else if (comparator == ">=") rec.pass = measured >= bound;
        else if (comparator == "~") rec.pass = std::abs(measured - bound) <= tolerance;
        else throw shape_error("CheckRecord: unknown comparator " + comparator);
        records.push_back(std::move(rec));
        return records.back();
    }

    json to_json() const {
        json doc;
        doc["suite"] = suite;
        doc["model_hash"] = model_hash;
        doc["environment"] = {{"seed", seed}, {"version", "0.1.0"}, {"float_format", "%.12e"}};
        json recs = json::array();
        for (const auto& r : records) {
            json jr;
            jr["name"] = r.name;
            jr["inputs"] = r.inputs;
            jr["measured"] = pinned(r.measured);
            jr["bound"] = pinned(r.bound);
            jr["comparator"] = r.comparator;
            jr["tolerance"] = pinned(r.tolerance);
            jr["pass"] = r.pass;
            jr["provenance"] = r.provenance;
            recs.push_back(jr);
        }
        doc["records"] = recs;
        doc["fitted"] = fitted;
        doc["pass"] = all_pass();
        return doc;
    }
};

// Byte-stable emission: JSON summary plus one CSV per series.
inline std::vector<std::filesystem::path> emit_report(const Report& rep, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::vector<std::filesystem::path> written;

    std::filesystem::path jpath = out_dir / (rep.suite + "_report.json");
    {
        std::ofstream out(jpath, std::ios::binary);
        if (!out) throw io_error("cannot write report to '" + jpath.string() + "'");
        out << rep.to_json().dump(2) << "\n";
    }
    written.push_back(jpath);

    for (const auto& s : rep.series) {
        std::filesystem::path cpath = out_dir / (rep.suite + "_" + s.name + ".csv");
        std::ofstream out(cpath, std::ios::binary);
        if (!out) throw io_error("cannot write series to '" + cpath.string() + "'");
        for (size_t i = 0; i < s.header.size(); ++i) out << (i ? "," : "") << s.header[i];
        out << "\n";
        for (const auto& row : s.rows) {
            for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
            out << "\n";
        }
        written.push_back(cpath);
    }
    return written;
}

} // namespace skfib::io
