#include "csl/io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace csl {

const char* const kToolVersion = "0.1.0";

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::runtime_error("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

void write_run_manifest(const std::string& path, const std::string& config_text,
                        unsigned long long seed, double wall_seconds) {
    nlohmann::json j;
    j["config_hash"] = fnv1a_hex(config_text);
    j["seed"] = seed;
    j["version"] = kToolVersion;
    j["wall_seconds"] = wall_seconds;
    write_text_file(path, j.dump(2) + "\n");
}

namespace {

const char* kind_name(IonKind k) {
    switch (k) {
        case IonKind::Box: return "box";
        case IonKind::SmoothedBox: return "smoothed_box";
        case IonKind::GaussianSinc: return "gaussian_sinc";
        case IonKind::SineGaussian: return "sine_gaussian";
        case IonKind::Tabulated: return "tabulated";
    }
    return "box";
}

IonKind kind_from_name(const std::string& s) {
    if (s == "box") return IonKind::Box;
    if (s == "smoothed_box") return IonKind::SmoothedBox;
    if (s == "gaussian_sinc") return IonKind::GaussianSinc;
    if (s == "sine_gaussian") return IonKind::SineGaussian;
    if (s == "tabulated") return IonKind::Tabulated;
    throw std::invalid_argument("unknown ion kind: " + s);
}

nlohmann::json model_to_json(const IonDensityModel& m) {
    nlohmann::json j;
    j["kind"] = kind_name(m.kind);
    j["eZ"] = m.eZ;
    if (m.kind == IonKind::SmoothedBox) j["k"] = m.k;
    if (m.kind == IonKind::Tabulated) {
        j["interpolate"] = m.interpolate;
        const Field& t = *m.table;
        j["table_N"] = t.grid.N;
        j["table_P"] = t.grid.P;
        std::vector<double> vals;
        vals.reserve(t.v.size());
        for (const cd& z : t.v) vals.push_back(z.real());
        j["table"] = vals;
    }
    return j;
}

IonDensityModel model_from_json(const nlohmann::json& j) {
    IonKind kind = kind_from_name(j.at("kind").get<std::string>());
    double eZ = j.at("eZ").get<double>();
    switch (kind) {
        case IonKind::Box: return IonDensityModel::box(eZ);
        case IonKind::SmoothedBox:
            return IonDensityModel::smoothed_box(eZ, j.at("k").get<int>());
        case IonKind::GaussianSinc: return IonDensityModel::gaussian_sinc(eZ);
        case IonKind::SineGaussian: return IonDensityModel::sine_gaussian(eZ);
        case IonKind::Tabulated: {
            TorusGrid g{j.at("table_N").get<int>(), j.at("table_P").get<int>()};
            Field samples(g, Layout::RealSpace);
            auto vals = j.at("table").get<std::vector<double>>();
            if (vals.size() != samples.v.size())
                throw std::invalid_argument("table size mismatch");
            for (std::size_t i = 0; i < vals.size(); ++i)
                samples.v[i] = cd(vals[i], 0.0);
            return IonDensityModel::tabulated(std::move(samples),
                                              j.value("interpolate", false));
        }
    }
    throw std::invalid_argument("unreachable ion kind");
}

} // namespace

std::string ion_model_to_json(const IonDensityModel& m) {
    return model_to_json(m).dump();
}

IonDensityModel ion_model_from_json(const std::string& text) {
    return model_from_json(nlohmann::json::parse(text));
}

std::string crystal_state_to_json(const CrystalState& X) {
    nlohmann::json j;
    j["N"] = X.grid.N;
    j["P"] = X.grid.P;
    j["M"] = X.M;
    j["e"] = X.e;
    j["model"] = model_to_json(X.model);
    std::vector<double> psi;
    psi.reserve(2 * X.psi.v.size());
    for (const cd& z : X.psi.v) {
        psi.push_back(z.real());
        psi.push_back(z.imag());
    }
    j["psi"] = psi;
    std::vector<double> q, p;
    for (const Vec3& v : X.q) { q.push_back(v[0]); q.push_back(v[1]); q.push_back(v[2]); }
    for (const Vec3& v : X.p) { p.push_back(v[0]); p.push_back(v[1]); p.push_back(v[2]); }
    j["q"] = q;
    j["p"] = p;
    return j.dump();
}

CrystalState crystal_state_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TorusGrid g{j.at("N").get<int>(), j.at("P").get<int>()};
    CrystalState X(g, model_from_json(j.at("model")), j.at("M").get<double>(),
                   j.at("e").get<double>());
    auto psi = j.at("psi").get<std::vector<double>>();
    if (psi.size() != 2 * X.psi.v.size())
        throw std::invalid_argument("psi size mismatch");
    for (std::size_t i = 0; i < X.psi.v.size(); ++i)
        X.psi.v[i] = cd(psi[2 * i], psi[2 * i + 1]);
    auto q = j.at("q").get<std::vector<double>>();
    auto p = j.at("p").get<std::vector<double>>();
    if (q.size() != 3 * X.cells() || p.size() != 3 * X.cells())
        throw std::invalid_argument("ion array size mismatch");
    for (std::size_t i = 0; i < X.cells(); ++i) {
        X.q[i] = Vec3(q[3 * i], q[3 * i + 1], q[3 * i + 2]);
        X.p[i] = Vec3(p[3 * i], p[3 * i + 1], p[3 * i + 2]);
    }
    return X;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
}

} // namespace csl
