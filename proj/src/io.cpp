#include "apfront/io.hpp"

#include "apfront/cell_problem.hpp"
#include "apfront/eigenvalue.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace apfront {

double parse_decimal(const nlohmann::json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw ConfigError("invalid decimal string for " + what + ": '" + s + "'");
        return v;
    }
    throw ConfigError(what + " must be a number or decimal string");
}

std::string format_decimal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

APFunction parse_ap_function(const nlohmann::json& j) {
    if (j.is_number() || j.is_string()) return APFunction(parse_decimal(j, "constant"));
    if (!j.is_object()) throw ConfigError("coefficient spec must be an object or a constant");
    double constant = 0.0;
    if (j.contains("constant")) constant = parse_decimal(j.at("constant"), "constant");
    std::vector<Harmonic> terms;
    if (j.contains("terms")) {
        for (const auto& t : j.at("terms")) {
            Harmonic h;
            h.frequency = parse_decimal(t.at("frequency"), "frequency");
            if (t.contains("cos_amp")) h.cos_amp = parse_decimal(t.at("cos_amp"), "cos_amp");
            if (t.contains("sin_amp")) h.sin_amp = parse_decimal(t.at("sin_amp"), "sin_amp");
            terms.push_back(h);
        }
    }
    try {
        return APFunction(constant, terms);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad coefficient spec: ") + e.what());
    }
}

nlohmann::json ap_function_to_json(const APFunction& f) {
    nlohmann::json j;
    j["constant"] = format_decimal(f.constant_term());
    auto terms = nlohmann::json::array();
    auto gens = f.generators();
    for (const auto& m : f.modes()) {
        double w = 0.0;
        for (std::size_t d = 0; d < gens.size(); ++d) w += m.k[d] * gens[d];
        nlohmann::json t;
        t["frequency"] = format_decimal(w);
        t["cos_amp"] = format_decimal(m.cos_amp);
        t["sin_amp"] = format_decimal(m.sin_amp);
        terms.push_back(t);
    }
    j["terms"] = terms;
    return j;
}

CoefficientSet parse_coefficients(const nlohmann::json& j, double tol) {
    if (!j.is_object()) throw ConfigError("coefficients must be an object");
    if (!j.contains("a")) throw ConfigError("coefficients: diffusion 'a' is required");
    APFunction a = parse_ap_function(j.at("a"));
    APFunction b = j.contains("b") ? parse_ap_function(j.at("b")) : APFunction(0.0);
    APFunction c = j.contains("c") ? parse_ap_function(j.at("c")) : APFunction(0.0);
    APFunction ct = j.contains("c_tilde") ? parse_ap_function(j.at("c_tilde")) : APFunction(0.0);
    return assemble_coefficients(std::move(a), std::move(b), std::move(c), std::move(ct), tol);
}

nlohmann::json coefficients_to_json(const CoefficientSet& cs) {
    nlohmann::json j;
    j["a"] = ap_function_to_json(cs.a);
    j["b"] = ap_function_to_json(cs.b);
    j["c"] = ap_function_to_json(cs.c);
    j["c_tilde"] = ap_function_to_json(cs.c_tilde);
    j["alpha_m"] = format_decimal(cs.alpha_m);
    j["alpha_M"] = format_decimal(cs.alpha_M);
    return j;
}

CsvWriter::CsvWriter(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
}

namespace {
std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}
}  // namespace

void CsvWriter::header(const std::vector<std::string>& names) {
    columns_ = names.size();
    row(names);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (columns_ != 0 && fields.size() != columns_)
        throw ConfigError("csv: row width does not match the header");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += csv_escape(fields[i]);
    }
    buffer_ += '\n';
    flush();
}

void CsvWriter::row_values(const std::vector<double>& values) {
    std::vector<std::string> f(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) f[i] = format_decimal(values[i]);
    row(f);
}

void CsvWriter::flush() {
    std::ofstream os(path_, std::ios::trunc);
    os << buffer_;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::trunc);
    os << j.dump(2) << "\n";
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void write_cell_csv(const std::filesystem::path& path, const Grid1D& grid,
                    const DiscountedSolve& solve) {
    CsvWriter csv(path);
    csv.header({"x", "u", "eps_u"});
    for (int i = 0; i < grid.n; ++i)
        csv.row_values({grid.x(i), solve.u[i], solve.eps * solve.u[i]});
}

void write_hbar_csv(const std::filesystem::path& path, const HBarCurve& curve) {
    CsvWriter csv(path);
    csv.header({"x", "q", "hbar"});
    for (std::size_t ix = 0; ix < curve.x_samples.size(); ++ix)
        for (std::size_t iq = 0; iq < curve.q_samples.size(); ++iq)
            csv.row_values({curve.x_samples[ix], curve.q_samples[iq], curve.values[ix][iq]});
}

}  // namespace apfront
