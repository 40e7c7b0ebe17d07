#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "apfront/coefficients.hpp"

namespace apfront {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numbers in configs and outputs travel as decimal strings so files
/// byte-reproduce across platforms; both JSON numbers and strings parse.
double parse_decimal(const nlohmann::json& j, const std::string& what);
std::string format_decimal(double v);

/// Coefficient spec: {"constant": "2", "terms": [{"frequency": "1",
/// "cos_amp": "1", "sin_amp": "0"}, ...]}.
APFunction parse_ap_function(const nlohmann::json& j);
nlohmann::json ap_function_to_json(const APFunction& f);

/// Parses {"a": ..., "b": ..., "c": ..., "c_tilde": ...}; missing entries
/// default to the zero function (a must be present).
CoefficientSet parse_coefficients(const nlohmann::json& j, double tol = 1e-9);
nlohmann::json coefficients_to_json(const CoefficientSet& cs);

/// RFC 4180 CSV: header row, quoting only where needed, CRLF-free output.
class CsvWriter {
public:
    explicit CsvWriter(std::filesystem::path path);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& fields);
    void row_values(const std::vector<double>& values);
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t columns_ = 0;
    void flush();
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// diagnostic dumps
struct Grid1D;
struct DiscountedSolve;
struct HBarCurve;

/// (x, u, eps u) of a discounted cell solve.
void write_cell_csv(const std::filesystem::path& path, const Grid1D& grid,
                    const DiscountedSolve& solve);

/// (x, q, hbar) rows of a sampled inner effective Hamiltonian.
void write_hbar_csv(const std::filesystem::path& path, const HBarCurve& curve);

}  // namespace apfront
