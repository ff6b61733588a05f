#pragma once

#include "dirac/common.hpp"
#include "dirac/martin.hpp"
#include "dirac/operator_data.hpp"
#include "dirac/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dirac {

// Text forms shared by config files and the CLI. All throw ConfigError.
//   phi: zero | constant:C | chirp:A | gated_chirp:A,Q | periodic:P:V... | grid:H:V... | file:PATH
//   complex values use the stream form: 1.5 or (1.5,-2)
OperatorData parse_phi(const std::string& spec);
cplx parse_complex(const std::string& text);
std::vector<cplx> parse_complex_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::pair<double, double> parse_interval(const std::string& text); // "(a,b)" or "a b"
// "lo hi count" on each axis, row-major in the real part
std::vector<cplx> rectangle_grid(const std::vector<double>& re, const std::vector<double>& im);

struct ExperimentConfig {
    std::string phi_spec = "zero";
    std::vector<cplx> z_grid;            // compact, off the real axis
    std::vector<double> checkpoints{50.0, 100.0, 200.0};
    std::vector<double> average_x{300.0, 1000.0, 3000.0, 10000.0};
    std::vector<double> eps{1.0, 0.5, 0.25};
    std::string gaps = "free";           // free | constant-auto | "(a,b) (c,d)"
    std::vector<double> sigma_x{10.0, 100.0, 1000.0};
    double sigma_kmax = 10.0;
    int sigma_bins = 80;
    double series_x = 200.0;
    std::vector<double> series_y{8.0, 16.0, 32.0, 64.0};
    double zeros_x = 100.0;
    std::pair<double, double> zeros_window{-3.2, 3.2};
    int zeros_bins = 16;
    double tol_growth = 0.1;   // verdict: max |h(x_max, z) - M(z)|
    double tol_margin = 0.05;  // lower bound h >= M - margin
    double tol_average = 0.05; // relative to max(1, bE)
    std::filesystem::path output_dir = "report";

    static ExperimentConfig defaults();
};

// INI with sections phi, grid, averages, model, sigma, series, zeros,
// tolerances, output; unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

// Model for the gaps field; constant-auto gives the one-gap set (-|c|, |c|).
GapSet resolve_gaps(const ExperimentConfig& cfg, const OperatorData& phi, std::string* provenance = nullptr);

struct Window {
    std::string axis; // "x", "y", "k", "z-grid"
    double lo = 0.0;
    double hi = 0.0;
};

struct CheckRow {
    std::string kind; // verdict | inequality | consistency
    std::string name;
    Window window;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct CesaroRow {
    double x = 0.0;
    double value = 0.0;
};

struct GrowthRow {
    double x = 0.0;
    cplx z = 0.0;
    double h = 0.0;
    double martin = 0.0;
};

struct CheckpointRow {
    double x = 0.0;
    double max_abs_diff = 0.0; // max over the z-grid of |h - M|
    double min_margin = 0.0;   // min over the z-grid of h - M
};

struct SeriesRow {
    double y = 0.0;
    double residual = 0.0;
    double modulus_residual = 0.0;
    double windowed_residual = 0.0; // over [x/2, x]
};

struct RegularityReport {
    std::string phi;
    MartinModel model;
    std::string provenance;
    std::vector<CesaroRow> cesaro;
    Window cesaro_window;
    double cesaro_liminf = 0.0;
    double cesaro_limsup = 0.0;
    RegularitySummary averages;
    std::vector<SigmaResult> sigma;
    std::vector<double> sigma_x;
    std::vector<GrowthRow> growth;
    std::vector<CheckpointRow> checkpoints;
    double series_x = 0.0;
    std::vector<SeriesRow> series;
    double series_slope = 0.0;
    double modulus_slope = 0.0;
    ZeroCounting zeros;
    double zeros_x = 0.0;
    std::optional<MeasureHistogram> martin_bins; // absent when the window meets a band edge
    std::vector<CheckRow> checks;
    std::string verdict; // REGULAR-CONSISTENT or INCONCLUSIVE
};

RegularityReport run_report(const ExperimentConfig& cfg);

// Shortest round-trip form (at most 17 significant digits); "nan", "inf", "-inf".
std::string format_double(double v);

// report.json, growth.csv, sigma.csv, averages.csv, series.csv, martin.json, zeros.csv
void write_report(const RegularityReport& report, const std::filesystem::path& dir);
std::string report_json(const RegularityReport& report);
std::string martin_json(const MartinModel& model);

} // namespace dirac
