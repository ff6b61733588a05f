#include "dirac/report.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dirac {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Split on blanks, commas and semicolons outside parentheses.
std::vector<std::string> tokens(const std::string& text, bool comma_splits)
{
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : text) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        const bool sep = ch == ' ' || ch == '\t' || ch == ';' || ch == '\n' || ch == '\r' || (comma_splits && ch == ',');
        if (depth == 0 && sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!(depth > 0 && (ch == ' ' || ch == '\t'))) {
            cur += ch;
        }
        if (depth < 0) throw ConfigError("unbalanced parentheses in '" + text + "'");
    }
    if (depth != 0) throw ConfigError("unbalanced parentheses in '" + text + "'");
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_real(const std::string& text)
{
    std::istringstream in(text);
    double v = 0.0;
    if (!(in >> v) || !(in >> std::ws).eof() || !std::isfinite(v))
        throw ConfigError("expected a real number, got '" + text + "'");
    return v;
}

int parse_count(const std::string& text)
{
    const double v = parse_real(text);
    if (v != std::floor(v) || v < 1.0 || v > 1e7) throw ConfigError("expected a positive count, got '" + text + "'");
    return static_cast<int>(v);
}

std::pair<std::string, std::string> split_once(const std::string& s, char sep)
{
    const auto at = s.find(sep);
    if (at == std::string::npos) return {trim(s), {}};
    return {trim(s.substr(0, at)), trim(s.substr(at + 1))};
}

std::vector<double> axis(const std::string& text)
{
    const auto v = parse_real_list(text);
    if (v.size() != 3) throw ConfigError("grid axis needs 'lo hi count', got '" + text + "'");
    parse_count(trim(tokens(text, true)[2]));
    return v;
}

} // namespace

cplx parse_complex(const std::string& text)
{
    std::istringstream in(trim(text));
    cplx v;
    if (!(in >> v) || !(in >> std::ws).eof() || !std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw ConfigError("expected a complex number like 1.5 or (1.5,-2), got '" + text + "'");
    return v;
}

std::vector<cplx> parse_complex_list(const std::string& text)
{
    std::vector<cplx> out;
    for (const auto& t : tokens(text, false)) out.push_back(parse_complex(t));
    return out;
}

std::vector<double> parse_real_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& t : tokens(text, true)) out.push_back(parse_real(t));
    return out;
}

std::pair<double, double> parse_interval(const std::string& text)
{
    std::string s = trim(text);
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    const auto v = parse_real_list(s);
    if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("expected an interval (a,b) with a < b, got '" + text + "'");
    return {v[0], v[1]};
}

std::vector<cplx> rectangle_grid(const std::vector<double>& re, const std::vector<double>& im)
{
    if (re.size() != 3 || im.size() != 3) throw ConfigError("rectangle grid needs lo hi count on each axis");
    const int nr = static_cast<int>(re[2]);
    const int ni = static_cast<int>(im[2]);
    if (nr < 1 || ni < 1 || nr != re[2] || ni != im[2]) throw ConfigError("rectangle grid counts must be positive integers");
    auto at = [](const std::vector<double>& a, int n, int k) {
        return n == 1 ? a[0] : a[0] + (a[1] - a[0]) * static_cast<double>(k) / (n - 1);
    };
    std::vector<cplx> out;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < ni; ++j) out.emplace_back(at(re, nr, i), at(im, ni, j));
    return out;
}

OperatorData parse_phi(const std::string& spec)
{
    const auto [family, rest] = split_once(spec, ':');
    try {
        if (family == "zero" && rest.empty()) return OperatorData::zero();
        if (family == "constant") return OperatorData::constant(parse_complex(rest));
        if (family == "chirp") {
            const auto v = parse_real_list(rest);
            if (v.size() == 1) return OperatorData::chirp(v[0]);
        }
        if (family == "gated_chirp" || family == "gated") {
            const auto v = parse_real_list(rest);
            if (v.size() == 2) return OperatorData::gated_chirp(v[0], v[1]);
        }
        if (family == "periodic" || family == "periodic_samples" || family == "grid" || family == "grid_samples") {
            const auto [h, values] = split_once(rest, ':');
            const double step = parse_real(h);
            auto vals = parse_complex_list(values);
            if (family.starts_with("periodic")) return OperatorData::periodic_samples(step, std::move(vals));
            return OperatorData::grid_samples(step, std::move(vals));
        }
        if (family == "file" && !rest.empty()) return OperatorData::from_file(rest);
    } catch (const DomainError& e) {
        throw ConfigError("phi '" + spec + "': " + e.what());
    } catch (const InvalidDataError& e) {
        throw ConfigError("phi '" + spec + "': " + e.what());
    }
    throw ConfigError("unknown phi spec '" + spec +
                      "' (zero | constant:C | chirp:A | gated_chirp:A,Q | periodic:P:V... | grid:H:V... | file:PATH)");
}

ExperimentConfig ExperimentConfig::defaults()
{
    ExperimentConfig cfg;
    cfg.z_grid = rectangle_grid({-3.0, 3.0, 7.0}, {0.5, 3.0, 6.0});
    return cfg;
}

ExperimentConfig parse_config(std::istream& in)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const std::map<std::string, std::set<std::string>> known{
        {"phi", {"spec"}},
        {"grid", {"z", "z_re", "z_im", "x"}},
        {"averages", {"x", "eps"}},
        {"model", {"gaps"}},
        {"sigma", {"x", "kmax", "bins"}},
        {"series", {"x", "y"}},
        {"zeros", {"x", "window", "bins"}},
        {"tolerances", {"growth", "margin", "average"}},
        {"output", {"dir"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end() || body.data() != "") throw ConfigError("config: unknown section [" + section + "]");
        for (const auto& [key, value] : body)
            if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }
    auto get = [&](const char* path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(path)) return trim(*v);
        return std::nullopt;
    };

    ExperimentConfig cfg = ExperimentConfig::defaults();
    if (auto v = get("phi.spec")) cfg.phi_spec = *v;
    auto re = get("grid.z_re");
    auto im = get("grid.z_im");
    if (auto v = get("grid.z")) {
        if (re || im) throw ConfigError("config: give either grid.z or grid.z_re/z_im");
        cfg.z_grid = parse_complex_list(*v);
    } else if (re || im) {
        cfg.z_grid = rectangle_grid(axis(re.value_or("-3 3 7")), axis(im.value_or("0.5 3 6")));
    }
    if (auto v = get("grid.x")) cfg.checkpoints = parse_real_list(*v);
    if (auto v = get("averages.x")) cfg.average_x = parse_real_list(*v);
    if (auto v = get("averages.eps")) cfg.eps = parse_real_list(*v);
    if (auto v = get("model.gaps")) cfg.gaps = *v;
    if (auto v = get("sigma.x")) cfg.sigma_x = parse_real_list(*v);
    if (auto v = get("sigma.kmax")) cfg.sigma_kmax = parse_real(*v);
    if (auto v = get("sigma.bins")) cfg.sigma_bins = parse_count(*v);
    if (auto v = get("series.x")) cfg.series_x = parse_real(*v);
    if (auto v = get("series.y")) cfg.series_y = parse_real_list(*v);
    if (auto v = get("zeros.x")) cfg.zeros_x = parse_real(*v);
    if (auto v = get("zeros.window")) cfg.zeros_window = parse_interval(*v);
    if (auto v = get("zeros.bins")) cfg.zeros_bins = parse_count(*v);
    if (auto v = get("tolerances.growth")) cfg.tol_growth = parse_real(*v);
    if (auto v = get("tolerances.margin")) cfg.tol_margin = parse_real(*v);
    if (auto v = get("tolerances.average")) cfg.tol_average = parse_real(*v);
    if (auto v = get("output.dir")) cfg.output_dir = *v;
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    return parse_config(in);
}

void validate(const ExperimentConfig& cfg)
{
    auto need = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError("config: " + what);
    };
    auto increasing_positive = [](const std::vector<double>& v) {
        for (std::size_t k = 0; k < v.size(); ++k)
            if (!(v[k] > 0.0) || (k > 0 && !(v[k] > v[k - 1]))) return false;
        return !v.empty();
    };
    const auto phi = parse_phi(cfg.phi_spec);
    need(!cfg.z_grid.empty(), "z grid is empty");
    for (cplx z : cfg.z_grid) need(z.imag() != 0.0, "z grid must stay off the real axis");
    need(increasing_positive(cfg.checkpoints), "checkpoints must be positive and increasing");
    need(increasing_positive(cfg.average_x), "averages.x must be positive and increasing");
    need(!cfg.eps.empty(), "eps grid is empty");
    for (std::size_t k = 0; k < cfg.eps.size(); ++k)
        need(cfg.eps[k] > 0.0 && (k == 0 || cfg.eps[k] < cfg.eps[k - 1]), "eps grid must be positive and decreasing");
    need(increasing_positive(cfg.sigma_x), "sigma.x must be positive and increasing");
    need(cfg.sigma_kmax > 0.0 && cfg.sigma_bins >= 16, "sigma needs kmax > 0 and at least 16 bins");
    need(cfg.series_x > 0.0 && increasing_positive(cfg.series_y) && cfg.series_y.size() >= 2,
         "series needs x > 0 and at least two increasing y values");
    need(cfg.zeros_x > 0.0 && cfg.zeros_window.first < cfg.zeros_window.second && cfg.zeros_bins >= 1,
         "zeros needs x > 0, a bounded window and bins >= 1");
    need(cfg.tol_growth > 0.0 && cfg.tol_margin > 0.0 && cfg.tol_average > 0.0, "tolerances must be positive");
    resolve_gaps(cfg, phi);
}

GapSet resolve_gaps(const ExperimentConfig& cfg, const OperatorData& phi, std::string* provenance)
{
    const std::string g = trim(cfg.gaps);
    if (g == "constant-auto") {
        if (phi.family() != Family::constant) throw ConfigError("config: constant-auto needs the constant family");
        const double c = std::abs(phi.constant_value());
        if (provenance) *provenance = "constant-auto: one gap (-|c|, |c|)";
        return c > 0.0 ? GapSet::from({{-c, c}}) : GapSet::line();
    }
    auto set = GapSet::parse(g);
    if (provenance) *provenance = set.gaps.empty() ? "free: E = R" : "gap list from config";
    return set;
}

} // namespace dirac
