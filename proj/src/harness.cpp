// SPDX-License-Identifier: Apache-2.0
#include "faree/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "faree/baselines.hpp"
#include "faree/channel.hpp"
#include "faree/geometry.hpp"
#include "faree/units.hpp"

namespace faree {

namespace {

const char* const kAxisNames[] = {"min_rate", "snr", "bandwidth", "user_distance", "noise_bs", "faru_count"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

/// Runs f(i) for i in [0, n) on a bounded pool; results are written by index.
template <class F>
void parallel_for(int n, int workers, F&& f) {
    workers = std::max(1, std::min(workers, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) f(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::string axis_name(Axis a) { return kAxisNames[static_cast<int>(a)]; }

Axis parse_axis(const std::string& name) {
    for (int i = 0; i < 6; ++i)
        if (name == kAxisNames[i]) return static_cast<Axis>(i);
    throw std::invalid_argument("unknown sweep axis: " + name);
}

void SweepSpec::validate() const {
    base.validate();
    if (values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
    if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
    if (schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("axis value must be finite");
        switch (axis) {
            case Axis::min_rate:
                if (v < 0.0) throw std::invalid_argument("min_rate must be >= 0");
                break;
            case Axis::bandwidth:
            case Axis::user_distance:
                if (v <= 0.0) throw std::invalid_argument(axis_name(axis) + " must be > 0");
                break;
            case Axis::faru_count:
                if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("faru_count must be a positive integer");
                break;
            case Axis::snr:
            case Axis::noise_bs:
                break;
        }
        apply_axis(base, axis, v).validate();
    }
}

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    SweepSpec s;
    if (j.contains("scenario")) s.base = config_from_json(j.at("scenario"));
    s.axis = parse_axis(j.at("axis").get<std::string>());
    s.values = j.at("values").get<std::vector<double>>();
    if (j.contains("schemes")) {
        s.schemes.clear();
        for (const auto& n : j.at("schemes")) s.schemes.push_back(parse_scheme(n.get<std::string>()));
    }
    if (j.contains("seeds")) {
        const auto& sj = j.at("seeds");
        if (sj.is_object()) {
            const int n = sj.at("count").get<int>();
            const std::uint64_t first = sj.value("first", std::uint64_t{0});
            for (int i = 0; i < n; ++i) s.seeds.push_back(first + static_cast<std::uint64_t>(i));
        } else {
            s.seeds = sj.get<std::vector<std::uint64_t>>();
        }
    } else {
        for (std::uint64_t i = 0; i < 20; ++i) s.seeds.push_back(i);
    }
    s.output = j.value("output", std::string());
    s.validate();
    return s;
}

double snr_reference_gain(const ScenarioConfig& config) {
    const Eigen::Vector3d center(config.users.center(0), config.users.center(1), 0.0);
    Matrix3X refs(3, config.num_users);
    for (int k = 0; k < config.num_users; ++k) refs.col(k) = center;
    const Placement p = initial_placement(config, refs);
    const double mu = config.gamma_shape * config.gamma_scale;
    const double mu0 = config.beta0_squared ? mu * mu : mu;
    const double beta0 = pathloss(p.o_b.norm(), mu0, config.pathloss_exponent);
    const double beta = pathloss((center - p.o_u).norm(), mu, config.pathloss_exponent);
    return beta0 * beta;
}

ScenarioConfig apply_axis(const ScenarioConfig& config, Axis axis, double value) {
    ScenarioConfig c = config;
    switch (axis) {
        case Axis::min_rate: c.min_rate = value; break;
        case Axis::snr: c.max_power = std::pow(10.0, value / 10.0) * c.noise_bs() / snr_reference_gain(c); break;
        case Axis::bandwidth: c.bandwidth = value; break;
        case Axis::user_distance: c.users.center = Eigen::Vector2d(0.0, value); break;
        case Axis::noise_bs: c.noise_bs_fixed = dbm_to_watt(value); break;
        case Axis::faru_count: c.num_far_antennas = static_cast<int>(std::lround(value)); break;
    }
    return c;
}

RunRecord run_scenario(const ScenarioConfig& config, Scheme scheme, std::uint64_t seed,
                       const OptimizerOptions& options, double axis_value) {
    RunRecord r;
    r.scenario_hash = config_hash(config);
    r.seed = seed;
    r.scheme = scheme;
    r.axis_value = axis_value;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const OptimizerState st = run_scheme(config, seed, scheme, options);
        r.feasible = st.feasible;
        r.converged = st.converged;
        r.outer_iterations = st.outer_iterations;
        r.ee_trace = st.ee_trace;
        if (st.feasible) {
            r.ee = st.report.ee;
            r.sum_rate = st.report.sum_rate;
            r.total_power = st.report.total_power;
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

double SweepResult::median_ee(double value, Scheme scheme) const {
    std::vector<double> v;
    for (const auto& r : runs)
        if (r.axis_value == value && r.scheme == scheme && r.feasible) v.push_back(r.ee);
    return median_of(v);
}

bool SweepResult::all_completed() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.error.empty(); });
}

int worker_count() {
    if (const char* env = std::getenv("FAREE_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const SweepSpec& spec, int workers) {
    spec.validate();
    if (workers <= 0) workers = worker_count();
    struct Cell {
        ScenarioConfig config;
        Scheme scheme;
        std::uint64_t seed;
        double value;
    };
    std::vector<Cell> cells;
    for (double v : spec.values) {
        const ScenarioConfig c = apply_axis(spec.base, spec.axis, v);
        for (Scheme s : spec.schemes)
            for (std::uint64_t seed : spec.seeds) cells.push_back({c, s, seed, v});
    }
    SweepResult out;
    out.axis = spec.axis;
    out.runs.resize(cells.size());
    parallel_for(static_cast<int>(cells.size()), workers, [&](int i) {
        const Cell& c = cells[i];
        out.runs[i] = run_scenario(c.config, c.scheme, c.seed, spec.options, c.value);
    });
    return out;
}

std::string sweep_csv_header() {
    return "kind,scenario_hash,axis,axis_value,scheme,seed,feasible,converged,ee,sum_rate,total_power,"
           "outer_iterations";
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "# far-ee sweep csv v1\n" << sweep_csv_header() << "\n";
    const std::string axis = axis_name(result.axis);
    for (const auto& r : result.runs) {
        os << "run," << r.scenario_hash << "," << axis << "," << fmt(r.axis_value) << "," << scheme_name(r.scheme)
           << "," << r.seed << "," << (r.feasible ? 1 : 0) << "," << (r.converged ? 1 : 0) << "," << fmt(r.ee) << ","
           << fmt(r.sum_rate) << "," << fmt(r.total_power) << "," << r.outer_iterations << "\n";
    }
    // Aggregates in first-seen (value, scheme) order.
    std::vector<std::pair<double, Scheme>> keys;
    for (const auto& r : result.runs) {
        const auto key = std::make_pair(r.axis_value, r.scheme);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [value, scheme] : keys) {
        std::vector<double> ee, rate, power, iters;
        int conv = 0;
        std::string hash;
        for (const auto& r : result.runs) {
            if (r.axis_value != value || r.scheme != scheme) continue;
            hash = r.scenario_hash;
            if (!r.feasible) continue;
            ee.push_back(r.ee);
            rate.push_back(r.sum_rate);
            power.push_back(r.total_power);
            iters.push_back(r.outer_iterations);
            conv += r.converged ? 1 : 0;
        }
        for (const char* kind : {"median", "mean"}) {
            const bool med = std::string(kind) == "median";
            auto agg = [&](const std::vector<double>& v) { return med ? median_of(v) : mean_of(v); };
            os << kind << "," << hash << "," << axis << "," << fmt(value) << "," << scheme_name(scheme) << ",,"
               << ee.size() << "," << conv << "," << fmt(agg(ee)) << "," << fmt(agg(rate)) << ","
               << fmt(agg(power)) << "," << fmt(agg(iters)) << "\n";
        }
    }
    return os.str();
}

std::string timing_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "axis_value,scheme,seed,wall_time,error\n";
    for (const auto& r : result.runs) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << fmt(r.axis_value) << "," << scheme_name(r.scheme) << "," << r.seed << "," << fmt_short(r.wall_time)
           << "," << err << "\n";
    }
    return os.str();
}

// Figures ------------------------------------------------------------------------

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"}; }

FigurePreset figure_preset(const std::string& name) {
    FigurePreset p;
    p.name = name;
    p.y_label = "EE (bit/J)";
    SweepSpec& s = p.spec;
    for (std::uint64_t i = 0; i < 20; ++i) s.seeds.push_back(i);
    if (name == "fig3") {
        p.title = "Convergence of the outer loop";
        p.x_label = "outer iteration";
        p.convergence = true;
        s.axis = Axis::min_rate;
        s.values = {0.3e6, 0.5e6, 0.8e6, 1.0e6};
        s.schemes = {Scheme::far};
    } else if (name == "fig4") {
        p.title = "EE versus minimum required rate";
        p.x_label = "R_min (Mbps)";
        p.x_display_scale = 1e-6;
        s.axis = Axis::min_rate;
        s.values = {0.3e6, 0.5e6, 0.8e6, 1.0e6, 1.5e6, 2.0e6};
    } else if (name == "fig5") {
        p.title = "EE versus average SNR";
        p.x_label = "average SNR (dB)";
        s.axis = Axis::snr;
        s.values = {-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0};
    } else if (name == "fig6") {
        p.title = "EE versus bandwidth";
        p.x_label = "bandwidth (MHz)";
        p.x_display_scale = 1e-6;
        s.axis = Axis::bandwidth;
        s.values = {5e6, 10e6, 15e6, 20e6, 25e6};
    } else if (name == "fig7") {
        p.title = "EE versus BS to user-region distance";
        p.x_label = "distance (m)";
        s.axis = Axis::user_distance;
        s.values = {80.0, 90.0, 100.0, 110.0, 120.0, 130.0};
        // Rectangle extents are not given for this experiment; 40 m x 20 m is an arbitrary choice.
        s.base.users.shape = UserRegionShape::rectangle;
        s.base.users.width = 40.0;
        s.base.users.depth = 20.0;
    } else if (name == "fig8") {
        p.title = "EE versus noise power at the BS";
        p.x_label = "noise power at BS (dBm)";
        s.axis = Axis::noise_bs;
        s.values = {-170.0, -150.0, -130.0, -110.0, -100.0, -90.0, -80.0, -70.0};
    } else if (name == "fig9") {
        p.title = "EE versus number of FAR-U antennas";
        p.x_label = "M";
        s.axis = Axis::faru_count;
        s.values = {2.0, 3.0, 4.0, 5.0, 6.0};
    } else {
        throw std::invalid_argument("unknown figure preset: " + name);
    }
    return p;
}

std::string convergence_csv(const FigurePreset& preset, int workers) {
    if (!preset.convergence) throw std::invalid_argument("preset " + preset.name + " is not a convergence preset");
    SweepResult r = sweep(preset.spec, workers);
    std::ostringstream os;
    os << "# far-ee convergence csv v1\nseries,outer_iter,ee\n";
    for (double v : preset.spec.values) {
        std::vector<std::vector<double>> traces;
        size_t len = 0;
        for (const auto& run : r.runs) {
            if (run.axis_value != v || !run.feasible || run.ee_trace.empty()) continue;
            traces.push_back(run.ee_trace);
            len = std::max(len, run.ee_trace.size());
        }
        const std::string series = "R_min=" + fmt_short(v * 1e-6) + " Mbps";
        for (size_t i = 0; i < len; ++i) {
            std::vector<double> col;
            for (const auto& t : traces) col.push_back(i < t.size() ? t[i] : t.back());
            os << series << "," << i << "," << fmt(median_of(col)) << "\n";
        }
    }
    return os.str();
}

std::string emit_figure(const std::string& csv, const FigurePreset& preset) {
    // Collect (series, x, y) from the table.
    std::istringstream is(csv);
    std::string line;
    std::vector<std::string> header;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    std::vector<std::string> order;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto f = split(line, ',');
        if (header.empty()) {
            header = f;
            const bool want_trace = preset.convergence;
            const bool is_trace = header.size() == 3 && header[0] == "series";
            const bool is_sweep = line == sweep_csv_header();
            if (!(want_trace ? is_trace : is_sweep))
                throw std::invalid_argument("emit_figure: CSV schema does not match preset " + preset.name);
            continue;
        }
        std::string name;
        double x = 0.0, y = 0.0;
        if (preset.convergence) {
            if (f.size() != 3) throw std::invalid_argument("emit_figure: malformed row");
            name = f[0];
            x = std::stod(f[1]);
            y = std::stod(f[2]);
        } else {
            if (f.size() != header.size()) throw std::invalid_argument("emit_figure: malformed row");
            if (f[0] != "median") continue;
            if (f[2] != axis_name(preset.spec.axis))
                throw std::invalid_argument("emit_figure: CSV axis does not match preset " + preset.name);
            name = f[4];
            x = std::stod(f[3]) * preset.x_display_scale;
            y = std::stod(f[8]);
        }
        if (!series.count(name)) order.push_back(name);
        series[name].emplace_back(x, y);
    }
    if (series.empty()) throw std::invalid_argument("emit_figure: no data rows");

    double x0 = 1e300, x1 = -1e300, y1 = 0.0;
    for (const auto& [n, pts] : series) {
        for (const auto& [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= 0.0) y1 = 1.0;
    y1 *= 1.05;

    const double W = 640, H = 420, L = 80, R = 160, T = 40, B = 60;
    const double pw = W - L - R, ph = H - T - B;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return T + ph - y / y1 * ph; };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << preset.title
       << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y1 * i / 5.0;
        os << "<text x=\"" << fmt_short(px(xv)) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
           << fmt_short(xv) << "</text>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << fmt_short(py(yv) + 4) << "\" text-anchor=\"end\">"
           << fmt_short(yv) << "</text>\n";
    }
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << preset.x_label
       << "</text>\n";
    os << "<text x=\"18\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << T + ph / 2 << ")\">" << preset.y_label << "</text>\n";
    for (size_t s = 0; s < order.size(); ++s) {
        auto pts = series[order[s]];
        std::stable_sort(pts.begin(), pts.end());
        const char* color = colors[s % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << fmt_short(px(pts[i].first)) << "," << fmt_short(py(pts[i].second));
        os << "\"/>\n";
        for (const auto& [x, y] : pts)
            os << "<circle cx=\"" << fmt_short(px(x)) << "\" cy=\"" << fmt_short(py(y)) << "\" r=\"3\" fill=\""
               << color << "\"/>\n";
        const double ly = T + 10 + 18 * static_cast<double>(s);
        os << "<line x1=\"" << L + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 35 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << L + pw + 40 << "\" y=\"" << ly + 4 << "\">" << order[s] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace faree
