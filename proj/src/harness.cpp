#include "nrlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nrlab {

// ---------------------------------------------------------------------------
// Deterministic RNG: xoshiro256** seeded by splitmix64. Doubles are produced
// by the explicit 53-bit mapping, so streams are reproducible bit-for-bit.
// ---------------------------------------------------------------------------

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
double Rng::sym() { return 2.0 * uniform() - 1.0; }
cplx Rng::complex_sym() { return {sym(), sym()}; }

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentTag experiment_from_string(const std::string& s) {
    if (s == "linear_longtime") return ExperimentTag::linear_longtime;
    if (s == "nonlinear_locuniform") return ExperimentTag::nonlinear_locuniform;
    if (s == "transform_gain") return ExperimentTag::transform_gain;
    if (s == "global_bound") return ExperimentTag::global_bound;
    if (s == "scaling_identity") return ExperimentTag::scaling_identity;
    if (s == "galerkin_tail") return ExperimentTag::galerkin_tail;
    throw std::invalid_argument("unknown experiment tag: " + s);
}

void ExperimentConfig::validate() const {
    if (c_list.size() < 3 &&
        (experiment == ExperimentTag::linear_longtime ||
         experiment == ExperimentTag::nonlinear_locuniform ||
         experiment == ExperimentTag::transform_gain))
        throw std::invalid_argument("config: slope fitting needs at least 3 c values");
    for (std::size_t i = 1; i < c_list.size(); ++i)
        if (!(c_list[i] > c_list[i - 1]))
            throw std::invalid_argument("config: c list must be strictly increasing");
    if (l < 2) throw std::invalid_argument("config: l >= 2");
    if (r < 1 || r > 3) throw std::invalid_argument("config: r in 1..3");
    if (!(T0 > 0.0)) throw std::invalid_argument("config: T0 > 0");
    if (!(amplitude > 0.0)) throw std::invalid_argument("config: amplitude > 0");
}

namespace {

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key == "experiment") cfg.experiment = experiment_from_string(val);
        else if (key == "c_list") cfg.c_list = parse_double_list(val);
        else if (key == "r") cfg.r = std::stoi(val);
        else if (key == "l") cfg.l = std::stoi(val);
        else if (key == "lambda") cfg.lambda = std::stod(val);
        else if (key == "dim") cfg.dim = std::stoi(val);
        else if (key == "n") cfg.n = std::stoi(val);
        else if (key == "length") cfg.length = std::stod(val);
        else if (key == "k") cfg.k = std::stod(val);
        else if (key == "T0") cfg.T0 = std::stod(val);
        else if (key == "t_end") cfg.t_end = std::stod(val);
        else if (key == "amplitude") cfg.amplitude = std::stod(val);
        else if (key == "datum") cfg.datum = val;
        else if (key == "gauss_width") cfg.gauss_width = std::stod(val);
        else if (key == "dt") cfg.dt = std::stod(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "out") cfg.out = val;
        else if (key == "dat_out") cfg.dat_out = val;
        else if (key == "sigma_list") cfg.sigma_list = parse_int_list(val);
        else if (key == "N_min") cfg.N_min = std::stoi(val);
        else if (key == "N_max") cfg.N_max = std::stoi(val);
        else if (key == "fault_term") cfg.fault_term = std::stoi(val);
        else if (key == "fault_scale") cfg.fault_scale = std::stod(val);
        else if (key == "workers") cfg.workers = std::stoi(val);
        else if (key == "system") cfg.system = val;
        else if (key == "c") cfg.c_single = std::stod(val);
        else if (key == "modes") cfg.modes = parse_int_list(val);
        else if (key == "snapshot_out") cfg.snapshot_out = val;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// ---------------------------------------------------------------------------
// Slope fitting and reports
// ---------------------------------------------------------------------------

void fit_loglog_slope(const std::vector<double>& c, const std::vector<double>& err,
                      double& slope, double& residual, double& stderr_out) {
    if (c.size() != err.size() || c.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need >= 2 points");
    const std::size_t n = c.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(err[i] > 0.0)) throw std::domain_error("fit_loglog_slope: nonpositive error");
        x[i] = std::log2(c[i]);
        y[i] = std::log2(err[i]);
    }
    double xm = 0, ym = 0;
    for (std::size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    slope = sxy / sxx;
    const double icept = ym - slope * xm;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (icept + slope * x[i]);
        ss += r * r;
    }
    residual = std::sqrt(ss / n);
    stderr_out = (n > 2) ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string ConvergenceReport::csv() const {
    std::ostringstream os;
    os << "c,T,error,norm,slope_running\n";
    std::vector<double> cs, es;
    for (const auto& r : rows) {
        cs.push_back(r.c);
        es.push_back(r.error);
        std::string running = "nan";
        if (cs.size() >= 2) {
            double s, res, se;
            fit_loglog_slope(cs, es, s, res, se);
            running = fmt(s);
        }
        os << fmt(r.c) << "," << fmt(r.T) << "," << fmt(r.error) << "," << r.norm << ","
           << running << "\n";
    }
    return os.str();
}

std::string ConvergenceReport::summary() const {
    std::ostringstream os;
    os << "SLOPE=" << fmt(slope) << " RESIDUAL=" << fmt(residual)
       << " PASS=" << (pass ? "true" : "false");
    return os.str();
}

std::string ConvergenceReport::dat() const {
    std::ostringstream os;
    os << "# log2(c) log2(error)\n";
    for (const auto& r : rows)
        os << fmt(std::log2(r.c)) << " " << fmt(std::log2(r.error)) << "\n";
    return os.str();
}

std::string GlobalBoundReport::csv() const {
    std::ostringstream os;
    os << "c,ratio\n";
    for (std::size_t i = 0; i < c.size(); ++i) os << fmt(c[i]) << "," << fmt(ratio[i]) << "\n";
    return os.str();
}

std::string ScalingIdentityReport::csv() const {
    std::ostringstream os;
    os << "c,max_coeff_error\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        os << fmt(c[i]) << "," << fmt(max_coeff_error[i]) << "\n";
    return os.str();
}

std::string GalerkinTailReport::csv() const {
    std::ostringstream os;
    os << "sigma,N,tail,rate\n";
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.N.size(); ++i)
            os << r.sigma << "," << r.N[i] << "," << fmt(r.tail[i]) << "," << fmt(r.rate)
               << "\n";
    return os.str();
}

bool ValidationResult::all_pass() const {
    for (const auto& i : items)
        if (!i.pass) return false;
    return true;
}

std::string ValidationResult::summary() const {
    std::ostringstream os;
    int np = 0;
    for (const auto& i : items) {
        os << "PROP " << i.name << " " << (i.pass ? "PASS" : "FAIL");
        if (!i.detail.empty()) os << " (" << i.detail << ")";
        os << "\n";
        if (i.pass) ++np;
    }
    os << "TOTAL " << np << "/" << items.size() << " "
       << (all_pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Datum
// ---------------------------------------------------------------------------

Field make_datum(const ExperimentConfig& cfg, const Grid& g) {
    if (cfg.datum == "default") {
        // amplitude * (e^{i x} + 0.5 e^{-2 i x}) along the first axis
        std::vector<cplx> v(g.size());
        for (std::int64_t i = 0; i < g.size(); ++i) {
            const double x = g.coord_component(i, 0);
            v[i] = cfg.amplitude *
                   (std::polar(1.0, x) + 0.5 * std::polar(1.0, -2.0 * x));
        }
        return Field::from_physical(g, std::move(v));
    }
    if (cfg.datum == "gaussian") {
        // spectral profile amplitude * N^{d/2} exp(-|xi|^2 / (2 w^2))
        const double w = cfg.gauss_width;
        std::vector<cplx> sp(g.size());
        const double scale = cfg.amplitude * std::sqrt(static_cast<double>(g.size()));
        for (std::int64_t i = 0; i < g.size(); ++i)
            sp[i] = scale * std::exp(-g.xi_squared(i) / (2.0 * w * w));
        return Field::from_spectral(g, std::move(sp));
    }
    if (cfg.datum == "mean_only") {
        std::vector<cplx> v(g.size(), cplx(cfg.amplitude, 0.0));
        return Field::from_physical(g, std::move(v));
    }
    throw std::invalid_argument("unknown datum: " + cfg.datum);
}

// ---------------------------------------------------------------------------
// Snapshot IO ("NRLB")
// ---------------------------------------------------------------------------

void write_snapshot(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const Grid& g = f.grid();
    out.write("NRLB", 4);
    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    put_u32(1u);
    put_u32(static_cast<std::uint32_t>(g.dim()));
    put_u32(static_cast<std::uint32_t>(g.n()));
    put_f64(g.length());
    for (const auto& z : f.spectral()) {
        put_f64(z.real());
        put_f64(z.imag());
    }
}

Field read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, "NRLB", 4) != 0) throw std::runtime_error("bad snapshot magic");
    auto get_u32 = [&] {
        std::uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_f64 = [&] {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint32_t version = get_u32();
    if (version != 1u) throw std::runtime_error("unsupported snapshot version");
    const int dim = static_cast<int>(get_u32());
    const int n = static_cast<int>(get_u32());
    const double length = get_f64();
    Grid g = make_grid(dim, n, length);
    std::vector<cplx> sp(g.size());
    for (auto& z : sp) {
        const double re = get_f64();
        const double im = get_f64();
        z = {re, im};
    }
    if (!in) throw std::runtime_error("truncated snapshot");
    return Field::from_spectral(g, std::move(sp));
}

std::string trajectory_csv(const Trajectory& tr, const std::vector<int>& modes) {
    std::ostringstream os;
    os << "t";
    for (int m : modes) os << ",re_k" << m << ",im_k" << m;
    os << ",l2,hk2,hamiltonian\n";
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        os << fmt(tr.times[i]);
        const auto& sp = tr.samples[i].spectral();
        const Grid& g = tr.samples[i].grid();
        for (int m : modes) {
            const std::int64_t idx = m >= 0 ? m : g.n() + m;
            os << "," << fmt(sp[idx].real()) << "," << fmt(sp[idx].imag());
        }
        os << "," << fmt(std::sqrt(tr.mass[i])) << "," << fmt(norm_hk(tr.samples[i], 2.0))
           << "," << fmt(tr.hamiltonian[i]) << "\n";
    }
    return os.str();
}

}  // namespace nrlab
