#pragma once

#include "nrlab/grid.hpp"
#include "nrlab/hamalg.hpp"
#include "nrlab/multipliers.hpp"
#include "nrlab/propagators.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nrlab {

/// Deterministic RNG (seeded, explicit uint64 -> double mapping) so that CSV
/// output is byte-identical across runs with the same config.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    double uniform();                 // [0,1)
    double sym();                     // [-1,1)
    cplx complex_sym();
    std::uint64_t next();

  private:
    std::uint64_t s_[4];
};

enum class ExperimentTag {
    linear_longtime,
    nonlinear_locuniform,
    transform_gain,
    global_bound,
    scaling_identity,
    galerkin_tail,
};

ExperimentTag experiment_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentTag experiment = ExperimentTag::linear_longtime;
    std::vector<double> c_list = {4, 8, 16, 32};
    int r = 1;
    int l = 2;
    double lambda = 1.0;
    int dim = 1;
    int n = 256;
    double length = 6.283185307179586476925286766559;  // 2*pi
    double k = 2.0;              // error-norm index
    double T0 = 1.0;             // base window
    double t_end = 50.0;         // global_bound horizon
    double amplitude = 0.1;
    std::string datum = "default";   // default | gaussian
    double gauss_width = 6.0;
    double dt = 0.0;             // 0: auto policy
    std::uint64_t seed = 42;
    std::string out;             // CSV path ("" = stdout only)
    std::string dat_out;         // optional gnuplot .dat path
    std::vector<int> sigma_list = {1, 2};
    int N_min = 2;
    int N_max = 5;
    int fault_term = -1;         // transform_gain: index into Z_2 monomials
    double fault_scale = 1.25;
    int workers = 0;             // 0: one per c value

    // evolve-subcommand fields
    std::string system = "nlkg";
    double c_single = 8.0;
    std::vector<int> modes = {0, 1, -2};
    std::string snapshot_out;

    void validate() const;
};

/// Parses the flat key=value config format; unknown keys are rejected.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

struct ReportRow {
    double c;
    double T;
    double error;
    std::string norm;
};

/// (c, T, error) rows plus the fitted log-log slope with confidence band.
struct ConvergenceReport {
    std::vector<ReportRow> rows;
    double slope = 0.0;
    double residual = 0.0;        // rms residual of the fit in log2 space
    double slope_stderr = 0.0;    // confidence band of the fitted slope
    double expected_slope = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool temporal_check_ok = true;  // step-halving validity flag
    std::vector<std::string> notes;

    std::string csv() const;      // header c,T,error,norm,slope_running
    std::string summary() const;  // SLOPE=... RESIDUAL=... PASS=...
    std::string dat() const;      // gnuplot-compatible two-column data
};

/// Least-squares fit error ~ A * c^slope on log2/log2 axes.
/// Recovers synthetic slopes to 1e-10.
void fit_loglog_slope(const std::vector<double>& c, const std::vector<double>& err,
                      double& slope, double& residual, double& stderr_out);

/// Band-limited or gaussian-decay initial datum per the config.
Field make_datum(const ExperimentConfig& cfg, const Grid& g);

ConvergenceReport exp_linear_longtime(const ExperimentConfig& cfg);
ConvergenceReport exp_nonlinear_locuniform(const ExperimentConfig& cfg);

struct TransformGainReport {
    ConvergenceReport transformed;    // expected slope -4
    ConvergenceReport untransformed;  // expected slope -2
};
TransformGainReport exp_transform_gain(const ExperimentConfig& cfg);

struct GlobalBoundReport {
    std::vector<double> c;
    std::vector<double> ratio;  // max_t ||psi(t)||_{H_c^{1/2}} / ||psi_0||
    bool pass = false;          // all ratios <= 2
    std::string csv() const;
};
GlobalBoundReport exp_global_bound(const ExperimentConfig& cfg);

struct ScalingIdentityReport {
    std::vector<double> c;
    std::vector<double> max_coeff_error;  // Fourier-coefficient mismatch
    bool pass = false;                    // all <= 1e-10
    std::string csv() const;
};
ScalingIdentityReport exp_scaling_identity(const ExperimentConfig& cfg);

struct GalerkinTailReport {
    struct Row {
        int sigma;
        std::vector<int> N;
        std::vector<double> tail;  // ||(id-Pi_N)f||_{H^k}
        double rate;               // fitted decay per unit N (log2)
    };
    std::vector<Row> rows;
    bool pass = false;  // rate >= sigma - 0.1 for each sigma
    std::string csv() const;
};
GalerkinTailReport exp_galerkin_tail(const ExperimentConfig& cfg);

struct ValidationResult {
    struct Item {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Item> items;
    bool all_pass() const;
    std::string summary() const;  // one line per property, machine-readable
};

/// Every module's invariant tests plus the symbolic golden-coefficient checks.
ValidationResult run_validation_suite();

/// Spectral snapshot binary format "NRLB": little-endian, magic "NRLB",
/// u32 version=1, u32 dim, u32 n, f64 length, then size interleaved f64
/// (re,im) pairs of the spectral coefficients in FFT mode order.
void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);

/// Trajectory CSV: t, Re/Im of selected modes, norms, Hamiltonian.
std::string trajectory_csv(const Trajectory& tr, const std::vector<int>& modes);

}  // namespace nrlab
