#pragma once

#include "nrlab/grid.hpp"
#include "nrlab/hamalg.hpp"
#include "nrlab/multipliers.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrlab {

enum class SystemTag {
    kg_linear,
    u_r_linear,
    nlkg,
    nf_order1,
    nf_order2,
    nlkg_complex,
    nf_complex_order1,
};

SystemTag system_from_string(const std::string& s);
std::string system_to_string(SystemTag t);

struct EvolutionSpec {
    SystemTag system = SystemTag::nlkg;
    PhysicalParams params;
    int r = 1;                   // truncation order for u_r_linear
    double dt = 1e-2;
    double t_end = 1.0;
    bool gauge_peeled = false;   // factor out the global e^{i c^2 t} phase
    bool dealias = true;
    double drift_guard = 1e-5;   // per-step relative Hamiltonian drift rejection
    int sample_stride = 0;       // 0: auto (~200 samples)

    // fault injection for the sensitivity experiment: scales one monomial
    // coefficient of the highest-order Z before compiling the flow
    int nf_fault_term = -1;
    double nf_fault_scale = 1.0;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> samples;
    std::vector<double> hamiltonian;  // conserved-quantity log
    std::vector<double> mass;         // L^2 norm squared
};

struct TrajectoryPair {
    std::vector<double> times;
    std::vector<FieldPair> samples;
    std::vector<double> hamiltonian;
    std::vector<double> mass;
};

/// Step rejected by the Hamiltonian-drift guard (dt too large).
struct StepRejected : std::runtime_error {
    double time;
    explicit StepRejected(double t)
        : std::runtime_error("propagator step rejected at t=" + std::to_string(t) +
                             " (Hamiltonian drift guard; dt too large)"),
          time(t) {}
};

/// Klein-Gordon symbol c*(c^2+|xi|^2)^{1/2}, numerically stable at large c.
double kg_symbol(double c, double xi2);

/// Truncated symbol sigma_r(xi) = c^2 sum_{j<=r} binom(1/2,j) (|xi|^2/c^2)^j.
double ur_symbol(double c, int r, double xi2);

/// kg_symbol - ur_symbol computed without cancellation (series tail for
/// |xi|^2/c^2 < 1/2, long-double difference otherwise).
double kg_ur_phase_gap(double c, int r, double xi2);

/// Exact linear flows (diagonal phases, no time stepping).
Field kg_linear_flow(const Field& psi0, double c, double t);
Field ur_linear_flow(const Field& psi0, double c, int r, double t);

/// One Lawson exponential-integrator step (exact linear multiplier, classical
/// 4-stage scheme in the rotated frame); local order 4 in dt.
class Stepper {
  public:
    Stepper(Grid g, const EvolutionSpec& spec);

    Field step(const Field& state) const;
    FieldPair step_pair(const FieldPair& state) const;

    double hamiltonian(const Field& state) const;
    double hamiltonian_pair(const FieldPair& state) const;

    bool is_pair_system() const { return pair_; }

  private:
    Grid grid_;
    EvolutionSpec spec_;
    bool pair_ = false;
    std::vector<double> omega_;  // per-mode phase rate (psi component)
    std::function<Field(const Field&)> nonlin_;
    std::function<FieldPair(const FieldPair&)> nonlin_pair_;
    std::function<cplx(const Field&)> ham_nonquad_;
    std::function<cplx(const FieldPair&)> ham_nonquad_pair_;

    Field apply_phase(const Field& f, double s, int sign) const;
};

/// Evolves to t_end, sampling at the configured stride and logging the
/// Hamiltonian and the L^2 mass; throws StepRejected on guard violation.
Trajectory evolve(const EvolutionSpec& spec, const Field& psi0);
TrajectoryPair evolve_pair(const EvolutionSpec& spec, const FieldPair& psi0);

enum class LieDirection { forward, inverse };

/// Canonical transformation T^(1): the time-(+/-1) flow of the auxiliary
/// equation psi' = X_{eps chi_1}(psi) with eps = 1/c^2, integrated by a
/// 4-stage scheme with substep refinement until two consecutive refinements
/// agree; throws on non-convergence.
Field lie_transform(const Field& f, const PhysicalParams& params, LieDirection dir,
                    std::optional<HamPoly> chi1 = std::nullopt);

}  // namespace nrlab
