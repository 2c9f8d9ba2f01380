#pragma once

#include "plateswarm/sampling.hpp"
#include "plateswarm/sim.hpp"
#include "plateswarm/verify.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plateswarm {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // pass limit it is compared against
    std::string detail;      // counterexample or context
};

struct SuiteOptions {
    std::uint64_t seed = 42;
    std::optional<Scenario> scenario;  // trajectory-based suites fall back to the paper scenario
};

namespace suites {

/// algebra, conservation, pfl, lyapunov, gains.
const std::vector<std::string>& names();

/// Throws Error{InvalidConfig} for an unknown suite; "all" runs every suite.
std::vector<CheckResult> run(std::string_view suite, const SuiteOptions& opt);

/// Sum of component distances; rotations compared as matrices.
double state_distance(const SystemState& a, const SystemState& b);

// Individual checks, shared with the acceptance binary.
CheckResult hat_vee_round_trip(sampling::Rng& rng, int n);
CheckResult exp_log_round_trip(sampling::Rng& rng, int n);
CheckResult allocation_reconstruction(sampling::Rng& rng, int calls, const SystemParams& p);
CheckResult allocation_min_norm(sampling::Rng& rng, int calls, int perturbations,
                                const SystemParams& p);
CheckResult cross_model(sampling::Rng& rng, int n, const SystemParams& p);
/// Random (U1, U2): the plate accelerations reproduce them and the ball follows the
/// partially linearized equation.
std::vector<CheckResult> pfl_consistency(sampling::Rng& rng, int n, const SystemParams& p);
/// With (U1, U2) from pfl_inputs the ball obeys -k4 r - k3 r' + E^T [E r]^ U2.
CheckResult closed_loop_ball(sampling::Rng& rng, int n, const SystemParams& p);
CheckResult passive_energy(sampling::Rng& rng, double duration, double dt, const SystemParams& p);
CheckResult momentum_without_gravity(sampling::Rng& rng, double duration, double dt,
                                     SystemParams p);
CheckResult euler_lagrange(sampling::Rng& rng, double duration, double dt, const SystemParams& p);
/// Error ratios per dt halving against a dt/16 reference on a passive run.
CheckResult integrator_order(sampling::Rng& rng, const SystemParams& p);
/// Verdicts of gain_condition_check versus sampling x^T W x over random unit vectors.
CheckResult definiteness_oracle(sampling::Rng& rng, int gain_sets, int vectors);
/// Same comparison on random symmetric matrices with a known spectrum sign pattern.
CheckResult definiteness_oracle_generic(sampling::Rng& rng, int matrices, int vectors);

}  // namespace suites
}  // namespace plateswarm
