#pragma once

#include "alphatest/rng.hpp"
#include "alphatest/spline.hpp"
#include "alphatest/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace alphatest::dgp {

/// Presample periods generated and discarded by every simulated component.
inline constexpr int kBurnIn = 25;

enum class Example { kOne, kThreeFactor };
enum class Innovation { kGaussian, kStudentT6 };
/// Moving-average order of the idiosyncratic errors: 0, 2 or T - 1.
enum class Dependence { kNone, kShort, kLong };
/// What drives the GARCH variance recursion: a separate normal draw
/// (as in the simulation design) or the factor's own return shock.
enum class GarchShock { kIndependent, kReturnShock };

[[nodiscard]] int dependence_order(Dependence dep, int periods);

/// AR(1)-GARCH(1,1) factor: f_t = mu + phi (f_{t-1} - mu) + sqrt(h_t) eps_t,
/// h_t = a + b h_{t-1} + c xi_{t-1}^2.
struct FactorParams {
    double mu = 0.0;
    double phi = 0.0;
    double a = 1.0;
    double b = 0.0;
    double c = 0.0;

    /// Throws ConfigError unless a > 0, b, c >= 0, b + c < 1 and |phi| < 1.
    void validate() const;
};

[[nodiscard]] std::vector<FactorParams> example_factor_params(Example example);

/// Simulates T_total periods and drops the first kBurnIn rows.
[[nodiscard]] FactorSeries gen_factors(const std::vector<FactorParams>& params, int total_periods,
                                       Rng& rng, GarchShock shock = GarchShock::kIndependent);

/// T x d matrix of loadings beta_j(t/T), common across assets.
[[nodiscard]] Matrix beta_paths(Example example, int periods);

/// Logistic loading curve {1 + exp[-2(10u - 2)]}^{-1}.
[[nodiscard]] double logistic_loading(double u);

struct ErrorParams {
    int assets = 0;
    Dependence dependence = Dependence::kNone;
    Innovation innovation = Innovation::kGaussian;
    double omega = 0.9;
    double phi1 = 0.6;
    double phi2 = 0.4;

    /// sigma_ii = 1, sigma_ij = phi2 / |i-j|^2 for 1 <= |i-j| <= omega N.
    [[nodiscard]] Matrix sigma() const;
    /// A_h for h = 1, 2 (power-law Toeplitz); e^{-2h} I for h >= 3.
    [[nodiscard]] Matrix lag_matrix(int h) const;
};

/// Precomputes Sigma^{1/2} and the dense lag matrices once per design.
class ErrorGenerator {
public:
    /// Throws ConfigError when Sigma has an eigenvalue below -1e-6.
    explicit ErrorGenerator(ErrorParams params);

    /// T_total x N errors e_t = z_t + sum_{h=1}^{M} A_h z_{t-h}, z_t = Sigma^{1/2} u_t.
    /// Lags reaching before the first simulated period are omitted; callers
    /// drop the burn-in rows.
    [[nodiscard]] Matrix generate(int total_periods, Rng& rng) const;

    [[nodiscard]] const ErrorParams& params() const { return params_; }
    [[nodiscard]] const Matrix& sigma_sqrt() const { return sigma_sqrt_; }

private:
    ErrorParams params_;
    Matrix sigma_sqrt_;
    Matrix lag1_;
    Matrix lag2_;
};

[[nodiscard]] Matrix gen_errors(const ErrorParams& params, int total_periods, Rng& rng);

/// Unit-variance innovation draw.
[[nodiscard]] double draw_innovation(Innovation innovation, Rng& rng);

/// Sparse, time-varying alpha: support of size s uniform without replacement,
/// a = sqrt(c_M log N / (s T)), alpha_it = a + 0.35 |a| g_i(t/T).
struct AlphaAlternative {
    int sparsity = 1;
    double c_m = 12.0;
};

/// c_M = 12, 80, 90 for dependence orders 0, 2, T - 1.
[[nodiscard]] double default_signal_constant(Dependence dep);

/// T x N alpha matrix. Throws ConfigError when s > N or s < 1.
[[nodiscard]] Matrix gen_alpha(const AlphaAlternative& alt, int periods, int assets, Rng& rng);

/// Declarative description of one Monte Carlo cell.
struct ExperimentPlan {
    std::string name;
    Example example = Example::kOne;
    int periods = 200;
    int assets = 250;
    Dependence dependence = Dependence::kNone;
    Innovation innovation = Innovation::kGaussian;
    std::optional<AlphaAlternative> alternative;  // empty = null hypothesis
    int replications = 500;
    int bootstrap = 500;
    std::uint64_t seed = 1;
    std::optional<int> block_length;  // empty = data-driven selection
    std::optional<int> bandwidth;     // empty = default_bandwidth(T)
    spline::SplineConfig spline{4, 1};
    GarchShock garch_shock = GarchShock::kIndependent;

    /// Throws ConfigError on nonpositive sizes or inconsistent settings.
    void validate() const;
};

struct SimulatedPanel {
    ReturnPanel panel;
    FactorSeries factors;
    Matrix alpha;  // T x N
};

/// Y_it = alpha_it + sum_j beta_j(t/T) f_jt + e_it for replication `rep`.
/// Factor, error and alpha draws use separate streams derived from (seed, rep).
[[nodiscard]] SimulatedPanel simulate_panel(const ExperimentPlan& plan, const ErrorGenerator& errors,
                                            std::uint64_t rep);
[[nodiscard]] SimulatedPanel simulate_panel(const ExperimentPlan& plan, std::uint64_t rep);

}  // namespace alphatest::dgp
