#pragma once

#include "corrscreen/ingest.hpp"
#include "corrscreen/phase.hpp"
#include "corrscreen/screen.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace corrscreen {

// Dispersion (covariance) of the simulated rows. All kinds are unit
// diagonal, so correlations equal covariances.
//   diagonal:       identity
//   planted_block:  first q variables equicorrelated at rho1, rest identity
//   q_sparse:       planted_block placed at q randomly permuted indices
//   background:     all but the first q variables equicorrelated at
//                   background_rho; the first q equicorrelated at rho1 and
//                   independent of the rest
struct CovarianceSpec {
    enum class Kind { diagonal, planted_block, q_sparse, background };
    Kind kind = Kind::diagonal;
    std::size_t p = 0;
    std::size_t q = 2;
    double rho1 = 0.0;
    double background_rho = 0.0;
    std::uint64_t permutation_seed = 0;

    static CovarianceSpec diagonal(std::size_t p);
    static CovarianceSpec planted_block(std::size_t p, std::size_t q, double rho1);
    static CovarianceSpec q_sparse(std::size_t p, std::size_t q, double rho1, std::uint64_t permutation_seed);

    // Indices of the planted block (empty for diagonal).
    std::vector<std::size_t> block_indices() const;
    Eigen::MatrixXd dense() const;
};

struct SimSpec {
    enum class Distribution { gaussian, student_t };

    std::size_t p = 0;
    std::vector<std::size_t> n;  // one entry per treatment
    ScreenMode mode = ScreenMode::autocorr;
    Distribution distribution = Distribution::gaussian;
    double dof = 5.0;
    CovarianceSpec covariance;
    std::vector<double> rho;       // explicit thresholds, one per treatment...
    std::optional<double> alpha;   // ...or an FWER target resolved through phase
    std::size_t replicates = 1;
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;      // separates independent studies sharing a seed
    std::size_t workers = 0;

    // Throws std::invalid_argument on inconsistent fields.
    void validate() const;
    std::size_t treatments() const;
};

SimSpec sim_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimSpec& spec);

// Counter-based per-stream seed: identical inputs give identical seeds,
// independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t replicate, std::uint64_t treatment);

// Symmetric factorization of a CovarianceSpec, computed once and reused for
// every replicate. Throws DataError for non positive-definite dispersion.
class CovarianceFactor {
public:
    explicit CovarianceFactor(const CovarianceSpec& spec);
    // Maps i.i.d. standard normal rows (n×p) to rows with this dispersion.
    void apply(Eigen::MatrixXd& rows) const;

private:
    struct Block {
        std::vector<std::size_t> indices;
        Eigen::MatrixXd lower;
    };
    std::vector<Block> blocks_;
};

// One data matrix per treatment; deterministic in
// (master_seed, stream, replicate_index, treatment).
std::vector<DataMatrix> sample_data(const SimSpec& spec, std::size_t replicate_index);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct SimReport {
    SimSpec spec;
    std::vector<double> rho;  // thresholds actually used
    std::size_t replicates = 0;
    Estimate mean_N;
    Estimate mean_N_e;
    Estimate var_N_e;
    Estimate empirical_fwer;  // fraction of replicates with N > 0
    double dispersion = 0.0;  // var(N_e) / mean(N_e)
    std::vector<Estimate> mean_treatment_N;  // persistent: per-treatment N^{t_j}
    std::optional<double> product_ratio;     // persistent: p·E[N^∧] / ∏ E[N^{t_j}] (two treatments)
    double predicted_lambda = 0.0;
    double predicted_alpha = 0.0;
    std::optional<double> predicted_mean_N;  // auto: exact mean for i.i.d. uniform scores
    std::vector<std::uint64_t> seeds;        // first-treatment seed per replicate
};

nlohmann::json to_json(const SimReport& report, bool include_seeds = false);

// Replicates the requested screen and summarizes discoveries.
SimReport simulate(const SimSpec& spec);
// simulate() with the FWER summary as the headline; requires a diagonal
// covariance unless allow_structured is set.
SimReport empirical_fwer(const SimSpec& spec, bool allow_structured = false);
// simulate() for the edge-count dispersion check (auto or cross screens).
SimReport poisson_check(const SimSpec& spec);

struct CurvePoint {
    std::size_t n = 0;
    double rho = 0.0;
    Estimate mean_N_over_p;
    double theory = 0.0;  // exact E[N]/p
};

// Empirical E[N]/p over a rho grid for each n, from null (diagonal)
// Gaussian replicates, alongside the exact mean.
std::vector<CurvePoint> phase_curve(std::size_t p, const std::vector<std::size_t>& n_list,
                                    const std::vector<double>& rho_grid, std::size_t replicates,
                                    std::uint64_t master_seed, std::size_t workers = 0);
std::string phase_curve_csv(const std::vector<CurvePoint>& curve);

// Largest grid rho where the centered finite-difference slope of the curve
// crosses −1. Points must share one n and be sorted by rho.
std::optional<double> empirical_knee(const std::vector<CurvePoint>& curve);

struct OperatingPoint {
    std::size_t n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double rho = 0.0;   // solved per-treatment threshold
    double rho1 = 0.0;  // planted correlation
    Estimate alpha_hat;  // null replicates with any persistent discovery
    Estimate beta_hat;   // planted replicates where the planted pair persists
};

// Persistent screening over two equal-size treatments with a planted 2×2
// block at the minimum detectable correlation.
std::vector<OperatingPoint> operating_points(std::size_t p, const std::vector<std::size_t>& n_list, double alpha,
                                             const std::vector<double>& beta_list, std::size_t replicates,
                                             std::uint64_t master_seed, std::size_t workers = 0);
std::string operating_points_csv(const std::vector<OperatingPoint>& points);

}  // namespace corrscreen
