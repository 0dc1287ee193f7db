#pragma once

#include "corrscreen/ingest.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace corrscreen {

// n×(n−1) orthonormal basis of the complement of the all-ones vector,
// in the classical Helmert form: column k (1-based) is
//   (1, …, 1, −k, 0, …, 0) / sqrt(k(k+1))   with k leading ones.
class HelmertBasis {
public:
    explicit HelmertBasis(std::size_t n);

    std::size_t n() const { return n_; }
    Eigen::MatrixXd matrix() const;

    // Basisᵀ·x in O(n) using running sums; x need not be centered since
    // 1ᵀ·Basis = 0.
    void apply_transpose(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out) const;

private:
    std::size_t n_;
};

HelmertBasis helmert_basis(std::size_t n);

// (n−1)×p matrix of unit-norm U-scores. Sample correlations are the inner
// products of its columns.
class UScoreMatrix {
public:
    static constexpr double kNormTolerance = 1e-10;

    // Validates that every column has unit norm (DataError otherwise).
    UScoreMatrix(Eigen::MatrixXd scores, std::size_t n, std::vector<std::string> variable_ids,
                 std::string treatment_id = {});

    // Ids default to V1..Vp and n to rows+1.
    static UScoreMatrix from_scores(Eigen::MatrixXd scores);

    const Eigen::MatrixXd& scores() const { return scores_; }
    std::size_t n() const { return n_; }
    std::size_t p() const { return static_cast<std::size_t>(scores_.cols()); }
    const std::vector<std::string>& variable_ids() const { return ids_; }
    const std::string& treatment_id() const { return treatment_; }

private:
    Eigen::MatrixXd scores_;
    std::size_t n_;
    std::vector<std::string> ids_;
    std::string treatment_;
};

UScoreMatrix compute_uscores(const DataMatrix& data);

// U_iᵀU_j clamped to [−1, 1]. Throws std::out_of_range on bad indices.
double correlation(const UScoreMatrix& u, std::size_t i, std::size_t j);

// Full p×p sample correlation matrix UᵀU (small p only).
Eigen::MatrixXd correlation_matrix(const UScoreMatrix& u);

// (n−1) rows × p columns with the variable ids as header.
void write_uscores(const std::filesystem::path& path, const UScoreMatrix& u);

}  // namespace corrscreen
