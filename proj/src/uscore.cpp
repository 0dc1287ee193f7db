#include "corrscreen/uscore.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corrscreen {

HelmertBasis::HelmertBasis(std::size_t n) : n_(n) {
    if (n < 2) throw std::invalid_argument("Helmert basis needs n >= 2");
}

Eigen::MatrixXd HelmertBasis::matrix() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n - 1);
    for (Eigen::Index k = 1; k < n; ++k) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1));
        h.col(k - 1).head(k).setConstant(scale);
        h(k, k - 1) = -static_cast<double>(k) * scale;
    }
    return h;
}

void HelmertBasis::apply_transpose(const Eigen::Ref<const Eigen::VectorXd>& x,
                                   Eigen::Ref<Eigen::VectorXd> out) const {
    const auto n = static_cast<Eigen::Index>(n_);
    double running = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) {
        running += x(k - 1);
        const double kd = static_cast<double>(k);
        out(k - 1) = (running - kd * x(k)) / std::sqrt(kd * (kd + 1.0));
    }
}

HelmertBasis helmert_basis(std::size_t n) { return HelmertBasis(n); }

UScoreMatrix::UScoreMatrix(Eigen::MatrixXd scores, std::size_t n, std::vector<std::string> variable_ids,
                           std::string treatment_id)
    : scores_(std::move(scores)), n_(n), ids_(std::move(variable_ids)), treatment_(std::move(treatment_id)) {
    if (static_cast<std::size_t>(scores_.rows()) + 1 != n_)
        throw DataError("U-score matrix must have n-1 rows");
    if (ids_.size() != static_cast<std::size_t>(scores_.cols()))
        throw DataError("U-score id count does not match column count");
    for (Eigen::Index j = 0; j < scores_.cols(); ++j) {
        const double norm = scores_.col(j).norm();
        if (!(std::abs(norm - 1.0) <= kNormTolerance))
            throw DataError("degenerate U-scores: column " + ids_[static_cast<std::size_t>(j)] +
                            " has norm " + format_real(norm));
    }
}

UScoreMatrix UScoreMatrix::from_scores(Eigen::MatrixXd scores) {
    std::vector<std::string> ids;
    for (Eigen::Index j = 0; j < scores.cols(); ++j) ids.push_back("V" + std::to_string(j + 1));
    const auto n = static_cast<std::size_t>(scores.rows()) + 1;
    return UScoreMatrix(std::move(scores), n, std::move(ids));
}

UScoreMatrix compute_uscores(const DataMatrix& data) {
    const auto n = data.n();
    if (n < 3) throw DataError("U-scores need n >= 3");
    const HelmertBasis basis(n);
    const auto& x = data.values();
    Eigen::MatrixXd u(static_cast<Eigen::Index>(n - 1), x.cols());
    Eigen::VectorXd z(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        z = x.col(j).array() - x.col(j).mean();
        // ||x - mean|| = sqrt(S_jj (n-1)).
        const double scale = z.norm();
        if (!(scale > 0.0)) throw DataError("zero-variance column: " + data.variable_ids()[static_cast<std::size_t>(j)]);
        z /= scale;
        auto col = u.col(j);
        basis.apply_transpose(z, col);
        col /= col.norm();
    }
    return UScoreMatrix(std::move(u), n, data.variable_ids(), data.treatment_id());
}

double correlation(const UScoreMatrix& u, std::size_t i, std::size_t j) {
    if (i >= u.p() || j >= u.p()) throw std::out_of_range("correlation: column index out of range");
    const double r = u.scores().col(static_cast<Eigen::Index>(i)).dot(u.scores().col(static_cast<Eigen::Index>(j)));
    return std::clamp(r, -1.0, 1.0);
}

Eigen::MatrixXd correlation_matrix(const UScoreMatrix& u) {
    Eigen::MatrixXd r = u.scores().transpose() * u.scores();
    return r.cwiseMax(-1.0).cwiseMin(1.0);
}

void write_uscores(const std::filesystem::path& path, const UScoreMatrix& u) {
    std::string out;
    for (std::size_t j = 0; j < u.p(); ++j) {
        if (j) out += ',';
        out += u.variable_ids()[j];
    }
    out += '\n';
    const auto& s = u.scores();
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            if (j) out += ',';
            out += format_real(s(i, j));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace corrscreen
