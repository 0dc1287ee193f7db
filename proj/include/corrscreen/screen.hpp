#pragma once

#include "corrscreen/uscore.hpp"

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrscreen {

enum class ScreenMode { autocorr, cross, persistent };

std::string_view to_string(ScreenMode mode);
ScreenMode parse_screen_mode(std::string_view text);

// One thresholded correlation. Auto and persistent edges have i < j; cross
// edges are ordered (a-side i, b-side j) with i != j.
struct Edge {
    std::size_t i = 0;
    std::size_t j = 0;
    double r = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge& a, const Edge& b) {
        if (auto c = a.i <=> b.i; c != 0) return c;
        return a.j <=> b.j;
    }
};

// ---------------------------------------------------------------------------
// Blocked evaluation of UᵀU (or Uaᵀ·Ub)
// ---------------------------------------------------------------------------

struct GramBlock {
    std::size_t row_begin = 0, row_end = 0;
    std::size_t col_begin = 0, col_end = 0;
    // Auto mode, row range == column range: only i <= j entries are owned
    // by this block.
    bool diagonal = false;
    Eigen::MatrixXd values;  // (row_end-row_begin) × (col_end-col_begin)
};

// Tiles the correlation matrix into chunk×chunk blocks. Auto mode emits the
// upper-triangular block grid (bj >= bi); cross mode emits the full grid.
// Block order is row-major and fixed.
class GramChunks {
public:
    GramChunks(const UScoreMatrix& a, std::size_t chunk_size);
    GramChunks(const UScoreMatrix& a, const UScoreMatrix& b, std::size_t chunk_size);

    std::size_t size() const { return blocks_.size(); }
    std::size_t chunk_size() const { return chunk_; }
    std::size_t row_blocks() const { return row_blocks_; }
    bool cross() const { return b_ != nullptr; }
    GramBlock compute(std::size_t k) const;
    // Indices of the blocks in block-row bi, in emission order.
    std::pair<std::size_t, std::size_t> row_range(std::size_t bi) const;

    void for_each(const std::function<void(const GramBlock&)>& fn) const;

private:
    struct Index {
        std::size_t bi, bj;
    };
    const UScoreMatrix* a_;
    const UScoreMatrix* b_;
    std::size_t chunk_;
    std::size_t row_blocks_;
    std::vector<Index> blocks_;
    std::vector<std::size_t> row_start_;
};

// ---------------------------------------------------------------------------
// Screening
// ---------------------------------------------------------------------------

struct ScreenOptions {
    std::size_t chunk_size = 256;
    std::size_t workers = 0;  // 0: default_worker_count()
    // Above this many edges the edge list moves to a binary spill file and
    // only counts/degrees stay in memory.
    std::size_t edge_cap = 10'000'000;
    std::filesystem::path spill_dir;  // empty: system temp directory
    bool collect_edges = true;        // false: count edges without storing them
};

struct ScreenResult {
    ScreenMode mode = ScreenMode::autocorr;
    std::vector<double> rho;                 // one per treatment involved
    std::vector<std::size_t> discoveries;    // sorted variable indices
    std::vector<Edge> edges;                 // sorted; empty when spilled or not collected
    std::vector<std::size_t> degrees;        // per variable (a side for cross)
    std::vector<double> max_abs_r;           // per variable max_{j != i} |r_ij| (a side for cross)
    std::size_t edge_count = 0;              // N_e, always exact
    bool edges_collected = true;
    std::optional<std::filesystem::path> spill_path;

    // Cross screens only: b-side discoveries and degrees.
    std::vector<std::size_t> b_discoveries;
    std::vector<std::size_t> b_degrees;

    std::size_t p = 0;
    std::vector<std::size_t> n;
    std::vector<std::string> variable_ids;
    std::vector<std::string> treatments;

    std::size_t N() const { return discoveries.size(); }
    std::size_t N_e() const { return edge_count; }
    bool edges_available() const { return edges_collected; }
    // All edges in sorted order, streaming from the spill file if needed.
    void for_each_edge(const std::function<void(const Edge&)>& fn) const;
    std::vector<Edge> load_edges() const;
};

// Variables i with max_{j != i} |r_ij| > rho, plus the
// thresholded edge set. Requires 0 < rho < 1.
ScreenResult auto_screen(const UScoreMatrix& u, double rho, const ScreenOptions& options = {});

// a-side variables i with max_{j != i} |(Ua_iᵀ Ub_j)| > rho. Requires equal
// n and identical variable ids.
ScreenResult cross_screen(const UScoreMatrix& ua, const UScoreMatrix& ub, double rho,
                          const ScreenOptions& options = {});

// Intersection of per-treatment auto-screen discoveries; persistent edges
// are those present in every treatment. Each persistent edge carries the
// per-treatment correlation of smallest magnitude.
ScreenResult persistent_screen(const std::vector<ScreenResult>& results, const ScreenOptions& options = {});

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

// var_i,var_j,r,treatment
void write_edges_csv(const std::filesystem::path& path, const ScreenResult& result);
// var,degree,max_abs_r (discoveries only)
void write_discoveries_csv(const std::filesystem::path& path, const ScreenResult& result);

}  // namespace corrscreen
