#include "corrscreen/screen.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"
#include "corrscreen/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>
#include <random>
#include <stdexcept>

namespace corrscreen {

std::string_view to_string(ScreenMode mode) {
    switch (mode) {
        case ScreenMode::autocorr: return "auto";
        case ScreenMode::cross: return "cross";
        case ScreenMode::persistent: return "persistent";
    }
    return "?";
}

ScreenMode parse_screen_mode(std::string_view text) {
    if (text == "auto") return ScreenMode::autocorr;
    if (text == "cross") return ScreenMode::cross;
    if (text == "persistent") return ScreenMode::persistent;
    throw std::invalid_argument("unknown screen mode: " + std::string(text));
}

// ---------------------------------------------------------------------------
// GramChunks
// ---------------------------------------------------------------------------

GramChunks::GramChunks(const UScoreMatrix& a, std::size_t chunk_size)
    : a_(&a), b_(nullptr), chunk_(chunk_size) {
    if (chunk_ == 0) throw std::invalid_argument("chunk_size must be at least 1");
    row_blocks_ = (a.p() + chunk_ - 1) / chunk_;
    for (std::size_t bi = 0; bi < row_blocks_; ++bi) {
        row_start_.push_back(blocks_.size());
        for (std::size_t bj = bi; bj < row_blocks_; ++bj) blocks_.push_back({bi, bj});
    }
    row_start_.push_back(blocks_.size());
}

GramChunks::GramChunks(const UScoreMatrix& a, const UScoreMatrix& b, std::size_t chunk_size)
    : a_(&a), b_(&b), chunk_(chunk_size) {
    if (chunk_ == 0) throw std::invalid_argument("chunk_size must be at least 1");
    if (a.scores().rows() != b.scores().rows())
        throw DataError("cross Gram blocks need equal sample counts");
    row_blocks_ = (a.p() + chunk_ - 1) / chunk_;
    const std::size_t col_blocks = (b.p() + chunk_ - 1) / chunk_;
    for (std::size_t bi = 0; bi < row_blocks_; ++bi) {
        row_start_.push_back(blocks_.size());
        for (std::size_t bj = 0; bj < col_blocks; ++bj) blocks_.push_back({bi, bj});
    }
    row_start_.push_back(blocks_.size());
}

std::pair<std::size_t, std::size_t> GramChunks::row_range(std::size_t bi) const {
    return {row_start_.at(bi), row_start_.at(bi + 1)};
}

GramBlock GramChunks::compute(std::size_t k) const {
    const auto [bi, bj] = blocks_.at(k);
    const UScoreMatrix& cols = b_ ? *b_ : *a_;
    GramBlock block;
    block.row_begin = bi * chunk_;
    block.row_end = std::min(a_->p(), block.row_begin + chunk_);
    block.col_begin = bj * chunk_;
    block.col_end = std::min(cols.p(), block.col_begin + chunk_);
    block.diagonal = !b_ && bi == bj;
    const auto rows = a_->scores().middleCols(static_cast<Eigen::Index>(block.row_begin),
                                              static_cast<Eigen::Index>(block.row_end - block.row_begin));
    const auto cs = cols.scores().middleCols(static_cast<Eigen::Index>(block.col_begin),
                                             static_cast<Eigen::Index>(block.col_end - block.col_begin));
    // Fixed summation order per entry (k ascending) so a correlation does
    // not depend on the tiling. A GEMM call would reorder by block shape.
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor bt = cs;
    const Eigen::Index nr = rows.cols(), nc = cs.cols(), depth = rows.rows();
    RowMajor out = RowMajor::Zero(nr, nc);
    for (Eigen::Index li = 0; li < nr; ++li) {
        double* o = out.row(li).data();
        for (Eigen::Index k = 0; k < depth; ++k) {
            const double s = rows(k, li);
            const double* b = bt.row(k).data();
            for (Eigen::Index j = 0; j < nc; ++j) o[j] += s * b[j];
        }
    }
    block.values = out;
    return block;
}

void GramChunks::for_each(const std::function<void(const GramBlock&)>& fn) const {
    for (std::size_t k = 0; k < blocks_.size(); ++k) fn(compute(k));
}

// ---------------------------------------------------------------------------
// Edge storage
// ---------------------------------------------------------------------------

namespace {

struct SpillRecord {
    std::uint64_t i;
    std::uint64_t j;
    double r;
};

std::filesystem::path unique_spill_path(const std::filesystem::path& dir) {
    static std::atomic<std::uint64_t> counter{0};
    const auto base = dir.empty() ? std::filesystem::temp_directory_path() : dir;
    std::random_device rd;
    const auto tag = (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ counter.fetch_add(1);
    return base / ("corrscreen-edges-" + std::to_string(tag) + ".bin");
}

// Accepts edges in sorted order; keeps them in memory up to `cap`, then
// streams everything to a spill file.
class EdgeSink {
public:
    EdgeSink(bool collect, std::size_t cap, std::filesystem::path dir)
        : collect_(collect), cap_(cap), dir_(std::move(dir)) {}

    void append(const std::vector<Edge>& edges) {
        count_ += edges.size();
        if (!collect_) return;
        if (!spill_ && memory_.size() + edges.size() > cap_) start_spill();
        if (spill_) {
            for (const auto& e : edges) write(e);
        } else {
            memory_.insert(memory_.end(), edges.begin(), edges.end());
        }
    }

    void add_count(std::size_t k) { count_ += k; }

    void finish(ScreenResult& out) {
        out.edge_count = count_;
        out.edges_collected = collect_;
        if (spill_) {
            spill_->flush();
            if (!*spill_) throw IoError("edge spill write failed: " + path_.string());
            spill_.reset();
            out.spill_path = path_;
        } else {
            out.edges = std::move(memory_);
        }
    }

private:
    void start_spill() {
        path_ = unique_spill_path(dir_);
        spill_.emplace(path_, std::ios::binary | std::ios::trunc);
        if (!*spill_) throw IoError("cannot open edge spill file: " + path_.string());
        for (const auto& e : memory_) write(e);
        memory_.clear();
        memory_.shrink_to_fit();
    }

    void write(const Edge& e) {
        const SpillRecord rec{e.i, e.j, e.r};
        spill_->write(reinterpret_cast<const char*>(&rec), sizeof rec);
    }

    bool collect_;
    std::size_t cap_;
    std::filesystem::path dir_;
    std::vector<Edge> memory_;
    std::optional<std::ofstream> spill_;
    std::filesystem::path path_;
    std::size_t count_ = 0;
};

// Sequential reader over either an in-memory or spilled edge list.
class EdgeCursor {
public:
    explicit EdgeCursor(const ScreenResult& r) {
        if (r.spill_path) {
            file_.open(*r.spill_path, std::ios::binary);
            if (!file_) throw IoError("cannot open edge spill file: " + r.spill_path->string());
        } else {
            memory_ = &r.edges;
        }
        advance();
    }

    bool valid() const { return valid_; }
    const Edge& current() const { return current_; }

    void advance() {
        if (memory_) {
            valid_ = pos_ < memory_->size();
            if (valid_) current_ = (*memory_)[pos_++];
            return;
        }
        SpillRecord rec{};
        valid_ = static_cast<bool>(file_.read(reinterpret_cast<char*>(&rec), sizeof rec));
        if (valid_) current_ = {static_cast<std::size_t>(rec.i), static_cast<std::size_t>(rec.j), rec.r};
    }

private:
    const std::vector<Edge>* memory_ = nullptr;
    std::size_t pos_ = 0;
    std::ifstream file_;
    Edge current_;
    bool valid_ = false;
};

void check_rho(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("screening threshold must lie in (0, 1)");
}

std::vector<std::size_t> positive_indices(const std::vector<std::size_t>& degrees) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < degrees.size(); ++i)
        if (degrees[i] > 0) out.push_back(i);
    return out;
}

// Per-row-block partial result, merged in block-row order.
struct Partial {
    std::vector<Edge> edges;
    std::size_t edge_count = 0;
    std::vector<std::size_t> deg_a;
    std::vector<std::size_t> deg_b;
    std::vector<double> max_a;
};

template <typename ScanBlock>
void run_blocks(const GramChunks& chunks, std::size_t p_a, std::size_t p_b, const ScreenOptions& options,
                EdgeSink& sink, std::vector<std::size_t>& deg_a, std::vector<std::size_t>& deg_b,
                std::vector<double>& max_a, ScanBlock scan) {
    const std::size_t workers = options.workers == 0 ? default_worker_count() : options.workers;
    const std::size_t window = std::max<std::size_t>(1, 2 * workers);
    const std::size_t rows = chunks.row_blocks();

    for (std::size_t start = 0; start < rows; start += window) {
        const std::size_t count = std::min(window, rows - start);
        std::vector<Partial> partials(count);
        parallel_for(count, workers, [&](std::size_t t) {
            Partial& part = partials[t];
            part.deg_a.assign(p_a, 0);
            part.deg_b.assign(p_b, 0);
            part.max_a.assign(p_a, 0.0);
            const auto [first, last] = chunks.row_range(start + t);
            for (std::size_t k = first; k < last; ++k) scan(chunks.compute(k), part);
            std::sort(part.edges.begin(), part.edges.end());
        });
        for (auto& part : partials) {
            sink.append(part.edges);
            if (!options.collect_edges) sink.add_count(part.edge_count);
            for (std::size_t i = 0; i < p_a; ++i) {
                deg_a[i] += part.deg_a[i];
                max_a[i] = std::max(max_a[i], part.max_a[i]);
            }
            for (std::size_t j = 0; j < p_b; ++j) deg_b[j] += part.deg_b[j];
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// ScreenResult
// ---------------------------------------------------------------------------

void ScreenResult::for_each_edge(const std::function<void(const Edge&)>& fn) const {
    if (!edges_collected) throw std::logic_error("edges were not collected for this screen");
    for (EdgeCursor c(*this); c.valid(); c.advance()) fn(c.current());
}

std::vector<Edge> ScreenResult::load_edges() const {
    if (!spill_path) return edges;
    std::vector<Edge> out;
    out.reserve(edge_count);
    for_each_edge([&](const Edge& e) { out.push_back(e); });
    return out;
}

// ---------------------------------------------------------------------------
// Screens
// ---------------------------------------------------------------------------

ScreenResult auto_screen(const UScoreMatrix& u, double rho, const ScreenOptions& options) {
    check_rho(rho);
    const std::size_t p = u.p();
    const GramChunks chunks(u, options.chunk_size);
    const bool collect = options.collect_edges;

    ScreenResult result;
    result.mode = ScreenMode::autocorr;
    result.rho = {rho};
    result.p = p;
    result.n = {u.n()};
    result.variable_ids = u.variable_ids();
    result.treatments = {u.treatment_id()};
    result.degrees.assign(p, 0);
    result.max_abs_r.assign(p, 0.0);
    std::vector<std::size_t> unused;

    EdgeSink sink(collect, options.edge_cap, options.spill_dir);
    run_blocks(chunks, p, 0, options, sink, result.degrees, unused, result.max_abs_r,
               [&](const GramBlock& block, Partial& part) {
                   const auto rows = block.row_end - block.row_begin;
                   const auto cols = block.col_end - block.col_begin;
                   for (std::size_t lj = 0; lj < cols; ++lj) {
                       const std::size_t j = block.col_begin + lj;
                       const std::size_t li_end = block.diagonal ? lj : rows;
                       for (std::size_t li = 0; li < li_end; ++li) {
                           const std::size_t i = block.row_begin + li;
                           const double r = std::clamp(
                               block.values(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(lj)), -1.0, 1.0);
                           const double a = std::abs(r);
                           if (a > part.max_a[i]) part.max_a[i] = a;
                           if (a > part.max_a[j]) part.max_a[j] = a;
                           if (a > rho) {
                               ++part.deg_a[i];
                               ++part.deg_a[j];
                               ++part.edge_count;
                               if (collect) part.edges.push_back({i, j, r});
                           }
                       }
                   }
               });
    sink.finish(result);
    result.discoveries = positive_indices(result.degrees);
    return result;
}

ScreenResult cross_screen(const UScoreMatrix& ua, const UScoreMatrix& ub, double rho, const ScreenOptions& options) {
    check_rho(rho);
    if (ua.n() != ub.n())
        throw DataError("cross screen requires n_a = n_b (got " + std::to_string(ua.n()) + " and " +
                        std::to_string(ub.n()) + ")");
    if (ua.variable_ids() != ub.variable_ids())
        throw DataError("cross screen requires identical variable ids in both treatments");
    const std::size_t p = ua.p();
    const GramChunks chunks(ua, ub, options.chunk_size);
    const bool collect = options.collect_edges;

    ScreenResult result;
    result.mode = ScreenMode::cross;
    result.rho = {rho};
    result.p = p;
    result.n = {ua.n(), ub.n()};
    result.variable_ids = ua.variable_ids();
    result.treatments = {ua.treatment_id(), ub.treatment_id()};
    result.degrees.assign(p, 0);
    result.b_degrees.assign(p, 0);
    result.max_abs_r.assign(p, 0.0);

    EdgeSink sink(collect, options.edge_cap, options.spill_dir);
    run_blocks(chunks, p, p, options, sink, result.degrees, result.b_degrees, result.max_abs_r,
               [&](const GramBlock& block, Partial& part) {
                   const auto rows = block.row_end - block.row_begin;
                   const auto cols = block.col_end - block.col_begin;
                   for (std::size_t lj = 0; lj < cols; ++lj) {
                       const std::size_t j = block.col_begin + lj;
                       for (std::size_t li = 0; li < rows; ++li) {
                           const std::size_t i = block.row_begin + li;
                           if (i == j) continue;
                           const double r = std::clamp(
                               block.values(static_cast<Eigen::Index>(li), static_cast<Eigen::Index>(lj)), -1.0, 1.0);
                           const double a = std::abs(r);
                           if (a > part.max_a[i]) part.max_a[i] = a;
                           if (a > rho) {
                               ++part.deg_a[i];
                               ++part.deg_b[j];
                               ++part.edge_count;
                               if (collect) part.edges.push_back({i, j, r});
                           }
                       }
                   }
               });
    sink.finish(result);
    result.discoveries = positive_indices(result.degrees);
    result.b_discoveries = positive_indices(result.b_degrees);
    return result;
}

ScreenResult persistent_screen(const std::vector<ScreenResult>& results, const ScreenOptions& options) {
    if (results.size() < 2) throw DataError("persistent screen needs at least two treatments");
    const std::size_t p = results.front().p;
    for (const auto& r : results) {
        if (r.mode != ScreenMode::autocorr) throw DataError("persistent screen combines auto-screen results only");
        if (r.p != p) throw DataError("persistent screen: treatments have different variable counts");
        if (!r.variable_ids.empty() && !results.front().variable_ids.empty() &&
            r.variable_ids != results.front().variable_ids)
            throw DataError("persistent screen: variable ids differ across treatments");
    }

    ScreenResult out;
    out.mode = ScreenMode::persistent;
    out.p = p;
    out.variable_ids = results.front().variable_ids;
    for (const auto& r : results) {
        out.rho.insert(out.rho.end(), r.rho.begin(), r.rho.end());
        out.n.insert(out.n.end(), r.n.begin(), r.n.end());
        out.treatments.insert(out.treatments.end(), r.treatments.begin(), r.treatments.end());
    }

    out.discoveries = results.front().discoveries;
    for (std::size_t t = 1; t < results.size(); ++t) {
        std::vector<std::size_t> next;
        std::set_intersection(out.discoveries.begin(), out.discoveries.end(), results[t].discoveries.begin(),
                              results[t].discoveries.end(), std::back_inserter(next));
        out.discoveries = std::move(next);
    }

    out.max_abs_r.assign(p, 1.0);
    for (const auto& r : results)
        for (std::size_t i = 0; i < p && i < r.max_abs_r.size(); ++i)
            out.max_abs_r[i] = std::min(out.max_abs_r[i], r.max_abs_r[i]);
    out.degrees.assign(p, 0);

    const bool all_edges = std::all_of(results.begin(), results.end(), [](const ScreenResult& r) { return r.edges_collected; });
    EdgeSink sink(all_edges && options.collect_edges, options.edge_cap, options.spill_dir);
    if (all_edges) {
        // k-way intersection of sorted edge streams.
        std::vector<std::unique_ptr<EdgeCursor>> cursors;
        for (const auto& r : results) cursors.push_back(std::make_unique<EdgeCursor>(r));
        std::vector<Edge> batch;
        auto flush = [&] {
            sink.append(batch);
            batch.clear();
        };
        for (;;) {
            if (!std::all_of(cursors.begin(), cursors.end(), [](const auto& c) { return c->valid(); })) break;
            Edge top = cursors.front()->current();
            for (const auto& c : cursors) top = std::max(top, c->current());
            bool all_equal = true;
            for (auto& c : cursors) {
                while (c->valid() && c->current() < top) c->advance();
                if (!c->valid() || !(c->current().i == top.i && c->current().j == top.j)) all_equal = false;
            }
            if (!all_equal) continue;
            Edge merged = cursors.front()->current();
            for (const auto& c : cursors)
                if (std::abs(c->current().r) < std::abs(merged.r)) merged.r = c->current().r;
            batch.push_back(merged);
            ++out.degrees[merged.i];
            ++out.degrees[merged.j];
            for (auto& c : cursors) c->advance();
            if (batch.size() >= 65536) flush();
        }
        flush();
    }
    sink.finish(out);
    if (!all_edges) out.edges_collected = false;
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

namespace {

std::string edge_treatment_label(const ScreenResult& r) {
    std::string sep = r.mode == ScreenMode::cross ? ":" : "&";
    std::string label;
    for (std::size_t t = 0; t < r.treatments.size(); ++t) {
        if (t) label += sep;
        label += r.treatments[t];
    }
    return label;
}

std::string id_of(const ScreenResult& r, std::size_t i) {
    return i < r.variable_ids.size() ? r.variable_ids[i] : "V" + std::to_string(i + 1);
}

}  // namespace

void write_edges_csv(const std::filesystem::path& path, const ScreenResult& result) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    const std::string label = edge_treatment_label(result);
    out << "var_i,var_j,r,treatment\n";
    result.for_each_edge([&](const Edge& e) {
        out << id_of(result, e.i) << ',' << id_of(result, e.j) << ',' << format_real(e.r) << ',' << label << '\n';
    });
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

void write_discoveries_csv(const std::filesystem::path& path, const ScreenResult& result) {
    std::string text = "var,degree,max_abs_r\n";
    for (const auto i : result.discoveries) {
        text += id_of(result, i);
        text += ',';
        text += std::to_string(result.degrees.at(i));
        text += ',';
        text += format_real(result.max_abs_r.at(i));
        text += '\n';
    }
    write_text_file(path, text);
}

}  // namespace corrscreen
