#include "corrscreen/montecarlo.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"
#include "corrscreen/parallel.hpp"
#include "corrscreen/power.hpp"
#include "corrscreen/uscore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace corrscreen {

// ---------------------------------------------------------------------------
// Covariance
// ---------------------------------------------------------------------------

CovarianceSpec CovarianceSpec::diagonal(std::size_t p) {
    CovarianceSpec c;
    c.kind = Kind::diagonal;
    c.p = p;
    return c;
}

CovarianceSpec CovarianceSpec::planted_block(std::size_t p, std::size_t q, double rho1) {
    CovarianceSpec c;
    c.kind = Kind::planted_block;
    c.p = p;
    c.q = q;
    c.rho1 = rho1;
    return c;
}

CovarianceSpec CovarianceSpec::q_sparse(std::size_t p, std::size_t q, double rho1, std::uint64_t permutation_seed) {
    CovarianceSpec c = planted_block(p, q, rho1);
    c.kind = Kind::q_sparse;
    c.permutation_seed = permutation_seed;
    return c;
}

std::vector<std::size_t> CovarianceSpec::block_indices() const {
    if (kind == Kind::diagonal) return {};
    if (q > p) throw std::invalid_argument("planted block larger than p");
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (kind == Kind::q_sparse) {
        std::mt19937_64 rng(permutation_seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(q);
        std::sort(idx.begin(), idx.end());
        return idx;
    }
    idx.resize(q);
    return idx;
}

Eigen::MatrixXd CovarianceSpec::dense() const {
    const auto pp = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(pp, pp);
    const auto block = block_indices();
    for (auto i : block)
        for (auto j : block)
            if (i != j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rho1;
    if (kind == Kind::background) {
        for (std::size_t i = q; i < p; ++i)
            for (std::size_t j = q; j < p; ++j)
                if (i != j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = background_rho;
    }
    return s;
}

namespace {

Eigen::MatrixXd equicorrelation_factor(std::size_t size, double r) {
    const auto k = static_cast<Eigen::Index>(size);
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(k, k, r);
    s.diagonal().setOnes();
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) throw DataError("covariance is not positive definite");
    return llt.matrixL();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

CovarianceFactor::CovarianceFactor(const CovarianceSpec& spec) {
    if (spec.kind == CovarianceSpec::Kind::diagonal) return;
    if (!(std::abs(spec.rho1) < 1.0)) throw DataError("planted correlation must satisfy |rho1| < 1");
    if (spec.q > spec.p) throw DataError("planted block larger than p");
    if (spec.q >= 2) blocks_.push_back({spec.block_indices(), equicorrelation_factor(spec.q, spec.rho1)});
    if (spec.kind == CovarianceSpec::Kind::background && spec.p - spec.q >= 2) {
        std::vector<std::size_t> rest(spec.p - spec.q);
        std::iota(rest.begin(), rest.end(), spec.q);
        blocks_.push_back({std::move(rest), equicorrelation_factor(spec.p - spec.q, spec.background_rho)});
    }
}

void CovarianceFactor::apply(Eigen::MatrixXd& rows) const {
    for (const auto& b : blocks_) {
        const auto k = static_cast<Eigen::Index>(b.indices.size());
        Eigen::MatrixXd sub(rows.rows(), k);
        for (Eigen::Index c = 0; c < k; ++c) sub.col(c) = rows.col(static_cast<Eigen::Index>(b.indices[static_cast<std::size_t>(c)]));
        const Eigen::MatrixXd mixed = sub * b.lower.transpose();
        for (Eigen::Index c = 0; c < k; ++c) rows.col(static_cast<Eigen::Index>(b.indices[static_cast<std::size_t>(c)])) = mixed.col(c);
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t replicate, std::uint64_t treatment) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ replicate);
    return splitmix64(h ^ treatment);
}

// ---------------------------------------------------------------------------
// SimSpec
// ---------------------------------------------------------------------------

std::size_t SimSpec::treatments() const { return n.size(); }

void SimSpec::validate() const {
    if (p < 2) throw std::invalid_argument("simulation needs p >= 2");
    if (n.empty()) throw std::invalid_argument("simulation needs at least one sample size");
    for (auto v : n)
        if (v < 3) throw std::invalid_argument("simulation sample sizes must be >= 3");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    if (distribution == Distribution::student_t && !(dof > 2.0))
        throw std::invalid_argument("student-t needs dof > 2");
    if (covariance.p != p) throw std::invalid_argument("covariance dimension differs from p");
    switch (mode) {
        case ScreenMode::autocorr:
            if (n.size() != 1) throw std::invalid_argument("auto simulation takes one sample size");
            break;
        case ScreenMode::cross:
            if (n.size() != 2 || n[0] != n[1]) throw std::invalid_argument("cross simulation needs two equal sample sizes");
            break;
        case ScreenMode::persistent:
            if (n.size() < 2) throw std::invalid_argument("persistent simulation needs at least two treatments");
            break;
    }
    if (alpha) {
        if (!(*alpha > 0.0 && *alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    } else {
        const std::size_t want = mode == ScreenMode::persistent ? n.size() : 1;
        if (rho.size() != want) throw std::invalid_argument("need " + std::to_string(want) + " threshold(s) or alpha");
    }
}

namespace {

std::string covariance_kind_name(CovarianceSpec::Kind k) {
    switch (k) {
        case CovarianceSpec::Kind::diagonal: return "diagonal";
        case CovarianceSpec::Kind::planted_block: return "planted_block";
        case CovarianceSpec::Kind::q_sparse: return "q_sparse";
        case CovarianceSpec::Kind::background: return "background";
    }
    return "?";
}

CovarianceSpec::Kind parse_covariance_kind(const std::string& s) {
    if (s == "diagonal") return CovarianceSpec::Kind::diagonal;
    if (s == "planted_block") return CovarianceSpec::Kind::planted_block;
    if (s == "q_sparse") return CovarianceSpec::Kind::q_sparse;
    if (s == "background") return CovarianceSpec::Kind::background;
    throw std::invalid_argument("unknown covariance kind: " + s);
}

}  // namespace

SimSpec sim_spec_from_json(const nlohmann::json& j) {
    SimSpec s;
    s.p = j.at("p").get<std::size_t>();
    if (j.at("n").is_array()) {
        s.n = j.at("n").get<std::vector<std::size_t>>();
    } else {
        s.n = {j.at("n").get<std::size_t>()};
    }
    s.mode = parse_screen_mode(j.value("mode", std::string("auto")));
    const auto dist = j.value("distribution", std::string("gaussian"));
    if (dist == "gaussian") {
        s.distribution = SimSpec::Distribution::gaussian;
    } else if (dist == "student_t") {
        s.distribution = SimSpec::Distribution::student_t;
    } else {
        throw std::invalid_argument("unknown distribution: " + dist);
    }
    s.dof = j.value("dof", 5.0);
    s.covariance.p = s.p;
    if (j.contains("covariance")) {
        const auto& c = j["covariance"];
        s.covariance.kind = parse_covariance_kind(c.value("kind", std::string("diagonal")));
        s.covariance.q = c.value("q", std::size_t{2});
        s.covariance.rho1 = c.value("rho1", 0.0);
        s.covariance.background_rho = c.value("background_rho", 0.0);
        s.covariance.permutation_seed = c.value("permutation_seed", std::uint64_t{0});
    }
    if (j.contains("rho")) {
        s.rho = j["rho"].is_array() ? j["rho"].get<std::vector<double>>() : std::vector<double>{j["rho"].get<double>()};
    }
    if (j.contains("alpha")) s.alpha = j["alpha"].get<double>();
    s.replicates = j.value("replicates", std::size_t{1000});
    s.master_seed = j.value("master_seed", std::uint64_t{0});
    s.stream = j.value("stream", std::uint64_t{0});
    s.workers = j.value("workers", std::size_t{0});
    s.validate();
    return s;
}

nlohmann::json to_json(const SimSpec& s) {
    nlohmann::json j;
    j["p"] = s.p;
    j["n"] = s.n;
    j["mode"] = to_string(s.mode);
    j["distribution"] = s.distribution == SimSpec::Distribution::gaussian ? "gaussian" : "student_t";
    if (s.distribution == SimSpec::Distribution::student_t) j["dof"] = s.dof;
    j["covariance"] = {{"kind", covariance_kind_name(s.covariance.kind)},
                       {"q", s.covariance.q},
                       {"rho1", s.covariance.rho1},
                       {"background_rho", s.covariance.background_rho},
                       {"permutation_seed", s.covariance.permutation_seed}};
    if (s.alpha) {
        j["alpha"] = *s.alpha;
    } else {
        j["rho"] = s.rho;
    }
    j["replicates"] = s.replicates;
    j["master_seed"] = s.master_seed;
    j["stream"] = s.stream;
    return j;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& default_ids(std::size_t p) {
    thread_local std::vector<std::string> ids;
    if (ids.size() != p) {
        ids.clear();
        for (std::size_t j = 0; j < p; ++j) ids.push_back("V" + std::to_string(j + 1));
    }
    return ids;
}

DataMatrix sample_treatment(const SimSpec& spec, const CovarianceFactor& factor, std::size_t replicate,
                            std::size_t treatment) {
    std::mt19937_64 rng(derive_seed(spec.master_seed, spec.stream, replicate, treatment));
    std::normal_distribution<double> normal;
    const auto n = static_cast<Eigen::Index>(spec.n.at(treatment));
    const auto p = static_cast<Eigen::Index>(spec.p);
    Eigen::MatrixXd x(n, p);
    // Row-by-row draw order so a row's variables come from one contiguous
    // stretch of the stream.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = normal(rng);
    factor.apply(x);
    if (spec.distribution == SimSpec::Distribution::student_t) {
        // Multivariate t rows: each row gets its own radial factor sqrt(dof / chi2)
        // shared by all of its variables.
        std::chi_squared_distribution<double> chi2(spec.dof);
        for (Eigen::Index i = 0; i < n; ++i) x.row(i) *= std::sqrt(spec.dof / chi2(rng));
    }
    return DataMatrix(std::move(x), default_ids(spec.p), "T" + std::to_string(treatment + 1));
}

std::vector<DataMatrix> sample_all(const SimSpec& spec, const CovarianceFactor& factor, std::size_t replicate) {
    std::vector<DataMatrix> out;
    for (std::size_t t = 0; t < spec.treatments(); ++t) out.push_back(sample_treatment(spec, factor, replicate, t));
    return out;
}

Estimate mean_estimate(const std::vector<double>& xs) {
    const double R = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / R;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (R - 1.0) / R)};
}

Estimate variance_estimate(const std::vector<double>& xs) {
    const double R = static_cast<double>(xs.size());
    if (xs.size() < 2) return {0.0, 0.0};
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / R;
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs) {
        const double d2 = (x - mean) * (x - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double var = m2 / (R - 1.0);
    const double mu2 = m2 / R;
    const double mu4 = m4 / R;
    return {var, std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / R)};
}

Estimate proportion_estimate(std::size_t hits, std::size_t total) {
    const double ph = static_cast<double>(hits) / static_cast<double>(total);
    return {ph, std::sqrt(ph * (1.0 - ph) / static_cast<double>(total))};
}

std::vector<double> resolve_thresholds(const SimSpec& spec) {
    if (!spec.alpha) return spec.rho;
    switch (spec.mode) {
        case ScreenMode::autocorr: return fwer_threshold_auto(spec.p, spec.n[0], *spec.alpha).rho;
        case ScreenMode::cross: return fwer_threshold_cross(spec.p, spec.n[0], *spec.alpha).rho;
        case ScreenMode::persistent: return fwer_thresholds_persistent(spec.p, spec.n, *spec.alpha).rho;
    }
    return {};
}

struct ReplicateRecord {
    double N = 0.0;
    double N_e = 0.0;
    std::vector<double> treatment_N;
};

}  // namespace

std::vector<DataMatrix> sample_data(const SimSpec& spec, std::size_t replicate_index) {
    const CovarianceFactor factor(spec.covariance);
    return sample_all(spec, factor, replicate_index);
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

SimReport simulate(const SimSpec& spec) {
    spec.validate();
    const auto rho = resolve_thresholds(spec);
    const CovarianceFactor factor(spec.covariance);

    ScreenOptions opts;
    opts.chunk_size = spec.p;
    opts.workers = 1;
    opts.collect_edges = spec.mode == ScreenMode::persistent;

    std::vector<ReplicateRecord> records(spec.replicates);
    parallel_for(spec.replicates, spec.workers, [&](std::size_t rep) {
        const auto data = sample_all(spec, factor, rep);
        ReplicateRecord& rec = records[rep];
        switch (spec.mode) {
            case ScreenMode::autocorr: {
                const auto res = auto_screen(compute_uscores(data[0]), rho[0], opts);
                rec.N = static_cast<double>(res.N());
                rec.N_e = static_cast<double>(res.N_e());
                break;
            }
            case ScreenMode::cross: {
                const auto res = cross_screen(compute_uscores(data[0]), compute_uscores(data[1]), rho[0], opts);
                rec.N = static_cast<double>(res.N());
                rec.N_e = static_cast<double>(res.N_e());
                break;
            }
            case ScreenMode::persistent: {
                std::vector<ScreenResult> per;
                for (std::size_t t = 0; t < data.size(); ++t) {
                    per.push_back(auto_screen(compute_uscores(data[t]), rho[t], opts));
                    rec.treatment_N.push_back(static_cast<double>(per.back().N()));
                }
                const auto res = persistent_screen(per, opts);
                rec.N = static_cast<double>(res.N());
                rec.N_e = static_cast<double>(res.N_e());
                break;
            }
        }
    });

    SimReport report;
    report.spec = spec;
    report.rho = rho;
    report.replicates = spec.replicates;
    std::vector<double> Ns, Nes;
    std::size_t positive = 0;
    for (const auto& r : records) {
        Ns.push_back(r.N);
        Nes.push_back(r.N_e);
        if (r.N > 0) ++positive;
    }
    report.mean_N = mean_estimate(Ns);
    report.mean_N_e = mean_estimate(Nes);
    report.var_N_e = variance_estimate(Nes);
    report.empirical_fwer = proportion_estimate(positive, spec.replicates);
    report.dispersion = report.mean_N_e.value > 0 ? report.var_N_e.value / report.mean_N_e.value : 0.0;

    if (spec.mode == ScreenMode::persistent) {
        double product = 1.0;
        for (std::size_t t = 0; t < spec.treatments(); ++t) {
            std::vector<double> xs;
            for (const auto& r : records) xs.push_back(r.treatment_N[t]);
            report.mean_treatment_N.push_back(mean_estimate(xs));
            product *= report.mean_treatment_N.back().value;
        }
        if (spec.treatments() == 2 && product > 0.0)
            report.product_ratio = static_cast<double>(spec.p) * report.mean_N.value / product;
    }

    const auto theory = implied_threshold_report(spec.mode, spec.p, spec.n, rho);
    report.predicted_lambda = theory.lambda;
    report.predicted_alpha = theory.alpha;
    if (spec.mode == ScreenMode::autocorr) report.predicted_mean_N = expected_auto_exact(spec.p, spec.n[0], rho[0]);
    for (std::size_t rep = 0; rep < spec.replicates; ++rep)
        report.seeds.push_back(derive_seed(spec.master_seed, spec.stream, rep, 0));
    return report;
}

SimReport empirical_fwer(const SimSpec& spec, bool allow_structured) {
    if (!allow_structured && spec.covariance.kind != CovarianceSpec::Kind::diagonal)
        throw std::invalid_argument("empirical FWER runs on a diagonal (null) covariance");
    return simulate(spec);
}

SimReport poisson_check(const SimSpec& spec) {
    if (spec.mode == ScreenMode::persistent)
        throw std::invalid_argument("Poisson edge-count check applies to auto and cross screens");
    return simulate(spec);
}

namespace {

nlohmann::json estimate_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

}  // namespace

nlohmann::json to_json(const SimReport& r, bool include_seeds) {
    nlohmann::json j;
    j["spec"] = to_json(r.spec);
    j["rho"] = r.rho;
    j["replicates"] = r.replicates;
    j["mean_N"] = estimate_json(r.mean_N);
    j["mean_N_e"] = estimate_json(r.mean_N_e);
    j["var_N_e"] = estimate_json(r.var_N_e);
    j["empirical_fwer"] = estimate_json(r.empirical_fwer);
    j["dispersion"] = r.dispersion;
    if (!r.mean_treatment_N.empty()) {
        j["mean_treatment_N"] = nlohmann::json::array();
        for (const auto& e : r.mean_treatment_N) j["mean_treatment_N"].push_back(estimate_json(e));
    }
    if (r.product_ratio) j["product_ratio"] = *r.product_ratio;
    j["theory"] = {{"lambda", r.predicted_lambda}, {"alpha", r.predicted_alpha}};
    if (r.predicted_mean_N) j["theory"]["mean_N"] = *r.predicted_mean_N;
    if (include_seeds) j["seeds"] = r.seeds;
    return j;
}

// ---------------------------------------------------------------------------
// Phase curves
// ---------------------------------------------------------------------------

std::vector<CurvePoint> phase_curve(std::size_t p, const std::vector<std::size_t>& n_list,
                                    const std::vector<double>& rho_grid, std::size_t replicates,
                                    std::uint64_t master_seed, std::size_t workers) {
    if (rho_grid.empty() || n_list.empty()) throw std::invalid_argument("phase curve needs nonempty grids");
    for (double r : rho_grid)
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("phase-curve thresholds must lie in [0, 1]");

    std::vector<CurvePoint> curve;
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        SimSpec spec;
        spec.p = p;
        spec.n = {n_list[k]};
        spec.covariance = CovarianceSpec::diagonal(p);
        spec.rho = {0.5};
        spec.replicates = replicates;
        spec.master_seed = master_seed;
        spec.stream = 0x70686173ULL + k;
        spec.validate();
        const CovarianceFactor factor(spec.covariance);

        ScreenOptions opts;
        opts.chunk_size = p;
        opts.workers = 1;
        opts.collect_edges = false;

        // counts[rep][g] = #{i : max_j |r_ij| > rho_g}; one screen per replicate
        // serves every grid point.
        std::vector<std::vector<double>> counts(replicates, std::vector<double>(rho_grid.size()));
        parallel_for(replicates, workers, [&](std::size_t rep) {
            const auto data = sample_all(spec, factor, rep);
            const auto res = auto_screen(compute_uscores(data[0]), 0.5, opts);
            for (std::size_t g = 0; g < rho_grid.size(); ++g) {
                counts[rep][g] = static_cast<double>(std::count_if(
                    res.max_abs_r.begin(), res.max_abs_r.end(), [&](double m) { return m > rho_grid[g]; }));
            }
        });

        for (std::size_t g = 0; g < rho_grid.size(); ++g) {
            std::vector<double> xs;
            for (const auto& row : counts) xs.push_back(row[g] / static_cast<double>(p));
            CurvePoint pt;
            pt.n = n_list[k];
            pt.rho = rho_grid[g];
            pt.mean_N_over_p = mean_estimate(xs);
            pt.theory = rho_grid[g] >= 1.0 ? 0.0 : expected_auto_exact(p, n_list[k], rho_grid[g]) / static_cast<double>(p);
            curve.push_back(pt);
        }
    }
    return curve;
}

std::string phase_curve_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "n,rho,mean_N_over_p,se,theory\n";
    for (const auto& c : curve)
        out += std::to_string(c.n) + ',' + format_real(c.rho) + ',' + format_real(c.mean_N_over_p.value) + ',' +
               format_real(c.mean_N_over_p.se) + ',' + format_real(c.theory) + '\n';
    return out;
}

std::optional<double> empirical_knee(const std::vector<CurvePoint>& curve) {
    std::optional<double> knee;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double slope = (curve[i + 1].mean_N_over_p.value - curve[i - 1].mean_N_over_p.value) /
                             (curve[i + 1].rho - curve[i - 1].rho);
        if (slope <= -1.0) knee = curve[i].rho;
    }
    return knee;
}

// ---------------------------------------------------------------------------
// Operating points
// ---------------------------------------------------------------------------

std::vector<OperatingPoint> operating_points(std::size_t p, const std::vector<std::size_t>& n_list, double alpha,
                                             const std::vector<double>& beta_list, std::size_t replicates,
                                             std::uint64_t master_seed, std::size_t workers) {
    std::vector<OperatingPoint> out;
    for (const auto n : n_list) {
        const auto thresholds = fwer_thresholds_persistent(p, {n, n}, alpha);

        SimSpec null_spec;
        null_spec.p = p;
        null_spec.n = {n, n};
        null_spec.mode = ScreenMode::persistent;
        null_spec.covariance = CovarianceSpec::diagonal(p);
        null_spec.rho = thresholds.rho;
        null_spec.replicates = replicates;
        null_spec.master_seed = master_seed;
        null_spec.stream = derive_seed(n, 1, 0, 0);
        null_spec.workers = workers;
        const auto null_report = simulate(null_spec);

        for (std::size_t b = 0; b < beta_list.size(); ++b) {
            OperatingPoint pt;
            pt.n = n;
            pt.alpha = alpha;
            pt.beta = beta_list[b];
            pt.rho = thresholds.rho.front();
            pt.rho1 = min_detectable_correlation(thresholds.rho, {n, n}, beta_list[b]);
            pt.alpha_hat = null_report.empirical_fwer;

            SimSpec planted = null_spec;
            planted.covariance = CovarianceSpec::planted_block(p, 2, pt.rho1);
            planted.stream = derive_seed(n, 2, b, 0);
            planted.validate();
            const CovarianceFactor factor(planted.covariance);
            std::vector<char> hit(replicates, 0);
            parallel_for(replicates, workers, [&](std::size_t rep) {
                const auto data = sample_all(planted, factor, rep);
                bool detected = true;
                for (std::size_t t = 0; t < data.size() && detected; ++t) {
                    const auto u = compute_uscores(data[t]);
                    detected = std::abs(correlation(u, 0, 1)) > thresholds.rho[t];
                }
                hit[rep] = detected ? 1 : 0;
            });
            pt.beta_hat = proportion_estimate(static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1)), replicates);
            out.push_back(pt);
        }
    }
    return out;
}

std::string operating_points_csv(const std::vector<OperatingPoint>& points) {
    std::string out = "n,alpha,beta,rho,rho1,alpha_hat,alpha_se,beta_hat,beta_se\n";
    for (const auto& pt : points)
        out += std::to_string(pt.n) + ',' + format_real(pt.alpha) + ',' + format_real(pt.beta) + ',' +
               format_real(pt.rho) + ',' + format_real(pt.rho1) + ',' + format_real(pt.alpha_hat.value) + ',' +
               format_real(pt.alpha_hat.se) + ',' + format_real(pt.beta_hat.value) + ',' +
               format_real(pt.beta_hat.se) + '\n';
    return out;
}

}  // namespace corrscreen
