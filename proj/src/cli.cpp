#include "corrscreen/cli.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"
#include "corrscreen/ingest.hpp"
#include "corrscreen/montecarlo.hpp"
#include "corrscreen/phase.hpp"
#include "corrscreen/power.hpp"
#include "corrscreen/report.hpp"
#include "corrscreen/screen.hpp"
#include "corrscreen/spherecap.hpp"
#include "corrscreen/uscore.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace corrscreen::cli {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(item);
    if (parts.empty()) throw std::invalid_argument("empty list: '" + text + "'");
    return parts;
}

double to_real(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split_commas(text)) {
        const auto c1 = part.find(':');
        if (c1 == std::string::npos) {
            out.push_back(to_real(part));
            continue;
        }
        const auto c2 = part.find(':', c1 + 1);
        if (c2 == std::string::npos) throw std::invalid_argument("range needs start:stop:step: '" + part + "'");
        const double start = to_real(part.substr(0, c1));
        const double stop = to_real(part.substr(c1 + 1, c2 - c1 - 1));
        const double step = to_real(part.substr(c2 + 1));
        if (!(step > 0.0) || stop < start) throw std::invalid_argument("bad range: '" + part + "'");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : parse_real_list(text)) {
        if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument("expected nonnegative integers: '" + text + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

namespace {

struct IoOptions {
    char delimiter = '\0';
    bool no_header = false;
    bool drop_constant = false;
};

struct ThresholdFlags {
    std::string rho;
    std::optional<double> alpha;
    bool critical = false;
    std::string variant = "table_matching";
    std::string J;
    std::string rate = "asymptotic";
};

nlohmann::json provenance(const std::vector<std::string>& argv, const std::vector<std::string>& inputs,
                          std::optional<std::uint64_t> seed = std::nullopt) {
    nlohmann::json j;
    j["tool"] = "corrscreen";
    j["version"] = kVersion;
    j["argv"] = std::vector<std::string>(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    j["inputs"] = inputs;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    return j;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_file(path, text);
    }
}

std::vector<double> broadcast(const std::vector<double>& values, std::size_t m, const char* what) {
    if (values.size() == m) return values;
    if (values.size() == 1) return std::vector<double>(m, values.front());
    throw std::invalid_argument(std::string("need one ") + what + " value or one per treatment");
}

// --- screen -----------------------------------------------------------------

struct ScreenCommand {
    std::string mode = "auto";
    std::vector<std::string> inputs;
    std::string manifest;
    ThresholdFlags threshold;
    IoOptions io;
    std::size_t chunk_size = 256;
    std::size_t edge_cap = 10'000'000;
    std::size_t threads = 0;
    std::string edges_path, discoveries_path, summary_path, uscores_path;
};

int run_screen(const ScreenCommand& cmd, const std::vector<std::string>& argv, std::ostream& out) {
    const ScreenMode mode = parse_screen_mode(cmd.mode);

    std::vector<DataMatrix> matrices;
    std::vector<std::string> dropped;
    std::vector<std::string> inputs;
    if (!cmd.manifest.empty()) {
        auto loaded = load_treatments(cmd.manifest);
        matrices = loaded.set.matrices();
        dropped = loaded.dropped_ids;
        inputs.push_back(cmd.manifest);
    } else {
        if (cmd.inputs.empty()) throw std::invalid_argument("screen needs --input or --manifest");
        for (std::size_t k = 0; k < cmd.inputs.size(); ++k) {
            LoadOptions opts;
            opts.delimiter = cmd.io.delimiter;
            opts.header = !cmd.io.no_header;
            opts.constant_policy = cmd.io.drop_constant ? ConstantColumnPolicy::drop : ConstantColumnPolicy::reject;
            opts.treatment_id = std::filesystem::path(cmd.inputs[k]).stem().string();
            if (cmd.inputs.size() > 1 && opts.treatment_id.empty()) opts.treatment_id = "T" + std::to_string(k + 1);
            auto loaded = load_matrix(cmd.inputs[k], opts);
            dropped.insert(dropped.end(), loaded.dropped_ids.begin(), loaded.dropped_ids.end());
            matrices.push_back(std::move(loaded.data));
            inputs.push_back(cmd.inputs[k]);
        }
        // Disambiguate identical file stems.
        for (std::size_t a = 0; a < matrices.size(); ++a)
            for (std::size_t b = a + 1; b < matrices.size(); ++b)
                if (matrices[a].treatment_id() == matrices[b].treatment_id())
                    throw DataError("duplicate treatment label '" + matrices[a].treatment_id() + "'; use a manifest");
    }

    const std::size_t m = matrices.size();
    if (mode == ScreenMode::autocorr && m != 1) throw std::invalid_argument("auto screen takes exactly one input");
    if (mode == ScreenMode::cross && m != 2) throw std::invalid_argument("cross screen takes exactly two inputs");
    if (mode == ScreenMode::persistent && m < 2) throw std::invalid_argument("persistent screen takes at least two inputs");

    const TreatmentSet set = align_treatments(std::move(matrices));
    std::vector<std::size_t> ns;
    for (const auto& d : set.matrices()) ns.push_back(d.n());
    if (mode == ScreenMode::cross && ns[0] != ns[1])
        throw DataError("cross screening requires n_a = n_b (got n_a=" + std::to_string(ns[0]) +
                        ", n_b=" + std::to_string(ns[1]) + ")");

    const std::size_t p = set.p();
    const std::size_t rates = mode == ScreenMode::persistent ? m : 1;
    const std::vector<double> J = cmd.threshold.J.empty() ? std::vector<double>(rates, 1.0)
                                                           : broadcast(parse_real_list(cmd.threshold.J), rates, "J");
    const RateModel rate = cmd.threshold.rate == "exact" || cmd.threshold.rate == "exact_mean" ? RateModel::exact_mean
                                                                                               : RateModel::asymptotic;

    const int sources = (!cmd.threshold.rho.empty()) + (cmd.threshold.alpha.has_value()) + (cmd.threshold.critical);
    if (sources != 1) throw std::invalid_argument("give exactly one of --rho, --alpha, --critical");

    ThresholdReport threshold;
    if (!cmd.threshold.rho.empty()) {
        const auto rho = broadcast(parse_real_list(cmd.threshold.rho), rates, "rho");
        for (double r : rho)
            if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("--rho values must lie in (0, 1)");
        threshold = implied_threshold_report(mode, p, ns, rho, J, mode == ScreenMode::autocorr ? rate : RateModel::asymptotic);
    } else if (cmd.threshold.alpha) {
        switch (mode) {
            case ScreenMode::autocorr: threshold = fwer_threshold_auto(p, ns[0], *cmd.threshold.alpha, J[0], rate); break;
            case ScreenMode::cross: threshold = fwer_threshold_cross(p, ns[0], *cmd.threshold.alpha, J[0]); break;
            case ScreenMode::persistent: threshold = fwer_thresholds_persistent(p, ns, *cmd.threshold.alpha, J); break;
        }
    } else {
        const auto variant = parse_critical_variant(cmd.threshold.variant);
        switch (mode) {
            case ScreenMode::autocorr: threshold = critical_threshold_auto(p, ns[0], J[0], variant); break;
            case ScreenMode::cross: threshold = critical_threshold_cross(p, ns[0], J[0], variant); break;
            case ScreenMode::persistent: {
                for (auto v : ns)
                    if (v != ns[0]) throw DataError("persistent critical threshold needs equal n across treatments");
                const double rc = critical_threshold_auto(p, ns[0], 1.0, variant).rho[0];
                threshold = implied_threshold_report(mode, p, ns, std::vector<double>(m, rc), J);
                threshold.kind = ThresholdKind::critical_point;
                threshold.variant = variant;
                break;
            }
        }
    }

    ScreenOptions opts;
    opts.chunk_size = cmd.chunk_size;
    opts.edge_cap = cmd.edge_cap;
    opts.workers = cmd.threads;
    if (!cmd.edges_path.empty()) opts.spill_dir = std::filesystem::path(cmd.edges_path).parent_path();

    std::vector<UScoreMatrix> scores;
    for (const auto& d : set.matrices()) scores.push_back(compute_uscores(d));
    if (!cmd.uscores_path.empty()) write_uscores(cmd.uscores_path, scores.front());

    ScreenResult result;
    switch (mode) {
        case ScreenMode::autocorr: result = auto_screen(scores[0], threshold.rho[0], opts); break;
        case ScreenMode::cross: result = cross_screen(scores[0], scores[1], threshold.rho[0], opts); break;
        case ScreenMode::persistent: {
            std::vector<ScreenResult> per;
            for (std::size_t t = 0; t < m; ++t) per.push_back(auto_screen(scores[t], threshold.rho[t], opts));
            result = persistent_screen(per, opts);
            break;
        }
    }

    if (!cmd.edges_path.empty()) write_edges_csv(cmd.edges_path, result);
    if (!cmd.discoveries_path.empty()) write_discoveries_csv(cmd.discoveries_path, result);
    if (result.spill_path) std::filesystem::remove(*result.spill_path);

    nlohmann::json summary;
    summary["mode"] = to_string(mode);
    summary["rho"] = threshold.rho;
    summary["N"] = result.N();
    summary["N_e"] = result.N_e();
    summary["p"] = p;
    summary["n"] = ns;
    summary["treatments"] = set.labels();
    summary["threshold"] = to_json(threshold);
    if (mode == ScreenMode::cross) {
        summary["N_counts_side"] = "a";
        summary["N_b"] = result.b_discoveries.size();
    }
    if (!dropped.empty()) summary["dropped_constant_ids"] = dropped;
    summary["provenance"] = provenance(argv, inputs);
    const std::string text = summary.dump(2) + "\n";
    if (cmd.summary_path.empty()) {
        out << text;
    } else {
        write_text_file(cmd.summary_path, text);
    }
    return kExitOk;
}

// --- phase ------------------------------------------------------------------

struct PhaseCommand {
    std::string mode = "auto";
    std::size_t p = 0;
    std::string n;
    ThresholdFlags threshold;
    std::string H2;
    std::string out_path;
};

int run_phase(const PhaseCommand& cmd, const std::vector<std::string>& argv, std::ostream& out) {
    const ScreenMode mode = parse_screen_mode(cmd.mode);
    const auto ns = parse_size_list(cmd.n);
    const std::size_t rates = mode == ScreenMode::persistent ? ns.size() : 1;
    if (mode != ScreenMode::persistent && ns.size() != 1) throw std::invalid_argument("auto/cross take a single --n");
    const std::vector<double> J = cmd.threshold.J.empty() ? std::vector<double>(rates, 1.0)
                                                           : broadcast(parse_real_list(cmd.threshold.J), rates, "J");
    const RateModel rate = cmd.threshold.rate == "exact" || cmd.threshold.rate == "exact_mean" ? RateModel::exact_mean
                                                                                               : RateModel::asymptotic;
    const int sources = (!cmd.threshold.rho.empty()) + (cmd.threshold.alpha.has_value()) + (cmd.threshold.critical);
    if (sources != 1) throw std::invalid_argument("give exactly one of --rho, --alpha, --critical");

    ThresholdReport report;
    if (!cmd.threshold.rho.empty()) {
        report = implied_threshold_report(mode, cmd.p, ns, broadcast(parse_real_list(cmd.threshold.rho), rates, "rho"), J,
                                          mode == ScreenMode::autocorr ? rate : RateModel::asymptotic);
    } else if (cmd.threshold.alpha) {
        switch (mode) {
            case ScreenMode::autocorr: report = fwer_threshold_auto(cmd.p, ns[0], *cmd.threshold.alpha, J[0], rate); break;
            case ScreenMode::cross: report = fwer_threshold_cross(cmd.p, ns[0], *cmd.threshold.alpha, J[0]); break;
            case ScreenMode::persistent: report = fwer_thresholds_persistent(cmd.p, ns, *cmd.threshold.alpha, J); break;
        }
    } else {
        const auto variant = parse_critical_variant(cmd.threshold.variant);
        switch (mode) {
            case ScreenMode::autocorr: report = critical_threshold_auto(cmd.p, ns[0], J[0], variant); break;
            case ScreenMode::cross: report = critical_threshold_cross(cmd.p, ns[0], J[0], variant); break;
            case ScreenMode::persistent: {
                if (ns.size() != 2) throw std::invalid_argument("persistent critical threshold takes two --n values");
                const auto H2 = cmd.H2.empty() ? std::vector<double>{1.0, 1.0} : broadcast(parse_real_list(cmd.H2), 2, "H2");
                report = critical_threshold_persistent(cmd.p, ns[0], ns[1], H2[0], H2[1]);
                break;
            }
        }
    }
    auto j = to_json(report);
    j["provenance"] = provenance(argv, {});
    emit(j.dump(2) + "\n", cmd.out_path, out);
    return kExitOk;
}

struct Table1Command {
    std::size_t p = 500;
    std::string n = "550,500,450,150,100,50,10,8,6";
    std::string variant = "table_matching";
    double J = 1.0;
    std::string out_path;
    std::string json_path;
};

int run_table1(const Table1Command& cmd, const std::vector<std::string>& argv, std::ostream& out) {
    const auto rows = critical_table(cmd.p, parse_size_list(cmd.n), parse_critical_variant(cmd.variant), cmd.J);
    std::string csv = "n,rho_c,lambda,alpha\n";
    nlohmann::json j;
    j["p"] = cmd.p;
    j["variant"] = cmd.variant;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", r.rho[0]);
        csv += std::to_string(r.n[0]) + ',' + buf + ',' + format_real(r.lambda) + ',' + format_real(r.alpha) + '\n';
        j["rows"].push_back(to_json(r));
    }
    emit(csv, cmd.out_path, out);
    if (!cmd.json_path.empty()) {
        j["provenance"] = provenance(argv, {});
        write_text_file(cmd.json_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

// --- power-table ------------------------------------------------------------

struct PowerCommand {
    std::size_t p = 500;
    std::string n = "10:35:5";
    std::string alpha = "0.01,0.025,0.05,0.075,0.1";
    double beta = 0.8;
    std::string convention = "joint";
    std::string out_path;
    std::string json_path;
};

int run_power(const PowerCommand& cmd, const std::vector<std::string>& argv, std::ostream& out) {
    const auto convention = parse_power_convention(cmd.convention);
    const auto cells = power_table(cmd.p, parse_size_list(cmd.n), parse_real_list(cmd.alpha), cmd.beta, convention);
    emit(power_table_csv(cells), cmd.out_path, out);
    if (!cmd.json_path.empty()) {
        auto j = power_table_json(cells, convention);
        j["provenance"] = provenance(argv, {});
        write_text_file(cmd.json_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

// --- simulate ---------------------------------------------------------------

struct SimulateCommand {
    std::string spec_path;
    std::string out_path;
    bool seeds = false;
    std::size_t threads = 0;
};

int run_simulate(const SimulateCommand& cmd, const std::vector<std::string>& argv, std::ostream& out) {
    if (cmd.spec_path.empty()) throw std::invalid_argument("simulate needs --spec (or a curve / operating-points subcommand)");
    std::ifstream in(cmd.spec_path);
    if (!in) throw IoError("cannot open: " + cmd.spec_path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(cmd.spec_path + ": invalid spec: " + e.what());
    }
    SimSpec spec;
    try {
        spec = sim_spec_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(cmd.spec_path + ": invalid spec: " + e.what());
    }
    if (cmd.threads) spec.workers = cmd.threads;
    const auto report = simulate(spec);
    auto j = to_json(report, cmd.seeds);
    j["provenance"] = provenance(argv, {cmd.spec_path}, spec.master_seed);
    emit(j.dump(2) + "\n", cmd.out_path, out);
    return kExitOk;
}

struct CurveCommand {
    std::size_t p = 500;
    std::string n = "550,500,450,150,100,50,10,8,6";
    std::string rho_grid = "0:1:0.01";
    std::size_t reps = 200;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string out_path;
};

int run_curve(const CurveCommand& cmd, std::ostream& out) {
    const auto curve = phase_curve(cmd.p, parse_size_list(cmd.n), parse_real_list(cmd.rho_grid), cmd.reps, cmd.seed, cmd.threads);
    emit(phase_curve_csv(curve), cmd.out_path, out);
    return kExitOk;
}

struct OperatingCommand {
    std::size_t p = 500;
    std::string n = "10:35:5";
    double alpha = 0.01;
    std::string beta = "0.8";
    std::size_t reps = 4000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::string out_path;
};

int run_operating(const OperatingCommand& cmd, std::ostream& out) {
    const auto pts = operating_points(cmd.p, parse_size_list(cmd.n), cmd.alpha, parse_real_list(cmd.beta), cmd.reps,
                                      cmd.seed, cmd.threads);
    emit(operating_points_csv(pts), cmd.out_path, out);
    return kExitOk;
}

// --- inclusion-graph --------------------------------------------------------

struct InclusionCommand {
    std::string manifest;
    ThresholdFlags threshold;
    double cutoff = 0.9;
    std::size_t threads = 0;
    std::string csv_path, dot_path, json_path, subnet_csv_path, subnet_dot_path;
};

int run_inclusion(const InclusionCommand& cmd, const std::vector<std::string>& argv, std::ostream& out) {
    if (cmd.manifest.empty()) throw std::invalid_argument("inclusion-graph needs --manifest");
    const auto loaded = load_treatments(cmd.manifest);
    const auto& set = loaded.set;
    const std::size_t m = set.m();
    std::vector<std::size_t> ns;
    for (const auto& d : set.matrices()) ns.push_back(d.n());

    std::vector<double> rho;
    ThresholdReport report;
    if (cmd.threshold.alpha && cmd.threshold.rho.empty()) {
        if (m < 2) throw std::invalid_argument("--alpha needs at least two treatments; use --rho");
        report = fwer_thresholds_persistent(set.p(), ns, *cmd.threshold.alpha);
        rho = report.rho;
    } else if (!cmd.threshold.rho.empty() && !cmd.threshold.alpha) {
        rho = broadcast(parse_real_list(cmd.threshold.rho), m, "rho");
        if (m >= 2) report = implied_threshold_report(ScreenMode::persistent, set.p(), ns, rho);
    } else {
        throw std::invalid_argument("give exactly one of --rho, --alpha");
    }

    ScreenOptions opts;
    opts.workers = cmd.threads;
    std::vector<ScreenResult> per;
    for (std::size_t t = 0; t < m; ++t) per.push_back(auto_screen(compute_uscores(set[t]), rho[t], opts));
    const auto subsets = subset_screens(per, opts);
    const auto graph = inclusion_graph(subsets, cmd.cutoff);
    const auto subnet = persistent_subnetwork(per);

    if (!cmd.csv_path.empty()) export_graph(graph, GraphFormat::edge_csv, cmd.csv_path);
    if (!cmd.dot_path.empty()) export_graph(graph, GraphFormat::dot, cmd.dot_path);
    if (!cmd.subnet_csv_path.empty()) export_graph(subnet, GraphFormat::edge_csv, cmd.subnet_csv_path);
    if (!cmd.subnet_dot_path.empty()) export_graph(subnet, GraphFormat::dot, cmd.subnet_dot_path);

    nlohmann::json j;
    j["rho"] = rho;
    if (m >= 2) j["threshold"] = to_json(report);
    j["inclusion_graph"] = inclusion_graph_json(graph);
    j["persistent_subnetwork"] = subnetwork_json(subnet);
    j["provenance"] = provenance(argv, {cmd.manifest});
    emit(j.dump(2) + "\n", cmd.json_path, out);
    return kExitOk;
}

// --- p0 ---------------------------------------------------------------------

int run_p0(double rho, std::size_t n, std::ostream& out) {
    nlohmann::json j;
    j["rho"] = rho;
    j["n"] = n;
    j["a_n"] = sphere_constant(n);
    j["exact"] = cap_probability({rho, n}, CapMethod::exact).p0;
    j["asymptotic"] = cap_probability({rho, n}, CapMethod::asymptotic).p0;
    out << j.dump(2) << "\n";
    return kExitOk;
}

void add_threshold_flags(CLI::App* app, ThresholdFlags& t, bool with_critical) {
    app->add_option("--rho", t.rho, "Explicit threshold(s): one value or one per treatment");
    app->add_option("--alpha", t.alpha, "FWER target resolved to thresholds");
    if (with_critical) {
        app->add_flag("--critical", t.critical, "Use the phase-transition critical threshold");
        app->add_option("--variant", t.variant, "Critical-threshold constant: table_matching | literal");
    }
    app->add_option("--J", t.J, "Pairwise-dependency functional(s), default 1");
    app->add_option("--rate", t.rate, "Poisson rate model for auto screens: asymptotic | exact");
}

char delimiter_from(const std::string& s) {
    if (s.empty()) return '\0';
    if (s == "tab" || s == "\\t") return '\t';
    if (s.size() != 1) throw std::invalid_argument("delimiter must be a single character or 'tab'");
    return s.front();
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Correlation screening for high-dimensional data", "corrscreen"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1, 1);

    ScreenCommand screen;
    std::string delimiter;
    auto* screen_cmd = app.add_subcommand("screen", "Screen variables for large auto-, cross- or persistent correlations");
    screen_cmd->add_option("--mode", screen.mode, "auto | cross | persistent")->check(CLI::IsMember({"auto", "cross", "persistent"}));
    screen_cmd->add_option("--input", screen.inputs, "Data file (repeat for multiple treatments)");
    screen_cmd->add_option("--manifest", screen.manifest, "JSON treatment manifest");
    add_threshold_flags(screen_cmd, screen.threshold, true);
    screen_cmd->add_option("--delimiter", delimiter, "Field delimiter (default: by extension)");
    screen_cmd->add_flag("--no-header", screen.io.no_header, "Input files have no header row");
    screen_cmd->add_flag("--drop-constant", screen.io.drop_constant, "Drop constant columns instead of failing");
    screen_cmd->add_option("--chunk-size", screen.chunk_size, "Block size for correlation evaluation")->check(CLI::PositiveNumber);
    screen_cmd->add_option("--edge-cap", screen.edge_cap, "Edges kept in memory before spilling to disk");
    screen_cmd->add_option("--threads", screen.threads, "Worker threads (0: CORRSCREEN_THREADS or hardware)");
    screen_cmd->add_option("--edges", screen.edges_path, "Edge list CSV output");
    screen_cmd->add_option("--discoveries", screen.discoveries_path, "Discovery list CSV output");
    screen_cmd->add_option("--summary", screen.summary_path, "JSON summary output (default: stdout)");
    screen_cmd->add_option("--uscores", screen.uscores_path, "Write the first treatment's U-scores as CSV");

    PhaseCommand phase;
    auto* phase_cmd = app.add_subcommand("phase", "Critical and FWER-controlling thresholds");
    phase_cmd->require_subcommand(0, 1);
    phase_cmd->add_option("--mode", phase.mode, "auto | cross | persistent")->check(CLI::IsMember({"auto", "cross", "persistent"}));
    phase_cmd->add_option("--p", phase.p, "Number of variables");
    phase_cmd->add_option("--n", phase.n, "Sample size(s), one per treatment");
    add_threshold_flags(phase_cmd, phase.threshold, true);
    phase_cmd->add_option("--H2", phase.H2, "Persistent critical threshold: H2 value(s), default 1");
    phase_cmd->add_option("--out", phase.out_path, "JSON output (default: stdout)");

    Table1Command table1;
    auto* table1_cmd = phase_cmd->add_subcommand("table1", "Critical thresholds over a list of sample sizes");
    table1_cmd->add_option("--p", table1.p, "Number of variables");
    table1_cmd->add_option("--n", table1.n, "Sample sizes (list or range)");
    table1_cmd->add_option("--variant", table1.variant, "table_matching | literal");
    table1_cmd->add_option("--J", table1.J, "Pairwise-dependency functional");
    table1_cmd->add_option("--out", table1.out_path, "CSV output (default: stdout)");
    table1_cmd->add_option("--json", table1.json_path, "JSON output");

    PowerCommand power;
    auto* power_cmd = app.add_subcommand("power-table", "Persistent-screen thresholds and minimum detectable correlations");
    power_cmd->add_option("--p", power.p, "Number of variables");
    power_cmd->add_option("--n", power.n, "Samples per treatment (list or range)");
    power_cmd->add_option("--alpha", power.alpha, "FWER targets (list or range)");
    power_cmd->add_option("--beta", power.beta, "Target detection probability");
    power_cmd->add_option("--convention", power.convention, "joint | per_treatment");
    power_cmd->add_option("--out", power.out_path, "CSV output (default: stdout)");
    power_cmd->add_option("--json", power.json_path, "JSON output");

    SimulateCommand simulate_c;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo validation runs");
    sim_cmd->require_subcommand(0, 1);
    sim_cmd->add_option("--spec", simulate_c.spec_path, "JSON simulation spec");
    sim_cmd->add_option("--out", simulate_c.out_path, "JSON report (default: stdout)");
    sim_cmd->add_flag("--seeds", simulate_c.seeds, "Include per-replicate seeds in the report");
    sim_cmd->add_option("--threads", simulate_c.threads, "Worker threads");

    CurveCommand curve;
    auto* curve_cmd = sim_cmd->add_subcommand("curve", "Empirical normalized mean-discovery curves");
    curve_cmd->add_option("--p", curve.p, "Number of variables");
    curve_cmd->add_option("--n", curve.n, "Sample sizes");
    curve_cmd->add_option("--rho-grid", curve.rho_grid, "Threshold grid");
    curve_cmd->add_option("--reps", curve.reps, "Replicates per n");
    curve_cmd->add_option("--seed", curve.seed, "Master seed");
    curve_cmd->add_option("--threads", curve.threads, "Worker threads");
    curve_cmd->add_option("--out", curve.out_path, "CSV output (default: stdout)");

    OperatingCommand operating;
    auto* op_cmd = sim_cmd->add_subcommand("operating-points", "Empirical (alpha, beta) of persistent screening");
    op_cmd->add_option("--p", operating.p, "Number of variables");
    op_cmd->add_option("--n", operating.n, "Samples per treatment");
    op_cmd->add_option("--alpha", operating.alpha, "FWER target");
    op_cmd->add_option("--beta", operating.beta, "Detection targets");
    op_cmd->add_option("--reps", operating.reps, "Replicates");
    op_cmd->add_option("--seed", operating.seed, "Master seed");
    op_cmd->add_option("--threads", operating.threads, "Worker threads");
    op_cmd->add_option("--out", operating.out_path, "CSV output (default: stdout)");

    InclusionCommand inclusion;
    auto* inc_cmd = app.add_subcommand("inclusion-graph", "Set-inclusion graph across treatment subsets");
    inc_cmd->add_option("--manifest", inclusion.manifest, "JSON treatment manifest");
    inc_cmd->add_option("--rho", inclusion.threshold.rho, "Per-treatment thresholds");
    inc_cmd->add_option("--alpha", inclusion.threshold.alpha, "FWER target for the all-treatment persistent screen");
    inc_cmd->add_option("--cutoff", inclusion.cutoff, "Inclusion fraction for an edge");
    inc_cmd->add_option("--threads", inclusion.threads, "Worker threads");
    inc_cmd->add_option("--csv", inclusion.csv_path, "Inclusion edge CSV");
    inc_cmd->add_option("--dot", inclusion.dot_path, "Inclusion graph DOT");
    inc_cmd->add_option("--json", inclusion.json_path, "JSON summary (default: stdout)");
    inc_cmd->add_option("--subnetwork-csv", inclusion.subnet_csv_path, "Persistent-edge subnetwork CSV");
    inc_cmd->add_option("--subnetwork-dot", inclusion.subnet_dot_path, "Persistent-edge subnetwork DOT");

    double p0_rho = 0.5;
    std::size_t p0_n = 10;
    auto* p0_cmd = app.add_subcommand("p0", "Spherical-cap exceedance probability (exact and asymptotic)");
    p0_cmd->add_option("--rho", p0_rho, "Threshold")->required();
    p0_cmd->add_option("--n", p0_n, "Sample size")->required();

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (screen_cmd->parsed()) {
            screen.io.delimiter = delimiter_from(delimiter);
            return run_screen(screen, argv, out);
        }
        if (table1_cmd->parsed()) return run_table1(table1, argv, out);
        if (phase_cmd->parsed()) {
            if (phase.p == 0 || phase.n.empty()) throw std::invalid_argument("phase needs --p and --n");
            return run_phase(phase, argv, out);
        }
        if (power_cmd->parsed()) return run_power(power, argv, out);
        if (curve_cmd->parsed()) return run_curve(curve, out);
        if (op_cmd->parsed()) return run_operating(operating, out);
        if (sim_cmd->parsed()) return run_simulate(simulate_c, argv, out);
        if (inc_cmd->parsed()) return run_inclusion(inclusion, argv, out);
        if (p0_cmd->parsed()) return run_p0(p0_rho, p0_n, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace corrscreen::cli
