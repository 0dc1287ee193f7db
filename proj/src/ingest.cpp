#include "corrscreen/ingest.hpp"

#include "corrscreen/error.hpp"
#include "corrscreen/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace corrscreen {

namespace {

bool is_constant(const Eigen::Ref<const Eigen::VectorXd>& column) {
    return column.maxCoeff() == column.minCoeff();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_cell(std::string_view cell, const std::string& source, std::size_t line_no,
                  std::size_t col) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << source << ":" << line_no << ": column " << col + 1 << ": not a finite number: '"
            << cell << "'";
        throw DataError(msg.str());
    }
    return value;
}

char pick_delimiter(const std::filesystem::path& path, char requested) {
    if (requested != '\0') return requested;
    const auto ext = path.extension().string();
    return (ext == ".tsv" || ext == ".tab") ? '\t' : ',';
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_ids,
                       std::string treatment_id)
    : values_(std::move(values)), ids_(std::move(variable_ids)), treatment_(std::move(treatment_id)) {
    if (values_.rows() < 3)
        throw DataError("need at least 3 samples, got " + std::to_string(values_.rows()));
    if (values_.cols() < 1) throw DataError("need at least one variable");
    if (ids_.size() != static_cast<std::size_t>(values_.cols()))
        throw DataError("variable id count does not match column count");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_)
        if (!seen.insert(id).second) throw DataError("duplicate variable id: " + id);
    if (!values_.allFinite()) throw DataError("data contains non-finite values");
    for (Eigen::Index j = 0; j < values_.cols(); ++j)
        if (is_constant(values_.col(j)))
            throw DataError("zero-variance column: " + ids_[static_cast<std::size_t>(j)]);
}

DataMatrix DataMatrix::select_columns(const std::vector<std::size_t>& columns) const {
    Eigen::MatrixXd sub(values_.rows(), static_cast<Eigen::Index>(columns.size()));
    std::vector<std::string> ids;
    ids.reserve(columns.size());
    for (std::size_t k = 0; k < columns.size(); ++k) {
        sub.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(columns.at(k)));
        ids.push_back(ids_.at(columns[k]));
    }
    return DataMatrix(std::move(sub), std::move(ids), treatment_);
}

LoadResult parse_matrix(const std::string& text, const LoadOptions& options, const std::string& source) {
    const char delim = options.delimiter == '\0' ? ',' : options.delimiter;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool have_header = !options.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line, delim);
        if (!have_header) {
            for (auto c : cells) ids.push_back(unquote(c));
            width = ids.size();
            have_header = true;
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            std::ostringstream msg;
            msg << source << ":" << line_no << ": ragged row: expected " << width << " fields, got "
                << cells.size();
            throw DataError(msg.str());
        }
        std::vector<double> row;
        row.reserve(width);
        for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(parse_cell(cells[c], source, line_no, c));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(source + ": no data rows");
    if (ids.empty())
        for (std::size_t j = 0; j < width; ++j) ids.push_back("V" + std::to_string(j + 1));

    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

    std::vector<std::size_t> keep;
    std::vector<std::string> dropped;
    for (std::size_t j = 0; j < width; ++j) {
        if (!is_constant(values.col(static_cast<Eigen::Index>(j)))) {
            keep.push_back(j);
            continue;
        }
        if (options.constant_policy == ConstantColumnPolicy::reject)
            throw DataError(source + ": zero-variance column '" + ids[j] +
                            "' (use the drop policy to remove constant columns)");
        dropped.push_back(ids[j]);
    }
    if (keep.empty()) throw DataError(source + ": every column is constant");

    Eigen::MatrixXd kept(values.rows(), static_cast<Eigen::Index>(keep.size()));
    std::vector<std::string> kept_ids;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        kept.col(static_cast<Eigen::Index>(k)) = values.col(static_cast<Eigen::Index>(keep[k]));
        kept_ids.push_back(ids[keep[k]]);
    }
    return {DataMatrix(std::move(kept), std::move(kept_ids), options.treatment_id), std::move(dropped)};
}

LoadResult load_matrix(const std::filesystem::path& path, const LoadOptions& options) {
    LoadOptions resolved = options;
    resolved.delimiter = pick_delimiter(path, options.delimiter);
    return parse_matrix(read_file(path), resolved, path.string());
}

void write_matrix(const std::filesystem::path& path, const DataMatrix& data, char delimiter) {
    std::string out;
    const auto& ids = data.variable_ids();
    for (std::size_t j = 0; j < ids.size(); ++j) {
        if (j) out += delimiter;
        out += ids[j];
    }
    out += '\n';
    const auto& v = data.values();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            if (j) out += delimiter;
            out += format_real(v(i, j));
        }
        out += '\n';
    }
    write_text_file(path, out);
}

TreatmentSet::TreatmentSet(std::vector<DataMatrix> matrices) : matrices_(std::move(matrices)) {
    if (matrices_.empty()) throw DataError("treatment set needs at least one matrix");
    std::unordered_set<std::string> labels;
    for (const auto& m : matrices_) {
        if (!labels.insert(m.treatment_id()).second)
            throw DataError("duplicate treatment label: '" + m.treatment_id() + "'");
        if (m.variable_ids() != matrices_.front().variable_ids())
            throw DataError("treatment '" + m.treatment_id() + "' variable ids are not aligned");
    }
}

const DataMatrix& TreatmentSet::by_label(const std::string& label) const {
    for (const auto& m : matrices_)
        if (m.treatment_id() == label) return m;
    throw DataError("no treatment labelled '" + label + "'");
}

std::vector<std::string> TreatmentSet::labels() const {
    std::vector<std::string> out;
    for (const auto& m : matrices_) out.push_back(m.treatment_id());
    return out;
}

TreatmentSet align_treatments(std::vector<DataMatrix> matrices) {
    if (matrices.empty()) throw DataError("treatment set needs at least one matrix");
    const auto reference = matrices.front().variable_ids();
    for (auto& m : matrices) {
        if (m.variable_ids() == reference) continue;
        if (m.p() != reference.size())
            throw DataError("treatment '" + m.treatment_id() + "' has " + std::to_string(m.p()) +
                            " variables, expected " + std::to_string(reference.size()));
        std::unordered_map<std::string, std::size_t> where;
        for (std::size_t j = 0; j < m.p(); ++j) where.emplace(m.variable_ids()[j], j);
        std::vector<std::size_t> order;
        order.reserve(reference.size());
        for (const auto& id : reference) {
            const auto it = where.find(id);
            if (it == where.end())
                throw DataError("treatment '" + m.treatment_id() + "' lacks variable '" + id + "'");
            order.push_back(it->second);
        }
        m = m.select_columns(order);
    }
    return TreatmentSet(std::move(matrices));
}

TreatmentLoadResult load_treatments(const std::filesystem::path& manifest) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(manifest));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest.string() + ": invalid manifest: " + e.what());
    }
    if (!doc.contains("treatments") || !doc["treatments"].is_array() || doc["treatments"].empty())
        throw DataError(manifest.string() + ": manifest must list at least one treatment");

    LoadOptions options;
    if (doc.contains("delimiter")) {
        if (!doc["delimiter"].is_string()) throw DataError(manifest.string() + ": delimiter must be a string");
        const auto d = doc["delimiter"].get<std::string>();
        options.delimiter = d == "\\t" || d == "tab" ? '\t' : (d.empty() ? '\0' : d.front());
    }
    std::string policy;
    try {
        options.header = doc.value("header", true);
        policy = doc.value("constant_policy", std::string("reject"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest.string() + ": " + e.what());
    }
    if (policy != "reject" && policy != "drop")
        throw DataError(manifest.string() + ": constant_policy must be 'reject' or 'drop'");
    const bool drop = policy == "drop";

    const auto base = manifest.parent_path();
    std::vector<LoadResult> loaded;
    std::unordered_set<std::string> labels;
    for (const auto& entry : doc["treatments"]) {
        LoadOptions per = options;
        if (!entry.is_object() || !entry.contains("label") || !entry.contains("path") || !entry["label"].is_string() ||
            !entry["path"].is_string())
            throw DataError(manifest.string() + ": each treatment needs string 'label' and 'path'");
        per.treatment_id = entry.at("label").get<std::string>();
        if (!labels.insert(per.treatment_id).second)
            throw DataError("duplicate treatment label: '" + per.treatment_id + "'");
        per.constant_policy = drop ? ConstantColumnPolicy::drop : ConstantColumnPolicy::reject;
        std::filesystem::path file = entry.at("path").get<std::string>();
        if (file.is_relative()) file = base / file;
        loaded.push_back(load_matrix(file, per));
    }

    // Drop the union of per-treatment constant columns so ids stay aligned.
    std::unordered_set<std::string> dropped_set;
    std::vector<std::string> dropped;
    for (const auto& r : loaded)
        for (const auto& id : r.dropped_ids)
            if (dropped_set.insert(id).second) dropped.push_back(id);

    std::vector<DataMatrix> matrices;
    for (auto& r : loaded) {
        if (dropped_set.empty()) {
            matrices.push_back(std::move(r.data));
            continue;
        }
        std::vector<std::size_t> keep;
        for (std::size_t j = 0; j < r.data.p(); ++j)
            if (!dropped_set.count(r.data.variable_ids()[j])) keep.push_back(j);
        if (keep.empty()) throw DataError("every variable was dropped as constant");
        matrices.push_back(r.data.select_columns(keep));
    }
    return {align_treatments(std::move(matrices)), std::move(dropped)};
}

}  // namespace corrscreen
