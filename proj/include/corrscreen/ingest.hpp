#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace corrscreen {

// n×p sample matrix: rows are samples, columns are variables.
//
// Invariants enforced at construction (DataError otherwise):
//   n >= 3, p >= 1, ids unique and p of them, every cell finite,
//   no column with zero sample variance.
class DataMatrix {
public:
    DataMatrix(Eigen::MatrixXd values, std::vector<std::string> variable_ids,
               std::string treatment_id = {});

    const Eigen::MatrixXd& values() const { return values_; }
    const std::vector<std::string>& variable_ids() const { return ids_; }
    const std::string& treatment_id() const { return treatment_; }
    std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(values_.cols()); }

    // Column subset / reordering; ids follow the columns.
    DataMatrix select_columns(const std::vector<std::size_t>& columns) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> ids_;
    std::string treatment_;
};

enum class ConstantColumnPolicy { reject, drop };

struct LoadOptions {
    // '\0' picks tab for .tsv/.tab files and comma otherwise.
    char delimiter = '\0';
    bool header = true;
    ConstantColumnPolicy constant_policy = ConstantColumnPolicy::reject;
    std::string treatment_id;
};

struct LoadResult {
    DataMatrix data;
    // Ids removed under ConstantColumnPolicy::drop, in source order.
    std::vector<std::string> dropped_ids;
};

LoadResult load_matrix(const std::filesystem::path& path, const LoadOptions& options = {});

// Same parser over an in-memory buffer; `source` names it in diagnostics.
LoadResult parse_matrix(const std::string& text, const LoadOptions& options,
                        const std::string& source = "<memory>");

// Writes header + rows using shortest round-trip decimal formatting, so
// load_matrix(write_matrix(x)) reproduces x bit-for-bit.
void write_matrix(const std::filesystem::path& path, const DataMatrix& data, char delimiter = ',');

// Several treatments over the same variables, columns aligned by id.
class TreatmentSet {
public:
    explicit TreatmentSet(std::vector<DataMatrix> matrices);

    std::size_t m() const { return matrices_.size(); }
    std::size_t p() const { return matrices_.front().p(); }
    const std::vector<std::string>& variable_ids() const { return matrices_.front().variable_ids(); }
    const DataMatrix& operator[](std::size_t i) const { return matrices_.at(i); }
    const DataMatrix& by_label(const std::string& label) const;
    const std::vector<DataMatrix>& matrices() const { return matrices_; }
    std::vector<std::string> labels() const;

private:
    std::vector<DataMatrix> matrices_;
};

// Reorders every matrix's columns to the id order of the first one.
// Throws DataError when id sets differ or labels repeat.
TreatmentSet align_treatments(std::vector<DataMatrix> matrices);

// Manifest is JSON:
//   {"treatments": [{"label": "a", "path": "a.csv"}, ...],
//    "delimiter": ",", "header": true, "constant_policy": "reject"|"drop"}
// Relative paths resolve against the manifest's directory. Under the drop
// policy a column constant in any treatment is dropped from all of them.
struct TreatmentLoadResult {
    TreatmentSet set;
    std::vector<std::string> dropped_ids;
};

TreatmentLoadResult load_treatments(const std::filesystem::path& manifest);

}  // namespace corrscreen
