#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsedyn/constraints.hpp"
#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/dynamics.hpp"
#include "sparsedyn/metrics.hpp"
#include "sparsedyn/problem.hpp"
#include "sparsedyn/solvers.hpp"
#include "sparsedyn/types.hpp"

namespace sparsedyn {

using Json = nlohmann::ordered_json;

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
double parse_double(const std::string& text);

// Plain comma-separated tables with one header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

// Matrix as CSV without header, one matrix row per line.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const Json& j);

Json dictionary_spec_to_json(const DictionarySpec& spec);
DictionarySpec dictionary_spec_from_json(const Json& j);
// {id, label, tags} for every basis function.
Json dictionary_to_json(const Dictionary& dict);

// Manifest dataset.json plus experiment_<k>.csv with columns t, x_*, [v_*],
// y_*, [w_*].
void save_dataset(const std::filesystem::path& dir, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& dir);

// Ties by basis label and column; generals as dense matrices.
Json constraints_to_json(const Dictionary& dict, const std::vector<TieGroup>& ties,
                         const std::vector<LinearConstraint>& generals);
void constraints_from_json(const Json& j, const Dictionary& dict, std::vector<TieGroup>& ties,
                           std::vector<LinearConstraint>& generals);

// problem.json header with A.csv and B.csv beside it.
void save_problem(const std::filesystem::path& dir, const RegressionProblem& p);
RegressionProblem load_problem(const std::filesystem::path& dir);

Json report_to_json(const SolveReport& report);
Json metrics_to_json(const MetricReport& metrics);

// Labeled nonzero coefficients of an unscaled Omega.
Json coefficients_to_json(const Matrix& omega, const Dictionary& dict);
Matrix coefficients_from_json(const Json& j, const Dictionary& dict);

}  // namespace sparsedyn
