#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maxstab/core.hpp"

namespace maxstab {

/// "%.17g" rendering, round-trip exact for every finite double.
std::string format_double(double x);

/// JSON has no infinities; non-finite values become the strings "inf", "-inf", "nan".
nlohmann::json json_number(double x);
nlohmann::json json_array(const std::vector<double>& v);
nlohmann::json json_vector(const Eigen::VectorXd& v);
/// Row-major array of arrays.
nlohmann::json json_matrix(const Eigen::MatrixXd& m);

/// Reads a number written by json_number.
double number_from_json(const nlohmann::json& j);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

/// Serializes like nlohmann::json::dump but prints floating-point values with
/// 17 significant digits.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// Parameter files:
///   {"model": "logistic", "dim": 2, "theta": 0.6}
///   {"model": "dirichlet", "alpha": [1, 2]}
///   {"model": "huesler_reiss", "lambda2": [[0, 1], [1, 0]]}
///   {"model": "extremal_t", "sigma": [[1, 0.5], [0.5, 1]], "nu": 2}
/// The "model" key may be omitted when `model` is given; if both are present
/// they must agree. Throws ParseError for malformed payloads and the usual
/// validation errors for out-of-domain values.
ParamVector params_from_json(const nlohmann::json& j, std::optional<ModelId> model = std::nullopt);
nlohmann::json params_to_json(const ParamVector& p);

/// Headered CSV, one observation per row. Throws ParseError on ragged rows or
/// malformed numbers and EmptyData when there are no rows.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
/// Header z1,...,zk then rows in format_double.
void write_csv(std::ostream& out, const Dataset& data);

/// Throws IoError when the file cannot be read or written.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);
nlohmann::json read_json_file(const std::string& path);

}  // namespace maxstab
