#include "maxstab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "maxstab/error.hpp"

namespace maxstab {

namespace {

using nlohmann::json;

const json& member(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::ParseError, std::string("parameter file lacks \"") + key + "\"");
  return j.at(key);
}

void dump_into(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(out, value, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_into(out, value, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

double parse_field(std::string_view s, int line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": malformed number \"" + std::string(s) + "\"");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r") == std::string_view::npos; }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json json_number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json json_array(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(json_number(x));
  return out;
}

json json_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v(i)));
  return out;
}

json json_matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(json_vector(m.row(i).transpose()));
  return out;
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  fail(ErrorCode::ParseError, "expected a number, got " + j.dump());
}

Eigen::VectorXd vector_from_json(const json& j) {
  require(j.is_array(), ErrorCode::ParseError, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from_json(j[i]);
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::ParseError, "expected a nonempty array of arrays");
  const auto rows = static_cast<Eigen::Index>(j.size());
  require(j[0].is_array(), ErrorCode::ParseError, "expected an array of arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::VectorXd r = vector_from_json(j[static_cast<std::size_t>(i)]);
    require(r.size() == cols, ErrorCode::ParseError, "matrix rows have different lengths");
    m.row(i) = r.transpose();
  }
  return m;
}

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out;
}

ParamVector params_from_json(const json& j, std::optional<ModelId> model) {
  require(j.is_object(), ErrorCode::ParseError, "parameter file must hold a JSON object");
  if (j.contains("model")) {
    require(j["model"].is_string(), ErrorCode::ParseError, "\"model\" must be a string");
    const ModelId named = parse_model_id(j["model"].get<std::string>());
    require(!model || *model == named, ErrorCode::InvalidArgument,
            "parameter file is for model " + j["model"].get<std::string>());
    model = named;
  }
  require(model.has_value(), ErrorCode::ParseError, "no model given");
  try {
    switch (*model) {
      case ModelId::logistic: {
        const int dim = member(j, "dim").get<int>();
        return ParamVector::logistic(dim, number_from_json(member(j, "theta")));
      }
      case ModelId::dirichlet:
        return ParamVector::dirichlet(vector_from_json(member(j, "alpha")));
      case ModelId::huesler_reiss:
        return ParamVector::huesler_reiss(matrix_from_json(member(j, "lambda2")));
      case ModelId::extremal_t:
        return ParamVector::extremal_t(matrix_from_json(member(j, "sigma")), number_from_json(member(j, "nu")));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed parameter file: ") + e.what());
  }
  fail(ErrorCode::UnsupportedModel, "unknown model");
}

json params_to_json(const ParamVector& p) {
  json j;
  j["model"] = std::string(to_string(p.model()));
  switch (p.model()) {
    case ModelId::logistic:
      j["dim"] = p.dim();
      j["theta"] = p.theta();
      break;
    case ModelId::dirichlet:
      j["alpha"] = json_vector(p.alpha());
      break;
    case ModelId::huesler_reiss:
      j["lambda2"] = json_matrix(p.lambda2());
      break;
    case ModelId::extremal_t:
      j["sigma"] = json_matrix(p.sigma());
      j["nu"] = p.nu();
      break;
  }
  return j;
}

Dataset read_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    cols = split(line).size();
    break;
  }
  require(cols > 0, ErrorCode::EmptyData, "CSV input has no header");
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split(line);
    require(fields.size() == cols, ErrorCode::ParseError,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(cols) + " fields");
    for (const auto f : fields) values.push_back(parse_field(f, line_no));
  }
  require(!values.empty(), ErrorCode::EmptyData, "CSV input has no observations");
  const auto rows = static_cast<Eigen::Index>(values.size() / cols);
  Dataset::Matrix m(rows, static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return Dataset(std::move(m));
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (int c = 0; c < data.dim(); ++c) out << (c ? "," : "") << 'z' << c + 1;
  out << '\n';
  for (int i = 0; i < data.size(); ++i) {
    const auto r = data.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
    out << '\n';
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::IoError, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path);
  out << contents;
  out.flush();
  require(static_cast<bool>(out), ErrorCode::IoError, "cannot write " + path);
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

}  // namespace maxstab
