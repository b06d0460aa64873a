#include "dichotomy/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dichotomy/errors.hpp"

namespace dichotomy::io {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {  // std::map storage: keys sorted
        if (!first) out += ',';
        first = false;
        out += json(k).dump();
        out += ':';
        emit(v, out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        emit(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? num(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> vals;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
    if (pos != cell.size()) throw std::invalid_argument(cell);
    vals.push_back(v);
  }
  return vals;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write output file " + path);
    out << content;
    if (!out) throw InputError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw InputError("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
}

std::string canonical_json(const json& j) {
  std::string out;
  emit(j, out);
  out += '\n';
  return out;
}

Mat parse_matrix_json(const json& j) {
  if (!j.is_object() || !j.contains("re")) throw ParseError("matrix JSON needs an object with \"re\"");
  const json& re = j.at("re");
  if (!re.is_array() || re.empty()) throw DimensionError("matrix JSON \"re\" must be a non-empty array of rows");
  const std::size_t rows = re.size();
  const std::size_t cols = re[0].is_array() ? re[0].size() : 0;
  auto check_shape = [&](const json& part, const char* name) {
    if (!part.is_array() || part.size() != rows) throw DimensionError(std::string("matrix JSON \"") + name + "\" has the wrong row count");
    for (const auto& row : part)
      if (!row.is_array() || row.size() != cols) throw DimensionError(std::string("matrix JSON \"") + name + "\" rows differ in length");
  };
  check_shape(re, "re");
  const bool has_im = j.contains("im") && !j.at("im").is_null();
  if (has_im) check_shape(j.at("im"), "im");
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer()) throw ParseError("matrix JSON \"n\" must be an integer");
    if (j.at("n").get<long long>() != static_cast<long long>(rows)) throw DimensionError("matrix JSON \"n\" does not match the row count");
  }
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      auto value = [&](const json& e) {
        if (e.is_number()) return e.get<double>();
        if (e.is_string()) {  // "nan", "inf" spelled out by other tools
          try {
            return std::stod(e.get<std::string>());
          } catch (const std::exception&) {
          }
        }
        throw ParseError("matrix entry (" + std::to_string(i) + ", " + std::to_string(k) + ") is not a number");
      };
      m(i, k) = cplx(value(re[i][k]), has_im ? value(j.at("im")[i][k]) : 0.0);
    }
  }
  return m;
}

Mat parse_matrix_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("matrix JSON does not parse: ") + e.what());
  }
  return parse_matrix_json(j);
}

json matrix_to_json(const Mat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ir = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ir.push_back(m(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return json{{"n", m.rows()}, {"re", re}, {"im", im}};
}

std::string grid_function_csv(const GridFunction& f) {
  std::string out = "t";
  for (Eigen::Index i = 0; i < f.dim(); ++i) out += ",re" + std::to_string(i + 1) + ",im" + std::to_string(i + 1);
  out += '\n';
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    out += num(f.node(j));
    for (Eigen::Index i = 0; i < f.dim(); ++i) out += ',' + num(f.samples(i, j).real()) + ',' + num(f.samples(i, j).imag());
    out += '\n';
  }
  return out;
}

GridFunction parse_grid_function_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      rows.push_back(split_numbers(line));
    } catch (const std::exception&) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ParseError("grid CSV line " + std::to_string(lineno) + " is not numeric");
    }
  }
  if (rows.size() < 2) throw InputError("grid CSV needs at least two samples");
  const std::size_t width = rows[0].size();
  if (width < 3 || width % 2 == 0) throw DimensionError("grid CSV rows must be t followed by re/im pairs");
  GridFunction f;
  f.start = rows[0][0];
  f.h = rows[1][0] - rows[0][0];
  f.samples.resize(static_cast<Eigen::Index>((width - 1) / 2), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != width) throw DimensionError("grid CSV rows differ in length");
    const double expect = f.start + static_cast<double>(j) * f.h;
    if (std::abs(rows[j][0] - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
      throw InputError("grid CSV times are not uniformly spaced");
    for (std::size_t i = 0; i + 1 < width; i += 2)
      f.samples(static_cast<Eigen::Index>(i / 2), static_cast<Eigen::Index>(j)) = cplx(rows[j][i + 1], rows[j][i + 2]);
  }
  f.validate();
  return f;
}

std::string green_samples_csv(const GreenSamples& gs) {
  std::string out = "t";
  const Eigen::Index n = gs.values.empty() ? 0 : gs.values[0].rows();
  for (const char* part : {"re", "im"})
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) out += std::string(",") + part + "_" + std::to_string(i + 1) + "_" + std::to_string(k + 1);
  out += '\n';
  for (std::size_t s = 0; s < gs.times.size(); ++s) {
    out += num(gs.times[s]);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) out += ',' + num(gs.values[s](i, k).real());
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) out += ',' + num(gs.values[s](i, k).imag());
    out += '\n';
  }
  return out;
}

TorusFunction parse_torus_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("torus JSON does not parse: ") + e.what());
  }
  if (!j.is_object() || !j.contains("M") || !j.at("M").is_number_integer() || !j.contains("coeffs"))
    throw ParseError("torus JSON needs integer \"M\" and object \"coeffs\"");
  const long long M = j.at("M").get<long long>();
  if (M < 0) throw InputError("torus truncation M must be non-negative");
  const json& coeffs = j.at("coeffs");
  if (!coeffs.is_object() || coeffs.empty()) throw ParseError("torus \"coeffs\" must be a non-empty object");
  std::size_t width = 0;
  for (const auto& [key, v] : coeffs.items()) {
    if (!v.is_array() || v.empty() || v.size() % 2) throw DimensionError("torus coefficient " + key + " must list re then im parts");
    if (width && v.size() != width) throw DimensionError("torus coefficients differ in length");
    width = v.size();
  }
  TorusFunction f{M, Mat::Zero(static_cast<Eigen::Index>(width / 2), 2 * M + 1)};
  for (const auto& [key, v] : coeffs.items()) {
    long long k = 0;
    try {
      std::size_t pos = 0;
      k = std::stoll(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ParseError("torus coefficient key " + key + " is not an integer");
    }
    if (k < -M || k > M) throw InputError("torus coefficient " + key + " lies outside |k| <= M");
    const std::size_t n = width / 2;
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_number() || !v[n + i].is_number()) throw ParseError("torus coefficient " + key + " has a non-number");
      f.coeffs(static_cast<Eigen::Index>(i), k + M) = cplx(v[i].get<double>(), v[n + i].get<double>());
    }
  }
  f.validate();
  return f;
}

json torus_to_json(const TorusFunction& f) {
  json coeffs = json::object();
  for (Eigen::Index k = -f.M; k <= f.M; ++k) {
    json v = json::array();
    for (Eigen::Index i = 0; i < f.dim(); ++i) v.push_back(f.coeffs(i, k + f.M).real());
    for (Eigen::Index i = 0; i < f.dim(); ++i) v.push_back(f.coeffs(i, k + f.M).imag());
    coeffs[std::to_string(k)] = v;
  }
  return json{{"M", f.M}, {"coeffs", coeffs}};
}

std::string annulus_csv(const AnnulusReport& rep) {
  std::string out = "r,phi,re_z,im_z,norm_U\n";
  for (const auto& p : rep.table)
    out += num(p.radius) + ',' + num(p.angle) + ',' + num(p.z.real()) + ',' + num(p.z.imag()) + ',' + num(p.norm) + '\n';
  return out;
}

}  // namespace dichotomy::io
