#ifndef RESPATH_IO_HPP
#define RESPATH_IO_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "respath/construct.hpp"
#include "respath/errors.hpp"
#include "respath/netcore.hpp"
#include "respath/targets.hpp"

namespace respath {

using json = nlohmann::json;

// Decimal with 17 significant digits: enough to round-trip any double.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void write_vector(std::ostream& os, const VectorXd& v) {
  os << '[';
  for (int i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << format_double(v(i));
  }
  os << ']';
}

inline void write_matrix(std::ostream& os, const MatrixXd& m) {
  os << '[';
  for (int i = 0; i < m.rows(); ++i) {
    if (i) os << ',';
    os << '[';
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << ']';
  }
  os << ']';
}

inline void write_matrix_list(std::ostream& os, const std::vector<MatrixXd>& ms) {
  os << '[';
  for (std::size_t l = 0; l < ms.size(); ++l) {
    if (l) os << ',';
    write_matrix(os, ms[l]);
  }
  os << ']';
}

inline MatrixXd parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty())
    throw ParseError("model file: " + what + " must be a nonempty array of rows");
  const std::size_t cols = j[0].size();
  MatrixXd m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ParseError("model file: ragged rows in " + what);
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ParseError("model file: non-numeric entry in " + what);
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

inline VectorXd parse_vector(const json& j, const std::string& what) {
  if (!j.is_array())
    throw ParseError("model file: " + what + " must be an array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError("model file: non-numeric entry in " + what);
    v(i) = j[i].get<double>();
  }
  return v;
}

} // namespace detail

inline std::string model_to_json(const ResNetParams& p) {
  std::ostringstream os;
  os << "{\"kind\":\"resnet\",\"arch\":{\"d\":" << p.arch.d << ",\"D\":" << p.arch.D
     << ",\"m\":" << p.arch.m << ",\"L\":" << p.arch.L << "},\"V\":";
  detail::write_matrix(os, p.V);
  os << ",\"W\":";
  detail::write_matrix_list(os, p.W);
  os << ",\"U\":";
  detail::write_matrix_list(os, p.U);
  os << ",\"u\":";
  detail::write_vector(os, p.u);
  os << "}";
  return os.str();
}

inline std::string model_to_json(const FcParams& p) {
  std::ostringstream os;
  os << "{\"kind\":\"fc\",\"arch\":{\"d\":" << p.d << ",\"m\":" << p.m
     << ",\"L\":" << p.L << "},\"W\":";
  detail::write_matrix_list(os, p.W);
  os << "}";
  return os.str();
}

using Model = std::variant<ResNetParams, FcParams>;

inline Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ParseError("model file: missing \"kind\"");
  const std::string kind = j["kind"].get<std::string>();
  if (!j.contains("arch") || !j["arch"].is_object())
    throw ParseError("model file: missing \"arch\"");
  const json& a = j["arch"];

  if (kind == "resnet") {
    for (const char* key : {"d", "D", "m", "L"})
      if (!a.contains(key) || !a[key].is_number_integer())
        throw ParseError(std::string("model file: arch needs integer \"") + key + "\"");
    ResNetParams p;
    p.arch = ResNetArch{a["d"].get<int>(), a["D"].get<int>(), a["m"].get<int>(),
                        a["L"].get<int>()};
    for (const char* key : {"V", "W", "U", "u"})
      if (!j.contains(key))
        throw ParseError(std::string("model file: missing \"") + key + "\"");
    p.V = detail::parse_matrix(j["V"], "V");
    p.u = detail::parse_vector(j["u"], "u");
    if (!j["W"].is_array() || !j["U"].is_array())
      throw ParseError("model file: W and U must be arrays of matrices");
    for (const auto& w : j["W"]) p.W.push_back(detail::parse_matrix(w, "W"));
    for (const auto& u : j["U"]) p.U.push_back(detail::parse_matrix(u, "U"));
    p.validate();
    return p;
  }
  if (kind == "fc") {
    for (const char* key : {"d", "m", "L"})
      if (!a.contains(key) || !a[key].is_number_integer())
        throw ParseError(std::string("model file: arch needs integer \"") + key + "\"");
    FcParams p;
    p.d = a["d"].get<int>();
    p.m = a["m"].get<int>();
    p.L = a["L"].get<int>();
    if (!j.contains("W") || !j["W"].is_array())
      throw ParseError("model file: missing \"W\"");
    for (const auto& w : j["W"]) p.W.push_back(detail::parse_matrix(w, "W"));
    p.validate();
    return p;
  }
  throw ParseError("model file: kind must be \"resnet\" or \"fc\"");
}

inline std::string rep_to_json(const TwoLayerRep& rep) {
  std::ostringstream os;
  os << "{\"a\":";
  detail::write_vector(os, rep.a);
  os << ",\"b\":";
  detail::write_matrix(os, rep.b);
  os << "}";
  return os.str();
}

inline TwoLayerRep rep_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("rep file: ") + e.what());
  }
  if (!j.contains("a") || !j.contains("b"))
    throw ParseError("rep file: need \"a\" and \"b\"");
  TwoLayerRep rep;
  rep.a = detail::parse_vector(j["a"], "a");
  rep.b = detail::parse_matrix(j["b"], "b");
  rep.validate();
  return rep;
}

inline std::string mixture_to_json(const BarronMixture& t) {
  std::ostringstream os;
  os << "{\"d\":" << t.d << ",\"rescale\":" << format_double(t.rescale)
     << ",\"atoms\":[";
  for (int k = 0; k < t.K(); ++k) {
    if (k) os << ',';
    os << "{\"a\":" << format_double(t.a(k)) << ",\"omega\":";
    detail::write_vector(os, t.omega.row(k).transpose());
    os << "}";
  }
  os << "]}";
  return os.str();
}

inline BarronMixture mixture_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("mixture file: ") + e.what());
  }
  if (!j.contains("d") || !j.contains("atoms") || !j["atoms"].is_array() ||
      j["atoms"].empty())
    throw ParseError("mixture file: need \"d\" and nonempty \"atoms\"");
  BarronMixture t;
  t.d = j["d"].get<int>();
  if (j.contains("rescale")) t.rescale = j["rescale"].get<double>();
  const auto& atoms = j["atoms"];
  t.a.resize(atoms.size());
  t.omega.resize(atoms.size(), t.d);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (!atoms[k].contains("a") || !atoms[k].contains("omega"))
      throw ParseError("mixture file: atom needs \"a\" and \"omega\"");
    t.a(k) = atoms[k]["a"].get<double>();
    const VectorXd w = detail::parse_vector(atoms[k]["omega"], "omega");
    if (w.size() != t.d) throw ParseError("mixture file: omega length != d");
    t.omega.row(k) = w.transpose();
  }
  t.validate();
  return t;
}

// Comma-separated, header row, 17-significant-digit floats, LF line endings.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size())
      throw StructuralError("CsvWriter: cell count != header count");
    rows_.push_back(cells);
  }

  std::string str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i) {
      if (i) os << ',';
      os << header_[i];
    }
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) os << ',';
        os << row[i];
      }
      os << '\n';
    }
    return os.str();
  }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << content;
}

// FNV-1a, used to stamp outputs with the configuration they came from.
inline std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace respath

#endif
