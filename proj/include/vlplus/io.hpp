#pragma once

// JSON input files: Gram matrices, sublattice bases and sign-oracle tables.

#include "vlplus/fusion.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace vlplus {

enum class InputErrorKind { FileNotFound, MalformedJson, BadSchema };

class InputError : public std::runtime_error {
 public:
  InputError(InputErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  InputErrorKind kind() const { return kind_; }

 private:
  InputErrorKind kind_;
};

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(InputErrorKind::FileNotFound, "cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(InputErrorKind::MalformedJson, "malformed JSON in " + path + ": " + e.what());
  }
}

inline Integer integer_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_number_integer()) return Integer(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Integer(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw InputError(InputErrorKind::BadSchema, where + ": expected an integer, got " + v.dump());
}

inline Rational rational_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw InputError(InputErrorKind::BadSchema, where + ": expected a rational \"p/q\", got " + v.dump());
}

/// Rows of integers: [[a, b], [c, d]]. Squareness and the lattice conditions are checked later.
inline IntMatrix int_rows_from_json(const nlohmann::json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw InputError(InputErrorKind::BadSchema, where + ": expected a non-empty array of rows");
  const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array()) throw InputError(InputErrorKind::BadSchema, where + ": row " + std::to_string(i + 1) + " is not an array");
    if (rows[i].size() != cols)
      throw LatticeError(LatticeErrorKind::NotSquare, where + ": rows have different lengths");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = integer_from_json(rows[i][j], where);
  }
  return m;
}

/// Accepts {"gram": [[...]]} or a bare array of rows.
inline IntMatrix gram_from_json(const nlohmann::json& doc) {
  if (doc.is_object()) {
    if (!doc.contains("gram")) throw InputError(InputErrorKind::BadSchema, "missing key \"gram\"");
    return int_rows_from_json(doc.at("gram"), "gram");
  }
  return int_rows_from_json(doc, "gram");
}

inline EvenLattice read_lattice(const std::string& path) { return validate_even_lattice(gram_from_json(read_json_file(path))); }

/// Sublattice basis as rows of coordinates: {"basis": [[...]]} or a bare array.
inline std::vector<LatticeVector> basis_from_json(const nlohmann::json& doc) {
  const IntMatrix m = int_rows_from_json(doc.is_object() ? doc.at("basis") : doc, "basis");
  std::vector<LatticeVector> out;
  for (std::size_t i = 0; i < m.rows(); ++i) out.push_back(m.row(i));
  return out;
}

inline nlohmann::json to_json(const RatVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

inline nlohmann::json to_json(const IntMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(to_i64(m(i, j)));
    rows.push_back(r);
  }
  return rows;
}

/// Sign-oracle table:
///   {"pi":    [{"lambda": ["1/2","0"], "two_mu": [0,1], "value": 1}, ...],
///    "c_chi": [{"chi": 1, "lambda": ["1/2","0"], "value": -1}, ...]}
/// Entries are matched up to L (lambda) and 2L (two_mu); missing entries stay unknown.
inline SignOracle sign_oracle_from_json(const nlohmann::json& doc, std::size_t rank) {
  if (!doc.is_object()) throw InputError(InputErrorKind::BadSchema, "oracle: expected an object");
  auto vec = [&](const nlohmann::json& a, const std::string& where) {
    if (!a.is_array() || a.size() != rank) throw InputError(InputErrorKind::BadSchema, where + ": expected " + std::to_string(rank) + " coordinates");
    RatVector v;
    for (const auto& x : a) v.push_back(rational_from_json(x, where));
    return v;
  };
  auto value = [](const nlohmann::json& e, const std::string& where) {
    const int v = e.at("value").get<int>();
    if (v != 1 && v != -1) throw InputError(InputErrorKind::BadSchema, where + ": value must be 1 or -1");
    return v;
  };
  using PiKey = std::pair<RatVector, RatVector>;
  auto pi = std::make_shared<std::map<PiKey, int>>();
  auto cc = std::make_shared<std::map<std::pair<std::uint32_t, RatVector>, int>>();
  try {
    for (const auto& e : doc.value("pi", nlohmann::json::array())) {
      RatVector mu = vec(e.at("two_mu"), "oracle pi two_mu");
      for (auto& x : mu) x /= 2;
      (*pi)[{coset_key(vec(e.at("lambda"), "oracle pi lambda")), coset_key(mu)}] = value(e, "oracle pi");
    }
    for (const auto& e : doc.value("c_chi", nlohmann::json::array()))
      (*cc)[{e.at("chi").get<std::uint32_t>(), coset_key(vec(e.at("lambda"), "oracle c_chi lambda"))}] = value(e, "oracle c_chi");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(InputErrorKind::BadSchema, std::string("oracle: ") + e.what());
  }
  SignOracle o;
  o.pi = [pi](const DualVector& lambda, const LatticeVector& two_mu) {
    RatVector mu(two_mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = Rational(two_mu[i]) / 2;
    auto it = pi->find({coset_key(lambda), coset_key(mu)});
    return it == pi->end() ? 0 : it->second;
  };
  o.c_chi = [cc](std::uint32_t chi, const DualVector& lambda) {
    auto it = cc->find({chi, coset_key(lambda)});
    return it == cc->end() ? 0 : it->second;
  };
  return o;
}

}  // namespace vlplus
