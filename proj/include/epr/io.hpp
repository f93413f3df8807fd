#pragma once

// JSON/CSV interchange. Complex numbers are two-element arrays [re, im].
//
//   state:      { "dim1": d1, "dim2": d2, "coeffs": [[ [re,im], ... ], ...] }   (d1 rows)
//   observable: { "dim": d, "matrix": [[ [re,im], ... ], ...] }

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "epr/continuum.hpp"
#include "epr/epr_analysis.hpp"
#include "epr/measurement.hpp"
#include "epr/numerics.hpp"
#include "epr/tensor.hpp"

namespace epr::io {

using nlohmann::json;

/// Shortest round-trip decimal form, identical across runs.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline double parse_real(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  // Non-finite values have no JSON literal; accept the usual spellings so
  // they can be reported as invariant violations rather than parse errors.
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "NaN" || s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::SchemaError, where + ": expected a number");
}

inline std::size_t parse_dim(const json& obj, const char* key) {
  if (!obj.contains(key)) throw Error(ErrorCode::SchemaError, std::string("missing field '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw Error(ErrorCode::SchemaError, std::string("field '") + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

}  // namespace detail

inline cplx complex_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::SchemaError, where + ": complex entries are [re, im]");
  return {detail::parse_real(v[0], where), detail::parse_real(v[1], where)};
}

inline ComplexMatrix matrix_from_json(const json& v, std::size_t rows, std::size_t cols, const std::string& field) {
  if (!v.is_array() || v.size() != rows)
    throw Error(ErrorCode::SchemaError, "field '" + field + "' must have " + std::to_string(rows) + " rows");
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!v[i].is_array() || v[i].size() != cols)
      throw Error(ErrorCode::SchemaError, "field '" + field + "' row " + std::to_string(i) + " must have " +
                                              std::to_string(cols) + " entries");
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = complex_from_json(v[i][j], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  if (!m.all_finite()) throw Error(ErrorCode::InvariantError, "field '" + field + "' has a non-finite entry");
  return m;
}

inline json to_json(const PureState& s) {
  return {{"dim1", s.dim1()}, {"dim2", s.dim2()}, {"coeffs", to_json(s.coeffs())}};
}

inline json to_json(const Observable& o) { return {{"dim", o.dim()}, {"matrix", to_json(o.matrix())}}; }

inline PureState state_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "state must be a JSON object");
  const auto d1 = detail::parse_dim(j, "dim1");
  const auto d2 = detail::parse_dim(j, "dim2");
  if (!j.contains("coeffs")) throw Error(ErrorCode::SchemaError, "missing field 'coeffs'");
  PureState s(matrix_from_json(j.at("coeffs"), d1, d2, "coeffs"));
  if (!s.is_normalized())
    throw Error(ErrorCode::InvariantError, "state normalization: norm is " + format_double(s.norm()));
  return s;
}

inline Observable observable_from_json(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "observable must be a JSON object");
  const auto d = detail::parse_dim(j, "dim");
  if (!j.contains("matrix")) throw Error(ErrorCode::SchemaError, "missing field 'matrix'");
  auto m = matrix_from_json(j.at("matrix"), d, d, "matrix");
  const double defect = hermiticity_defect(m);
  if (defect > tol.zero_threshold * (1.0 + frobenius_norm(m)))
    throw Error(ErrorCode::InvariantError, "matrix is not Hermitian (Hermiticity defect ||M - M^dagger|| = " +
                                               format_double(defect) + ")");
  return Observable(std::move(m), tol);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

inline PureState load_state(const std::string& path) { return state_from_json(read_json_file(path)); }
inline Observable load_observable(const std::string& path, const Tolerances& tol = {}) {
  return observable_from_json(read_json_file(path), tol);
}

inline json to_json(const SchmidtDecomposition& d) {
  json table = json::array();
  for (std::size_t j = 0; j < d.lambdas.size(); ++j) table.push_back({{"lambda", d.lambdas[j]}, {"mult", d.mults[j]}});
  std::vector<std::size_t> mults(d.mults.begin(), d.mults.end());
  return {{"lambdas", d.lambdas},
          {"mults", mults},
          {"table", table},
          {"kernel_dim", d.kernel_basis.cols()},
          {"weighted_sum", d.weighted_sum()},
          {"is_maximal", d.is_maximal()},
          {"imbedding", to_json(d.imbedding.matrix())}};
}

inline json to_json(const EprReport& r) {
  json per = json::array();
  for (const auto& v : r.per_observable)
    per.push_back({{"id", v.id}, {"commutator_norm", v.commutator_norm}, {"threshold", v.threshold}, {"verdict", v.passed}});
  return {{"is_epr", r.is_epr}, {"observables", per}, {"decomposition", to_json(r.decomposition)}};
}

inline json to_json(const DiscreteJointDistribution& p) {
  json pts = json::array();
  for (const auto& pt : p.support) pts.push_back({{"a", pt.a}, {"b", pt.b}, {"p", pt.p}});
  return {{"support", pts}, {"total", p.total()}};
}

inline std::string to_csv(const DiscreteJointDistribution& p) {
  std::ostringstream out;
  out << "a,b,p\n";
  for (const auto& pt : p.support) out << format_double(pt.a) << ',' << format_double(pt.b) << ',' << format_double(pt.p) << '\n';
  return out.str();
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "N,epsilon,pairing,target,abs_error\n";
  for (const auto& r : rows)
    out << r.n << ',' << format_double(r.epsilon) << ',' << format_double(r.pairing) << ',' << format_double(r.target) << ','
        << format_double(r.abs_error) << '\n';
  return out.str();
}

}  // namespace epr::io
