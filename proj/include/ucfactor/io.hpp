#pragma once

// JSON problem files and report serialization. Complex numbers are always
// two-element arrays [re, im].

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ucfactor/splitting.hpp"

namespace ucfactor::io {

using nlohmann::json;

class InputError : public Error {
 public:
  using Error::Error;
};

struct Certificate {
  Weights v;
  DenseMatrix X;
  std::optional<double> gap;
};

struct ProblemFile {
  Eigen::Index dim = 0;
  std::optional<VectorSequence> phi;
  std::optional<VectorSequence> psi;
  std::optional<ScalarSequence> m;
  std::optional<std::vector<HVector>> witness;
  std::optional<std::vector<HVector>> measure_points;
  std::optional<std::vector<double>> measure_weights;
  std::optional<VectorSequence> basis;
  std::optional<DenseMatrix> op;
  std::optional<Certificate> certificate;
};

// ---------------------------------------------------------------------------
// Parsing

inline Complex parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError(where + ": complex numbers must be [re, im] arrays");
  const Complex z(j[0].get<double>(), j[1].get<double>());
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw InputError(where + ": non-finite entry");
  return z;
}

inline HVector parse_vector(const json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": vector must be an array of [re, im] pairs");
  if (static_cast<Eigen::Index>(j.size()) != dim)
    throw InputError(where + ": expected " + std::to_string(dim) + " entries, got " +
                     std::to_string(j.size()));
  HVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    v(i) = parse_complex(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  return v;
}

inline std::vector<HVector> parse_vectors(const json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of vectors");
  std::vector<HVector> out;
  out.reserve(j.size());
  for (std::size_t n = 0; n < j.size(); ++n)
    out.push_back(parse_vector(j[n], dim, where + "[" + std::to_string(n) + "]"));
  return out;
}

inline VectorSequence parse_sequence(const json& j, Eigen::Index dim, const std::string& where) {
  auto v = parse_vectors(j, dim, where);
  if (v.empty()) throw InputError(where + ": sequence must not be empty");
  return VectorSequence(std::move(v));
}

inline DenseMatrix parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                                const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw InputError(where + ": expected " + std::to_string(rows) + " rows");
  DenseMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    m.row(r) = parse_vector(j[static_cast<std::size_t>(r)], cols,
                            where + "[" + std::to_string(r) + "]")
                   .transpose();
  return m;
}

inline ProblemFile parse_problem(const json& doc) {
  if (!doc.is_object()) throw InputError("problem: top level must be an object");
  ProblemFile p;
  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1)
    throw InputError("problem: 'dim' must be a positive integer");
  p.dim = static_cast<Eigen::Index>(doc["dim"].get<long long>());
  try {
    if (doc.contains("phi")) p.phi = parse_sequence(doc["phi"], p.dim, "phi");
    if (doc.contains("psi")) p.psi = parse_sequence(doc["psi"], p.dim, "psi");
    if (doc.contains("m")) {
      const json& jm = doc["m"];
      if (!jm.is_array()) throw InputError("m: expected an array of [re, im] pairs");
      ScalarSequence m(static_cast<Eigen::Index>(jm.size()));
      for (std::size_t n = 0; n < jm.size(); ++n)
        m(static_cast<Eigen::Index>(n)) = parse_complex(jm[n], "m[" + std::to_string(n) + "]");
      p.m = std::move(m);
    }
    if (doc.contains("witness")) p.witness = parse_vectors(doc["witness"], p.dim, "witness");
    if (doc.contains("measure")) {
      const json& mu = doc["measure"];
      if (!mu.is_object() || !mu.contains("points") || !mu.contains("weights"))
        throw InputError("measure: expected {points, weights}");
      p.measure_points = parse_vectors(mu["points"], p.dim, "measure.points");
      const json& w = mu["weights"];
      if (!w.is_array()) throw InputError("measure.weights: expected an array of reals");
      std::vector<double> weights;
      for (const auto& x : w) {
        if (!x.is_number()) throw InputError("measure.weights: entries must be numbers");
        weights.push_back(x.get<double>());
      }
      if (weights.size() != p.measure_points->size())
        throw InputError("measure: points and weights differ in length");
      double total = 0.0;
      for (double x : weights) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw InputError("measure.weights: must be nonnegative");
        total += x;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw InputError("measure.weights: must sum to 1 (got " + std::to_string(total) + ")");
      for (double& x : weights) x /= total;
      p.measure_weights = std::move(weights);
    }
    if (doc.contains("basis")) p.basis = parse_sequence(doc["basis"], p.dim, "basis");
    if (doc.contains("operator")) p.op = parse_matrix(doc["operator"], p.dim, p.dim, "operator");
    if (doc.contains("certificate")) {
      const json& c = doc["certificate"];
      if (!c.is_object() || !c.contains("v") || !c.contains("X"))
        throw InputError("certificate: expected {v, X, gap}");
      const json& jv = c["v"];
      if (!jv.is_array()) throw InputError("certificate.v: expected an array of reals");
      Certificate cert;
      cert.v = Weights(static_cast<Eigen::Index>(jv.size()));
      for (std::size_t i = 0; i < jv.size(); ++i) {
        if (!jv[i].is_number()) throw InputError("certificate.v: entries must be numbers");
        cert.v(static_cast<Eigen::Index>(i)) = jv[i].get<double>();
      }
      cert.X = parse_matrix(c["X"], cert.v.size(), cert.v.size(), "certificate.X");
      if (c.contains("gap") && c["gap"].is_number()) cert.gap = c["gap"].get<double>();
      p.certificate = std::move(cert);
    }
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  } catch (const json::exception& e) {
    throw InputError(std::string("problem: ") + e.what());
  }
  return p;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

/// 64-bit FNV-1a, hex encoded.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

// ---------------------------------------------------------------------------
// Serialization

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const HVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

inline json to_json(const VectorSequence& seq) {
  json a = json::array();
  for (const auto& v : seq) a.push_back(to_json(v));
  return a;
}

inline json vectors_to_json(const std::vector<HVector>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(to_json(v));
  return a;
}

inline json to_json(const Weights& w) {
  json a = json::array();
  for (Eigen::Index i = 0; i < w.size(); ++i) a.push_back(w(i));
  return a;
}

inline json matrix_to_json(const DenseMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(to_json(HVector(m.row(r).transpose())));
  return rows;
}

inline json scalars_to_json(const ScalarSequence& s) { return to_json(HVector(s)); }

inline json signs_to_json(const SignPattern& eps) {
  json a = json::array();
  for (int e : eps) a.push_back(e);
  return a;
}

inline json certificate_to_json(const PietschSolution& sol) {
  return json{{"v", to_json(sol.v)},
              {"X", matrix_to_json(sol.dualX)},
              {"gap", sol.gap},
              {"pi2_sq", sol.pi2_sq},
              {"certified", sol.certified},
              {"iterations", sol.iterations}};
}

}  // namespace ucfactor::io
