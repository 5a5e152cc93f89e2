#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsm/common.hpp"
#include "drsm/conic.hpp"
#include "drsm/instances.hpp"
#include "drsm/objectives.hpp"
#include "drsm/verify.hpp"

namespace drsm {

using nlohmann::json;

constexpr int kInstanceSchemaVersion = 1;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

namespace detail {

inline const json& field(const json& j, const char* name, const char* context) {
  auto it = j.find(name);
  if (it == j.end())
    throw SchemaError(std::string(context) + ": missing field \"" + name + "\"");
  return *it;
}

inline Matrix matrix_from_json(const json& j, const char* context) {
  if (!j.is_array()) throw SchemaError(std::string(context) + ": expected an array of rows");
  std::size_t rows = j.size();
  std::size_t cols = rows > 0 ? j[0].size() : 0;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw SchemaError(std::string(context) + ": ragged matrix rows");
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

inline json polytope_to_json(const DownClosedPolytope& p) {
  return json{{"A", detail::matrix_to_json(p.a())},
              {"b", p.b()},
              {"ubar", p.ubar()},
              {"nu", p.nu()}};
}

inline DownClosedPolytope polytope_from_json(const json& j) {
  Matrix a = detail::matrix_from_json(detail::field(j, "A", "polytope"), "polytope A");
  Vec b = detail::field(j, "b", "polytope").get<Vec>();
  Vec ubar = detail::field(j, "ubar", "polytope").get<Vec>();
  if (a.rows() > 0 && a.cols() != ubar.size())
    throw SchemaError("polytope: A column count does not match ubar");
  return DownClosedPolytope(std::move(a), std::move(b), std::move(ubar));
}

inline json objective_to_json(const Objective& obj) {
  if (const auto* q = dynamic_cast<const QuadraticObjective*>(&obj)) {
    return json{{"kind", "quadratic"},
                {"H", detail::matrix_to_json(q->quad_matrix())},
                {"h", q->linear_term()},
                {"c", q->offset()},
                {"ubar", q->box_hi()}};
  }
  if (const auto* s = dynamic_cast<const SoftmaxObjective*>(&obj)) {
    return json{{"kind", "softmax"}, {"kernel", detail::matrix_to_json(s->kernel())}};
  }
  if (const auto* m = dynamic_cast<const MeanFieldKLObjective*>(&obj)) {
    return json{{"kind", "meanfield"},
                {"n", m->dim()},
                {"table", m->table()},
                {"delta", m->delta()}};
  }
  if (const auto* l = dynamic_cast<const LogisticObjective*>(&obj)) {
    std::vector<int> alpha = infer_sign_vector(l->data()).alpha;
    return json{{"kind", "logistic"},
                {"data", detail::matrix_to_json(l->data())},
                {"labels", l->labels()},
                {"lambda", l->lambda()},
                {"regularizer", l->regularizer() == RegularizerKind::SmoothRational
                                    ? "smooth-rational"
                                    : "capped-quadratic"},
                {"gamma", l->gamma()},
                {"ybox", l->ybox()},
                {"alpha", alpha}};
  }
  throw SchemaError("objective_to_json: unsupported objective kind " + obj.kind());
}

inline std::shared_ptr<Objective> objective_from_json(const json& j) {
  std::string kind = detail::field(j, "kind", "objective").get<std::string>();
  if (kind == "quadratic") {
    Matrix h = detail::matrix_from_json(detail::field(j, "H", "quadratic"), "quadratic H");
    Vec hv = detail::field(j, "h", "quadratic").get<Vec>();
    double c = detail::field(j, "c", "quadratic").get<double>();
    Vec ubar = detail::field(j, "ubar", "quadratic").get<Vec>();
    // DR sign condition is deliberately not enforced on load: verifying it is
    // the point of the verify suites, and planted violations must be loadable
    return std::make_shared<QuadraticObjective>(std::move(h), std::move(hv), c,
                                                std::move(ubar), /*require_dr=*/false);
  }
  if (kind == "softmax") {
    Matrix k = detail::matrix_from_json(detail::field(j, "kernel", "softmax"),
                                        "softmax kernel");
    return std::make_shared<SoftmaxObjective>(std::move(k));
  }
  if (kind == "meanfield") {
    std::size_t n = detail::field(j, "n", "meanfield").get<std::size_t>();
    Vec table = detail::field(j, "table", "meanfield").get<Vec>();
    double delta = detail::field(j, "delta", "meanfield").get<double>();
    return std::make_shared<MeanFieldKLObjective>(n, std::move(table), delta);
  }
  if (kind == "logistic") {
    Matrix data = detail::matrix_from_json(detail::field(j, "data", "logistic"),
                                           "logistic data");
    Vec labels = detail::field(j, "labels", "logistic").get<Vec>();
    double lambda = detail::field(j, "lambda", "logistic").get<double>();
    std::string reg = detail::field(j, "regularizer", "logistic").get<std::string>();
    RegularizerKind kind_enum;
    if (reg == "smooth-rational") {
      kind_enum = RegularizerKind::SmoothRational;
    } else if (reg == "capped-quadratic") {
      kind_enum = RegularizerKind::CappedQuadratic;
    } else {
      throw SchemaError("logistic: unknown regularizer \"" + reg + "\"");
    }
    double gamma = detail::field(j, "gamma", "logistic").get<double>();
    Vec ybox = detail::field(j, "ybox", "logistic").get<Vec>();
    return std::make_shared<LogisticObjective>(std::move(data), std::move(labels), lambda,
                                               kind_enum, gamma, std::move(ybox));
  }
  throw SchemaError("objective: unknown kind \"" + kind + "\"");
}

inline json instance_to_json(const Instance& inst) {
  return json{{"schema", kInstanceSchemaVersion},
              {"generator", inst.generator},
              {"seed", inst.seed},
              {"params",
               json{{"n", inst.params.n},
                    {"m", inst.params.m},
                    {"nu", inst.params.nu},
                    {"b_scale", inst.params.b_scale},
                    {"distribution", inst.params.distribution}}},
              {"objective", objective_to_json(*inst.objective)},
              {"polytope", polytope_to_json(inst.polytope)}};
}

inline Instance instance_from_json(const json& j) {
  int version = detail::field(j, "schema", "instance").get<int>();
  if (version != kInstanceSchemaVersion)
    throw SchemaError("instance: schema version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kInstanceSchemaVersion) + ")");
  const json& params = detail::field(j, "params", "instance");
  Instance inst{
      objective_from_json(detail::field(j, "objective", "instance")),
      polytope_from_json(detail::field(j, "polytope", "instance")),
      detail::field(j, "generator", "instance").get<std::string>(),
      detail::field(j, "seed", "instance").get<std::uint64_t>(),
      InstanceParams{detail::field(params, "n", "params").get<std::size_t>(),
                     detail::field(params, "m", "params").get<std::size_t>(),
                     detail::field(params, "nu", "params").get<double>(),
                     detail::field(params, "b_scale", "params").get<double>(),
                     detail::field(params, "distribution", "params").get<std::string>()}};
  return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_instance: cannot open " + path);
  out << instance_to_json(inst).dump(2) << '\n';
  if (!out) throw std::runtime_error("save_instance: write failed for " + path);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_instance: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError("load_instance: malformed JSON in " + path + ": " + e.what());
  }
  return instance_from_json(j);
}

inline json report_to_json(const CheckReport& r) {
  json violations = json::array();
  for (const Violation& v : r.violations)
    violations.push_back(json{{"location", v.location}, {"excess", v.excess}});
  return json{{"check", r.check},
              {"seed", r.seed},
              {"tolerance", r.tolerance},
              {"checks_run", r.checks_run},
              {"hypothesis_failures", r.hypothesis_failures},
              {"max_excess", r.max_excess},
              {"pass", r.pass()},
              {"violations", std::move(violations)}};
}

inline json kalpha_report_to_json(const KalphaReport& r) {
  json violations = json::array();
  for (const KalphaViolation& v : r.worst)
    violations.push_back(json{{"i", v.i}, {"j", v.j}, {"excess", v.excess}});
  return json{{"check", "kalpha"},
              {"samples", r.samples},
              {"offdiag_violations", r.offdiag_violations},
              {"diag_violations", r.diag_violations},
              {"max_excess", r.max_excess},
              {"pass", r.offdiag_violations == 0},
              {"violations", std::move(violations)}};
}

/// Trace CSV: one row per iteration, RFC-4180 fields, LF line endings.
/// gamma is empty on the final row; g is empty where not computed.
inline void write_trace_csv(std::ostream& out, const Trace& trace,
                            const std::vector<std::string>& header_comments = {},
                            bool column_header = true) {
  for (const std::string& line : header_comments) out << "# " << line << '\n';
  if (column_header) out << "k,t,gamma,f,g\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << k << ',' << format_double(trace.ts[k]) << ',';
    if (k < trace.gammas.size()) out << format_double(trace.gammas[k]);
    out << ',' << format_double(trace.values[k]) << ',';
    if (k < trace.gs.size() && !std::isnan(trace.gs[k])) out << format_double(trace.gs[k]);
    out << '\n';
  }
}

inline json trace_to_json(const Trace& trace) {
  json gs = json::array();
  for (double g : trace.gs) {
    if (std::isnan(g))
      gs.push_back(nullptr);
    else
      gs.push_back(g);
  }
  return json{{"iterates", trace.iterates}, {"directions", trace.directions},
              {"gammas", trace.gammas},     {"ts", trace.ts},
              {"values", trace.values},     {"gs", std::move(gs)}};
}

}  // namespace drsm
