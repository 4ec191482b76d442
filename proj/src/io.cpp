#include "timeless/io.hpp"

#include "timeless/csv.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace timeless::io {

namespace {

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument("complex entry must be [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

WindowKind window_kind_from_string(const std::string& name) {
  if (name == "indicator") return WindowKind::Indicator;
  if (name == "delta") return WindowKind::Delta;
  if (name == "gaussian") return WindowKind::Gaussian;
  throw std::invalid_argument("unknown window kind '" + name + "'");
}

}  // namespace

Json to_json(const COperator& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

COperator operator_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  COperator m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw DimensionError("matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  require_finite(m, "matrix");
  return m;
}

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

CVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("vector must be a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  require_finite(v, "vector");
  return v;
}

Json to_json(const WindowFunction& w) {
  switch (w.kind()) {
    case WindowKind::Indicator:
      return {{"kind", "indicator"}, {"a", w.a()}, {"b", w.b()}, {"height", w.scale()}};
    case WindowKind::Delta:
      return {{"kind", "delta"}, {"offset", w.offset()}, {"weight", w.scale()}};
    case WindowKind::Gaussian:
      return {{"kind", "gaussian"}, {"offset", w.offset()}, {"sigma", w.sigma()}, {"normalization", w.scale()}};
  }
  throw std::logic_error("unhandled window kind");
}

WindowFunction window_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("window must be an object");
  switch (window_kind_from_string(j.at("kind").get<std::string>())) {
    case WindowKind::Indicator: {
      const double a = j.at("a").get<double>();
      const double b = j.at("b").get<double>();
      if (j.value("unit_strength", false)) return WindowFunction::unit_indicator(a, b);
      return WindowFunction::indicator(a, b, j.value("height", 1.0));
    }
    case WindowKind::Delta:
      return WindowFunction::delta(j.value("offset", 0.0), j.value("weight", 1.0));
    case WindowKind::Gaussian:
      return WindowFunction::gaussian(j.value("offset", 0.0), j.at("sigma").get<double>(),
                                      j.value("normalization", 1.0));
  }
  throw std::logic_error("unhandled window kind");
}

Json to_json(const InteractionSchedule& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms()) {
    terms.push_back({{"window", to_json(t.window)}, {"center", t.center}, {"coupling", to_json(t.coupling)}});
  }
  Json out = {{"system_dim", s.system_dim()}, {"ancilla_dims", s.ancilla_dims()}, {"terms", terms}};
  if (s.has_free_hamiltonian()) out["free_hamiltonian"] = to_json(s.free_hamiltonian());
  return out;
}

InteractionSchedule schedule_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("schedule must be an object");
  const auto system_dim = j.at("system_dim").get<Eigen::Index>();
  const auto ancilla_dims = j.value("ancilla_dims", std::vector<Eigen::Index>{});
  InteractionSchedule schedule = j.contains("free_hamiltonian")
                                     ? InteractionSchedule(system_dim, ancilla_dims,
                                                           operator_from_json(j.at("free_hamiltonian")))
                                     : InteractionSchedule(system_dim, ancilla_dims);
  for (const auto& term : j.value("terms", Json::array())) {
    schedule.add_term(window_from_json(term.at("window")), term.at("center").get<double>(),
                      operator_from_json(term.at("coupling")));
  }
  return schedule;
}

Json steps_to_json(const std::vector<COperator>& steps) {
  Json out = Json::array();
  for (const auto& u : steps) out.push_back(to_json(u));
  return out;
}

std::vector<COperator> steps_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("step list must be an array");
  std::vector<COperator> steps;
  for (const auto& u : j) steps.push_back(operator_from_json(u));
  return steps;
}

Json to_json(const BornSeriesReport& report) {
  Json out;
  out["orders_used"] = report.orders_used;
  out["converged"] = report.converged;
  out["residual"] = std::isfinite(report.residual) ? Json(report.residual) : Json(nullptr);
  out["term_norms"] = report.term_norms;
  out["ratios"] = report.ratios();
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const Eigen::Index dim = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  out << 't';
  for (Eigen::Index i = 0; i < dim; ++i) out << ",re_" << i << ",im_" << i;
  out << ",norm,denominator\n";
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const CVector& psi = trajectory.states[k];
    out << csv::num(trajectory.grid[k]);
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << csv::num(psi(i).real()) << ',' << csv::num(psi(i).imag());
    out << ',' << csv::num(psi.norm()) << ',' << csv::num(psi.squaredNorm()) << '\n';
  }
}

}  // namespace timeless::io
