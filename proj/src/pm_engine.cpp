#include "timeless/pm_engine.hpp"

#include "timeless/to_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace timeless {

namespace {

constexpr double kPi = std::numbers::pi;

struct Nodes {
  std::vector<double> t;
  std::vector<double> w;
  std::vector<COperator> k;
  std::size_t size() const { return t.size(); }
};

Nodes build_nodes(const InteractionSchedule& schedule, double spacing) {
  struct Segment {
    double lo;
    double hi;
    std::vector<std::size_t> terms;
  };
  std::vector<Segment> raw;
  Nodes nodes;
  const auto& terms = schedule.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& term = terms[i];
    if (term.window.kind() == WindowKind::Delta) {
      nodes.t.push_back(term.center + term.window.offset());
      nodes.w.push_back(term.window.scale());
      nodes.k.push_back(term.coupling);
      continue;
    }
    const auto [a, b] = term.window.support();
    raw.push_back({term.center + a, term.center + b, {i}});
  }
  std::sort(raw.begin(), raw.end(), [](const Segment& x, const Segment& y) { return x.lo < y.lo; });
  std::vector<Segment> merged;
  for (auto& s : raw) {
    if (!merged.empty() && s.lo < merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, s.hi);
      merged.back().terms.insert(merged.back().terms.end(), s.terms.begin(), s.terms.end());
    } else {
      merged.push_back(std::move(s));
    }
  }
  for (const auto& seg : merged) {
    const TimeGrid g = TimeGrid::with_max_spacing(seg.lo, seg.hi, spacing);
    for (std::size_t j = 0; j < g.size(); ++j) {
      COperator k = COperator::Zero(schedule.dim(), schedule.dim());
      for (auto i : seg.terms) k += terms[i].window.interior_value(g[j] - terms[i].center) * terms[i].coupling;
      nodes.t.push_back(g[j]);
      nodes.w.push_back(g.weight(j));
      nodes.k.push_back(std::move(k));
    }
  }
  return nodes;
}

// F(t, tau) and its derivative f(t, tau) = dF/dt.
struct Kernel {
  StepKernel step;
  std::optional<ClockModel> periodic;

  Complex F(double t, double tau) const {
    if (periodic) return periodic_kernel(*periodic, t, tau);
    return step.step(t - tau);
  }
  Complex f(double t, double tau) const {
    if (periodic) {
      const RVector e = periodic->levels();
      Complex sum = 0.0;
      for (Eigen::Index n = 0; n < e.size(); ++n) sum += std::exp(kI * e(n) * (t - tau));
      return periodic->normalization() / periodic->dimension() * sum;
    }
    return step.overlap(t - tau);
  }
};

Kernel kernel_of(const Trajectory& tr) { return {tr.kernel, tr.periodic_clock}; }

double default_spacing(const StepKernel& kernel) { return kernel.is_ideal() ? 1e-3 : 0.01 / kernel.energy(); }

void check_state(const InteractionSchedule& schedule, const CVector& psi0, const char* what) {
  if (psi0.size() != schedule.dim()) throw DimensionError(std::string(what) + ": psi0 dimension mismatch");
  require_finite(psi0, "psi0");
  if (schedule.has_free_hamiltonian()) {
    throw std::invalid_argument(std::string(what) + ": the free Hamiltonian must be zero");
  }
}

Trajectory base_trajectory(const Kernel& kernel, const InteractionSchedule& schedule, const TimeGrid& grid) {
  Trajectory tr{grid, {}, kernel.step, schedule.factor_dims(), COperator::Zero(schedule.dim(), schedule.dim())};
  tr.periodic_clock = kernel.periodic;
  tr.schedule = schedule;
  return tr;
}

double max_column_norm(const COperator& m) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) worst = std::max(worst, m.col(c).norm());
  return worst;
}

void finish_report(Trajectory& tr, BornSeriesReport& report) {
  try {
    report.residual = evolution_residual(tr);
  } catch (const std::invalid_argument&) {
    report.residual = std::numeric_limits<double>::quiet_NaN();
  }
}

std::pair<Trajectory, BornSeriesReport> solve_series(const Kernel& kernel, const InteractionSchedule& schedule,
                                                     const CVector& psi0, const TimeGrid& grid,
                                                     const BornOptions& options) {
  if (!(options.tolerance > 0.0) || options.max_order < 0) throw std::invalid_argument("born series: bad options");
  const double spacing = options.node_spacing > 0.0 ? options.node_spacing : default_spacing(kernel.step);
  const Nodes nodes = build_nodes(schedule, spacing);
  const auto m = static_cast<Eigen::Index>(nodes.size());
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index dim = psi0.size();

  // a(j, l) = w_l F(t_j, t_l), b(i, l) = w_l F(grid_i, t_l).
  COperator a(m, m);
  COperator b(n, m);
#pragma omp parallel for schedule(static) if (options.parallel)
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index l = 0; l < m; ++l) a(j, l) = nodes.w[l] * kernel.F(nodes.t[j], nodes.t[l]);
  }
#pragma omp parallel for schedule(static) if (options.parallel)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < m; ++l) b(i, l) = nodes.w[l] * kernel.F(grid[static_cast<std::size_t>(i)], nodes.t[l]);
  }

  BornSeriesReport report;
  COperator term = psi0.replicate(1, m);
  COperator at_nodes = term;
  COperator kterm(dim, m);
  for (int order = 1; order <= options.max_order && m > 0; ++order) {
    for (Eigen::Index l = 0; l < m; ++l) kterm.col(l) = nodes.k[l] * term.col(l);
    COperator next = -kI * (kterm * a.transpose());
    const COperator on_grid = -kI * (kterm * b.transpose());
    const double norm = std::max(max_column_norm(next), max_column_norm(on_grid));
    report.term_norms.push_back(norm);
    report.orders_used = order;
    if (!std::isfinite(norm)) break;
    at_nodes += next;
    term = std::move(next);
    if (norm < options.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (m == 0) report.converged = true;

  Trajectory tr = base_trajectory(kernel, schedule, grid);
  SolutionRepresentation rep{nodes.t, nodes.w, nodes.k, {}, psi0};
  for (Eigen::Index l = 0; l < m; ++l) rep.node_states.push_back(at_nodes.col(l));
  COperator kpsi(dim, m);
  for (Eigen::Index l = 0; l < m; ++l) kpsi.col(l) = nodes.k[l] * at_nodes.col(l);
  const COperator states = psi0.replicate(1, n) - kI * (kpsi * b.transpose());
  for (Eigen::Index i = 0; i < n; ++i) tr.states.push_back(states.col(i));
  tr.representation = std::move(rep);
  finish_report(tr, report);
  return {std::move(tr), std::move(report)};
}

}  // namespace

CVector Trajectory::at(double t) const {
  if (evaluator) return evaluator(t);
  if (representation) {
    const auto& rep = *representation;
    const Kernel kernel = kernel_of(*this);
    CVector out = rep.psi0;
    for (std::size_t l = 0; l < rep.nodes.size(); ++l) {
      out -= kI * rep.weights[l] * kernel.F(t, rep.nodes[l]) * (rep.couplings[l] * rep.node_states[l]);
    }
    return out;
  }
  if (t <= grid.t_min()) return states.front();
  if (t >= grid.t_max()) return states.back();
  const double x = (t - grid.t_min()) / grid.spacing();
  const auto i = std::min(static_cast<std::size_t>(x), states.size() - 2);
  const double frac = x - static_cast<double>(i);
  return (1.0 - frac) * states[i] + frac * states[i + 1];
}

double Trajectory::max_norm_deviation() const {
  double worst = 0.0;
  for (const auto& s : states) worst = std::max(worst, std::abs(s.norm() - 1.0));
  return worst;
}

std::vector<double> BornSeriesReport::ratios() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < term_norms.size(); ++i) {
    out.push_back(term_norms[i - 1] > 0.0 ? term_norms[i] / term_norms[i - 1] : 0.0);
  }
  return out;
}

Trajectory pm_ideal_history(const COperator& h_s, const std::vector<Eigen::Index>& ancilla_dims,
                            std::vector<PurifiedEvent> events, const CVector& psi0, const TimeGrid& grid) {
  require_hermitian(h_s, 1e-10, "H_S");
  std::vector<Eigen::Index> dims{h_s.rows()};
  dims.insert(dims.end(), ancilla_dims.begin(), ancilla_dims.end());
  const Eigen::Index dim = product(dims);
  if (psi0.size() != dim) throw DimensionError("pm_ideal_history: psi0 dimension mismatch");

  std::sort(events.begin(), events.end(), [](const auto& x, const auto& y) { return x.time < y.time; });
  std::vector<std::pair<double, COperator>> applied;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& ev = events[i];
    if (i > 0 && std::abs(ev.time - events[i - 1].time) < 1e-12) {
      throw std::invalid_argument("pm_ideal_history: coincident event times");
    }
    if (ev.ancilla >= ancilla_dims.size()) throw DimensionError("pm_ideal_history: no such ancilla");
    if (!is_unitary(ev.unitary)) throw std::invalid_argument("pm_ideal_history: event operator is not unitary");
    const std::size_t targets[] = {0, ev.ancilla + 1};
    applied.emplace_back(ev.time, embed(ev.unitary, dims, targets));
  }

  const COperator h = kron(h_s, identity(dim / h_s.rows()));
  const HermitianEigen eig = hermitian_eigen(h);
  auto propagate = [eig](double t) {
    CVector phases(eig.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases(i) = std::exp(-kI * eig.values(i) * t);
    return COperator(eig.vectors * phases.asDiagonal() * eig.vectors.adjoint());
  };
  auto evaluate = [applied, propagate, psi0](double t) {
    CVector psi = psi0;
    double now = 0.0;
    for (const auto& [tau, v] : applied) {
      if (tau > t) break;
      psi = v * (propagate(tau - now) * psi);
      now = tau;
    }
    return CVector(propagate(t - now) * psi);
  };

  Trajectory tr{grid, {}, StepKernel::ideal(), dims, h};
  for (std::size_t i = 0; i < grid.size(); ++i) tr.states.push_back(evaluate(grid[i]));
  tr.evaluator = evaluate;
  return tr;
}

Trajectory ideal_schedule_solve(const InteractionSchedule& schedule, const CVector& psi0, const TimeGrid& grid) {
  check_state(schedule, psi0, "ideal_schedule_solve");
  if (schedule.has_delta_terms()) throw std::invalid_argument("ideal_schedule_solve: delta windows not supported");

  std::vector<double> breaks;
  double finest = std::numeric_limits<double>::infinity();
  for (const auto& term : schedule.terms()) {
    const auto [a, b] = term.window.support();
    breaks.push_back(term.center + a);
    breaks.push_back(term.center + b);
    if (term.window.kind() == WindowKind::Gaussian) finest = std::min(finest, term.window.sigma() / 200.0);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto evaluate = [schedule, breaks, finest, psi0](double t) {
    CVector psi = psi0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      const double lo = breaks[p];
      const double hi = std::min(breaks[p + 1], t);
      if (hi <= lo) break;
      const double len = hi - lo;
      const auto steps = std::isfinite(finest) ? static_cast<int>(std::ceil(len / finest)) : 1;
      const double h = len / steps;
      for (int s = 0; s < steps; ++s) {
        psi = expm_hermitian_generator(schedule.coupling_at(lo + (s + 0.5) * h), h) * psi;
      }
    }
    return psi;
  };

  Trajectory tr = base_trajectory({StepKernel::ideal(), std::nullopt}, schedule, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) tr.states.push_back(evaluate(grid[i]));
  tr.evaluator = evaluate;
  return tr;
}

std::pair<Trajectory, BornSeriesReport> born_series_solve(const StepKernel& kernel,
                                                          const InteractionSchedule& schedule,
                                                          const CVector& psi0, const TimeGrid& grid,
                                                          const BornOptions& options) {
  check_state(schedule, psi0, "born_series_solve");
  return solve_series({kernel, std::nullopt}, schedule, psi0, grid, options);
}

std::pair<Trajectory, BornSeriesReport> born_series_solve(const ClockModel& clock,
                                                          const InteractionSchedule& schedule,
                                                          const CVector& psi0, const TimeGrid& grid,
                                                          const BornOptions& options) {
  return born_series_solve(StepKernel::bandlimited(clock.energy()), schedule, psi0, grid, options);
}

std::pair<Trajectory, BornSeriesReport> born_series_solve_reference(const StepKernel& kernel,
                                                                    const InteractionSchedule& schedule,
                                                                    const CVector& psi0, const TimeGrid& grid,
                                                                    const BornOptions& options) {
  check_state(schedule, psi0, "born_series_solve_reference");
  const double spacing = options.node_spacing > 0.0 ? options.node_spacing : default_spacing(kernel);
  const Nodes nodes = build_nodes(schedule, spacing);
  const std::size_t m = nodes.size();

  BornSeriesReport report;
  std::vector<CVector> term(m, psi0);
  std::vector<CVector> total(m, psi0);
  for (int order = 1; order <= options.max_order && m > 0; ++order) {
    std::vector<CVector> next(m, CVector::Zero(psi0.size()));
    double norm = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t l = 0; l < m; ++l) {
        next[j] -= kI * nodes.w[l] * kernel.step(nodes.t[j] - nodes.t[l]) * (nodes.k[l] * term[l]);
      }
      norm = std::max(norm, next[j].norm());
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CVector v = CVector::Zero(psi0.size());
      for (std::size_t l = 0; l < m; ++l) v -= kI * nodes.w[l] * kernel.step(grid[i] - nodes.t[l]) * (nodes.k[l] * term[l]);
      norm = std::max(norm, v.norm());
    }
    report.term_norms.push_back(norm);
    report.orders_used = order;
    for (std::size_t j = 0; j < m; ++j) total[j] += next[j];
    term = std::move(next);
    if (norm < options.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (m == 0) report.converged = true;

  Trajectory tr = base_trajectory({kernel, std::nullopt}, schedule, grid);
  tr.representation = SolutionRepresentation{nodes.t, nodes.w, nodes.k, total, psi0};
  for (std::size_t i = 0; i < grid.size(); ++i) tr.states.push_back(tr.at(grid[i]));
  finish_report(tr, report);
  return {std::move(tr), std::move(report)};
}

TimeGrid trajectory_grid(const InteractionSchedule& schedule, double energy, double max_spacing) {
  const double margin = 4.0 * kPi / energy;
  const auto [lo, hi] = schedule.support_hull();
  return TimeGrid::with_max_spacing(lo - margin, hi + margin, max_spacing);
}

double evolution_residual(const Trajectory& tr) {
  const TimeGrid& grid = tr.grid;
  if (grid.size() < 3 || tr.states.size() != grid.size()) {
    throw std::invalid_argument("evolution_residual: need at least three states on the grid");
  }
  const double h = grid.spacing();
  const bool ideal = tr.kernel.is_ideal() && !tr.periodic_clock;
  if (!ideal) {
    const double energy = tr.periodic_clock ? tr.periodic_clock->energy() : tr.kernel.energy();
    if (h > 0.02 / energy * (1.0 + 1e-9)) {
      throw std::invalid_argument("evolution_residual: grid spacing must be <= 0.02/E");
    }
  }
  const Kernel kernel = kernel_of(tr);
  const Eigen::Index dim = tr.states.front().size();

  // Memory sources: (t_l, w_l, K_l psi(t_l)).
  std::vector<double> src_t;
  std::vector<double> src_w;
  std::vector<CVector> src_v;
  if (!ideal) {
    if (tr.representation) {
      const auto& rep = *tr.representation;
      src_t = rep.nodes;
      src_w = rep.weights;
      for (std::size_t l = 0; l < rep.nodes.size(); ++l) src_v.push_back(rep.couplings[l] * tr.at(rep.nodes[l]));
    } else if (tr.schedule) {
      const COperator free = kron(tr.schedule->free_hamiltonian(), identity(dim / tr.schedule->system_dim()));
      for (std::size_t k = 0; k < grid.size(); ++k) {
        src_t.push_back(grid[k]);
        src_w.push_back(grid.weight(k));
        src_v.push_back((tr.schedule->coupling_at(grid[k]) - free) * tr.states[k]);
      }
    }
  }

  const auto last = static_cast<std::ptrdiff_t>(grid.size()) - 1;
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::ptrdiff_t i = 1; i < last; ++i) {
    const auto u = static_cast<std::size_t>(i);
    CVector r = kI * (tr.states[u + 1] - tr.states[u - 1]) / (2.0 * h);
    if (ideal && tr.schedule) {
      r -= tr.schedule->coupling_at(grid[u]) * tr.states[u];
    } else {
      r -= tr.free_hamiltonian * tr.states[u];
      for (std::size_t l = 0; l < src_t.size(); ++l) r -= src_w[l] * kernel.f(grid[u], src_t[l]) * src_v[l];
    }
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double history_roundtrip_check(const Trajectory& tr, int samples) {
  if (tr.kernel.is_ideal() || tr.periodic_clock) {
    throw std::invalid_argument("history_roundtrip_check: needs a band-limited kernel on the line");
  }
  if (samples < 1) throw std::invalid_argument("history_roundtrip_check: need at least one sample");
  const double energy = tr.kernel.energy();
  const double half_width = 100.0;
  const double h = 0.25 / energy;
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(half_width / h));

  // psi on a common lattice covering [t_min - L, t_max + L].
  const double origin = tr.grid.t_min() - static_cast<double>(reach) * h;
  const auto span = static_cast<std::ptrdiff_t>(std::ceil((tr.grid.t_max() - tr.grid.t_min()) / h));
  const std::ptrdiff_t total = span + 2 * reach + 1;
  std::vector<CVector> psi(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) psi[static_cast<std::size_t>(k)] = tr.at(origin + static_cast<double>(k) * h);

  CVector minus_inf = tr.states.front();
  CVector plus_inf = tr.states.back();
  if (tr.representation) {
    const auto& rep = *tr.representation;
    minus_inf = rep.psi0;
    plus_inf = rep.psi0;
    for (std::size_t l = 0; l < rep.nodes.size(); ++l) {
      plus_inf -= kI * rep.weights[l] * (rep.couplings[l] * rep.node_states[l]);
    }
  }
  // h < pi/E, so the untruncated sampled sum of f is exactly 1; each tail gets half the remainder.
  double inside = 0.0;
  for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
    const double w = (k == -reach || k == reach) ? 0.5 * h : h;
    inside += w * overlap_kernel_f(energy, static_cast<double>(k) * h);
  }
  const double tail = 0.5 * (1.0 - inside);

  std::vector<double> errors(static_cast<std::size_t>(samples), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < samples; ++s) {
    const std::ptrdiff_t centre =
        reach + (samples == 1 ? span / 2 : static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(span) * s / (samples - 1))));
    CVector sum = tail * (minus_inf + plus_inf);
    for (std::ptrdiff_t k = -reach; k <= reach; ++k) {
      const double w = (k == -reach || k == reach) ? 0.5 * h : h;
      sum += w * overlap_kernel_f(energy, static_cast<double>(k) * h) * psi[static_cast<std::size_t>(centre - k)];
    }
    errors[static_cast<std::size_t>(s)] = (sum - psi[static_cast<std::size_t>(centre)]).norm();
  }
  return *std::max_element(errors.begin(), errors.end());
}

PMProbability pm_probability(const Trajectory& tr, std::size_t ancilla, Eigen::Index outcome, double t) {
  return pm_probability(tr, {{ancilla, outcome}}, t);
}

PMProbability pm_probability(const Trajectory& tr, const std::vector<std::pair<std::size_t, Eigen::Index>>& outcomes,
                             double t) {
  COperator projector = identity(product(tr.factor_dims));
  for (const auto& [ancilla, outcome] : outcomes) {
    if (ancilla + 1 >= tr.factor_dims.size()) throw DimensionError("pm_probability: no such ancilla");
    const Eigen::Index da = tr.factor_dims[ancilla + 1];
    if (outcome < 0 || outcome >= da) throw DimensionError("pm_probability: outcome out of range");
    const CVector a = basis_vector(da, outcome);
    const std::size_t targets[] = {ancilla + 1};
    projector = embed(a * a.adjoint(), tr.factor_dims, targets) * projector;
  }
  const CVector psi = tr.at(t);
  const double den = psi.squaredNorm();
  if (den < 1e-14) {
    std::ostringstream msg;
    msg << "pm_probability: conditioning time " << t << " is unreachable (denominator " << den << ")";
    throw UnreachableTimeError(msg.str());
  }
  return {(projector * psi).squaredNorm() / den, den};
}

std::vector<double> denominator_curve(const Trajectory& tr) {
  std::vector<double> out;
  for (const auto& s : tr.states) out.push_back(s.squaredNorm());
  return out;
}

COperator delta_kick_series(const COperator& k, double f_value, int terms) {
  const Eigen::Index n = k.rows();
  COperator sum = identity(n);
  COperator power = identity(n);
  for (int order = 1; order <= terms; ++order) {
    power = (-0.5 * kI) * (power * k);
    sum += 2.0 * f_value * power;
  }
  return sum;
}

COperator delta_kick_closed_form(const COperator& k, double f_value, DeltaKickValidation* validation) {
  require_hermitian(k, 1e-10, "K");
  const RVector eig = hermitian_eigen(k).values;
  const double radius = eig.size() ? 0.5 * eig.cwiseAbs().maxCoeff() : 0.0;
  if (radius >= 1.0) {
    std::ostringstream msg;
    msg << "delta_kick_closed_form: geometric series diverges (spectral radius of K/2 is " << radius << ")";
    throw SeriesDivergenceError(msg.str(), radius);
  }
  const Eigen::Index n = k.rows();
  const COperator closed = identity(n) - kI * f_value * k * (identity(n) + 0.5 * kI * k).inverse();

  constexpr int kTerms = 50;
  const COperator series = delta_kick_series(k, f_value, kTerms);
  const double defect = max_abs(closed - series);
  const double truncation = 2.0 * std::abs(f_value) * std::pow(radius, kTerms + 1) / (1.0 - radius) * std::sqrt(double(n));
  if (defect > 1e-8 + truncation) {
    std::ostringstream msg;
    msg << "delta_kick_closed_form: closed form disagrees with the series by " << defect;
    throw std::logic_error(msg.str());
  }
  if (validation) *validation = {defect, radius, kTerms};
  return closed;
}

Complex periodic_kernel(const ClockModel& clock, double t, double tau) {
  if (clock.kind() != ClockKind::PeriodicFinite) throw std::invalid_argument("periodic_kernel: periodic clock required");
  const RVector e = clock.levels();
  Complex sum = 0.0;
  for (Eigen::Index n = 0; n < e.size(); ++n) {
    if (std::abs(e(n)) < 1e-12) {
      sum += t;
    } else {
      sum += (std::exp(kI * e(n) * (t - tau)) - std::exp(-kI * e(n) * tau)) / (kI * e(n));
    }
  }
  return clock.normalization() / clock.dimension() * sum;
}

namespace {

// N_C int_0^T <phi_0|phi_s> F_tau(s) ds in closed form.
Complex periodic_closure_weight(const ClockModel& clock, double tau) {
  const RVector e = clock.levels();
  const double period = clock.period();
  Complex zero_row = 0.5 * period * period;
  Complex others = 0.0;
  for (Eigen::Index n = 0; n < e.size(); ++n) {
    if (std::abs(e(n)) < 1e-12) continue;
    zero_row -= period * std::exp(-kI * e(n) * tau) / (kI * e(n));
    others += kI * period / e(n) + period * std::exp(-kI * e(n) * tau) / (kI * e(n));
  }
  const double d = clock.dimension();
  const double nc = clock.normalization();
  return nc * nc / (d * d) * (zero_row + others);
}

}  // namespace

PeriodicSolution periodic_pm_solve(const ClockModel& clock, const InteractionSchedule& schedule, const CVector& psi0,
                                   const BornOptions& options, double output_spacing) {
  if (clock.kind() != ClockKind::PeriodicFinite) throw std::invalid_argument("periodic_pm_solve: periodic clock required");
  check_state(schedule, psi0, "periodic_pm_solve");
  const double period = clock.period();
  const auto [lo, hi] = schedule.support_hull();
  if (!schedule.terms().empty() && (lo < 0.0 || hi > period)) {
    throw std::invalid_argument("periodic_pm_solve: windows must lie inside one period");
  }
  const double spacing = output_spacing > 0.0 ? output_spacing : 0.01 / clock.energy();
  BornOptions opts = options;
  if (opts.node_spacing <= 0.0) opts.node_spacing = 0.01 / clock.energy();
  const Kernel kernel{StepKernel::bandlimited(clock.energy()), clock};
  auto [tr, report] = solve_series(kernel, schedule, psi0, TimeGrid::with_max_spacing(0.0, period, spacing), opts);

  // psi(0) = psi0 because F_tau(0) = 0, so only the memory integral remains.
  CVector defect = CVector::Zero(psi0.size());
  const auto& rep = *tr.representation;
  for (std::size_t l = 0; l < rep.nodes.size(); ++l) {
    defect += kI * rep.weights[l] * periodic_closure_weight(clock, rep.nodes[l]) * (rep.couplings[l] * rep.node_states[l]);
  }
  PeriodicSolution out{std::move(tr), std::move(report), defect.norm()};
  return out;
}

TranslationResult pm_to_translation_check(double energy, int dimension, const TrajectorySolver& solve,
                                          const CVector& psi0, std::size_t ancilla, Eigen::Index outcome,
                                          double t) {
  if (dimension < 2 || dimension > 16) throw std::invalid_argument("pm_to_translation_check: need 2 <= d <= 16");
  const ClockModel clock = ClockModel::periodic(energy, dimension);
  const Trajectory reference = solve(psi0);
  TranslationResult out;
  out.t = t;
  out.lhs = pm_probability(reference, ancilla, outcome, t).probability;

  const Eigen::Index n = psi0.size();
  std::vector<double> lattice;
  for (int k = 0; k < dimension; ++k) lattice.push_back(t - (dimension - 1 - k) * clock.time_step());
  std::vector<COperator> maps(lattice.size(), COperator(n, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Trajectory tr = solve(basis_vector(n, j));
    for (std::size_t k = 0; k < lattice.size(); ++k) maps[k].col(j) = tr.at(lattice[k]);
  }
  const CVector phi0 = clock_state(clock, 0.0);
  COperator j_map = COperator::Zero(dimension * n, dimension * n);
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    j_map += kron(COperator(clock_state(clock, lattice[k]) * phi0.adjoint()), maps[k]);
  }

  const CVector phi_t = clock_state(clock, t);
  const COperator clock_projector = phi_t * phi_t.adjoint();
  const CVector a = basis_vector(reference.factor_dims[ancilla + 1], outcome);
  const std::size_t targets[] = {ancilla + 1};
  const COperator outcome_projector = embed(a * a.adjoint(), reference.factor_dims, targets);

  const ConstraintSpace space(clock, reference.free_hamiltonian);
  const COperator numerator = space.twirl(j_map.adjoint() * kron(clock_projector, outcome_projector) * j_map);
  const COperator denominator = space.twirl(j_map.adjoint() * kron(clock_projector, identity(n)) * j_map);
  const CVector eta = free_history_state(clock, reference.free_hamiltonian, psi0.normalized()).unnormalized();
  const double den = eta.dot(denominator * eta).real();
  if (std::abs(den) < 1e-14) throw UnreachableTimeError("pm_to_translation_check: vanishing denominator");
  out.rhs = eta.dot(numerator * eta).real() / den;
  return out;
}

}  // namespace timeless
