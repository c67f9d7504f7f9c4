#include "cep/inner_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace cep {

bool polyak_step(double w, double target, const std::vector<double>& q,
                 double& alpha) {
  double norm2 = 0.0;
  for (double v : q) norm2 += v * v;
  alpha = 0.0;
  if (norm2 == 0.0) return false;
  const double a = (w - target) / norm2;
  if (!(a > 0.0)) return false;
  alpha = a;
  return true;
}

void project(ExpansionPlan& plan, const SystemInstance& instance) {
  for (std::size_t g = 0; g < plan.amount.size(); ++g) {
    plan.amount[g] =
        std::clamp(plan.amount[g], 0.0, instance.thermal[g].cap_upper);
  }
}

std::vector<double> first_stage_coefficients(const SystemInstance& instance) {
  std::vector<double> c;
  c.reserve(instance.thermal.size());
  for (const ThermalUnit& u : instance.thermal) {
    c.push_back(u.is_candidate() ? u.investment_cost + u.fom : -u.fom);
  }
  return c;
}

namespace {

struct Cut {
  std::uint64_t id = 0;
  int scenario = 0;
  DualPriceVector lambda;
  double constant = 0.0;  // V(x_i) - mu'x_i
  std::vector<double> slope;
};

struct Point {
  double w = 0.0;
  std::vector<double> q;
  std::vector<SubproblemResult> results;
};

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double penalty_constant(const DualPriceVector& lambda,
                        const SystemInstance& instance) {
  double c = 0.0;
  for (int n = 0; n < instance.num_zones(); ++n) {
    c += lambda[n] * instance.zones[n].eens_limit;
  }
  return c;
}

}  // namespace

struct DualFunctionSolver::Impl {
  Impl(const SystemInstance& instance, const ScenarioSet& scenarios,
       const InnerConfig& config, Executor& executor)
      : inst(instance),
        sc(scenarios),
        cfg(config),
        exec(executor),
        bases(scenarios.size()),
        ws_bases(scenarios.size()),
        coef(first_stage_coefficients(instance)),
        start(ExpansionPlan::zero(instance)) {
    models.reserve(scenarios.size());
    for (const Scenario& s : scenarios) models.emplace_back(inst, s, cfg.model);
    for (const Scenario& s : scenarios) {
      std::vector<double> e(inst.zones.size(), 0.0);
      for (int n = 0; n < inst.num_zones(); ++n) {
        for (int t = 0; t < inst.num_blocks(); ++t) {
          e[n] += inst.time_grid.block_duration[t] * s.demand[n][t];
        }
      }
      emax.push_back(std::move(e));
    }
  }

  // Lower bound on how much V_w can drop when prices move from `from` to `to`.
  double price_shift(int w, const DualPriceVector& from,
                     const DualPriceVector& to) const {
    double shift = 0.0;
    for (std::size_t n = 0; n < to.size(); ++n) {
      shift += std::max(0.0, from[n] - to[n]) * emax[w][n];
    }
    return shift;
  }

  Point evaluate(const ExpansionPlan& plan, const DualPriceVector& lambda) {
    Point p;
    p.results.resize(sc.size());
    exec.parallel_for(static_cast<int>(sc.size()), [&](int w) {
      ScenarioModel& m = models[w];
      if (m.prices() != lambda) m.set_prices(lambda);
      m.set_plan(plan);
      lp::SimplexSolver solver(cfg.lp_tolerances);
      SubproblemResult r =
          m.solve(solver, bases[w].empty() ? nullptr : &bases[w]);
      if (r.status != lp::Status::kOptimal && !bases[w].empty()) {
        r = m.solve(solver);
      }
      if (r.status != lp::Status::kOptimal) {
        throw std::runtime_error("second-stage LP of scenario '" + sc[w].id +
                                 "' ended with status " +
                                 std::string(lp::to_string(r.status)));
      }
      bases[w] = r.basis;
      p.results[w] = std::move(r);
    });
    p.w = 0.0;
    p.q = coef;
    for (std::size_t g = 0; g < coef.size(); ++g) p.w += coef[g] * plan.amount[g];
    for (std::size_t w = 0; w < sc.size(); ++w) {
      const double prob = sc[w].probability;
      p.w += prob * p.results[w].value;
      for (std::size_t g = 0; g < coef.size(); ++g) {
        p.q[g] += prob * p.results[w].mu[g];
      }
    }
    return p;
  }

  void add_cuts(const ExpansionPlan& plan, const DualPriceVector& lambda,
                const Point& p) {
    for (std::size_t w = 0; w < sc.size(); ++w) {
      Cut c;
      c.id = next_cut_id++;
      c.scenario = static_cast<int>(w);
      c.lambda = lambda;
      c.slope = p.results[w].mu;
      c.constant = p.results[w].value;
      for (std::size_t g = 0; g < c.slope.size(); ++g) {
        c.constant -= c.slope[g] * plan.amount[g];
      }
      cuts.push_back(std::move(c));
    }
    if (cuts.size() > cfg.max_cuts) {
      cuts.erase(cuts.begin(),
                 cuts.begin() + static_cast<long>(cuts.size() - cfg.max_cuts));
    }
  }

  // min_x c'x + sum_w p_w theta_w over the cut model; V_w >= 0 bounds theta.
  double cut_bound(const DualPriceVector& lambda, ExpansionPlan* argmin) {
    lp::Problem model;
    for (std::size_t g = 0; g < coef.size(); ++g) {
      model.add_variable("", 0.0, inst.thermal[g].cap_upper, coef[g]);
    }
    const int theta0 = model.num_variables();
    for (const Scenario& s : sc) model.add_variable("", 0.0, lp::kInfinity, s.probability);
    for (const Cut& c : cuts) {
      const double shift =
          c.lambda == lambda ? 0.0 : price_shift(c.scenario, c.lambda, lambda);
      std::vector<lp::Term> terms{{theta0 + c.scenario, 1.0}};
      for (std::size_t g = 0; g < c.slope.size(); ++g) {
        if (c.slope[g] != 0.0) terms.push_back({static_cast<int>(g), -c.slope[g]});
      }
      model.add_constraint("", std::move(terms), lp::Sense::kGreaterEqual,
                           c.constant - shift);
    }
    // Warm start from the previous cut model: cuts kept since then keep their
    // slack status, new cuts start basic.
    lp::Basis warm;
    const std::size_t columns = coef.size() + sc.size();
    if (cut_basis.status.size() == columns + cut_basis_ids.size()) {
      warm.status.assign(cut_basis.status.begin(),
                         cut_basis.status.begin() + static_cast<long>(columns));
      std::size_t p = 0;
      for (const Cut& c : cuts) {
        while (p < cut_basis_ids.size() && cut_basis_ids[p] < c.id) ++p;
        warm.status.push_back(p < cut_basis_ids.size() && cut_basis_ids[p] == c.id
                                  ? cut_basis.status[columns + p]
                                  : lp::BasisStatus::kBasic);
      }
    }
    lp::SimplexSolver solver(cfg.lp_tolerances);
    lp::Solution s = solver.solve(model, warm.empty() ? nullptr : &warm);
    if (s.status != lp::Status::kOptimal && !warm.empty()) s = solver.solve(model);
    if (s.status != lp::Status::kOptimal) {
      cut_basis = {};
      return -std::numeric_limits<double>::infinity();
    }
    cut_basis = s.basis;
    cut_basis_ids.clear();
    for (const Cut& c : cuts) cut_basis_ids.push_back(c.id);
    if (argmin) {
      *argmin = ExpansionPlan::zero(inst);
      for (std::size_t g = 0; g < coef.size(); ++g) argmin->amount[g] = s.primal[g];
      project(*argmin, inst);
    }
    return s.objective;
  }

  double fresh_target(const DualPriceVector& lambda) {
    std::vector<double> values(sc.size(), 0.0);
    exec.parallel_for(static_cast<int>(sc.size()), [&](int w) {
      lp::SimplexSolver solver(cfg.lp_tolerances);
      WaitAndSeeResult r = solve_wait_and_see(
          sc[w], lambda, inst, solver,
          ws_bases[w].empty() ? nullptr : &ws_bases[w], cfg.model);
      if (r.status != lp::Status::kOptimal && !ws_bases[w].empty()) {
        r = solve_wait_and_see(sc[w], lambda, inst, solver, nullptr, cfg.model);
      }
      if (r.status != lp::Status::kOptimal) {
        throw std::runtime_error("wait-and-see LP of scenario '" + sc[w].id +
                                 "' ended with status " +
                                 std::string(lp::to_string(r.status)));
      }
      ws_bases[w] = std::move(r.basis);
      values[w] = r.value;
    });
    ws_lambda = lambda;
    ws_values = values;
    double total = 0.0;
    for (std::size_t w = 0; w < sc.size(); ++w) total += sc[w].probability * values[w];
    return total;
  }

  bool can_reuse(const DualPriceVector& lambda) const {
    if (ws_values.empty() || cfg.target_reuse_threshold < 0) return false;
    for (std::size_t n = 0; n < lambda.size(); ++n) {
      const double ref = ws_lambda[n];
      if (std::abs(lambda[n] - ref) > cfg.target_reuse_threshold * ref) {
        return false;
      }
    }
    return true;
  }

  double target(const DualPriceVector& lambda) {
    if (!can_reuse(lambda)) return fresh_target(lambda);
    double total = 0.0;
    for (std::size_t w = 0; w < sc.size(); ++w) {
      total += sc[w].probability *
               (ws_values[w] - price_shift(static_cast<int>(w), ws_lambda, lambda));
    }
    return total;
  }

  const SystemInstance& inst;
  const ScenarioSet& sc;
  InnerConfig cfg;
  Executor& exec;
  std::vector<ScenarioModel> models;
  std::vector<lp::Basis> bases;
  std::vector<lp::Basis> ws_bases;
  std::vector<double> coef;
  std::vector<std::vector<double>> emax;
  DualPriceVector ws_lambda;
  std::vector<double> ws_values;
  std::vector<Cut> cuts;
  std::uint64_t next_cut_id = 0;
  lp::Basis cut_basis;
  std::vector<std::uint64_t> cut_basis_ids;
  ExpansionPlan start;
};

DualFunctionSolver::DualFunctionSolver(const SystemInstance& instance,
                                       const ScenarioSet& scenarios,
                                       InnerConfig config, Executor& executor)
    : impl_(std::make_unique<Impl>(instance, scenarios, config, executor)),
      config_(std::move(config)) {}

DualFunctionSolver::~DualFunctionSolver() = default;

void DualFunctionSolver::set_start_plan(const ExpansionPlan& plan) {
  impl_->start = plan;
  project(impl_->start, impl_->inst);
}

double DualFunctionSolver::estimate_target(const DualPriceVector& lambda) {
  return impl_->fresh_target(lambda);
}

InnerState DualFunctionSolver::inner_step(const InnerState& state,
                                          const DualPriceVector& lambda) {
  InnerState next = state;
  const Point p = impl_->evaluate(state.plan, lambda);
  next.w = p.w;
  next.q = p.q;
  next.q_norm = norm(p.q);
  next.history.push_back(p.w);
  next.converged = !polyak_step(p.w, state.target, p.q, next.alpha);
  if (!next.converged) {
    for (std::size_t g = 0; g < next.plan.amount.size(); ++g) {
      next.plan.amount[g] -= next.alpha * p.q[g];
    }
    project(next.plan, impl_->inst);
  }
  next.i = state.i + 1;
  return next;
}

DualFunctionResult DualFunctionSolver::solve(const DualPriceVector& lambda) {
  Impl& im = *impl_;
  const InnerConfig& cfg = config_;
  if (lambda.size() != im.inst.zones.size()) {
    throw std::invalid_argument("lambda size does not match the zone count");
  }
  for (double l : lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw std::invalid_argument("lambda must be finite and >= 0");
    }
  }
  if (!cfg.keep_cuts) im.cuts.clear();

  const double ws = im.target(lambda);
  ExpansionPlan plan = im.start;
  project(plan, im.inst);

  DualFunctionResult out;
  double best = std::numeric_limits<double>::infinity();
  double lower = ws;
  double previous = 0.0;
  for (int i = 0; i < cfg.max_inner_iters; ++i) {
    Point p = im.evaluate(plan, lambda);
    im.add_cuts(plan, lambda, p);
    if (p.w < best) {
      best = p.w;
      out.plan = plan;
      out.scenarios = std::move(p.results);
    }
    ExpansionPlan kelley;
    const double cut_lb = im.cut_bound(lambda, &kelley);
    lower = std::max(lower, cut_lb);
    const double target = cfg.cut_target ? std::max(ws, cut_lb) : ws;

    InnerTraceRow row{i, p.w, norm(p.q), 0.0, target, lower};
    out.iterations = i + 1;
    const double gap = (best - lower) / std::max(1.0, std::abs(best));
    bool stop = gap <= cfg.gap_tol;
    if (!stop && i > 0 &&
        std::abs(p.w - previous) / std::max(1.0, std::abs(previous)) <
            cfg.inner_tol) {
      stop = true;
    }
    if (!stop) {
      if (cfg.step_rule == StepRule::kCutModel) {
        if (kelley == plan) {
          stop = true;
        } else {
          plan = std::move(kelley);
        }
      } else if (polyak_step(p.w, target, p.q, row.alpha)) {
        for (std::size_t g = 0; g < plan.amount.size(); ++g) {
          plan.amount[g] -= row.alpha * p.q[g];
        }
        project(plan, im.inst);
      } else {
        stop = true;
      }
    }
    out.trace.push_back(row);
    spdlog::trace("inner i={} W={:.10g} |q|={:.6g} alpha={:.6g} target={:.10g}",
                  i, p.w, row.q_norm, row.alpha, target);
    previous = p.w;
    if (stop) {
      out.converged = true;
      break;
    }
  }

  lower = std::min(lower, best);
  const double constant = penalty_constant(lambda, im.inst);
  out.w_best = best;
  out.w_lower = lower;
  out.target = cfg.cut_target ? std::max(ws, lower) : ws;
  out.value = best - constant;
  out.lower_bound = lower - constant;
  out.shedding.reserve(out.scenarios.size());
  for (const SubproblemResult& r : out.scenarios) out.shedding.push_back(r.shedding);
  out.eens = eens_by_zone(out.shedding, im.sc, im.inst.time_grid);
  im.start = out.plan;
  return out;
}

DualFunctionResult solve_dual_function(const DualPriceVector& lambda,
                                       const SystemInstance& instance,
                                       const ScenarioSet& scenarios,
                                       const InnerConfig& config,
                                       Executor& executor) {
  DualFunctionSolver solver(instance, scenarios, config, executor);
  return solver.solve(lambda);
}

double estimate_target(const DualPriceVector& lambda,
                       const SystemInstance& instance,
                       const ScenarioSet& scenarios, Executor& executor,
                       const ModelOptions& model) {
  InnerConfig cfg;
  cfg.model = model;
  DualFunctionSolver solver(instance, scenarios, cfg, executor);
  return solver.estimate_target(lambda);
}

}  // namespace cep
