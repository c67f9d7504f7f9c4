#include "cep/subproblem.hpp"

#include <stdexcept>
#include <string>

namespace cep {
namespace {

using lp::kInfinity;
using lp::Sense;

std::string label(const std::string& prefix, const char* kind,
                  const std::string& who, int t) {
  return prefix + kind + "[" + who + "," + std::to_string(t) + "]";
}

void check_dimensions(const SystemInstance& instance, const Scenario& scenario,
                      const ExpansionPlan& plan, const DualPriceVector& lambda,
                      bool need_plan) {
  const auto zones = static_cast<std::size_t>(instance.num_zones());
  const auto blocks = static_cast<std::size_t>(instance.num_blocks());
  auto bad = [&](const std::string& what) {
    throw std::invalid_argument("scenario '" + scenario.id +
                                "': dimension mismatch in " + what);
  };
  if (lambda.size() != zones) bad("lambda");
  if (need_plan && plan.amount.size() != instance.thermal.size()) bad("plan");
  if (scenario.demand.size() != zones || scenario.pv.size() != zones ||
      scenario.wind.size() != zones || scenario.inflow.size() != zones) {
    bad("zone count");
  }
  for (std::size_t n = 0; n < zones; ++n) {
    if (scenario.demand[n].size() != blocks || scenario.pv[n].size() != blocks ||
        scenario.wind[n].size() != blocks ||
        scenario.inflow[n].size() != static_cast<std::size_t>(kHydroTechCount)) {
      bad("series length");
    }
    for (const auto& series : scenario.inflow[n]) {
      if (series.size() != blocks) bad("inflow length");
    }
  }
}

class BlockBuilder {
 public:
  BlockBuilder(lp::Problem& lp, const SystemInstance& instance,
               const Scenario& scenario, const ExpansionPlan& plan,
               const DualPriceVector& lambda, const BlockOptions& options,
               const ModelOptions& model)
      : lp_(lp),
        inst_(instance),
        sc_(scenario),
        plan_(plan),
        lambda_(lambda),
        opt_(options),
        model_(model),
        zones_(instance.num_zones()),
        blocks_(instance.num_blocks()) {}

  BlockLayout build() {
    out_.first_var = lp_.num_variables();
    add_balance_rows();
    add_thermal();
    add_lines();
    add_batteries();
    add_hydro();
    add_shedding_and_curtailment();
    out_.end_var = lp_.num_variables();
    return std::move(out_);
  }

 private:
  double dt(int t) const { return inst_.time_grid.block_duration[t]; }

  int column(std::string name, double lo, double hi, double unit_cost,
             CostClass klass) {
    const int j = lp_.add_variable(std::move(name), lo, hi, opt_.weight * unit_cost);
    out_.unit_cost.push_back(unit_cost);
    out_.cost_class.push_back(klass);
    return j;
  }

  void into_balance(int zone, int t, int var, double coef) {
    lp_.add_term(out_.balance_row[zone][t], var, coef);
  }

  void add_balance_rows() {
    out_.balance_row.assign(zones_, std::vector<int>(blocks_));
    for (int n = 0; n < zones_; ++n) {
      for (int t = 0; t < blocks_; ++t) {
        const double net = sc_.demand[n][t] - sc_.pv[n][t] - sc_.wind[n][t];
        out_.balance_row[n][t] = lp_.add_constraint(
            label(opt_.prefix, "balance", inst_.zones[n].id, t), {},
            Sense::kEqual, net);
      }
    }
  }

  void add_thermal() {
    const bool linked = !opt_.first_stage.empty();
    const std::size_t units = inst_.thermal.size();
    out_.generation.assign(units, std::vector<int>(blocks_));
    out_.capacity_row.assign(units, std::vector<int>(blocks_));
    for (std::size_t g = 0; g < units; ++g) {
      const ThermalUnit& u = inst_.thermal[g];
      const int n = inst_.zone_index(u.zone);
      for (int t = 0; t < blocks_; ++t) {
        const double lo = u.is_candidate() ? 0.0 : u.p_min[t];
        const int p = column(label(opt_.prefix, "p", u.name, t), lo, kInfinity,
                             dt(t) * u.marginal_cost, CostClass::kGeneration);
        out_.generation[g][t] = p;
        into_balance(n, t, p, 1.0);
        std::vector<lp::Term> terms{{p, 1.0}};
        double rhs = 0.0;
        if (u.is_candidate()) {
          // p^nu <= x^nu
          if (linked) {
            terms.push_back({opt_.first_stage[g], -1.0});
          } else {
            rhs = plan_.amount[g];
          }
        } else {
          // p <= P^max_t - x
          rhs = u.p_max[t];
          if (linked) {
            terms.push_back({opt_.first_stage[g], 1.0});
          } else {
            rhs -= plan_.amount[g];
          }
        }
        out_.capacity_row[g][t] =
            lp_.add_constraint(label(opt_.prefix, "cap", u.name, t),
                               std::move(terms), Sense::kLessEqual, rhs);
      }
    }
  }

  void add_lines() {
    const std::size_t lines = inst_.lines.size();
    out_.flow_forward.assign(lines, std::vector<int>(blocks_));
    out_.flow_backward.assign(lines, std::vector<int>(blocks_));
    for (std::size_t l = 0; l < lines; ++l) {
      const Line& line = inst_.lines[l];
      const int from = inst_.zone_index(line.from_zone);
      const int to = inst_.zone_index(line.to_zone);
      for (int t = 0; t < blocks_; ++t) {
        const double wc = dt(t) * line.wheeling_cost;
        const int fwd = column(label(opt_.prefix, "f+", line.name, t), 0.0,
                               line.l_max, wc, CostClass::kWheeling);
        const int bwd = column(label(opt_.prefix, "f-", line.name, t), 0.0,
                               -line.l_min, wc, CostClass::kWheeling);
        into_balance(to, t, fwd, 1.0);
        into_balance(to, t, bwd, -1.0);
        into_balance(from, t, fwd, -1.0);
        into_balance(from, t, bwd, 1.0);
        out_.flow_forward[l][t] = fwd;
        out_.flow_backward[l][t] = bwd;
      }
    }
  }

  // Storage level columns: [0, cap] with the last one bounded below by the
  // initial level.
  std::vector<int> levels(const std::string& who, const char* kind, double cap,
                          double initial) {
    std::vector<int> cols(blocks_);
    for (int t = 0; t < blocks_; ++t) {
      const double lo = t + 1 == blocks_ ? initial : 0.0;
      cols[t] = column(label(opt_.prefix, kind, who, t), lo, cap, 0.0,
                       CostClass::kNone);
    }
    return cols;
  }

  // level_t - level_{t-1} + sum(coef * dT * var) = dT * inflow_t, with the
  // initial level moved to the rhs at t = 0.
  std::vector<int> dynamics(const std::string& who, const char* kind,
                            const std::vector<int>& level, double initial,
                            const std::vector<std::pair<const std::vector<int>*, double>>& flows,
                            const std::vector<double>* inflow) {
    std::vector<int> rows(blocks_);
    for (int t = 0; t < blocks_; ++t) {
      std::vector<lp::Term> terms{{level[t], 1.0}};
      double rhs = inflow ? dt(t) * (*inflow)[t] : 0.0;
      if (t == 0) {
        rhs += initial;
      } else {
        terms.push_back({level[t - 1], -1.0});
      }
      for (const auto& [cols, coef] : flows) {
        terms.push_back({(*cols)[t], coef * dt(t)});
      }
      rows[t] = lp_.add_constraint(label(opt_.prefix, kind, who, t),
                                   std::move(terms), Sense::kEqual, rhs);
    }
    return rows;
  }

  void add_batteries() {
    const double frac = model_.initial_storage_fraction;
    for (const Battery& b : inst_.batteries) {
      const int n = inst_.zone_index(b.zone);
      const std::string& who = b.zone;
      BatteryColumns cols;
      const double initial = frac * b.energy_capacity;
      cols.level = levels(who, "bv", b.energy_capacity, initial);
      for (int t = 0; t < blocks_; ++t) {
        cols.charge.push_back(column(label(opt_.prefix, "bc", who, t), 0.0,
                                     b.charge_capacity, 0.0, CostClass::kNone));
        cols.discharge.push_back(column(label(opt_.prefix, "bd", who, t), 0.0,
                                        b.discharge_capacity, 0.0,
                                        CostClass::kNone));
        into_balance(n, t, cols.discharge[t], 1.0);
        into_balance(n, t, cols.charge[t], -1.0);
      }
      // bv_t = bv_{t-1} + dT (BCE bc - BDE bd)
      cols.rows = dynamics(who, "battery", cols.level, initial,
                           {{&cols.charge, -b.charge_efficiency},
                            {&cols.discharge, b.discharge_efficiency}},
                           nullptr);
      out_.batteries.push_back(std::move(cols));
    }
  }

  void add_hydro() {
    const double frac = model_.initial_storage_fraction;
    for (const HydroUnit& h : inst_.hydro) {
      const int n = inst_.zone_index(h.zone);
      const std::string who = h.zone + ":" + hydro_tech_code(h.technology);
      const auto& inflow = sc_.inflow[n][static_cast<int>(h.technology)];
      HydroColumns cols;
      if (h.technology == HydroTech::kRunOfRiver) {
        // q = A
        for (int t = 0; t < blocks_; ++t) {
          const int q = column(label(opt_.prefix, "q", who, t), inflow[t],
                               inflow[t], 0.0, CostClass::kNone);
          cols.turbine.push_back(q);
          into_balance(n, t, q, 1.0);
        }
        out_.hydro.push_back(std::move(cols));
        continue;
      }
      const bool pumped = h.technology == HydroTech::kOpenLoop ||
                          h.technology == HydroTech::kClosedLoop;
      const double spill_cap =
          h.technology == HydroTech::kOpenLoop && model_.open_loop_spill_bound
              ? h.pump_capacity
              : kInfinity;
      for (int t = 0; t < blocks_; ++t) {
        cols.turbine.push_back(column(label(opt_.prefix, "q", who, t), 0.0,
                                      h.turbine_capacity, 0.0,
                                      CostClass::kNone));
        cols.spill.push_back(column(label(opt_.prefix, "s", who, t), 0.0,
                                    spill_cap, dt(t) * h.spill_cost,
                                    CostClass::kSpillage));
        into_balance(n, t, cols.turbine[t], 1.0);
        if (pumped) {
          cols.pump.push_back(column(label(opt_.prefix, "d", who, t), 0.0,
                                     h.pump_capacity, 0.0, CostClass::kNone));
          into_balance(n, t, cols.pump[t], -1.0);
        }
      }
      const double initial = frac * h.volume;
      cols.head = levels(who, pumped ? "vH" : "v", h.volume, initial);
      const bool has_inflow = h.technology != HydroTech::kClosedLoop;
      std::vector<std::pair<const std::vector<int>*, double>> head_flows{
          {&cols.turbine, 1.0}, {&cols.spill, 1.0}};
      if (pumped) head_flows.push_back({&cols.pump, -h.pump_efficiency});
      cols.balance_rows = dynamics(who, pumped ? "head" : "reservoir",
                                   cols.head, initial, head_flows,
                                   has_inflow ? &inflow : nullptr);
      if (pumped) {
        const std::vector<std::pair<const std::vector<int>*, double>>
            tail_flows{{&cols.pump, h.pump_efficiency}, {&cols.turbine, -1.0}};
        if (h.technology == HydroTech::kClosedLoop ||
            model_.open_loop_tail_reading) {
          // v^T_t = v^T_{t-1} - PE d + q, unbounded above.
          cols.tail.resize(blocks_);
          for (int t = 0; t < blocks_; ++t) {
            cols.tail[t] = column(label(opt_.prefix, "vT", who, t), 0.0,
                                  kInfinity, 0.0, CostClass::kNone);
          }
          cols.tail_rows =
              dynamics(who, "tail", cols.tail, initial, tail_flows, nullptr);
        } else {
          // Literal reading: the same balance imposed on v^H.
          cols.tail_rows =
              dynamics(who, "head2", cols.head, initial, tail_flows, nullptr);
        }
      }
      out_.hydro.push_back(std::move(cols));
    }
  }

  void add_shedding_and_curtailment() {
    out_.shed.assign(zones_, std::vector<int>(blocks_));
    out_.curtail.assign(zones_, std::vector<int>(blocks_));
    for (int n = 0; n < zones_; ++n) {
      const std::string& who = inst_.zones[n].id;
      for (int t = 0; t < blocks_; ++t) {
        // Shedding is priced separately so that prices can change in place.
        const int ls = lp_.add_variable(label(opt_.prefix, "ls", who, t), 0.0,
                                        sc_.demand[n][t],
                                        opt_.weight * lambda_[n] * dt(t));
        out_.unit_cost.push_back(0.0);
        out_.cost_class.push_back(CostClass::kNone);
        const double renewable =
            sc_.pv[n][t] + sc_.wind[n][t] +
            sc_.inflow[n][static_cast<int>(HydroTech::kRunOfRiver)][t];
        const int curt = column(label(opt_.prefix, "curt", who, t), 0.0,
                                renewable, 0.0, CostClass::kNone);
        into_balance(n, t, ls, 1.0);
        into_balance(n, t, curt, -1.0);
        out_.shed[n][t] = ls;
        out_.curtail[n][t] = curt;
      }
    }
  }

  lp::Problem& lp_;
  const SystemInstance& inst_;
  const Scenario& sc_;
  const ExpansionPlan& plan_;
  const DualPriceVector& lambda_;
  const BlockOptions& opt_;
  const ModelOptions& model_;
  int zones_;
  int blocks_;
  BlockLayout out_;
};

std::vector<double> capacity_sensitivity(const SystemInstance& instance,
                                         const BlockLayout& layout,
                                         const std::vector<double>& dual) {
  std::vector<double> mu(instance.thermal.size(), 0.0);
  for (std::size_t g = 0; g < instance.thermal.size(); ++g) {
    double sum = 0.0;
    for (int row : layout.capacity_row[g]) sum += dual[row];
    // Candidate rhs is x^nu; existing rhs is P^max - x.
    mu[g] = instance.thermal[g].is_candidate() ? sum : -sum;
  }
  return mu;
}

}  // namespace

BlockLayout append_scenario_block(lp::Problem& lp,
                                  const SystemInstance& instance,
                                  const Scenario& scenario,
                                  const ExpansionPlan& plan,
                                  const DualPriceVector& lambda,
                                  const BlockOptions& options,
                                  const ModelOptions& model) {
  check_dimensions(instance, scenario, plan, lambda, options.first_stage.empty());
  return BlockBuilder(lp, instance, scenario, plan, lambda, options, model)
      .build();
}

lp::Problem build_second_stage(const ExpansionPlan& plan,
                               const Scenario& scenario,
                               const DualPriceVector& lambda,
                               const SystemInstance& instance,
                               const ModelOptions& model) {
  lp::Problem lp;
  append_scenario_block(lp, instance, scenario, plan, lambda, BlockOptions{},
                        model);
  return lp;
}

CostBreakdown block_costs(const BlockLayout& layout,
                          std::span<const double> primal,
                          const DualPriceVector& lambda,
                          const SystemInstance& instance) {
  CostBreakdown c;
  for (int j = layout.first_var; j < layout.end_var; ++j) {
    const std::size_t k = static_cast<std::size_t>(j - layout.first_var);
    const double v = layout.unit_cost[k] * primal[j];
    switch (layout.cost_class[k]) {
      case CostClass::kGeneration:
        c.generation += v;
        break;
      case CostClass::kWheeling:
        c.wheeling += v;
        break;
      case CostClass::kSpillage:
        c.spillage += v;
        break;
      case CostClass::kNone:
        break;
    }
  }
  for (std::size_t n = 0; n < layout.shed.size(); ++n) {
    for (std::size_t t = 0; t < layout.shed[n].size(); ++t) {
      c.shedding += lambda[n] * instance.time_grid.block_duration[t] *
                    primal[layout.shed[n][t]];
    }
  }
  return c;
}

ZoneSeries block_shedding(const BlockLayout& layout,
                          std::span<const double> primal) {
  ZoneSeries ls(layout.shed.size());
  for (std::size_t n = 0; n < layout.shed.size(); ++n) {
    ls[n].reserve(layout.shed[n].size());
    for (int j : layout.shed[n]) ls[n].push_back(std::max(0.0, primal[j]));
  }
  return ls;
}

ScenarioModel::ScenarioModel(const SystemInstance& instance,
                             const Scenario& scenario,
                             const ModelOptions& model)
    : instance_(&instance),
      plan_(ExpansionPlan::zero(instance)),
      lambda_(instance.zones.size(), 0.0) {
  layout_ = append_scenario_block(problem_, instance, scenario, plan_, lambda_,
                                  BlockOptions{}, model);
}

void ScenarioModel::set_plan(const ExpansionPlan& plan) {
  const SystemInstance& inst = *instance_;
  if (plan.amount.size() != inst.thermal.size()) {
    throw std::invalid_argument("plan size does not match the instance");
  }
  plan_ = plan;
  for (std::size_t g = 0; g < inst.thermal.size(); ++g) {
    const ThermalUnit& u = inst.thermal[g];
    for (int t = 0; t < inst.num_blocks(); ++t) {
      const double rhs =
          u.is_candidate() ? plan.amount[g] : u.p_max[t] - plan.amount[g];
      problem_.set_rhs(layout_.capacity_row[g][t], rhs);
    }
  }
}

void ScenarioModel::set_prices(const DualPriceVector& lambda) {
  const SystemInstance& inst = *instance_;
  if (lambda.size() != inst.zones.size()) {
    throw std::invalid_argument("lambda size does not match the instance");
  }
  lambda_ = lambda;
  for (int n = 0; n < inst.num_zones(); ++n) {
    for (int t = 0; t < inst.num_blocks(); ++t) {
      problem_.set_cost(layout_.shed[n][t],
                        lambda[n] * inst.time_grid.block_duration[t]);
    }
  }
}

SubproblemResult ScenarioModel::solve(lp::SimplexSolver& solver,
                                      const lp::Basis* warm_start) const {
  lp::Solution sol = solver.solve(problem_, warm_start);
  SubproblemResult r;
  r.status = sol.status;
  r.iterations = sol.iterations;
  if (sol.status != lp::Status::kOptimal) return r;
  r.value = sol.objective;
  r.mu = capacity_sensitivity(*instance_, layout_, sol.dual);
  r.shedding = block_shedding(layout_, sol.primal);
  r.costs = block_costs(layout_, sol.primal, lambda_, *instance_);
  r.primal = std::move(sol.primal);
  r.basis = std::move(sol.basis);
  return r;
}

SubproblemResult evaluate(const ExpansionPlan& plan, const Scenario& scenario,
                          const DualPriceVector& lambda,
                          const SystemInstance& instance,
                          const ModelOptions& model) {
  ScenarioModel sm(instance, scenario, model);
  sm.set_plan(plan);
  sm.set_prices(lambda);
  lp::SimplexSolver solver;
  return sm.solve(solver);
}

ExtendedForm build_extended_form(const SystemInstance& instance,
                                 const ScenarioSet& scenarios,
                                 const DualPriceVector& lambda,
                                 bool with_eens_rows,
                                 const ModelOptions& model) {
  ExtendedForm ef;
  BlockOptions opt;
  for (const ThermalUnit& u : instance.thermal) {
    const double cost =
        u.is_candidate() ? u.investment_cost + u.fom : -u.fom;
    ef.first_stage.push_back(ef.problem.add_variable(
        (u.is_candidate() ? "xnew[" : "xret[") + u.name + "]", 0.0,
        u.cap_upper, cost));
  }
  opt.first_stage = ef.first_stage;
  const ExpansionPlan unused = ExpansionPlan::zero(instance);
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    opt.weight = scenarios[w].probability;
    opt.prefix = scenarios.size() > 1 ? scenarios[w].id + "." : "";
    ef.blocks.push_back(append_scenario_block(ef.problem, instance,
                                              scenarios[w], unused, lambda,
                                              opt, model));
  }
  if (with_eens_rows) {
    for (int n = 0; n < instance.num_zones(); ++n) {
      std::vector<lp::Term> terms;
      for (std::size_t w = 0; w < scenarios.size(); ++w) {
        for (int t = 0; t < instance.num_blocks(); ++t) {
          terms.push_back({ef.blocks[w].shed[n][t],
                           scenarios[w].probability *
                               instance.time_grid.block_duration[t]});
        }
      }
      ef.eens_rows.push_back(ef.problem.add_constraint(
          "eens[" + instance.zones[n].id + "]", std::move(terms),
          lp::Sense::kLessEqual, instance.zones[n].eens_limit));
    }
  }
  return ef;
}

WaitAndSeeResult solve_wait_and_see(const Scenario& scenario,
                                    const DualPriceVector& lambda,
                                    const SystemInstance& instance,
                                    lp::SimplexSolver& solver,
                                    const lp::Basis* warm_start,
                                    const ModelOptions& model) {
  Scenario certain = scenario;
  certain.probability = 1.0;
  const ExtendedForm ef =
      build_extended_form(instance, {certain}, lambda, false, model);
  lp::Solution sol = solver.solve(ef.problem, warm_start);
  WaitAndSeeResult r;
  r.status = sol.status;
  if (sol.status != lp::Status::kOptimal) return r;
  r.value = sol.objective;
  r.plan = ExpansionPlan::zero(instance);
  for (std::size_t g = 0; g < ef.first_stage.size(); ++g) {
    r.plan.amount[g] = sol.primal[ef.first_stage[g]];
  }
  r.basis = std::move(sol.basis);
  return r;
}

double wait_and_see_value(const Scenario& scenario,
                          const DualPriceVector& lambda,
                          const SystemInstance& instance,
                          const ModelOptions& model) {
  lp::SimplexSolver solver;
  const WaitAndSeeResult r =
      solve_wait_and_see(scenario, lambda, instance, solver, nullptr, model);
  if (r.status != lp::Status::kOptimal) {
    throw std::runtime_error("wait-and-see LP for scenario '" + scenario.id +
                             "' ended with status " +
                             std::string(lp::to_string(r.status)));
  }
  return r.value;
}

}  // namespace cep
