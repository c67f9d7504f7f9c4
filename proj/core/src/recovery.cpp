#include "cep/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cep {

double expected_energy(const NodeSeries& ls, const ScenarioSet& scenarios,
                       const TimeGrid& grid) {
  double total = 0.0;
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    double e = 0.0;
    for (std::size_t t = 0; t < ls[w].size(); ++t) {
      e += grid.block_duration[t] * ls[w][t];
    }
    total += scenarios[w].probability * e;
  }
  return total;
}

double expected_shedding_hours(const NodeSeries& ls,
                               const ScenarioSet& scenarios,
                               const TimeGrid& grid, double eps) {
  double total = 0.0;
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    double h = 0.0;
    for (std::size_t t = 0; t < ls[w].size(); ++t) {
      if (ls[w][t] > eps) h += grid.block_duration[t];
    }
    total += scenarios[w].probability * h;
  }
  return total;
}

namespace {

void shave(NodeSeries& ls, double amount) {
  for (auto& row : ls) {
    for (double& v : row) v = std::max(v - amount, 0.0);
  }
}

}  // namespace

NodeRecovery recover_node(const NodeSeries& ls_hat, double limit,
                          const ScenarioSet& scenarios, const TimeGrid& grid,
                          const RecoveryOptions& options, double cap) {
  NodeRecovery out;
  out.ls = ls_hat;
  double deficit = expected_energy(out.ls, scenarios, grid) - limit;
  if (deficit <= options.eps_deficit || cap <= 0.0) {
    out.deficit = std::max(deficit, 0.0);
    if (deficit <= options.eps_deficit) out.deficit = 0.0;
    return out;
  }
  if (limit <= 0.0) {
    double peak = 0.0;
    for (const auto& row : out.ls) {
      for (double v : row) peak = std::max(peak, v);
    }
    out.added = std::min(peak, cap);
    shave(out.ls, out.added);
    out.steps = 1;
    out.deficit = std::max(expected_energy(out.ls, scenarios, grid) - limit, 0.0);
    return out;
  }
  double lole = expected_shedding_hours(out.ls, scenarios, grid, options.eps_ls);
  while (deficit > options.eps_deficit && out.steps < options.max_steps) {
    if (options.recompute_lole && out.steps > 0) {
      lole = expected_shedding_hours(out.ls, scenarios, grid, options.eps_ls);
    }
    if (lole <= 0.0) break;
    double step = std::min(deficit / lole, cap - out.added);
    if (step <= 0.0) break;
    out.added += step;
    shave(out.ls, step);
    ++out.steps;
    deficit = expected_energy(out.ls, scenarios, grid) - limit;
  }
  out.deficit = deficit > options.eps_deficit ? deficit : 0.0;
  return out;
}

namespace {

// Shedding the dispatch chose over running capacity it already had, which
// happens when lambda_n is below a unit's marginal cost. Covers it cheapest
// unit first until the zone is within its limit; returns the MWh covered.
double run_idle_capacity(int n, double limit, NodeSeries& ls,
                         RecoveryResult& out,
                         const DualFunctionResult& solution,
                         const SystemInstance& instance,
                         const ScenarioSet& scenarios,
                         const std::vector<BlockLayout>& layouts,
                         const RecoveryOptions& options) {
  std::vector<int> units;
  for (std::size_t g = 0; g < instance.thermal.size(); ++g) {
    if (instance.zone_index(instance.thermal[g].zone) == n) {
      units.push_back(static_cast<int>(g));
    }
  }
  std::stable_sort(units.begin(), units.end(), [&](int a, int b) {
    return instance.thermal[a].marginal_cost < instance.thermal[b].marginal_cost;
  });
  double deficit = expected_energy(ls, scenarios, instance.time_grid) - limit;
  double covered = 0.0;
  for (int g : units) {
    const ThermalUnit& u = instance.thermal[g];
    for (std::size_t w = 0; w < scenarios.size(); ++w) {
      const std::vector<double>& primal = solution.scenarios[w].primal;
      for (int t = 0; t < instance.num_blocks(); ++t) {
        if (deficit <= options.eps_deficit) return covered;
        if (ls[w][t] <= 0.0) continue;
        const double cap = u.is_candidate() ? solution.plan.amount[g]
                                            : u.p_max[t] - solution.plan.amount[g];
        const double idle =
            cap - primal[layouts[w].generation[g][t]] - out.extra[w][g][t];
        const double weight =
            scenarios[w].probability * instance.time_grid.block_duration[t];
        const double take = std::min({idle, ls[w][t], deficit / weight});
        if (take <= 0.0) continue;
        ls[w][t] -= take;
        out.extra[w][g][t] += take;
        deficit -= take * weight;
        covered += take * weight;
      }
    }
  }
  return covered;
}

}  // namespace

RecoveryResult recover_all(const DualFunctionResult& solution,
                           const SystemInstance& instance,
                           const ScenarioSet& scenarios,
                           const RecoveryOptions& options) {
  const int zones = instance.num_zones();
  const int blocks = instance.num_blocks();
  const std::size_t units = instance.thermal.size();
  RecoveryResult out;
  out.plan = solution.plan;
  out.shedding = solution.shedding;
  out.extra.assign(scenarios.size(),
                   std::vector<std::vector<double>>(
                       units, std::vector<double>(blocks, 0.0)));
  const std::vector<double> before =
      eens_by_zone(solution.shedding, scenarios, instance.time_grid);
  bool have_dispatch = solution.scenarios.size() == scenarios.size();
  for (const SubproblemResult& s : solution.scenarios) {
    have_dispatch = have_dispatch && !s.primal.empty();
  }
  std::vector<BlockLayout> layouts;

  for (int n = 0; n < zones; ++n) {
    const double limit = instance.zones[n].eens_limit;
    if (before[n] - limit <= options.eps_deficit) continue;
    ZoneRecovery zr;
    zr.zone = n;
    zr.violation = before[n] - limit;

    std::vector<int> restore, build;
    for (std::size_t g = 0; g < units; ++g) {
      const ThermalUnit& u = instance.thermal[g];
      if (instance.zone_index(u.zone) != n) continue;
      if (u.is_candidate()) {
        if (u.cap_upper - out.plan.amount[g] > 0.0) build.push_back(static_cast<int>(g));
      } else if (out.plan.amount[g] > 0.0) {
        restore.push_back(static_cast<int>(g));
      }
    }
    std::stable_sort(restore.begin(), restore.end(), [&](int a, int b) {
      return instance.thermal[a].fom < instance.thermal[b].fom;
    });
    std::stable_sort(build.begin(), build.end(), [&](int a, int b) {
      return instance.thermal[a].marginal_cost > instance.thermal[b].marginal_cost;
    });

    NodeSeries ls(scenarios.size());
    for (std::size_t w = 0; w < scenarios.size(); ++w) ls[w] = out.shedding[w][n];

    if (have_dispatch) {
      if (layouts.empty()) {
        for (const Scenario& sc : scenarios) {
          layouts.push_back(ScenarioModel(instance, sc, options.model).layout());
        }
      }
      zr.redispatched = run_idle_capacity(n, limit, ls, out, solution, instance,
                                          scenarios, layouts, options);
    }

    auto apply = [&](int g, bool restoring) {
      const ThermalUnit& u = instance.thermal[g];
      const double cap =
          restoring ? out.plan.amount[g] : u.cap_upper - out.plan.amount[g];
      NodeRecovery r =
          recover_node(ls, limit, scenarios, instance.time_grid, options, cap);
      if (r.added <= 0.0) return;
      for (std::size_t w = 0; w < scenarios.size(); ++w) {
        for (int t = 0; t < blocks; ++t) {
          out.extra[w][g][t] += ls[w][t] - r.ls[w][t];
        }
      }
      ls = std::move(r.ls);
      if (restoring) {
        out.plan.amount[g] = std::max(out.plan.amount[g] - r.added, 0.0);
        zr.restored.push_back({g, r.added});
      } else {
        out.plan.amount[g] = std::min(out.plan.amount[g] + r.added, u.cap_upper);
        zr.added.push_back({g, r.added});
      }
    };
    for (int g : restore) apply(g, true);
    for (int g : build) apply(g, false);

    for (std::size_t w = 0; w < scenarios.size(); ++w) out.shedding[w][n] = ls[w];
    zr.residual =
        std::max(expected_energy(ls, scenarios, instance.time_grid) - limit, 0.0);
    if (zr.residual > options.eps_deficit) {
      out.feasible = false;
      if (!out.diagnostic.empty()) out.diagnostic += "; ";
      out.diagnostic += "zone '" + instance.zones[n].id + "' stays " +
                        std::to_string(zr.residual) +
                        " MWh above its EENS limit at full build-out";
    }
    out.zones.push_back(std::move(zr));
  }
  out.eens = eens_by_zone(out.shedding, scenarios, instance.time_grid);
  if (out.feasible) {
    out.upper_bound = upper_bound(out, solution, instance, scenarios);
    for (std::size_t w = 0; w < scenarios.size(); ++w) {
      const double p = scenarios[w].probability;
      const CostBreakdown& c = solution.scenarios[w].costs;
      out.operating.generation += p * c.generation;
      out.operating.wheeling += p * c.wheeling;
      out.operating.spillage += p * c.spillage;
    }
    out.operating.generation = out.upper_bound -
                               first_stage_cost(out.plan, instance) -
                               out.operating.wheeling - out.operating.spillage;
  }
  return out;
}

double upper_bound(const RecoveryResult& recovery,
                   const DualFunctionResult& solution,
                   const SystemInstance& instance,
                   const ScenarioSet& scenarios) {
  double total = first_stage_cost(recovery.plan, instance);
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    double op = solution.scenarios[w].costs.operating();
    for (std::size_t g = 0; g < instance.thermal.size(); ++g) {
      const double mc = instance.thermal[g].marginal_cost;
      for (int t = 0; t < instance.num_blocks(); ++t) {
        op += instance.time_grid.block_duration[t] * mc * recovery.extra[w][g][t];
      }
    }
    total += scenarios[w].probability * op;
  }
  return total;
}

double verify_recovery(const RecoveryResult& recovery,
                       const DualFunctionResult& solution,
                       const SystemInstance& instance,
                       const ScenarioSet& scenarios,
                       const ModelOptions& model) {
  double worst = 0.0;
  for (std::size_t w = 0; w < scenarios.size(); ++w) {
    ScenarioModel sm(instance, scenarios[w], model);
    sm.set_plan(recovery.plan);
    const BlockLayout& layout = sm.layout();
    std::vector<double> x = solution.scenarios[w].primal;
    for (std::size_t g = 0; g < instance.thermal.size(); ++g) {
      for (int t = 0; t < instance.num_blocks(); ++t) {
        x[layout.generation[g][t]] += recovery.extra[w][g][t];
      }
    }
    for (int n = 0; n < instance.num_zones(); ++n) {
      for (int t = 0; t < instance.num_blocks(); ++t) {
        x[layout.shed[n][t]] = recovery.shedding[w][n][t];
      }
    }
    worst = std::max(worst, sm.problem().max_violation(x));
  }
  return worst;
}

}  // namespace cep
