#include "cep/lp/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace cep::lp {

std::string_view to_string(Status status) {
  switch (status) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
    case Status::kNumericFailure:
      return "numeric_failure";
    case Status::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using LuSolver = Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>;

constexpr double kEtaDropTolerance = 1e-14;
constexpr double kDegenerateStep = 1e-12;

struct Eta {
  int position = 0;
  double pivot = 1.0;
  std::vector<int> index;
  std::vector<double> value;
};

// Slack bounds so that a_i'x + s_i = b_i reproduces the row sense.
std::pair<double, double> slack_bounds(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return {0.0, kInfinity};
    case Sense::kGreaterEqual:
      return {-kInfinity, 0.0};
    case Sense::kEqual:
      return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

class Engine {
 public:
  Engine(const Problem& problem, const Tolerances& tol)
      : problem_(problem),
        tol_(tol),
        m_(problem.num_constraints()),
        n_(problem.num_variables()),
        total_(m_ + n_) {
    build_matrix();
  }

  Solution run(const Basis* warm_start);

 private:
  void build_matrix();
  void set_slack_basis();
  bool load_basis(const Basis& basis);
  void place_nonbasic(int j, BasisStatus requested);
  bool refactor();
  void recompute_basic_values();
  bool recover_from_singular_basis();

  template <typename Fn>
  void for_column(int j, Fn&& fn) const {
    if (j < n_) {
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        fn(row_index_[p], value_[p]);
      }
    } else {
      fn(j - n_, 1.0);
    }
  }

  double column_dot(const Eigen::VectorXd& y, int j) const {
    double sum = 0.0;
    for_column(j, [&](int row, double v) { sum += y[row] * v; });
    return sum;
  }

  Eigen::VectorXd ftran(int j) const;
  Eigen::VectorXd btran(Eigen::VectorXd c) const;

  Solution finish(Status status);
  Solution solve_without_rows();

  const Problem& problem_;
  Tolerances tol_;
  int m_;
  int n_;
  int total_;

  std::vector<int> col_start_;
  std::vector<int> row_index_;
  std::vector<double> value_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;  // scaled by 1 / cost_scale_
  std::vector<double> rhs_;
  double cost_scale_ = 1.0;

  std::vector<double> x_;
  std::vector<BasisStatus> status_;
  std::vector<int> head_;
  std::vector<int> position_;

  mutable LuSolver lu_;
  std::vector<Eta> etas_;
  bool fresh_ = false;
  int refactor_failures_ = 0;

  Eigen::VectorXd y_;
  std::vector<double> ray_;
  std::int64_t iterations_ = 0;
};

void Engine::build_matrix() {
  // Assemble CSC, summing duplicate (row, col) entries.
  std::vector<std::vector<std::pair<int, double>>> columns(n_);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : problem_.constraint(i).terms) {
      if (t.coef != 0.0) columns[t.var].emplace_back(i, t.coef);
    }
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) {
    auto& col = columns[j];
    std::sort(col.begin(), col.end());
    int last_row = -1;
    for (const auto& [row, v] : col) {
      if (row == last_row) {
        value_.back() += v;
      } else {
        row_index_.push_back(row);
        value_.push_back(v);
        last_row = row;
      }
    }
    col_start_[j + 1] = static_cast<int>(row_index_.size());
  }

  lower_.resize(total_);
  upper_.resize(total_);
  cost_.assign(total_, 0.0);
  double max_cost = 0.0;
  for (int j = 0; j < n_; ++j) {
    const Variable& v = problem_.variable(j);
    lower_[j] = v.lower;
    upper_[j] = v.upper;
    max_cost = std::max(max_cost, std::abs(v.cost));
  }
  cost_scale_ = std::max(1.0, max_cost);
  for (int j = 0; j < n_; ++j) {
    cost_[j] = problem_.variable(j).cost / cost_scale_;
  }
  rhs_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = problem_.constraint(i);
    rhs_[i] = c.rhs;
    const auto [lo, hi] = slack_bounds(c.sense);
    lower_[n_ + i] = lo;
    upper_[n_ + i] = hi;
  }
}

void Engine::place_nonbasic(int j, BasisStatus requested) {
  const bool has_lower = std::isfinite(lower_[j]);
  const bool has_upper = std::isfinite(upper_[j]);
  BasisStatus s = requested;
  if (s == BasisStatus::kAtLower && !has_lower) {
    s = has_upper ? BasisStatus::kAtUpper : BasisStatus::kFreeZero;
  } else if (s == BasisStatus::kAtUpper && !has_upper) {
    s = has_lower ? BasisStatus::kAtLower : BasisStatus::kFreeZero;
  } else if (s == BasisStatus::kFreeZero || s == BasisStatus::kBasic) {
    s = has_lower   ? BasisStatus::kAtLower
        : has_upper ? BasisStatus::kAtUpper
                    : BasisStatus::kFreeZero;
  }
  status_[j] = s;
  position_[j] = -1;
  switch (s) {
    case BasisStatus::kAtLower:
      x_[j] = lower_[j];
      break;
    case BasisStatus::kAtUpper:
      x_[j] = upper_[j];
      break;
    default:
      x_[j] = 0.0;
      break;
  }
}

void Engine::set_slack_basis() {
  x_.assign(total_, 0.0);
  status_.assign(total_, BasisStatus::kAtLower);
  position_.assign(total_, -1);
  head_.assign(m_, 0);
  for (int j = 0; j < n_; ++j) place_nonbasic(j, BasisStatus::kAtLower);
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    status_[j] = BasisStatus::kBasic;
    head_[i] = j;
    position_[j] = i;
  }
}

bool Engine::load_basis(const Basis& basis) {
  if (static_cast<int>(basis.status.size()) != total_) return false;
  int basic = 0;
  for (BasisStatus s : basis.status) basic += s == BasisStatus::kBasic;
  if (basic != m_) return false;
  x_.assign(total_, 0.0);
  status_.assign(total_, BasisStatus::kAtLower);
  position_.assign(total_, -1);
  head_.clear();
  for (int j = 0; j < total_; ++j) {
    if (basis.status[j] == BasisStatus::kBasic) {
      status_[j] = BasisStatus::kBasic;
      position_[j] = static_cast<int>(head_.size());
      head_.push_back(j);
    } else {
      place_nonbasic(j, basis.status[j]);
    }
  }
  return true;
}

bool Engine::refactor() {
  etas_.clear();
  if (m_ == 0) return true;
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(m_) * 3);
  for (int k = 0; k < m_; ++k) {
    for_column(head_[k], [&](int row, double v) {
      triplets.emplace_back(row, k, v);
    });
  }
  SparseMatrix basis(m_, m_);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  basis.makeCompressed();
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  if (lu_.info() != Eigen::Success) return false;
  fresh_ = true;
  return true;
}

Eigen::VectorXd Engine::ftran(int j) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
  for_column(j, [&](int row, double v) { a[row] += v; });
  Eigen::VectorXd z = lu_.solve(a);
  for (const Eta& eta : etas_) {
    const double zr = z[eta.position] / eta.pivot;
    if (zr != 0.0) {
      for (std::size_t p = 0; p < eta.index.size(); ++p) {
        z[eta.index[p]] -= eta.value[p] * zr;
      }
    }
    z[eta.position] = zr;
  }
  return z;
}

Eigen::VectorXd Engine::btran(Eigen::VectorXd u) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double sum = u[it->position];
    for (std::size_t p = 0; p < it->index.size(); ++p) {
      sum -= u[it->index[p]] * it->value[p];
    }
    u[it->position] = sum / it->pivot;
  }
  return lu_.transpose().solve(u);
}

void Engine::recompute_basic_values() {
  if (m_ == 0) return;
  Eigen::VectorXd r(m_);
  for (int i = 0; i < m_; ++i) r[i] = rhs_[i];
  for (int j = 0; j < total_; ++j) {
    if (status_[j] == BasisStatus::kBasic || x_[j] == 0.0) continue;
    const double xj = x_[j];
    for_column(j, [&](int row, double v) { r[row] -= v * xj; });
  }
  const Eigen::VectorXd xb = lu_.solve(r);
  for (int k = 0; k < m_; ++k) x_[head_[k]] = xb[k];
}

// Falls back to the slack basis, keeping structural values at the nearest
// bound. Returns false once the retry budget is spent.
bool Engine::recover_from_singular_basis() {
  if (++refactor_failures_ > tol_.max_refactor_retries) return false;
  std::vector<double> previous = x_;
  set_slack_basis();
  for (int j = 0; j < n_; ++j) {
    const bool has_lower = std::isfinite(lower_[j]);
    const bool has_upper = std::isfinite(upper_[j]);
    if (has_lower && has_upper) {
      place_nonbasic(j, std::abs(previous[j] - lower_[j]) <=
                                std::abs(previous[j] - upper_[j])
                            ? BasisStatus::kAtLower
                            : BasisStatus::kAtUpper);
    }
  }
  if (!refactor()) return false;
  recompute_basic_values();
  return true;
}

Solution Engine::solve_without_rows() {
  x_.assign(total_, 0.0);
  status_.assign(total_, BasisStatus::kAtLower);
  position_.assign(total_, -1);
  for (int j = 0; j < n_; ++j) {
    const double c = cost_[j];
    if (c > 0.0) {
      if (!std::isfinite(lower_[j])) {
        ray_.assign(n_, 0.0);
        ray_[j] = -1.0;
        return finish(Status::kUnbounded);
      }
      x_[j] = lower_[j];
      status_[j] = BasisStatus::kAtLower;
    } else if (c < 0.0) {
      if (!std::isfinite(upper_[j])) {
        ray_.assign(n_, 0.0);
        ray_[j] = 1.0;
        return finish(Status::kUnbounded);
      }
      x_[j] = upper_[j];
      status_[j] = BasisStatus::kAtUpper;
    } else {
      place_nonbasic(j, BasisStatus::kAtLower);
    }
  }
  y_ = Eigen::VectorXd::Zero(0);
  return finish(Status::kOptimal);
}

Solution Engine::run(const Basis* warm_start) {
  if (m_ == 0) return solve_without_rows();

  bool loaded = warm_start != nullptr && load_basis(*warm_start) && refactor();
  if (!loaded) {
    set_slack_basis();
    if (!refactor()) return finish(Status::kNumericFailure);
  }
  recompute_basic_values();

  const std::int64_t max_iterations =
      tol_.max_iterations > 0
          ? tol_.max_iterations
          : 50 * static_cast<std::int64_t>(total_) + 10000;
  const double ftol = tol_.feasibility;
  const double dtol = tol_.optimality;
  int degenerate_run = 0;
  bool bland = false;
  Eigen::VectorXd phase_cost(m_);

  for (;;) {
    if (iterations_ >= max_iterations) return finish(Status::kIterationLimit);
    if (static_cast<int>(etas_.size()) >= tol_.refactor_interval) {
      if (!refactor()) {
        if (!recover_from_singular_basis()) {
          return finish(Status::kNumericFailure);
        }
      } else {
        recompute_basic_values();
      }
    }

    // Phase selection from the current basic values.
    bool phase_one = false;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      double w = 0.0;
      if (x_[j] < lower_[j] - ftol) {
        w = -1.0;
      } else if (x_[j] > upper_[j] + ftol) {
        w = 1.0;
      }
      if (w != 0.0) phase_one = true;
      phase_cost[k] = w;
    }
    if (!phase_one) {
      for (int k = 0; k < m_; ++k) phase_cost[k] = cost_[head_[k]];
    }
    y_ = btran(phase_cost);

    // Pricing.
    int entering = -1;
    double direction = 0.0;
    double best_score = 0.0;
    for (int j = 0; j < total_; ++j) {
      const BasisStatus s = status_[j];
      if (s == BasisStatus::kBasic || lower_[j] == upper_[j]) continue;
      const double d = (phase_one ? 0.0 : cost_[j]) - column_dot(y_, j);
      double sigma = 0.0;
      if (s == BasisStatus::kAtLower && d < -dtol) {
        sigma = 1.0;
      } else if (s == BasisStatus::kAtUpper && d > dtol) {
        sigma = -1.0;
      } else if (s == BasisStatus::kFreeZero && std::abs(d) > dtol) {
        sigma = d < 0.0 ? 1.0 : -1.0;
      }
      if (sigma == 0.0) continue;
      if (bland) {
        entering = j;
        direction = sigma;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        direction = sigma;
      }
    }

    if (entering < 0) {
      if (!fresh_) {
        if (!refactor()) {
          if (!recover_from_singular_basis()) {
            return finish(Status::kNumericFailure);
          }
        } else {
          recompute_basic_values();
        }
        continue;
      }
      if (phase_one) {
        ray_.assign(y_.data(), y_.data() + m_);
        return finish(Status::kInfeasible);
      }
      return finish(Status::kOptimal);
    }

    const Eigen::VectorXd alpha = ftran(entering);

    // Ratio test. Basic variable k moves at rate -direction * alpha[k].
    struct Candidate {
      int position;
      double step;
      bool to_upper;
    };
    auto breakpoint = [&](int k, double slack_tol,
                          Candidate* out) -> bool {
      const double a = alpha[k];
      if (std::abs(a) <= tol_.pivot) return false;
      const double rate = -direction * a;
      const int j = head_[k];
      const double xj = x_[j];
      if (rate < 0.0) {
        if (xj > upper_[j] + ftol) {
          *out = {k, (xj - upper_[j] + slack_tol) / -rate, true};
          return true;
        }
        if (xj >= lower_[j] - ftol && std::isfinite(lower_[j])) {
          *out = {k, (std::max(0.0, xj - lower_[j]) + slack_tol) / -rate,
                  false};
          return true;
        }
        return false;
      }
      if (xj < lower_[j] - ftol) {
        *out = {k, (lower_[j] - xj + slack_tol) / rate, false};
        return true;
      }
      if (xj <= upper_[j] + ftol && std::isfinite(upper_[j])) {
        *out = {k, (std::max(0.0, upper_[j] - xj) + slack_tol) / rate, true};
        return true;
      }
      return false;
    };

    int leave = -1;
    bool leave_to_upper = false;
    double step = kInfinity;
    if (bland) {
      int leave_column = -1;
      for (int k = 0; k < m_; ++k) {
        Candidate c;
        if (!breakpoint(k, 0.0, &c)) continue;
        if (c.step < step - kDegenerateStep ||
            (c.step <= step + kDegenerateStep &&
             head_[k] < leave_column)) {
          step = c.step;
          leave = k;
          leave_to_upper = c.to_upper;
          leave_column = head_[k];
        }
      }
    } else {
      // Harris two-pass: relax bounds by ftol to find the admissible step,
      // then take the largest pivot among breakpoints inside it.
      double relaxed = kInfinity;
      for (int k = 0; k < m_; ++k) {
        Candidate c;
        if (breakpoint(k, ftol, &c)) relaxed = std::min(relaxed, c.step);
      }
      double best_pivot = 0.0;
      for (int k = 0; k < m_; ++k) {
        Candidate c;
        if (!breakpoint(k, 0.0, &c) || c.step > relaxed) continue;
        const double pivot = std::abs(alpha[k]);
        if (pivot > best_pivot ||
            (leave >= 0 && pivot == best_pivot && head_[k] < head_[leave])) {
          best_pivot = pivot;
          leave = k;
          leave_to_upper = c.to_upper;
          step = c.step;
        }
      }
    }

    const double flip =
        std::isfinite(lower_[entering]) && std::isfinite(upper_[entering])
            ? upper_[entering] - lower_[entering]
            : kInfinity;
    const bool bound_flip = flip <= step;
    if (bound_flip) step = flip;

    if (!std::isfinite(step)) {
      if (!fresh_) {
        if (!refactor()) {
          if (!recover_from_singular_basis()) {
            return finish(Status::kNumericFailure);
          }
        } else {
          recompute_basic_values();
        }
        continue;
      }
      // The phase 1 objective is bounded below; an unbounded ray there means
      // the factorization cannot be trusted.
      if (phase_one) return finish(Status::kNumericFailure);
      ray_.assign(n_, 0.0);
      if (entering < n_) ray_[entering] = direction;
      for (int k = 0; k < m_; ++k) {
        if (head_[k] < n_) ray_[head_[k]] = -direction * alpha[k];
      }
      return finish(Status::kUnbounded);
    }

    ++iterations_;
    if (step <= kDegenerateStep) {
      if (++degenerate_run >= tol_.stall_threshold) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    const double delta = direction * step;
    if (delta != 0.0) {
      x_[entering] += delta;
      for (int k = 0; k < m_; ++k) {
        if (alpha[k] != 0.0) x_[head_[k]] -= delta * alpha[k];
      }
    }

    if (bound_flip) {
      if (direction > 0.0) {
        status_[entering] = BasisStatus::kAtUpper;
        x_[entering] = upper_[entering];
      } else {
        status_[entering] = BasisStatus::kAtLower;
        x_[entering] = lower_[entering];
      }
      continue;
    }

    const int leaving = head_[leave];
    if (leave_to_upper && lower_[leaving] != upper_[leaving]) {
      status_[leaving] = BasisStatus::kAtUpper;
      x_[leaving] = upper_[leaving];
    } else if (leave_to_upper) {
      status_[leaving] = BasisStatus::kAtLower;
      x_[leaving] = upper_[leaving];
    } else {
      status_[leaving] = BasisStatus::kAtLower;
      x_[leaving] = lower_[leaving];
    }
    position_[leaving] = -1;
    status_[entering] = BasisStatus::kBasic;
    head_[leave] = entering;
    position_[entering] = leave;

    Eta eta;
    eta.position = leave;
    eta.pivot = alpha[leave];
    for (int k = 0; k < m_; ++k) {
      if (k != leave && std::abs(alpha[k]) > kEtaDropTolerance) {
        eta.index.push_back(k);
        eta.value.push_back(alpha[k]);
      }
    }
    etas_.push_back(std::move(eta));
    fresh_ = false;
  }
}

Solution Engine::finish(Status status) {
  Solution out;
  out.status = status;
  out.iterations = iterations_;
  out.primal.assign(x_.begin(), x_.begin() + n_);
  out.row_activity = problem_.row_activity(out.primal);
  out.objective = problem_.evaluate_objective(out.primal);
  out.basis.status = status_;
  if (status == Status::kOptimal) {
    out.dual.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) out.dual[i] = y_[i] * cost_scale_;
    out.reduced_cost.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == BasisStatus::kBasic) continue;
      double d = problem_.variable(j).cost;
      for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        d -= out.dual[row_index_[p]] * value_[p];
      }
      out.reduced_cost[j] = d;
    }
  }
  out.ray = std::move(ray_);
  return out;
}

}  // namespace

SimplexSolver::SimplexSolver(Tolerances tolerances)
    : tolerances_(tolerances) {}

SimplexSolver::~SimplexSolver() = default;

Solution SimplexSolver::solve(const Problem& problem, const Basis* warm_start) {
  Engine engine(problem, tolerances_);
  return engine.run(warm_start);
}

Solution solve(const Problem& problem, const Tolerances& tolerances) {
  SimplexSolver solver(tolerances);
  return solver.solve(problem);
}

double dual_objective(const Problem& problem, const Solution& solution,
                      double zero_tolerance) {
  double total = problem.objective_offset();
  for (int i = 0; i < problem.num_constraints(); ++i) {
    total += solution.dual[i] * problem.constraint(i).rhs;
  }
  for (int j = 0; j < problem.num_variables(); ++j) {
    const double d = solution.reduced_cost[j];
    const Variable& v = problem.variable(j);
    if (d > zero_tolerance) {
      if (!std::isfinite(v.lower)) return -kInfinity;
      total += d * v.lower;
    } else if (d < -zero_tolerance) {
      if (!std::isfinite(v.upper)) return -kInfinity;
      total += d * v.upper;
    } else if (d != 0.0) {
      // Within tolerance: charge it to whichever bound is finite.
      total += d * (std::isfinite(v.lower)   ? v.lower
                    : std::isfinite(v.upper) ? v.upper
                                             : 0.0);
    }
  }
  return total;
}

double dual_infeasibility(const Problem& problem, const Solution& solution) {
  double worst = 0.0;
  auto check = [&](double d, double lower, double upper) {
    if (!std::isfinite(lower)) worst = std::max(worst, d);
    if (!std::isfinite(upper)) worst = std::max(worst, -d);
  };
  for (int j = 0; j < problem.num_variables(); ++j) {
    const Variable& v = problem.variable(j);
    check(solution.reduced_cost[j], v.lower, v.upper);
  }
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const auto [lo, hi] = slack_bounds(problem.constraint(i).sense);
    check(-solution.dual[i], lo, hi);
  }
  return worst;
}

double farkas_margin(const Problem& problem, const std::vector<double>& ray) {
  const int m = problem.num_constraints();
  const int n = problem.num_variables();
  double scale = 0.0;
  for (double v : ray) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return -kInfinity;
  std::vector<double> y(ray.size());
  for (std::size_t i = 0; i < ray.size(); ++i) {
    y[i] = std::abs(ray[i]) > 1e-12 * scale ? ray[i] / scale : 0.0;
  }
  std::vector<double> weight(n, 0.0);
  double rhs = 0.0;
  double box_max = 0.0;
  for (int i = 0; i < m; ++i) {
    const Constraint& c = problem.constraint(i);
    rhs += y[i] * c.rhs;
    for (const Term& t : c.terms) weight[t.var] += y[i] * t.coef;
    const auto [lo, hi] = slack_bounds(c.sense);
    if (y[i] > 0.0) {
      if (!std::isfinite(hi)) return -kInfinity;
      box_max += y[i] * hi;
    } else if (y[i] < 0.0) {
      if (!std::isfinite(lo)) return -kInfinity;
      box_max += y[i] * lo;
    }
  }
  for (int j = 0; j < n; ++j) {
    const Variable& v = problem.variable(j);
    if (std::abs(weight[j]) <= 1e-9) weight[j] = 0.0;
    if (weight[j] > 0.0) {
      if (!std::isfinite(v.upper)) return -kInfinity;
      box_max += weight[j] * v.upper;
    } else if (weight[j] < 0.0) {
      if (!std::isfinite(v.lower)) return -kInfinity;
      box_max += weight[j] * v.lower;
    }
  }
  return rhs - box_max;
}

}  // namespace cep::lp
