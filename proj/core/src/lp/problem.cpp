#include "cep/lp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cep::lp {

int Problem::add_variable(std::string name, double lower, double upper,
                          double cost) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper ||
      lower == kInfinity || upper == -kInfinity) {
    throw std::invalid_argument("invalid bounds for variable " + name);
  }
  if (!std::isfinite(cost)) {
    throw std::invalid_argument("non-finite cost for variable " + name);
  }
  variables_.push_back({std::move(name), lower, upper, cost});
  return static_cast<int>(variables_.size()) - 1;
}

int Problem::add_constraint(std::string name, std::vector<Term> terms,
                            Sense sense, double rhs) {
  if (!std::isfinite(rhs)) {
    throw std::invalid_argument("non-finite rhs for row " + name);
  }
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw std::out_of_range("row " + name + " references unknown variable");
    }
  }
  constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
  return static_cast<int>(constraints_.size()) - 1;
}

void Problem::add_term(int row, int var, double coef) {
  if (var < 0 || var >= num_variables()) {
    throw std::out_of_range("add_term references unknown variable");
  }
  constraints_.at(row).terms.push_back({var, coef});
}

void Problem::set_bounds(int var, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper) || lower > upper) {
    throw std::invalid_argument("invalid bounds for variable " +
                                variables_[var].name);
  }
  variables_[var].lower = lower;
  variables_[var].upper = upper;
}

std::size_t Problem::num_nonzeros() const {
  std::size_t nnz = 0;
  for (const Constraint& c : constraints_) nnz += c.terms.size();
  return nnz;
}

double Problem::evaluate_objective(std::span<const double> x) const {
  double total = objective_offset_;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    total += variables_[j].cost * x[j];
  }
  return total;
}

std::vector<double> Problem::row_activity(std::span<const double> x) const {
  std::vector<double> activity(constraints_.size(), 0.0);
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    double sum = 0.0;
    for (const Term& t : constraints_[i].terms) sum += t.coef * x[t.var];
    activity[i] = sum;
  }
  return activity;
}

double Problem::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max(worst, variables_[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables_[j].upper);
  }
  const std::vector<double> activity = row_activity(x);
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const double rhs = constraints_[i].rhs;
    switch (constraints_[i].sense) {
      case Sense::kLessEqual:
        worst = std::max(worst, activity[i] - rhs);
        break;
      case Sense::kGreaterEqual:
        worst = std::max(worst, rhs - activity[i]);
        break;
      case Sense::kEqual:
        worst = std::max(worst, std::abs(activity[i] - rhs));
        break;
    }
  }
  return worst;
}

}  // namespace cep::lp
