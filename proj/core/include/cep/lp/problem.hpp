#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cep::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  double cost = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// A minimization LP over bounded variables:
//
//   min  c'x + offset
//   s.t. a_i'x (<=, =, >=) b_i      for every row i
//        l <= x <= u
//
// Rows and columns are addressed by the dense index returned when they are
// added. Problems are plain values; they are freely copyable and may be shared
// read-only between threads.
class Problem {
 public:
  int add_variable(std::string name, double lower, double upper, double cost);
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense,
                     double rhs);
  // Appends a coefficient to an existing row. Duplicate (row, var) pairs are
  // summed when the matrix is assembled.
  void add_term(int row, int var, double coef);

  void set_cost(int var, double cost) { variables_[var].cost = cost; }
  void set_bounds(int var, double lower, double upper);
  void set_rhs(int row, double rhs) { constraints_[row].rhs = rhs; }
  void set_objective_offset(double offset) { objective_offset_ = offset; }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  std::size_t num_nonzeros() const;

  const Variable& variable(int j) const { return variables_[j]; }
  const Constraint& constraint(int i) const { return constraints_[i]; }
  std::span<const Variable> variables() const { return variables_; }
  std::span<const Constraint> constraints() const { return constraints_; }
  double objective_offset() const { return objective_offset_; }

  // c'x + offset, with no feasibility check.
  double evaluate_objective(std::span<const double> x) const;
  // a_i'x for every row.
  std::vector<double> row_activity(std::span<const double> x) const;
  // Largest absolute violation of any bound or row by x (0 when feasible).
  double max_violation(std::span<const double> x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  double objective_offset_ = 0.0;
};

}  // namespace cep::lp
