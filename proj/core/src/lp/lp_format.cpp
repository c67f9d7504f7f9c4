#include "cep/lp/lp_format.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace cep::lp {
namespace {

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// LP-format names may not start with a digit or contain spaces and a few
// operator characters.
std::string sanitize(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '.' || c == '(' || c == ')' || c == ',';
    out.push_back(ok ? c : '_');
  }
  if (!out.empty() && std::isdigit(static_cast<unsigned char>(out[0]))) {
    out.insert(out.begin(), '_');
  }
  return out;
}

std::vector<std::string> unique_names(std::size_t count, char prefix,
                                      auto&& name_of) {
  std::vector<std::string> names(count);
  std::unordered_set<std::string> seen;
  for (std::size_t k = 0; k < count; ++k) {
    std::string n = sanitize(name_of(k));
    if (n.empty() || !seen.insert(n).second) {
      n = std::string(1, prefix) + std::to_string(k);
      seen.insert(n);
    }
    names[k] = std::move(n);
  }
  return names;
}

void write_terms(std::ostream& out, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  if (terms.empty()) {
    out << " 0 " << names.front();
    return;
  }
  for (const Term& t : terms) {
    out << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef))
        << ' ' << names[t.var];
  }
}

}  // namespace

void write_lp_format(const Problem& problem, std::ostream& out) {
  const auto vars = unique_names(
      problem.num_variables(), 'x',
      [&](std::size_t j) { return problem.variable(static_cast<int>(j)).name; });
  const auto rows = unique_names(
      problem.num_constraints(), 'c', [&](std::size_t i) {
        return problem.constraint(static_cast<int>(i)).name;
      });

  out << "\\ " << problem.num_variables() << " columns, "
      << problem.num_constraints() << " rows\n";
  out << "Minimize\n obj:";
  std::vector<Term> objective;
  for (int j = 0; j < problem.num_variables(); ++j) {
    if (problem.variable(j).cost != 0.0) {
      objective.push_back({j, problem.variable(j).cost});
    }
  }
  if (objective.empty() && problem.num_variables() > 0) {
    objective.push_back({0, 0.0});
  }
  if (!objective.empty()) write_terms(out, objective, vars);
  if (problem.objective_offset() != 0.0) {
    out << (problem.objective_offset() < 0 ? " - " : " + ")
        << format_number(std::abs(problem.objective_offset()));
  }
  out << "\nSubject To\n";
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const Constraint& c = problem.constraint(i);
    if (c.terms.empty() && problem.num_variables() == 0) continue;
    out << ' ' << rows[i] << ':';
    write_terms(out, c.terms, vars);
    switch (c.sense) {
      case Sense::kLessEqual:
        out << " <= ";
        break;
      case Sense::kGreaterEqual:
        out << " >= ";
        break;
      case Sense::kEqual:
        out << " = ";
        break;
    }
    out << format_number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < problem.num_variables(); ++j) {
    const Variable& v = problem.variable(j);
    const bool lo = std::isfinite(v.lower);
    const bool hi = std::isfinite(v.upper);
    if (!lo && !hi) {
      out << ' ' << vars[j] << " free\n";
    } else if (lo && hi && v.lower == v.upper) {
      out << ' ' << vars[j] << " = " << format_number(v.lower) << '\n';
    } else {
      out << ' ' << (lo ? format_number(v.lower) : std::string("-inf"))
          << " <= " << vars[j] << " <= "
          << (hi ? format_number(v.upper) : std::string("+inf")) << '\n';
    }
  }
  out << "End\n";
}

std::string to_lp_format(const Problem& problem) {
  std::ostringstream out;
  write_lp_format(problem, out);
  return out.str();
}

}  // namespace cep::lp
