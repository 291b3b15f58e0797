#include "reluwalk/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reluwalk/error.hpp"

namespace reluwalk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroRow = 1e-13;
constexpr double kTie = 1e-12;

enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper };

// Tableau over shifted variables y = x - lower, 0 <= y <= width, followed by
// one slack per row and one artificial per row that started infeasible.
class BoundedSimplex {
 public:
  BoundedSimplex(std::size_t structural, std::vector<std::vector<double>> rows, std::vector<double> rhs,
                 std::vector<double> widths)
      : n_(structural), m_(rows.size()) {
    std::size_t artificials = 0;
    for (double r : rhs) artificials += r < 0.0 ? 1 : 0;
    cols_ = n_ + m_ + artificials;
    tableau_.assign(m_ * cols_, 0.0);
    upper_.assign(cols_, kInf);
    state_.assign(cols_, VarState::kAtLower);
    basis_.resize(m_);
    beta_.resize(m_);
    std::copy(widths.begin(), widths.end(), upper_.begin());
    first_artificial_ = n_ + m_;

    std::size_t next_art = first_artificial_;
    for (std::size_t i = 0; i < m_; ++i) {
      const bool flip = rhs[i] < 0.0;
      const double sign = flip ? -1.0 : 1.0;
      double* row = &tableau_[i * cols_];
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * rows[i][j];
      row[n_ + i] = sign;
      beta_[i] = sign * rhs[i];
      if (flip) {
        row[next_art] = 1.0;
        basis_[i] = next_art;
        state_[next_art] = VarState::kBasic;
        ++next_art;
      } else {
        basis_[i] = n_ + i;
        state_[n_ + i] = VarState::kBasic;
      }
    }
  }

  bool has_artificials() const noexcept { return cols_ > first_artificial_; }

  enum class Result { kOptimal, kFailure };

  Result run(const std::vector<double>& cost) {
    const std::size_t cap = 50 * (m_ + cols_) + 1000;
    std::vector<double> reduced(cols_);
    for (std::size_t iter = 0; iter < cap; ++iter) {
      // Reduced costs d_j = c_j - c_B^T T_j.
      for (std::size_t j = 0; j < cols_; ++j) reduced[j] = cost[j];
      for (std::size_t i = 0; i < m_; ++i) {
        const double cb = cost[basis_[i]];
        if (cb == 0.0) continue;
        const double* row = &tableau_[i * cols_];
        for (std::size_t j = 0; j < cols_; ++j) reduced[j] -= cb * row[j];
      }
      // Bland: lowest-index improving nonbasic variable.
      std::size_t entering = cols_;
      double direction = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::kBasic || upper_[j] == 0.0) continue;
        if (state_[j] == VarState::kAtLower && reduced[j] > lp_tolerance::kOptimality) {
          entering = j;
          direction = 1.0;
          break;
        }
        if (state_[j] == VarState::kAtUpper && reduced[j] < -lp_tolerance::kOptimality) {
          entering = j;
          direction = -1.0;
          break;
        }
      }
      if (entering == cols_) return Result::kOptimal;

      // Ratio test; the entering variable's own bound competes as a flip.
      double theta = upper_[entering];
      std::size_t leave_row = m_;
      std::size_t leave_var = entering;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = direction * tableau_[i * cols_ + entering];
        double limit;
        if (alpha > lp_tolerance::kPivot) {
          limit = beta_[i] / alpha;
        } else if (alpha < -lp_tolerance::kPivot && std::isfinite(upper_[basis_[i]])) {
          limit = (upper_[basis_[i]] - beta_[i]) / -alpha;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        if (limit < theta - kTie || (limit <= theta + kTie && basis_[i] < leave_var)) {
          theta = std::min(limit, theta);
          leave_row = i;
          leave_var = basis_[i];
        }
      }
      if (!std::isfinite(theta)) return Result::kFailure;

      ++pivots_;
      for (std::size_t i = 0; i < m_; ++i) {
        beta_[i] -= theta * direction * tableau_[i * cols_ + entering];
      }
      if (leave_row == m_) {
        state_[entering] =
            state_[entering] == VarState::kAtLower ? VarState::kAtUpper : VarState::kAtLower;
        continue;
      }
      const double alpha_r = direction * tableau_[leave_row * cols_ + entering];
      state_[leave_var] = alpha_r > 0.0 ? VarState::kAtLower : VarState::kAtUpper;
      const double entering_value =
          state_[entering] == VarState::kAtLower ? theta : upper_[entering] - theta;
      pivot(leave_row, entering);
      basis_[leave_row] = entering;
      state_[entering] = VarState::kBasic;
      beta_[leave_row] = entering_value;
    }
    return Result::kFailure;
  }

  double artificial_sum() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= first_artificial_) s += std::max(0.0, beta_[i]);
    }
    return s;
  }

  void lock_artificials() {
    for (std::size_t j = first_artificial_; j < cols_; ++j) upper_[j] = 0.0;
  }

  std::vector<double> structural_values() const {
    std::vector<double> y(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == VarState::kAtUpper) y[j] = upper_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) y[basis_[i]] = std::clamp(beta_[i], 0.0, upper_[basis_[i]]);
    }
    return y;
  }

  std::size_t columns() const noexcept { return cols_; }
  std::size_t first_artificial() const noexcept { return first_artificial_; }
  std::size_t pivots() const noexcept { return pivots_; }

 private:
  void pivot(std::size_t r, std::size_t c) {
    double* prow = &tableau_[r * cols_];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[i * cols_];
      const double factor = row[c];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= factor * prow[j];
      row[c] = 0.0;
    }
  }

  std::size_t n_;
  std::size_t m_;
  std::size_t cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::vector<double> tableau_;
  std::vector<double> upper_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  std::vector<double> beta_;
  std::size_t pivots_ = 0;
};

}  // namespace

std::string_view to_string(LpStatus status) noexcept {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kSolverFailure: return "solver_failure";
  }
  return "unknown";
}

LpOutcome solve_lp(const LinearProgram& lp) {
  const Box& box = lp.box;
  const std::size_t n = box.dim();
  if (lp.objective.size() != n) throw InputError("solve_lp: objective length != box dimension");
  for (const auto& h : lp.halfspaces) {
    if (h.normal.size() != n) throw InputError("solve_lp: halfspace dimension mismatch");
  }

  // Rows as  coeffs . y <= rhs  with y = x - lower, each scaled to unit max-norm.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  rows.reserve(lp.halfspaces.size());
  for (const auto& h : lp.halfspaces) {
    const double sign = h.sense == Sense::kGreaterEqual ? -1.0 : 1.0;
    std::vector<double> coeffs(n);
    double r = -sign * h.offset;
    double scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      coeffs[j] = sign * h.normal[j];
      r -= coeffs[j] * box.lower()[j];
      scale = std::max(scale, std::abs(coeffs[j]));
    }
    if (scale <= kZeroRow) {
      // Constant row: satisfied or not, independent of x.
      if (r < -lp_tolerance::kFeasibility) return {LpStatus::kInfeasible, {}, {}, 0};
      continue;
    }
    for (double& c : coeffs) c /= scale;
    rows.push_back(std::move(coeffs));
    rhs.push_back(r / scale);
  }

  std::vector<double> widths(n);
  for (std::size_t j = 0; j < n; ++j) widths[j] = box.upper()[j] - box.lower()[j];

  BoundedSimplex simplex(n, std::move(rows), std::move(rhs), std::move(widths));

  if (simplex.has_artificials()) {
    std::vector<double> phase1(simplex.columns(), 0.0);
    for (std::size_t j = simplex.first_artificial(); j < simplex.columns(); ++j) phase1[j] = -1.0;
    if (simplex.run(phase1) != BoundedSimplex::Result::kOptimal) {
      return {LpStatus::kSolverFailure, {}, {}, simplex.pivots()};
    }
    if (simplex.artificial_sum() > lp_tolerance::kFeasibility) {
      return {LpStatus::kInfeasible, {}, {}, simplex.pivots()};
    }
    simplex.lock_artificials();
  }

  double obj_scale = 0.0;
  for (double c : lp.objective) obj_scale = std::max(obj_scale, std::abs(c));
  std::vector<double> phase2(simplex.columns(), 0.0);
  if (obj_scale > 0.0) {
    for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.objective[j] / obj_scale;
  }
  if (simplex.run(phase2) != BoundedSimplex::Result::kOptimal) {
    return {LpStatus::kSolverFailure, {}, {}, simplex.pivots()};
  }

  std::vector<double> x = simplex.structural_values();
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::clamp(x[j] + box.lower()[j], box.lower()[j], box.upper()[j]);
  }
  for (const auto& h : lp.halfspaces) {
    if (h.violation(x) > lp_tolerance::kFeasibility) {
      return {LpStatus::kSolverFailure, {}, {}, simplex.pivots()};
    }
  }
  double value = 0.0;
  for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * x[j];
  return {LpStatus::kOptimal, std::move(x), value, simplex.pivots()};
}

}  // namespace reluwalk
