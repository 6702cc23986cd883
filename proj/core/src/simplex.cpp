#include "fusionlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include <gmpxx.h>

#include "fusionlab/error.hpp"

namespace fusionlab::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

template <typename Scalar>
void Problem<Scalar>::add_column(Column<Scalar> col, Scalar cost) {
  if (col.rows.size() != col.values.size()) throw Error(ErrorCode::DimensionMismatch, "column rows/values");
  for (auto r : col.rows)
    if (r >= rows) throw Error(ErrorCode::OutOfRange, "column row index");
  if (!c.empty() || cost != Scalar(0)) {
    c.resize(columns.size(), Scalar(0));
    c.push_back(cost);
  }
  columns.push_back(std::move(col));
}

namespace {

template <typename Scalar>
constexpr bool kFloating = std::is_floating_point_v<Scalar>;

template <typename Scalar>
double magnitude(const Scalar& v) {
  if constexpr (kFloating<Scalar>) {
    return std::abs(v);
  } else {
    return std::abs(v.get_d());
  }
}

template <typename Scalar>
class Solver {
 public:
  Solver(const Problem<Scalar>& p, const Options& opt) : p_(p), opt_(opt), m_(p.rows), n_(p.cols()) {
    if (p.b.size() != m_) throw Error(ErrorCode::DimensionMismatch, "right-hand side size");
    if (!p.c.empty() && p.c.size() != n_) throw Error(ErrorCode::DimensionMismatch, "objective size");
    eps_ = zero();
    if constexpr (kFloating<Scalar>) eps_ = opt.tol;
    sign_.assign(m_, 1);
    b_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      b_[i] = p.b[i];
      if (b_[i] < zero()) {
        sign_[i] = -1;
        b_[i] = -b_[i];
      }
    }
  }

  Result<Scalar> run() {
    Result<Scalar> res;
    // phase 1: artificial basis
    basis_.resize(m_);
    in_basis_.assign(n_ + m_, -1);
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = static_cast<long>(i);
    }
    binv_.assign(m_ * m_, zero());
    for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = Scalar(1);
    xb_ = b_;
    cost_.assign(n_ + m_, zero());
    for (std::size_t i = 0; i < m_; ++i) cost_[n_ + i] = Scalar(1);
    allow_artificial_ = false;

    const Status s1 = iterate(res);
    res.phase1_iterations = res.iterations;
    if (s1 == Status::IterationLimit) {
      res.status = s1;
      return res;
    }
    Scalar infeas = zero();
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) infeas += xb_[i];
    const bool infeasible = kFloating<Scalar> ? magnitude(infeas) > 10 * opt_.tol * std::max<double>(1.0, norm_b())
                                              : infeas > zero();
    if (infeasible) {
      const auto y = duals();
      res.farkas.resize(m_);
      for (std::size_t i = 0; i < m_; ++i) res.farkas[i] = sign_[i] > 0 ? y[i] : Scalar(-y[i]);
      res.status = Status::Infeasible;
      return res;
    }
    drive_out_artificials(res);

    // phase 2
    std::fill(cost_.begin(), cost_.end(), zero());
    if (!p_.c.empty())
      for (std::size_t j = 0; j < n_; ++j) cost_[j] = p_.c[j];
    const Status s2 = iterate(res);
    res.status = s2;
    if (s2 != Status::Optimal) return res;

    res.x.assign(n_, zero());
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = xb_[i];
    if constexpr (kFloating<Scalar>) {
      for (auto& v : res.x)
        if (v < 0) v = 0;
    }
    const auto y = duals();
    res.y.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) res.y[i] = sign_[i] > 0 ? y[i] : Scalar(-y[i]);
    res.objective = zero();
    if (!p_.c.empty())
      for (std::size_t j = 0; j < n_; ++j) res.objective += p_.c[j] * res.x[j];
    return res;
  }

 private:
  static Scalar zero() { return Scalar(0); }

  double norm_b() const {
    double s = 0.0;
    for (const auto& v : b_) s = std::max(s, magnitude(v));
    return s;
  }

  // entry of the sign-adjusted column j at row i is sign_i * a_ij; artificials are unit columns
  void column_times_binv(std::size_t j, std::vector<Scalar>& u) const {
    u.assign(m_, zero());
    if (j >= n_) {
      const std::size_t r = j - n_;
      for (std::size_t i = 0; i < m_; ++i) u[i] = binv_[i * m_ + r];
      return;
    }
    const auto& col = p_.columns[j];
    for (std::size_t k = 0; k < col.rows.size(); ++k) {
      const std::size_t r = col.rows[k];
      const Scalar v = sign_[r] > 0 ? col.values[k] : Scalar(-col.values[k]);
      for (std::size_t i = 0; i < m_; ++i) u[i] += binv_[i * m_ + r] * v;
    }
  }

  std::vector<Scalar> duals() const {
    std::vector<Scalar> y(m_, zero());
    for (std::size_t i = 0; i < m_; ++i) {
      const Scalar& cb = cost_[basis_[i]];
      if (cb == zero()) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * binv_[i * m_ + k];
    }
    return y;
  }

  Scalar reduced_cost(std::size_t j, const std::vector<Scalar>& y) const {
    Scalar d = cost_[j];
    if (j >= n_) return d - y[j - n_];
    const auto& col = p_.columns[j];
    for (std::size_t k = 0; k < col.rows.size(); ++k) {
      const std::size_t r = col.rows[k];
      if (sign_[r] > 0) {
        d -= y[r] * col.values[k];
      } else {
        d += y[r] * col.values[k];
      }
    }
    return d;
  }

  void pivot(std::size_t r, std::size_t q, const std::vector<Scalar>& u) {
    const Scalar ur = u[r];
    for (std::size_t k = 0; k < m_; ++k) binv_[r * m_ + k] /= ur;
    const Scalar theta = xb_[r] / ur;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || u[i] == zero()) continue;
      const Scalar f = u[i];
      for (std::size_t k = 0; k < m_; ++k) binv_[i * m_ + k] -= f * binv_[r * m_ + k];
      xb_[i] -= f * theta;
    }
    xb_[r] = theta;
    in_basis_[basis_[r]] = -1;
    basis_[r] = q;
    in_basis_[q] = static_cast<long>(r);
  }

  // Gauss-Jordan rebuild of the basis inverse (floating mode only)
  void refactor() {
    if constexpr (kFloating<Scalar>) {
      std::vector<double> a(m_ * m_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t j = basis_[i];
        if (j >= n_) {
          a[(j - n_) * m_ + i] = 1.0;
        } else {
          const auto& col = p_.columns[j];
          for (std::size_t k = 0; k < col.rows.size(); ++k) a[col.rows[k] * m_ + i] = sign_[col.rows[k]] * col.values[k];
        }
      }
      std::vector<double> inv(m_ * m_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
      for (std::size_t c = 0; c < m_; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m_; ++r)
          if (std::abs(a[r * m_ + c]) > std::abs(a[piv * m_ + c])) piv = r;
        if (std::abs(a[piv * m_ + c]) < 1e-14) return;  // keep the eta-updated inverse
        if (piv != c)
          for (std::size_t k = 0; k < m_; ++k) {
            std::swap(a[piv * m_ + k], a[c * m_ + k]);
            std::swap(inv[piv * m_ + k], inv[c * m_ + k]);
          }
        const double d = a[c * m_ + c];
        for (std::size_t k = 0; k < m_; ++k) {
          a[c * m_ + k] /= d;
          inv[c * m_ + k] /= d;
        }
        for (std::size_t r = 0; r < m_; ++r) {
          if (r == c) continue;
          const double f = a[r * m_ + c];
          if (f == 0.0) continue;
          for (std::size_t k = 0; k < m_; ++k) {
            a[r * m_ + k] -= f * a[c * m_ + k];
            inv[r * m_ + k] -= f * inv[c * m_ + k];
          }
        }
      }
      binv_ = std::move(inv);
      for (std::size_t i = 0; i < m_; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * b_[k];
        xb_[i] = s;
      }
    }
  }

  Status iterate(Result<Scalar>& res) {
    std::vector<Scalar> u;
    std::size_t degenerate_run = 0;
    std::size_t since_refactor = 0;
    const std::size_t total = n_ + m_;
    while (true) {
      if (res.iterations >= opt_.max_iterations) return Status::IterationLimit;
      const bool bland = opt_.bland || !kFloating<Scalar> || degenerate_run > 50;
      const auto y = duals();
      std::size_t q = total;
      Scalar best = zero();
      for (std::size_t j = 0; j < total; ++j) {
        if (in_basis_[j] >= 0) continue;
        if (j >= n_ && !allow_artificial_) continue;
        const Scalar d = reduced_cost(j, y);
        if (!(d < Scalar(-eps_))) continue;
        if (bland) {
          q = j;
          break;
        }
        if (q == total || d < best) {
          q = j;
          best = d;
        }
      }
      if (q == total) return Status::Optimal;

      column_times_binv(q, u);
      std::size_t r = m_;
      Scalar ratio = zero();
      double best_piv = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!(u[i] > eps_)) continue;
        const Scalar t = xb_[i] / u[i];
        if (r == m_ || t < ratio) {
          r = i;
          ratio = t;
          best_piv = magnitude(u[i]);
          continue;
        }
        if (t == ratio || (kFloating<Scalar> && magnitude<Scalar>(Scalar(t - ratio)) <= opt_.tol)) {
          // ties: Bland takes the smallest basic index, otherwise the larger pivot
          if (bland ? basis_[i] < basis_[r] : magnitude(u[i]) > best_piv) {
            r = i;
            best_piv = magnitude(u[i]);
          }
        }
      }
      if (r == m_) return Status::Unbounded;
      if (kFloating<Scalar> && magnitude(ratio) <= opt_.tol) {
        ++degenerate_run;
      } else {
        degenerate_run = 0;
      }
      pivot(r, q, u);
      if constexpr (kFloating<Scalar>) {
        for (auto& v : xb_)
          if (v < 0 && v > -opt_.tol) v = 0;
      }
      ++res.iterations;
      if (kFloating<Scalar> && ++since_refactor >= opt_.refactor_every) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  void drive_out_artificials(Result<Scalar>& res) {
    std::vector<Scalar> row(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      // look for a structural column with a nonzero entry in row r of B^-1 A
      std::size_t q = n_;
      std::vector<Scalar> u;
      double best = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (in_basis_[j] >= 0) continue;
        const auto& col = p_.columns[j];
        Scalar v = zero();
        for (std::size_t k = 0; k < col.rows.size(); ++k) {
          const std::size_t rr = col.rows[k];
          v += binv_[r * m_ + rr] * (sign_[rr] > 0 ? col.values[k] : Scalar(-col.values[k]));
        }
        const double mag = magnitude(v);
        if (kFloating<Scalar> ? mag > std::max(best, 1e-7) : v != zero()) {
          q = j;
          best = mag;
          if (!kFloating<Scalar>) break;
        }
      }
      if (q == n_) {
        res.dropped_rows.push_back(basis_[r] - n_);
        continue;
      }
      column_times_binv(q, u);
      pivot(r, q, u);
    }
  }

  const Problem<Scalar>& p_;
  Options opt_;
  std::size_t m_, n_;
  Scalar eps_;
  std::vector<int> sign_;
  std::vector<Scalar> b_;
  std::vector<std::size_t> basis_;
  std::vector<long> in_basis_;
  std::vector<Scalar> binv_;
  std::vector<Scalar> xb_;
  std::vector<Scalar> cost_;
  bool allow_artificial_ = false;
};

}  // namespace

template <typename Scalar>
Result<Scalar> solve(const Problem<Scalar>& p, const Options& opt) {
  Solver<Scalar> s(p, opt);
  return s.run();
}

template struct Problem<double>;
template struct Problem<mpq_class>;
template Result<double> solve(const Problem<double>&, const Options&);
template Result<mpq_class> solve(const Problem<mpq_class>&, const Options&);

}  // namespace fusionlab::lp
