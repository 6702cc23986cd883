#include <algorithm>
#include <cmath>
#include <numeric>

#include "fusionlab/feasibility.hpp"
#include "fusionlab/simplex.hpp"
#include "fusionlab/witness.hpp"
#include "response_basis.hpp"

namespace fusionlab {

using detail::DataRows;
using detail::ResponseBasis;

namespace {

/// Inflated response nodes: observable x gets one copy per assignment of copy
/// indices to its latents (a private latent stands in for none).
struct InflatedNetwork {
  int order = 2;
  std::size_t latent_count = 0;
  std::vector<std::vector<std::size_t>> latents_of;  // per observable
  std::vector<std::size_t> node_observable;
  std::vector<std::vector<int>> node_copies;
  std::vector<std::size_t> radix;                    // strategies per node
  std::vector<std::size_t> all_zero, all_one;        // node of each observable on the 0 / 1 copy
  std::vector<std::vector<std::size_t>> group;       // node permutations

  std::size_t node_index(std::size_t x, const std::vector<int>& copies) const {
    for (std::size_t k = 0; k < node_observable.size(); ++k)
      if (node_observable[k] == x && node_copies[k] == copies) return k;
    throw Error(ErrorCode::InvalidArgument, "inflated node");
  }
};

InflatedNetwork inflate(const ResponseBasis& rb, int order, std::size_t max_variables, double& config_count) {
  const auto& s = rb.scenario;
  InflatedNetwork net;
  net.order = order;
  net.latent_count = s.latents.size();
  for (const auto& o : s.observables) {
    std::vector<std::size_t> lats;
    for (const auto& l : s.latent_parents(o.name)) lats.push_back(*s.latent_index(l));
    if (lats.empty()) lats.push_back(net.latent_count++);
    net.latents_of.push_back(std::move(lats));
  }
  config_count = 1.0;
  for (std::size_t x = 0; x < s.observables.size(); ++x) {
    const std::size_t k = net.latents_of[x].size();
    std::size_t copies = 1;
    for (std::size_t m = 0; m < k; ++m) copies *= static_cast<std::size_t>(order);
    for (std::size_t c = 0; c < copies; ++c) {
      std::vector<int> kappa(k);
      std::size_t rest = c;
      for (std::size_t m = k; m-- > 0;) {
        kappa[m] = static_cast<int>(rest % order);
        rest /= order;
      }
      net.node_observable.push_back(x);
      net.node_copies.push_back(kappa);
      net.radix.push_back(rb.spaces[x].size());
      config_count *= static_cast<double>(rb.spaces[x].size());
    }
  }
  if (config_count > static_cast<double>(max_variables)) {
    throw Error(ErrorCode::SizeLimit, "inflated joint distribution has " + format17(config_count) +
                                          " outcomes, cap is " + std::to_string(max_variables));
  }
  for (std::size_t x = 0; x < s.observables.size(); ++x) {
    net.all_zero.push_back(net.node_index(x, std::vector<int>(net.latents_of[x].size(), 0)));
    net.all_one.push_back(net.node_index(x, std::vector<int>(net.latents_of[x].size(), 1)));
  }

  // copy-permutation group: one permutation of {0..order-1} per latent
  std::vector<std::vector<int>> perms;
  std::vector<int> p(order);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::size_t group_size = 1;
  for (std::size_t l = 0; l < net.latent_count; ++l) {
    group_size *= perms.size();
    if (group_size > 100000) throw Error(ErrorCode::SizeLimit, "copy-permutation group too large");
  }
  for (std::size_t g = 0; g < group_size; ++g) {
    std::vector<std::size_t> choice(net.latent_count);
    std::size_t rest = g;
    for (std::size_t l = 0; l < net.latent_count; ++l) {
      choice[l] = rest % perms.size();
      rest /= perms.size();
    }
    std::vector<std::size_t> image(net.node_observable.size());
    for (std::size_t k = 0; k < image.size(); ++k) {
      const std::size_t x = net.node_observable[k];
      std::vector<int> kappa = net.node_copies[k];
      for (std::size_t m = 0; m < kappa.size(); ++m) kappa[m] = perms[choice[net.latents_of[x][m]]][kappa[m]];
      image[k] = net.node_index(x, kappa);
    }
    net.group.push_back(std::move(image));
  }
  return net;
}

/// Picks rows that are linearly independent of the constant row and of each
/// other (Gram-Schmidt). Returns the selected indices.
std::vector<std::size_t> independent_rows(const DataRows& rows, std::size_t n) {
  std::vector<std::vector<double>> basis;
  auto reduce = [&](std::vector<double> v) {
    for (const auto& q : basis) {
      const double d = std::inner_product(v.begin(), v.end(), q.begin(), 0.0);
      for (std::size_t r = 0; r < n; ++r) v[r] -= d * q[r];
    }
    return v;
  };
  auto push = [&](std::vector<double> v, double ref) {
    v = reduce(std::move(v));
    v = reduce(std::move(v));
    const double nrm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (nrm <= 1e-9 * std::max(1.0, ref)) return false;
    for (double& a : v) a /= nrm;
    basis.push_back(std::move(v));
    return true;
  };
  push(std::vector<double>(n, 1.0), std::sqrt(static_cast<double>(n)));
  std::vector<std::size_t> sel;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double ref = std::sqrt(std::inner_product(rows.coeff[i].begin(), rows.coeff[i].end(), rows.coeff[i].begin(), 0.0));
    if (push(rows.coeff[i], ref)) sel.push_back(i);
  }
  return sel;
}

/// Least-squares coefficients of row k on [1; rows sel] (normal equations).
std::vector<double> express(const DataRows& rows, const std::vector<std::size_t>& sel, std::size_t k, std::size_t n) {
  const std::size_t m = sel.size() + 1;
  auto vec = [&](std::size_t a) -> std::vector<double> {
    return a == 0 ? std::vector<double>(n, 1.0) : rows.coeff[sel[a - 1]];
  };
  std::vector<std::vector<double>> basis;
  for (std::size_t a = 0; a < m; ++a) basis.push_back(vec(a));
  std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t c = 0; c < m; ++c)
      g[a][c] = std::inner_product(basis[a].begin(), basis[a].end(), basis[c].begin(), 0.0);
    g[a][m] = std::inner_product(basis[a].begin(), basis[a].end(), rows.coeff[k].begin(), 0.0);
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(g[r][c]) > std::abs(g[piv][c])) piv = r;
    std::swap(g[c], g[piv]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c || g[r][c] == 0.0) continue;
      const double f = g[r][c] / g[c][c];
      for (std::size_t q = c; q <= m; ++q) g[r][q] -= f * g[c][q];
    }
  }
  std::vector<double> lam(m);
  for (std::size_t a = 0; a < m; ++a) lam[a] = g[a][m] / g[a][a];
  return lam;
}

FeasibilityVerdict inflation_from_rows(const ResponseBasis& rb, const DataRows& rows, const InflationOptions& opt,
                                       const std::string& solver) {
  const double t0 = detail::now_seconds();
  if (opt.order < 2) throw Error(ErrorCode::InvalidArgument, "inflation order must be >= 2");
  FeasibilityVerdict verdict;
  verdict.diagnostics.solver = solver;
  const std::size_t n = rb.config_count;

  // Data rows that are not independent must be implied by the selected ones;
  // otherwise the data already break a linear identity of every model.
  const auto sel = independent_rows(rows, n);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (std::binary_search(sel.begin(), sel.end(), k)) continue;
    const auto lam = express(rows, sel, k, n);
    double predicted = lam[0];
    for (std::size_t a = 0; a < sel.size(); ++a) predicted += lam[a + 1] * rows.rhs[sel[a]];
    const double gap = rows.rhs[k] - predicted;
    if (std::abs(gap) > opt.tol) {
      const double sign = gap > 0 ? 1.0 : -1.0;
      detail::TermBuilder tb;
      tb.add_rows(sign, rows, k);
      tb.add(-sign * lam[0], {});
      for (std::size_t a = 0; a < sel.size(); ++a) tb.add_rows(-sign * lam[a + 1], rows, sel[a]);
      verdict.certificate = tb.build(rows, 0.0, 1e-12);
      verdict.status = verdict.certificate->separation(rows.data) > opt.tol ? Feasibility::Infeasible
                                                                             : Feasibility::Unknown;
      verdict.diagnostics.notes.push_back("data violate a linear identity of every model: " + rows.label[k]);
      verdict.diagnostics.runtime_seconds = detail::seconds_since(t0);
      return verdict;
    }
  }

  double config_count = 0.0;
  const InflatedNetwork net = inflate(rb, opt.order, opt.max_variables, config_count);
  const std::size_t k = sel.size();
  // row layout: 0 = normalization, 1..k = data on copy 0, then products i <= j
  std::vector<std::vector<std::size_t>> pair_row(k, std::vector<std::size_t>(k, 0));
  std::size_t row_count = 1 + k;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) pair_row[i][j] = row_count++;

  // sparse selected-row values per response config
  std::vector<std::vector<std::pair<std::size_t, double>>> fvals(n);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t r = 0; r < n; ++r)
      if (rows.coeff[sel[a]][r] != 0.0) fvals[r].push_back({a, rows.coeff[sel[a]][r]});

  const std::size_t nodes = net.radix.size();
  const auto total = static_cast<std::size_t>(config_count);
  lp::Problem<double> prob;
  prob.rows = row_count;
  std::vector<std::vector<std::pair<std::size_t, double>>> copy0;  // per orbit: (r0, weight)

  std::vector<std::size_t> digits(nodes, 0), image(nodes);
  std::vector<std::size_t> members;
  std::vector<double> dense(row_count, 0.0);
  std::vector<std::size_t> strat0(rb.spaces.size()), strat1(rb.spaces.size());
  auto encode = [&](const std::vector<std::size_t>& d) {
    std::size_t idx = 0;
    for (std::size_t q = 0; q < nodes; ++q) idx = idx * net.radix[q] + d[q];
    return idx;
  };
  for (std::size_t c = 0; c < total; ++c) {
    if (c > 0) {
      for (std::size_t q = nodes; q-- > 0;) {
        if (++digits[q] < net.radix[q]) break;
        digits[q] = 0;
      }
    }
    members.clear();
    bool canonical = true;
    for (const auto& g : net.group) {
      for (std::size_t q = 0; q < nodes; ++q) image[g[q]] = digits[q];
      const std::size_t idx = encode(image);
      if (idx < c) {
        canonical = false;
        break;
      }
      members.push_back(idx);
    }
    if (!canonical) continue;
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());

    std::fill(dense.begin(), dense.end(), 0.0);
    std::vector<std::pair<std::size_t, double>> marg;
    const double w = 1.0 / static_cast<double>(members.size());
    for (std::size_t idx : members) {
      std::size_t rest = idx;
      for (std::size_t q = nodes; q-- > 0;) {
        image[q] = rest % net.radix[q];
        rest /= net.radix[q];
      }
      for (std::size_t x = 0; x < rb.spaces.size(); ++x) {
        strat0[x] = image[net.all_zero[x]];
        strat1[x] = image[net.all_one[x]];
      }
      const std::size_t r0 = rb.encode(strat0), r1 = rb.encode(strat1);
      dense[0] += w;
      for (const auto& [a, va] : fvals[r0]) dense[1 + a] += w * va;
      for (const auto& [a, va] : fvals[r0])
        for (const auto& [b, vb] : fvals[r1])
          if (a <= b) dense[pair_row[a][b]] += w * va * vb;
      auto it = std::find_if(marg.begin(), marg.end(), [&](const auto& e) { return e.first == r0; });
      if (it == marg.end()) {
        marg.push_back({r0, w});
      } else {
        it->second += w;
      }
    }
    lp::Column<double> col;
    for (std::size_t r = 0; r < row_count; ++r)
      if (dense[r] != 0.0) {
        col.rows.push_back(r);
        col.values.push_back(dense[r]);
      }
    prob.add_column(std::move(col));
    copy0.push_back(std::move(marg));
  }

  prob.b.assign(row_count, 0.0);
  prob.b[0] = 1.0;
  for (std::size_t a = 0; a < k; ++a) prob.b[1 + a] = rows.rhs[sel[a]];
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) prob.b[pair_row[i][j]] = rows.rhs[sel[i]] * rows.rhs[sel[j]];

  verdict.diagnostics.notes.push_back("inflated outcomes " + std::to_string(total) + ", orbit columns " +
                                      std::to_string(prob.cols()) + ", rows " + std::to_string(row_count) +
                                      ", data rows kept " + std::to_string(k) + " of " + std::to_string(rows.size()));
  lp::Options lpo;
  lpo.tol = 1e-10;
  const auto res = lp::solve(prob, lpo);
  verdict.diagnostics.iterations = res.iterations;

  if (res.status == lp::Status::Optimal) {
    std::vector<double> mu(n, 0.0);
    for (std::size_t j = 0; j < copy0.size(); ++j)
      for (const auto& [r, w] : copy0[j]) mu[r] += res.x[j] * w;
    double resid = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double lhs = std::inner_product(rows.coeff[i].begin(), rows.coeff[i].end(), mu.begin(), 0.0);
      resid = std::max(resid, std::abs(lhs - rows.rhs[i]));
    }
    verdict.relaxation_residual = resid;
    verdict.status = resid <= 1e-7 ? Feasibility::Feasible : Feasibility::Unknown;
    if (verdict.status == Feasibility::Unknown) verdict.diagnostics.notes.push_back("LP solution does not replay");
  } else if (res.status == lp::Status::Infeasible) {
    std::vector<double> y = res.farkas;
    double scale = 0.0;
    for (double a : y) scale = std::max(scale, std::abs(a));
    if (scale > 0)
      for (double& a : y) a /= scale;
    // sum x = 1 over the orbit columns, so y^T A x <= max_j y^T A_j
    long double bound = -1e300L;
    for (const auto& col : prob.columns) {
      long double s = 0.0L;
      for (std::size_t t = 0; t < col.rows.size(); ++t) s += static_cast<long double>(y[col.rows[t]]) * col.values[t];
      bound = std::max(bound, s);
    }
    detail::TermBuilder tb;
    tb.add(y[0], {});
    for (std::size_t a = 0; a < k; ++a) tb.add_rows(y[1 + a], rows, sel[a]);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) tb.add_rows(y[pair_row[i][j]], rows, sel[i], sel[j]);
    verdict.certificate = tb.build(rows, static_cast<double>(bound), 1e-13);
    const double sep = verdict.certificate->separation(rows.data);
    verdict.status = sep > opt.tol ? Feasibility::Infeasible : Feasibility::Unknown;
    verdict.diagnostics.notes.push_back("certificate separation " + format17(sep));
  } else {
    verdict.diagnostics.notes.push_back("simplex stopped: " + lp::to_string(res.status));
  }
  verdict.diagnostics.runtime_seconds = detail::seconds_since(t0);
  return verdict;
}

}  // namespace

FeasibilityVerdict inflation_lp(const DataBundle& b, const InflationOptions& opt) {
  if (b.tables.empty()) throw Error(ErrorCode::DegenerateBundle, "bundle has no tables");
  const ResponseBasis rb(b.scenario);
  if (opt.use_swig) return inflation_from_rows(rb, detail::swig_constraint_rows(rb, b), opt, "inflation-swig");
  std::vector<std::size_t> tables(b.tables.size());
  std::iota(tables.begin(), tables.end(), 0);
  return inflation_from_rows(rb, detail::bundle_rows(rb, b, tables), opt, "inflation");
}

FeasibilityVerdict inflation_lp(const SwigDistribution& q, const InflationOptions& opt) {
  const ResponseBasis rb(q.scenario);
  return inflation_from_rows(rb, detail::swig_rows(rb, q), opt, "inflation-full-swig");
}

}  // namespace fusionlab
