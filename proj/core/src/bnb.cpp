#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>

#include "fusionlab/feasibility.hpp"
#include "fusionlab/simplex.hpp"
#include "fusionlab/witness.hpp"
#include "response_basis.hpp"

namespace fusionlab {

using detail::DataRows;
using detail::ResponseBasis;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// min c^T x over rows with lo <= x <= hi, turned into the equality form the
/// simplex takes (shifted variables, slacks for <= rows and upper bounds).
struct LinearProgram {
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    double rhs = 0.0;
    bool le = false;
  };
  std::vector<double> lo, hi, cost;
  std::vector<Row> rows;

  std::size_t add_var(double l = 0.0, double h = kInf, double c = 0.0) {
    lo.push_back(l);
    hi.push_back(h);
    cost.push_back(c);
    return lo.size() - 1;
  }
  void add_row(std::vector<std::pair<std::size_t, double>> terms, double rhs, bool le) {
    rows.push_back({std::move(terms), rhs, le});
  }

  struct Solution {
    bool ok = false;
    double objective = kInf;
    std::vector<double> x;
    std::size_t iterations = 0;
  };

  Solution solve() const {
    const std::size_t n = lo.size();
    std::size_t m = rows.size();
    for (std::size_t j = 0; j < n; ++j)
      if (hi[j] < kInf) ++m;
    lp::Problem<double> p;
    p.rows = m;
    p.b.assign(m, 0.0);
    std::vector<lp::Column<double>> cols(n);
    std::size_t r = 0;
    std::vector<lp::Column<double>> slacks;
    for (const auto& row : rows) {
      double rhs = row.rhs;
      for (const auto& [j, a] : row.terms) {
        cols[j].rows.push_back(r);
        cols[j].values.push_back(a);
        rhs -= a * lo[j];
      }
      p.b[r] = rhs;
      if (row.le) slacks.push_back({{r}, {1.0}});
      ++r;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (hi[j] == kInf) continue;
      if (hi[j] < lo[j]) return {};
      cols[j].rows.push_back(r);
      cols[j].values.push_back(1.0);
      p.b[r] = hi[j] - lo[j];
      slacks.push_back({{r}, {1.0}});
      ++r;
    }
    for (std::size_t j = 0; j < n; ++j) p.add_column(std::move(cols[j]), cost[j]);
    for (auto& s : slacks) p.add_column(std::move(s), 0.0);
    const auto res = lp::solve(p);
    Solution sol;
    sol.iterations = res.iterations;
    if (res.status != lp::Status::Optimal) return sol;
    sol.ok = true;
    sol.x.resize(n);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sol.x[j] = lo[j] + res.x[j];
      sol.objective += cost[j] * sol.x[j];
    }
    return sol;
  }
};

/// Structure of a one- or two-latent scenario in which observables that
/// depend on a single latent are deterministic functions of its value.
struct Layout {
  std::size_t latents = 0;
  std::vector<int> cards;                           // per latent
  std::vector<std::vector<std::size_t>> single;     // observables driven by latent l alone
  std::optional<std::size_t> multi;                 // observable with both latents
  std::size_t multi_strategies = 1;
  /// hits[(g * n2 + a) * S + r] = data rows hit (one per table)
  std::vector<std::vector<std::size_t>> hits;

  std::size_t n1() const { return static_cast<std::size_t>(cards[0]); }
  std::size_t n2() const { return latents == 2 ? static_cast<std::size_t>(cards[1]) : 1; }
  std::size_t cell(std::size_t g, std::size_t a) const { return g * n2() + a; }
};

Layout analyze(const Scenario& s) {
  Layout lay;
  lay.latents = s.latents.size();
  if (lay.latents < 1 || lay.latents > 2) {
    throw Error(ErrorCode::UnsupportedStructure, "branch and bound handles one or two latents, scenario has " +
                                                     std::to_string(lay.latents));
  }
  lay.single.resize(lay.latents);
  for (std::size_t x = 0; x < s.observables.size(); ++x) {
    const auto lp = s.latent_parents(s.observables[x].name);
    if (lp.empty()) {
      throw Error(ErrorCode::UnsupportedStructure, s.observables[x].name + " has no latent parent");
    }
    if (lp.size() == 1) {
      lay.single[*s.latent_index(lp[0])].push_back(x);
    } else {
      if (lay.multi) throw Error(ErrorCode::UnsupportedStructure, "more than one observable depends on both latents");
      lay.multi = x;
    }
  }
  return lay;
}

std::vector<int> default_cards(const Scenario& s, const Layout& lay) {
  std::vector<int> cards;
  for (std::size_t l = 0; l < lay.latents; ++l) {
    double c = 1.0;
    for (std::size_t x : lay.single[l]) c *= static_cast<double>(enumerate_strategies(s, s.observables[x].name).size());
    if (c > 1e6) throw Error(ErrorCode::SizeLimit, "latent " + s.latents[l].name + " would need " + format17(c) + " values");
    cards.push_back(static_cast<int>(c));
  }
  return cards;
}

struct Problem {
  const ResponseBasis* rb = nullptr;
  Layout lay;
  DataRows rows;
  double tol = 1e-8;

  std::vector<std::size_t> strategies(std::size_t g, std::size_t a, std::size_t r) const {
    std::vector<std::size_t> st(rb->spaces.size(), 0);
    std::size_t vals[2] = {g, a};
    for (std::size_t l = 0; l < lay.latents; ++l) {
      std::size_t rest = vals[l];
      for (std::size_t k = lay.single[l].size(); k-- > 0;) {
        const std::size_t x = lay.single[l][k];
        st[x] = rest % rb->spaces[x].size();
        rest /= rb->spaces[x].size();
      }
    }
    if (lay.multi) st[*lay.multi] = r;
    return st;
  }
};

void build_hits(Problem& pr) {
  auto& lay = pr.lay;
  const std::size_t S = lay.multi_strategies;
  lay.hits.assign(lay.n1() * lay.n2() * S, {});
  std::vector<std::vector<std::size_t>> by_config(pr.rb->config_count);
  for (std::size_t e = 0; e < pr.rows.size(); ++e)
    for (std::size_t r = 0; r < pr.rb->config_count; ++r)
      if (pr.rows.coeff[e][r] != 0.0) by_config[r].push_back(e);
  for (std::size_t g = 0; g < lay.n1(); ++g)
    for (std::size_t a = 0; a < lay.n2(); ++a)
      for (std::size_t r = 0; r < S; ++r)
        lay.hits[lay.cell(g, a) * S + r] = by_config[pr.rb->encode(pr.strategies(g, a, r))];
}

/// McCormick relaxation of the distance problem on the box [lo, hi] for the
/// latent weights (q then p).
LinearProgram relaxation(const Problem& pr, const std::vector<double>& lo, const std::vector<double>& hi) {
  const auto& lay = pr.lay;
  const std::size_t n1 = lay.n1(), n2 = lay.n2(), S = lay.multi_strategies;
  const bool two = lay.latents == 2;
  LinearProgram lp;
  for (std::size_t g = 0; g < n1; ++g) lp.add_var(lo[g], hi[g]);
  if (two)
    for (std::size_t a = 0; a < n2; ++a) lp.add_var(lo[n1 + a], hi[n1 + a]);
  if (two)
    for (std::size_t c = 0; c < n1 * n2; ++c) lp.add_var();
  if (lay.multi)
    for (std::size_t c = 0; c < n1 * n2 * S; ++c) lp.add_var();
  const std::size_t dv = lp.add_var(0.0, kInf, 1.0);

  const std::size_t q0 = 0, p0 = n1, t0 = two ? n1 + n2 : 0, s0 = two ? n1 + n2 + n1 * n2 : n1;
  auto qv = [&](std::size_t g) { return q0 + g; };
  auto pv = [&](std::size_t a) { return p0 + a; };
  auto tv = [&](std::size_t g, std::size_t a) { return two ? t0 + lay.cell(g, a) : qv(g); };

  std::vector<std::pair<std::size_t, double>> sum;
  for (std::size_t g = 0; g < n1; ++g) sum.push_back({qv(g), 1.0});
  lp.add_row(sum, 1.0, false);
  if (two) {
    sum.clear();
    for (std::size_t a = 0; a < n2; ++a) sum.push_back({pv(a), 1.0});
    lp.add_row(sum, 1.0, false);
    for (std::size_t g = 0; g < n1; ++g) {
      sum.clear();
      for (std::size_t a = 0; a < n2; ++a) sum.push_back({tv(g, a), 1.0});
      sum.push_back({qv(g), -1.0});
      lp.add_row(sum, 0.0, false);
    }
    for (std::size_t a = 0; a < n2; ++a) {
      sum.clear();
      for (std::size_t g = 0; g < n1; ++g) sum.push_back({tv(g, a), 1.0});
      sum.push_back({pv(a), -1.0});
      lp.add_row(sum, 0.0, false);
    }
    for (std::size_t g = 0; g < n1; ++g)
      for (std::size_t a = 0; a < n2; ++a) {
        const double l1 = lo[g], u1 = hi[g], l2 = lo[n1 + a], u2 = hi[n1 + a];
        const std::size_t t = tv(g, a), x = qv(g), y = pv(a);
        // t >= l2 x + l1 y - l1 l2,  t >= u2 x + u1 y - u1 u2
        lp.add_row({{t, -1.0}, {x, l2}, {y, l1}}, l1 * l2, true);
        lp.add_row({{t, -1.0}, {x, u2}, {y, u1}}, u1 * u2, true);
        // t <= u2 x + l1 y - l1 u2,  t <= l2 x + u1 y - u1 l2
        lp.add_row({{t, 1.0}, {x, -u2}, {y, -l1}}, -l1 * u2, true);
        lp.add_row({{t, 1.0}, {x, -l2}, {y, -u1}}, -u1 * l2, true);
      }
  }
  if (lay.multi) {
    for (std::size_t g = 0; g < n1; ++g)
      for (std::size_t a = 0; a < n2; ++a) {
        sum.clear();
        for (std::size_t r = 0; r < S; ++r) sum.push_back({s0 + lay.cell(g, a) * S + r, 1.0});
        sum.push_back({tv(g, a), -1.0});
        lp.add_row(sum, 0.0, false);
      }
  }
  // |model entry - data| <= d
  std::vector<std::vector<std::pair<std::size_t, double>>> entry(pr.rows.size());
  for (std::size_t g = 0; g < n1; ++g)
    for (std::size_t a = 0; a < n2; ++a)
      for (std::size_t r = 0; r < S; ++r) {
        const std::size_t var = lay.multi ? s0 + lay.cell(g, a) * S + r : tv(g, a);
        for (std::size_t e : lay.hits[lay.cell(g, a) * S + r]) entry[e].push_back({var, 1.0});
      }
  for (std::size_t e = 0; e < pr.rows.size(); ++e) {
    auto plus = entry[e];
    plus.push_back({dv, -1.0});
    lp.add_row(plus, pr.rows.rhs[e], true);
    auto minus = entry[e];
    for (auto& [_, c] : minus) c = -c;
    minus.push_back({dv, -1.0});
    lp.add_row(minus, -pr.rows.rhs[e], true);
  }
  return lp;
}

/// Latent weights and the stochastic response of the two-latent observable.
struct Candidate {
  std::vector<double> q, p;
  std::vector<double> resp;  // [cell][r]
};

/// L-infinity distance of a candidate to the data.
double distance(const Problem& pr, const Candidate& c) {
  const auto& lay = pr.lay;
  const std::size_t S = lay.multi_strategies;
  std::vector<double> model(pr.rows.size(), 0.0);
  for (std::size_t g = 0; g < lay.n1(); ++g)
    for (std::size_t a = 0; a < lay.n2(); ++a) {
      const double w = c.q[g] * (lay.latents == 2 ? c.p[a] : 1.0);
      if (w == 0.0) continue;
      for (std::size_t r = 0; r < S; ++r) {
        const double wr = w * (lay.multi ? c.resp[lay.cell(g, a) * S + r] : 1.0);
        for (std::size_t e : lay.hits[lay.cell(g, a) * S + r]) model[e] += wr;
      }
    }
  double dist = 0.0;
  for (std::size_t e = 0; e < model.size(); ++e) dist = std::max(dist, std::abs(model[e] - pr.rows.rhs[e]));
  return dist;
}

std::vector<double> normalized(std::vector<double> v) {
  double s = 0.0;
  for (double& a : v) {
    a = std::max(a, 0.0);
    s += a;
  }
  for (double& a : v) a = s > 0 ? a / s : 1.0 / static_cast<double>(v.size());
  return v;
}

/// Minimizes the distance over one block with the others fixed: block 0 = q,
/// 1 = p, 2 = responses. Blocks 3 and 4 move q (resp. p) together with the
/// responses through z = weight * response, which keeps the LP exact.
/// Returns false if the LP fails.
bool improve_block(const Problem& pr, Candidate& c, int block) {
  const auto& lay = pr.lay;
  const std::size_t n1 = lay.n1(), n2 = lay.n2(), S = lay.multi_strategies;
  LinearProgram lp;
  std::vector<std::vector<std::pair<std::size_t, double>>> entry(pr.rows.size());
  auto add_entry = [&](std::size_t g, std::size_t a, std::size_t var, double w) {
    for (std::size_t r = 0; r < S; ++r) {
      const double wr = w * (lay.multi ? c.resp[lay.cell(g, a) * S + r] : 1.0);
      if (wr == 0.0) continue;
      for (std::size_t e : lay.hits[lay.cell(g, a) * S + r]) entry[e].push_back({var, wr});
    }
  };
  std::vector<std::pair<std::size_t, double>> sum;
  // block 3 and 4: weight variables first, then z[cell][r]
  const std::size_t zbase = block == 3 ? n1 : n2;
  if (block == 0) {
    for (std::size_t g = 0; g < n1; ++g) {
      lp.add_var();
      sum.push_back({g, 1.0});
      for (std::size_t a = 0; a < n2; ++a) add_entry(g, a, g, lay.latents == 2 ? c.p[a] : 1.0);
    }
    lp.add_row(sum, 1.0, false);
  } else if (block == 1) {
    for (std::size_t a = 0; a < n2; ++a) {
      lp.add_var();
      sum.push_back({a, 1.0});
      for (std::size_t g = 0; g < n1; ++g) add_entry(g, a, a, c.q[g]);
    }
    lp.add_row(sum, 1.0, false);
  } else if (block == 2) {
    for (std::size_t g = 0; g < n1; ++g)
      for (std::size_t a = 0; a < n2; ++a) {
        sum.clear();
        const double w = c.q[g] * (lay.latents == 2 ? c.p[a] : 1.0);
        for (std::size_t r = 0; r < S; ++r) {
          const std::size_t var = lp.add_var();
          sum.push_back({var, 1.0});
          if (w != 0.0)
            for (std::size_t e : lay.hits[lay.cell(g, a) * S + r]) entry[e].push_back({var, w});
        }
        lp.add_row(sum, 1.0, false);
      }
  } else {
    const bool moving_q = block == 3;
    for (std::size_t k = 0; k < zbase; ++k) {
      lp.add_var();
      sum.push_back({k, 1.0});
    }
    lp.add_row(sum, 1.0, false);
    for (std::size_t g = 0; g < n1; ++g)
      for (std::size_t a = 0; a < n2; ++a) {
        const double fixed = moving_q ? c.p[a] : c.q[g];
        sum.clear();
        for (std::size_t r = 0; r < S; ++r) {
          const std::size_t var = lp.add_var();
          sum.push_back({var, 1.0});
          if (fixed != 0.0)
            for (std::size_t e : lay.hits[lay.cell(g, a) * S + r]) entry[e].push_back({var, fixed});
        }
        sum.push_back({moving_q ? g : a, -1.0});
        lp.add_row(sum, 0.0, false);
      }
  }
  const std::size_t dv = lp.add_var(0.0, kInf, 1.0);
  for (std::size_t e = 0; e < pr.rows.size(); ++e) {
    auto plus = entry[e];
    plus.push_back({dv, -1.0});
    lp.add_row(plus, pr.rows.rhs[e], true);
    auto minus = entry[e];
    for (auto& [_, v] : minus) v = -v;
    minus.push_back({dv, -1.0});
    lp.add_row(minus, -pr.rows.rhs[e], true);
  }
  const auto sol = lp.solve();
  if (!sol.ok) return false;
  auto slice = [&](std::size_t from, std::size_t n) {
    return std::vector<double>(sol.x.begin() + static_cast<std::ptrdiff_t>(from),
                               sol.x.begin() + static_cast<std::ptrdiff_t>(from + n));
  };
  if (block == 0) {
    c.q = normalized(slice(0, n1));
  } else if (block == 1) {
    c.p = normalized(slice(0, n2));
  } else if (block == 2) {
    for (std::size_t cell = 0; cell < n1 * n2; ++cell) {
      const auto v = normalized(slice(cell * S, S));
      std::copy(v.begin(), v.end(), c.resp.begin() + static_cast<std::ptrdiff_t>(cell * S));
    }
  } else {
    // responses of cells whose weight vanished keep their old values
    for (std::size_t cell = 0; cell < n1 * n2; ++cell) {
      const auto z = slice(zbase + cell * S, S);
      double total = 0.0;
      for (double x : z) total += std::max(x, 0.0);
      if (total <= 1e-14) continue;
      const auto v = normalized(z);
      std::copy(v.begin(), v.end(), c.resp.begin() + static_cast<std::ptrdiff_t>(cell * S));
    }
    (block == 3 ? c.q : c.p) = normalized(slice(0, zbase));
  }
  return true;
}

/// Local search from the weights of a relaxation solution: alternating exact
/// LPs until the distance stops improving.
Candidate local_search(const Problem& pr, const std::vector<double>& x, double& best) {
  const auto& lay = pr.lay;
  const std::size_t n1 = lay.n1(), n2 = lay.n2(), S = lay.multi_strategies;
  Candidate c;
  c.q = normalized({x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n1)});
  c.p = lay.latents == 2 ? normalized({x.begin() + static_cast<std::ptrdiff_t>(n1),
                                       x.begin() + static_cast<std::ptrdiff_t>(n1 + n2)})
                         : std::vector<double>{1.0};
  c.resp.assign(n1 * n2 * S, 1.0 / static_cast<double>(S));
  best = distance(pr, c);

  std::vector<int> blocks;
  if (lay.multi) {
    blocks = {2, 3};
    if (lay.latents == 2) blocks.push_back(4);
  } else {
    blocks = {0};
    if (lay.latents == 2) blocks.push_back(1);
  }
  const int max_rounds = lay.latents == 2 ? 60 : 1;
  for (int round = 0; round < max_rounds && best > pr.tol; ++round) {
    const double start = best;
    for (int block : blocks) {
      Candidate next = c;
      if (!improve_block(pr, next, block)) continue;
      const double dnext = distance(pr, next);
      if (dnext <= best) {
        c = std::move(next);
        best = dnext;
      }
      if (best <= pr.tol) break;
    }
    if (best > start * (1.0 - 1e-3)) break;  // stalled
  }
  return c;
}

ClassicalModel to_model(const Problem& pr, const Candidate& c) {
  const auto& lay = pr.lay;
  const auto& s = pr.rb->scenario;
  ClassicalModel m = blank_model(s, lay.cards);
  m.latent_weights[0] = c.q;
  if (lay.latents == 2) m.latent_weights[1] = c.p;
  const std::size_t S = lay.multi_strategies;
  for (std::size_t x = 0; x < s.observables.size(); ++x) {
    auto& rt = m.responses[x];
    const auto& sp = pr.rb->spaces[x];
    const std::size_t latent_configs = rt.probs.size() / (sp.configs * static_cast<std::size_t>(rt.outcome_card));
    for (std::size_t lc = 0; lc < latent_configs; ++lc) {
      // latent config lexicographic over rt.latent_parents (scenario order)
      std::size_t g = 0, a = 0;
      if (rt.latent_parents.size() == 2) {
        g = lc / static_cast<std::size_t>(rt.latent_cards[1]);
        a = lc % static_cast<std::size_t>(rt.latent_cards[1]);
      } else if (*s.latent_index(rt.latent_parents[0]) == 0) {
        g = lc;
      } else {
        a = lc;
      }
      for (std::size_t pc = 0; pc < sp.configs; ++pc) {
        double* out = &rt.probs[(lc * sp.configs + pc) * rt.outcome_card];
        if (lay.multi && x == *lay.multi) {
          for (std::size_t r = 0; r < S; ++r) out[sp.strategies[r][pc]] += c.resp[lay.cell(g, a) * S + r];
        } else {
          const auto st = pr.strategies(g, a, 0);
          out[sp.strategies[st[x]][pc]] = 1.0;
        }
      }
    }
  }
  return m;
}

struct Node {
  double lb = 0.0;
  std::vector<double> lo, hi;
  std::vector<double> x;
};
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const { return a.lb > b.lb; }
};

}  // namespace

std::vector<int> bb_default_cardinalities(const Scenario& s) { return default_cards(s, analyze(s)); }

FeasibilityVerdict bb_feasibility(const DataBundle& b, const BnbOptions& opt) {
  const double start = detail::now_seconds();
  if (b.tables.empty()) throw Error(ErrorCode::DegenerateBundle, "bundle has no tables");
  const ResponseBasis rb(b.scenario);
  Problem pr;
  pr.rb = &rb;
  pr.tol = opt.tol;
  pr.lay = analyze(b.scenario);
  const auto defaults = default_cards(b.scenario, pr.lay);
  if (opt.cardinalities.empty()) {
    pr.lay.cards = defaults;
  } else {
    if (opt.cardinalities.size() != defaults.size()) {
      throw Error(ErrorCode::BadCardinality, "expected " + std::to_string(defaults.size()) + " cardinalities");
    }
    for (std::size_t l = 0; l < defaults.size(); ++l) {
      if (opt.cardinalities[l] < 1) throw Error(ErrorCode::BadCardinality, "cardinalities must be >= 1");
      if (opt.cardinalities[l] != defaults[l]) {
        throw Error(ErrorCode::BadCardinality, "latent " + b.scenario.latents[l].name + " must have cardinality " +
                                                   std::to_string(defaults[l]) +
                                                   " (strategies of the observables it drives alone)");
      }
    }
    pr.lay.cards = opt.cardinalities;
  }
  if (pr.lay.multi) pr.lay.multi_strategies = rb.spaces[*pr.lay.multi].size();
  std::vector<std::size_t> tables(b.tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) tables[i] = i;
  pr.rows = detail::bundle_rows(rb, b, tables);
  build_hits(pr);

  FeasibilityVerdict v;
  v.diagnostics.solver = "bnb";
  const std::size_t n1 = pr.lay.n1(), n2 = pr.lay.latents == 2 ? pr.lay.n2() : 0;
  const std::size_t nw = n1 + n2;
  double best = kInf;

  auto try_candidate = [&](const std::vector<double>& x) {
    double dist = kInf;
    const Candidate c = local_search(pr, x, dist);
    if (dist < best || !v.model) {
      const ClassicalModel m = to_model(pr, c);
      const double replay = replay_error(m, b);
      if (replay < best) {
        best = replay;
        v.best_distance = best;
        v.model = m;
      }
    }
    return best <= opt.tol;
  };

  auto finish = [&](Feasibility status) {
    v.status = status;
    if (status != Feasibility::Feasible) v.model.reset();
    v.diagnostics.runtime_seconds = detail::seconds_since(start);
    return v;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  {
    Node root{0.0, std::vector<double>(nw, 0.0), std::vector<double>(nw, 1.0), {}};
    const auto sol = relaxation(pr, root.lo, root.hi).solve();
    v.diagnostics.iterations = 1;
    if (!sol.ok) {
      v.diagnostics.notes.push_back("root relaxation failed");
      return finish(Feasibility::Unknown);
    }
    root.lb = sol.objective;
    root.x = sol.x;
    v.lower_bound_trace.push_back(root.lb);
    if (root.lb > opt.tol) return finish(Feasibility::Infeasible);
    if (try_candidate(root.x)) return finish(Feasibility::Feasible);
    open.push(std::move(root));
  }

  double global_lb = v.lower_bound_trace.back();
  std::size_t nodes = 1;
  while (!open.empty()) {
    if (detail::seconds_since(start) > opt.budget_seconds || (opt.max_nodes && nodes >= opt.max_nodes)) {
      v.diagnostics.notes.push_back("budget exhausted after " + std::to_string(nodes) + " nodes, lower bound " +
                                    format17(global_lb));
      v.diagnostics.iterations = nodes;
      return finish(Feasibility::Unknown);
    }
    Node node = open.top();
    open.pop();
    global_lb = std::max(global_lb, node.lb);
    if (node.lb > opt.tol) {
      v.lower_bound_trace.push_back(global_lb);
      v.diagnostics.iterations = nodes;
      return finish(Feasibility::Infeasible);
    }

    // branching score: envelope gap of t = q p summed per weight, times width
    std::size_t pick = nw;
    double score = 1e-12;
    if (pr.lay.latents == 2) {
      const std::size_t t0 = n1 + n2;
      std::vector<double> gq(n1, 0.0), gp(n2, 0.0);
      for (std::size_t g = 0; g < n1; ++g)
        for (std::size_t a = 0; a < n2; ++a) {
          const double gap = std::abs(node.x[t0 + g * n2 + a] - node.x[g] * node.x[n1 + a]);
          gq[g] += gap;
          gp[a] += gap;
        }
      for (std::size_t i = 0; i < nw; ++i) {
        const double sc = (i < n1 ? gq[i] : gp[i - n1]) * (node.hi[i] - node.lo[i]);
        if (sc > score) {
          score = sc;
          pick = i;
        }
      }
    }
    if (pick == nw) {
      // relaxation is exact at this node: its weights are a model
      if (try_candidate(node.x)) {
        v.diagnostics.iterations = nodes;
        return finish(Feasibility::Feasible);
      }
      v.diagnostics.notes.push_back("exact node without replayable model dropped");
      v.lower_bound_trace.push_back(global_lb);
      continue;
    }
    const double mid = 0.5 * (node.lo[pick] + node.hi[pick]);
    for (int side = 0; side < 2; ++side) {
      Node child{node.lb, node.lo, node.hi, {}};
      (side == 0 ? child.hi : child.lo)[pick] = mid;
      const auto sol = relaxation(pr, child.lo, child.hi).solve();
      ++nodes;
      if (!sol.ok) continue;  // empty box
      child.lb = std::max(node.lb, sol.objective);
      child.x = sol.x;
      if (child.lb <= opt.tol && nodes % 16 == 0 && try_candidate(child.x)) {
        v.diagnostics.iterations = nodes;
        return finish(Feasibility::Feasible);
      }
      open.push(std::move(child));
    }
    if (!open.empty()) global_lb = std::max(global_lb, open.top().lb);
    v.lower_bound_trace.push_back(global_lb);
  }
  v.diagnostics.iterations = nodes;
  v.diagnostics.notes.push_back("every box pruned");
  return finish(Feasibility::Infeasible);
}

}  // namespace fusionlab
