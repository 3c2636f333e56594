#include "infomech/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace infomech {

namespace {

// Solves A x = b (k x k) by Gaussian elimination with partial pivoting.
// Returns false when the system is numerically singular.
bool solve_square(std::vector<double> a, std::vector<double> b, int k,
                  std::vector<double>& x) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  for (int col = 0; col < k; ++col) {
    int best = col;
    double best_abs = std::abs(a[static_cast<size_t>(col) * k + col]);
    for (int r = col + 1; r < k; ++r) {
      const double v = std::abs(a[static_cast<size_t>(r) * k + col]);
      if (v > best_abs) {
        best = r;
        best_abs = v;
      }
    }
    if (best_abs < 1e-12) return false;
    if (best != col) {
      for (int j = 0; j < k; ++j) {
        std::swap(a[static_cast<size_t>(best) * k + j],
                  a[static_cast<size_t>(col) * k + j]);
      }
      std::swap(b[best], b[col]);
    }
    const double piv = a[static_cast<size_t>(col) * k + col];
    for (int r = col + 1; r < k; ++r) {
      const double f = a[static_cast<size_t>(r) * k + col] / piv;
      if (f == 0.0) continue;
      for (int j = col; j < k; ++j) {
        a[static_cast<size_t>(r) * k + j] -=
            f * a[static_cast<size_t>(col) * k + j];
      }
      b[r] -= f * b[col];
    }
  }
  x.assign(k, 0.0);
  for (int r = k - 1; r >= 0; --r) {
    double v = b[r];
    for (int j = r + 1; j < k; ++j) v -= a[static_cast<size_t>(r) * k + j] * x[j];
    x[r] = v / a[static_cast<size_t>(r) * k + r];
  }
  return true;
}

long long binomial_capped(long long n, long long k, long long cap) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

void sort_and_dedup(std::vector<Posterior>& pts, double tol) {
  std::sort(pts.begin(), pts.end());
  std::vector<Posterior> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (const auto& kept : out) {
      double d = 0.0;
      for (size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, std::abs(p[i] - kept[i]));
      }
      if (d <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  pts = std::move(out);
}

}  // namespace

std::vector<IndifferenceHyperplane> indifference_hyperplanes(
    const Context& ctx, GeometryFrame frame) {
  std::vector<IndifferenceHyperplane> planes;
  const int m = ctx.num_signals();
  for (int t = 0; t < ctx.num_types(); ++t) {
    const BeliefTransform bt = ctx.belief_transform(t);
    for (int a = 0; a < ctx.num_actions(); ++a) {
      for (int b = a + 1; b < ctx.num_actions(); ++b) {
        IndifferenceHyperplane h;
        h.theta = t;
        h.action_a = a;
        h.action_b = b;
        h.normal.assign(m, 0.0);
        double scale = 0.0;
        for (int w = 0; w < m; ++w) {
          const double d = frame == GeometryFrame::Correlated
                               ? bt.diag[w]
                               : ctx.type_mass(t);
          h.normal[w] = (ctx.payoff(t, w, a) - ctx.payoff(t, w, b)) * d;
          scale = std::max(scale, std::abs(h.normal[w]));
        }
        if (scale < 1e-12) continue;  // identical actions for this type
        for (double& v : h.normal) v /= scale;
        planes.push_back(std::move(h));
      }
    }
  }
  return planes;
}

PosteriorSet interesting_posteriors(const Context& ctx, GeometryFrame frame,
                                    const GeometryOptions& opts) {
  const int m = ctx.num_signals();
  const std::vector<int>& support = ctx.support();
  const int s = static_cast<int>(support.size());

  // Hyperplane normals restricted to the support coordinates, deduplicated
  // up to sign and scale.
  std::vector<std::vector<double>> normals;
  for (const auto& h : indifference_hyperplanes(ctx, frame)) {
    std::vector<double> v(s);
    double lead = 0.0;
    double scale = 0.0;
    for (int i = 0; i < s; ++i) {
      v[i] = h.normal[support[i]];
      scale = std::max(scale, std::abs(v[i]));
      if (lead == 0.0 && std::abs(v[i]) > 1e-12) lead = v[i];
    }
    if (scale < 1e-12) continue;
    for (double& x : v) x /= lead;  // canonical: leading coefficient +1
    bool dup = false;
    for (const auto& kept : normals) {
      double d = 0.0;
      for (int i = 0; i < s; ++i) d = std::max(d, std::abs(v[i] - kept[i]));
      if (d <= 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) normals.push_back(std::move(v));
  }

  // Constraint pool: hyperplanes n.q = 0, then facets q_i = 0.
  const int pool = static_cast<int>(normals.size()) + s;
  const long long systems =
      binomial_capped(pool, s - 1, opts.candidate_cap);
  if (systems > opts.candidate_cap) {
    throw ComplexityLimit("interesting_posteriors: " + std::to_string(pool) +
                          " constraints over " + std::to_string(s - 1) +
                          " slots exceeds the candidate cap");
  }

  std::vector<Posterior> pts;
  auto push_point = [&](const std::vector<double>& q_support) {
    Posterior full(m, 0.0);
    double sum = 0.0;
    for (int i = 0; i < s; ++i) {
      double v = q_support[i];
      if (v < -1e-9) return;  // outside the simplex
      if (std::abs(v) < 1e-11) v = 0.0;  // canonical facet contact
      full[support[i]] = v;
      sum += v;
    }
    if (sum <= 0.0) return;
    for (double& v : full) v /= sum;
    pts.push_back(std::move(full));
  };

  // Corners and the prior are always present; the prior makes the null menu
  // representable.
  for (int i = 0; i < s; ++i) {
    std::vector<double> corner(s, 0.0);
    corner[i] = 1.0;
    push_point(corner);
  }
  {
    std::vector<double> prior_s(s);
    for (int i = 0; i < s; ++i) prior_s[i] = ctx.prior()[support[i]];
    push_point(prior_s);
  }

  if (s >= 2) {
    std::vector<int> comb(s - 1);
    std::iota(comb.begin(), comb.end(), 0);
    const int k = s - 1;
    auto advance = [&]() {
      int i = k - 1;
      while (i >= 0 && comb[i] == pool - k + i) --i;
      if (i < 0) return false;
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
      return true;
    };
    if (pool >= k) {
      do {
        std::vector<double> a(static_cast<size_t>(s) * s, 0.0);
        std::vector<double> b(s, 0.0);
        for (int r = 0; r < k; ++r) {
          const int c = comb[r];
          if (c < static_cast<int>(normals.size())) {
            for (int i = 0; i < s; ++i) {
              a[static_cast<size_t>(r) * s + i] = normals[c][i];
            }
          } else {
            a[static_cast<size_t>(r) * s + (c - normals.size())] = 1.0;
          }
        }
        for (int i = 0; i < s; ++i) a[static_cast<size_t>(k) * s + i] = 1.0;
        b[k] = 1.0;
        std::vector<double> q;
        if (solve_square(std::move(a), std::move(b), s, q)) push_point(q);
      } while (advance());
    }
  }

  sort_and_dedup(pts, opts.dedup_tol);
  PosteriorSet out;
  out.points = std::move(pts);
  out.provenance = PosteriorSet::Provenance::QStar;
  return out;
}

PosteriorSet interesting_posteriors(const Context& ctx,
                                    const GeometryOptions& opts) {
  return interesting_posteriors(ctx,
                                ctx.is_independent() ? GeometryFrame::Independent
                                                     : GeometryFrame::Correlated,
                                opts);
}

PosteriorSet grid_refinement(const Context& ctx, const PosteriorSet& base,
                             int resolution, const GeometryOptions& opts) {
  if (resolution < 1) throw InputError("grid resolution must be >= 1");
  const int m = ctx.num_signals();
  const std::vector<int>& support = ctx.support();
  const int s = static_cast<int>(support.size());

  if ((s == 2 && resolution > 200) || (s == 3 && resolution > 40) ||
      binomial_capped(resolution + s - 1, s - 1, opts.candidate_cap) >
          opts.candidate_cap) {
    throw ComplexityLimit("grid_refinement: resolution " +
                          std::to_string(resolution) +
                          " too fine for dimension " + std::to_string(s));
  }

  std::vector<Posterior> pts = base.points;
  // Enumerate compositions of `resolution` into s nonnegative parts.
  std::vector<int> counts(s, 0);
  std::function<void(int, int)> emit = [&](int level, int remaining) {
    if (level == s - 1) {
      counts[level] = remaining;
      Posterior q(m, 0.0);
      for (int i = 0; i < s; ++i) {
        q[support[i]] = static_cast<double>(counts[i]) / resolution;
      }
      pts.push_back(std::move(q));
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[level] = c;
      emit(level + 1, remaining - c);
    }
  };
  emit(0, resolution);

  sort_and_dedup(pts, opts.dedup_tol);
  PosteriorSet out;
  out.points = std::move(pts);
  out.provenance = base.provenance == PosteriorSet::Provenance::QStar
                       ? PosteriorSet::Provenance::Union
                       : PosteriorSet::Provenance::Grid;
  return out;
}

PriorDecomposition decompose_through_prior(const Posterior& p,
                                           const Posterior& q) {
  if (p.size() != q.size()) throw InputError("dimension mismatch");
  const size_t m = p.size();
  for (size_t i = 0; i < m; ++i) {
    if (p[i] <= 0.0 && q[i] > 1e-12) {
      throw DegeneratePrior(
          "prior vanishes on a coordinate where q has mass");
    }
    if (p[i] < 0.0 || q[i] < -1e-12) throw InputError("negative posterior");
  }
  double step = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < m; ++i) {
    if (q[i] > p[i]) step = std::min(step, p[i] / (q[i] - p[i]));
  }
  PriorDecomposition out;
  if (!std::isfinite(step)) {  // q == p: nothing to blend
    out.gamma = 0.0;
    out.r = p;
    return out;
  }
  out.gamma = step / (1.0 + step);
  out.r.assign(m, 0.0);
  for (size_t i = 0; i < m; ++i) {
    double v = p[i] + step * (p[i] - q[i]);
    if (std::abs(v) < 1e-15) v = 0.0;
    out.r[i] = v;
  }
  return out;
}

}  // namespace infomech
