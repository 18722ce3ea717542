#include "structcov/tradeoff.hpp"

#include <cmath>
#include <functional>

#include "structcov/asymptotics.hpp"
#include "structcov/influence.hpp"
#include "structcov/parallel.hpp"

namespace structcov {

TradeoffRow tradeoff_point(int k, double c) {
  const AsymptoticScalars a = biweight_scalars(k, c);
  const GesIndices g = ges_indices(k, c);
  TradeoffRow r;
  r.k = k;
  r.c = c;
  r.breakdown = a.breakdown;
  r.are_regression = a.are_regression();
  r.are_shape_direction = a.are_shape();
  r.are_scale = a.are_scale();
  r.g1 = g.g1;
  r.g2 = g.g2;
  r.g3 = g.g3;
  return r;
}

std::vector<double> breakdown_grid(double start, double stop, double step) {
  if (!(start > 0.0 && start <= stop && stop <= 0.5 + 1e-12 && step > 0.0)) {
    throw InvalidArgument("breakdown grid must satisfy 0 < start <= stop <= 0.5 and step > 0");
  }
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double e = start + static_cast<double>(i) * step;
    if (e > stop + step * 1e-3) break;
    out.push_back(std::min(e, 0.5));
  }
  return out;
}

namespace {

using Index = double TradeoffRow::*;

// Golden-section search for the minimum of a unimodal f on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-8 * (1.0 + std::fabs(lo))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

TradeoffArgmin refine(const std::vector<TradeoffRow>& rows, Index idx, const char* name) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].*idx < rows[best].*idx) best = i;
  TradeoffArgmin out;
  out.index = name;
  out.at = rows[best];
  if (rows.size() < 3) {
    out.at_boundary = true;
    return out;
  }
  const std::size_t lo_i = best == 0 ? 0 : best - 1;
  const std::size_t hi_i = std::min(rows.size() - 1, best + 1);
  const int k = rows[best].k;
  // c decreases as the breakdown point grows
  double c_lo = rows[hi_i].c, c_hi = rows[lo_i].c;
  if (c_lo > c_hi) std::swap(c_lo, c_hi);
  const double c = golden_min([&](double x) { return tradeoff_point(k, x).*idx; }, c_lo, c_hi);
  TradeoffRow refined = tradeoff_point(k, c);
  if (refined.*idx < out.at.*idx) out.at = refined;
  const double tol = 1e-6 * (c_hi - c_lo);
  out.at_boundary = (best == 0 && out.at.c >= c_hi - tol) || (best + 1 == rows.size() && out.at.c <= c_lo + tol);
  return out;
}

}  // namespace

TradeoffCurve tradeoff(const std::vector<int>& dims, const std::vector<double>& grid, unsigned threads) {
  if (dims.empty() || grid.empty()) throw InvalidArgument("tradeoff: empty dimension list or grid");
  for (double e : grid)
    if (!(e > 0.0 && e <= 0.5)) throw InvalidArgument("tradeoff: breakdown points must lie in (0, 0.5]");
  TradeoffCurve out;
  out.rows.resize(dims.size() * grid.size());
  parallel_for(
      out.rows.size(),
      [&](std::size_t i) {
        const int k = dims[i / grid.size()];
        const double eps = grid[i % grid.size()];
        TradeoffRow r = tradeoff_point(k, cutoff_for_breakdown(k, eps));
        r.breakdown = eps;
        out.rows[i] = r;
      },
      threads);
  out.summary.resize(dims.size());
  parallel_for(
      dims.size(),
      [&](std::size_t j) {
        const std::vector<TradeoffRow> rows(out.rows.begin() + static_cast<long>(j * grid.size()),
                                            out.rows.begin() + static_cast<long>((j + 1) * grid.size()));
        TradeoffSummary& s = out.summary[j];
        s.k = dims[j];
        s.argmins = {refine(rows, &TradeoffRow::g1, "g1"), refine(rows, &TradeoffRow::g2, "g2"),
                     refine(rows, &TradeoffRow::g3, "g3")};
      },
      threads);
  return out;
}

}  // namespace structcov
