#pragma once

// Efficiency versus robustness of the biweight S-estimator along a grid of
// breakdown points, with refined minimizers of the GES indices.

#include <string>
#include <vector>

namespace structcov {

struct TradeoffRow {
  int k = 1;
  double breakdown = 0.0;
  double c = 0.0;
  double are_regression = 0.0;       // 1/lambda
  double are_shape_direction = 0.0;  // 1/sigma1
  double are_scale = 0.0;            // 1/(2k sigma3)
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

/// Every column at cutoff c; the breakdown point is derived from c.
TradeoffRow tradeoff_point(int k, double c);

struct TradeoffArgmin {
  std::string index;  // "g1", "g2" or "g3"
  TradeoffRow at;
  bool at_boundary = false;  // the minimizer sits on an end of the grid
};

struct TradeoffSummary {
  int k = 1;
  std::vector<TradeoffArgmin> argmins;
};

struct TradeoffCurve {
  std::vector<TradeoffRow> rows;
  std::vector<TradeoffSummary> summary;
};

/// start, start+step, ..., up to stop (inclusive within step/1000).
/// Throws InvalidArgument unless 0 < start <= stop <= 0.5 and step > 0.
std::vector<double> breakdown_grid(double start, double stop, double step);

/// Rows for every (k, breakdown) pair, ordered by k then breakdown. Each
/// argmin is located on the grid and refined by golden-section search in c
/// between the neighbouring grid cutoffs.
TradeoffCurve tradeoff(const std::vector<int>& dims, const std::vector<double>& grid, unsigned threads = 0);

}  // namespace structcov
