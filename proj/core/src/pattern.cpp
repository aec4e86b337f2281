// Copyright 2026 The lfkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfkit/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lfkit::pattern {
namespace {

// Near-hard starting temperature: soft enough to escape poor inits, hard
// enough that restarts keep their basins (full-strength tempering funnels
// every start into one continuous optimum, which defeats restart selection).
constexpr double kInitialTemperature = 0.25;
constexpr double kTemperatureDecay = 0.8;
constexpr double kFinalTemperature = 1e-3;
constexpr int kMaxInnerIterations = 100;
constexpr double kInnerConvergence = 1e-10;

double sq(double x) { return x * x; }

double hard_cost(const std::vector<std::pair<double, double>>& centers, const AngularGrid& grid) {
  double total = 0.0;
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq(u - c.first) + sq(v - c.second));
      total += best;
    }
  return total;
}

// Objective of a partially rounded pattern: chosen cells are excluded from Q;
// unrounded centers still attract their cells.
double mixed_objective(const std::vector<AngularCoord>& chosen,
                       const std::vector<std::pair<double, double>>& continuous,
                       const AngularGrid& grid) {
  double total = 0.0;
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v) {
      bool sampled = false;
      for (const AngularCoord& c : chosen)
        if (c.u == u && c.v == v) {
          sampled = true;
          break;
        }
      if (sampled) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const AngularCoord& c : chosen) best = std::min(best, sq(u - c.u) + sq(v - c.v));
      for (const auto& c : continuous) best = std::min(best, sq(u - c.first) + sq(v - c.second));
      total += best;
    }
  return total;
}

int divergence(const std::vector<AngularCoord>& coords) {
  std::set<int> us, vs;
  for (const AngularCoord& c : coords) {
    us.insert(c.u);
    vs.insert(c.v);
  }
  return static_cast<int>(us.size() + vs.size());
}

std::vector<AngularCoord> candidate_cells(double cu, double cv, const AngularGrid& grid) {
  const auto clamp_u = [&](int u) { return std::clamp(u, 1, grid.rows); };
  const auto clamp_v = [&](int v) { return std::clamp(v, 1, grid.cols); };
  std::set<std::pair<int, int>> cells;
  for (int u : {clamp_u(static_cast<int>(std::floor(cu))), clamp_u(static_cast<int>(std::ceil(cu)))})
    for (int v :
         {clamp_v(static_cast<int>(std::floor(cv))), clamp_v(static_cast<int>(std::ceil(cv)))})
      cells.insert({u, v});
  std::vector<AngularCoord> out;
  for (const auto& [u, v] : cells) out.push_back({u, v});
  return out;
}

bool pattern_less(const std::vector<AngularCoord>& a, const std::vector<AngularCoord>& b) {
  std::vector<AngularCoord> sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
}

}  // namespace

double pattern_objective(const SamplingPattern& pattern, const AngularGrid& grid) {
  pattern.validate(grid);
  std::int64_t total = 0;
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v) {
      if (pattern.contains({u, v})) continue;
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (const AngularCoord& p : pattern.coords) {
        const std::int64_t d = static_cast<std::int64_t>(u - p.u) * (u - p.u) +
                               static_cast<std::int64_t>(v - p.v) * (v - p.v);
        best = std::min(best, d);
      }
      total += best;
    }
  return static_cast<double>(total);
}

double min_distance_metric(const SamplingPattern& pattern, const AngularGrid& grid) {
  pattern.validate(grid);
  if (pattern.size() >= grid.cells()) throw Error("min_distance_metric: no novel positions");
  double total = 0.0;
  int count = 0;
  for (int u = 1; u <= grid.rows; ++u)
    for (int v = 1; v <= grid.cols; ++v) {
      if (pattern.contains({u, v})) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const AngularCoord& p : pattern.coords)
        best = std::min(best, sq(u - p.u) + sq(v - p.v));
      total += std::sqrt(best);
      ++count;
    }
  return total / count;
}

AnnealResult anneal_solve(const AngularGrid& grid, int k, Rng& rng) {
  if (k < 1 || k >= grid.cells()) throw Error("anneal_solve: need 1 <= K < M*N");

  // init: K distinct random grid cells
  std::vector<int> cells(static_cast<std::size_t>(grid.cells()));
  for (int i = 0; i < grid.cells(); ++i) cells[static_cast<std::size_t>(i)] = i;
  std::vector<std::pair<double, double>> centers;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.uniform_int(grid.cells() - i));
    std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(j)]);
    const AngularCoord c = grid.coord(cells[static_cast<std::size_t>(i)]);
    centers.push_back({static_cast<double>(c.u), static_cast<double>(c.v)});
  }

  AnnealResult result;
  std::vector<double> weight(static_cast<std::size_t>(k));
  std::vector<double> wu(static_cast<std::size_t>(k)), wv(static_cast<std::size_t>(k));
  std::vector<double> resp(static_cast<std::size_t>(k));

  const auto em_pass = [&](double temperature) -> double {
    std::fill(weight.begin(), weight.end(), 0.0);
    std::fill(wu.begin(), wu.end(), 0.0);
    std::fill(wv.begin(), wv.end(), 0.0);
    for (int u = 1; u <= grid.rows; ++u)
      for (int v = 1; v <= grid.cols; ++v) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
          const double d = sq(u - centers[i].first) + sq(v - centers[i].second);
          resp[static_cast<std::size_t>(i)] = d;
          dmin = std::min(dmin, d);
        }
        double z = 0.0;
        for (int i = 0; i < k; ++i) {
          const double e = std::exp(-(resp[static_cast<std::size_t>(i)] - dmin) / temperature);
          resp[static_cast<std::size_t>(i)] = e;
          z += e;
        }
        for (int i = 0; i < k; ++i) {
          const double r = resp[static_cast<std::size_t>(i)] / z;
          weight[static_cast<std::size_t>(i)] += r;
          wu[static_cast<std::size_t>(i)] += r * u;
          wv[static_cast<std::size_t>(i)] += r * v;
        }
      }
    double moved = 0.0;
    for (int i = 0; i < k; ++i) {
      if (weight[static_cast<std::size_t>(i)] < 1e-12) continue;
      const double nu = wu[static_cast<std::size_t>(i)] / weight[static_cast<std::size_t>(i)];
      const double nv = wv[static_cast<std::size_t>(i)] / weight[static_cast<std::size_t>(i)];
      moved = std::max(moved, std::abs(nu - centers[static_cast<std::size_t>(i)].first) +
                                  std::abs(nv - centers[static_cast<std::size_t>(i)].second));
      centers[static_cast<std::size_t>(i)] = {nu, nv};
    }
    return moved;
  };

  double best_seen = std::numeric_limits<double>::infinity();
  for (double temperature = kInitialTemperature; temperature > kFinalTemperature;
       temperature *= kTemperatureDecay) {
    bool settled = false;
    for (int it = 0; it < kMaxInnerIterations; ++it)
      if (em_pass(temperature) < kInnerConvergence) {
        settled = true;
        break;
      }
    if (!settled) result.converged = false;
    best_seen = std::min(best_seen, hard_cost(centers, grid));
    result.stage_objectives.push_back(best_seen);
  }

  // hard (Lloyd) polish: the zero-temperature limit of the same iteration
  for (int it = 0; it < 500; ++it) {
    std::fill(weight.begin(), weight.end(), 0.0);
    std::fill(wu.begin(), wu.end(), 0.0);
    std::fill(wv.begin(), wv.end(), 0.0);
    for (int u = 1; u <= grid.rows; ++u)
      for (int v = 1; v <= grid.cols; ++v) {
        int owner = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < k; ++i) {
          const double d = sq(u - centers[static_cast<std::size_t>(i)].first) +
                           sq(v - centers[static_cast<std::size_t>(i)].second);
          if (d < dmin) {
            dmin = d;
            owner = i;
          }
        }
        weight[static_cast<std::size_t>(owner)] += 1.0;
        wu[static_cast<std::size_t>(owner)] += u;
        wv[static_cast<std::size_t>(owner)] += v;
      }
    double moved = 0.0;
    for (int i = 0; i < k; ++i) {
      if (weight[static_cast<std::size_t>(i)] < 0.5) continue;
      const double nu = wu[static_cast<std::size_t>(i)] / weight[static_cast<std::size_t>(i)];
      const double nv = wv[static_cast<std::size_t>(i)] / weight[static_cast<std::size_t>(i)];
      moved = std::max(moved, std::abs(nu - centers[static_cast<std::size_t>(i)].first) +
                                  std::abs(nv - centers[static_cast<std::size_t>(i)].second));
      centers[static_cast<std::size_t>(i)] = {nu, nv};
    }
    if (moved < 1e-12) break;
  }

  result.centers.centers = centers;
  result.hard_objective = hard_cost(centers, grid);
  best_seen = std::min(best_seen, result.hard_objective);
  result.stage_objectives.push_back(best_seen);

  // responsibilities over novel cells: the K cells nearest the centers are
  // treated as sampled and excluded
  std::vector<int> claimed;
  for (int i = 0; i < k; ++i) {
    int best_cell = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int cell = 0; cell < grid.cells(); ++cell) {
      if (std::find(claimed.begin(), claimed.end(), cell) != claimed.end()) continue;
      const AngularCoord c = grid.coord(cell);
      const double d = sq(c.u - centers[static_cast<std::size_t>(i)].first) +
                       sq(c.v - centers[static_cast<std::size_t>(i)].second);
      if (d < best_d) {
        best_d = d;
        best_cell = cell;
      }
    }
    claimed.push_back(best_cell);
  }
  result.assignment.rows = grid.cells() - k;
  result.assignment.cols = k;
  result.assignment.values.reserve(static_cast<std::size_t>(result.assignment.rows) * k);
  for (int cell = 0; cell < grid.cells(); ++cell) {
    if (std::find(claimed.begin(), claimed.end(), cell) != claimed.end()) continue;
    const AngularCoord c = grid.coord(cell);
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
      dmin = std::min(dmin, sq(c.u - centers[static_cast<std::size_t>(i)].first) +
                                sq(c.v - centers[static_cast<std::size_t>(i)].second));
    double z = 0.0;
    std::vector<double> row(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const double d = sq(c.u - centers[static_cast<std::size_t>(i)].first) +
                       sq(c.v - centers[static_cast<std::size_t>(i)].second);
      row[static_cast<std::size_t>(i)] = std::exp(-(d - dmin) / kFinalTemperature);
      z += row[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < k; ++i)
      result.assignment.values.push_back(row[static_cast<std::size_t>(i)] / z);
  }
  return result;
}

namespace {

struct Ranked {
  double objective = std::numeric_limits<double>::infinity();
  int divergence = -1;
  std::vector<AngularCoord> coords;

  bool better_than(const Ranked& o) const {
    if (objective != o.objective) return objective < o.objective;
    if (divergence != o.divergence) return divergence > o.divergence;
    return pattern_less(coords, o.coords);
  }
};

SamplingPattern round_greedy(const std::vector<std::pair<double, double>>& centers,
                             const std::vector<std::vector<AngularCoord>>& candidates,
                             const AngularGrid& grid) {
  const int k = static_cast<int>(centers.size());
  // impact order: widest objective spread (with the other centers continuous)
  // rounds first
  std::vector<std::pair<double, int>> impact;
  for (int i = 0; i < k; ++i) {
    std::vector<std::pair<double, double>> rest;
    for (int j = 0; j < k; ++j)
      if (j != i) rest.push_back(centers[static_cast<std::size_t>(j)]);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const AngularCoord& c : candidates[static_cast<std::size_t>(i)]) {
      const double o = mixed_objective({c}, rest, grid);
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
    impact.push_back({-(hi - lo), i});
  }
  std::sort(impact.begin(), impact.end());

  std::vector<AngularCoord> chosen;
  std::vector<int> order;
  for (const auto& [neg, i] : impact) order.push_back(i);
  for (std::size_t step = 0; step < order.size(); ++step) {
    const int i = order[step];
    std::vector<std::pair<double, double>> rest;
    for (std::size_t later = step + 1; later < order.size(); ++later)
      rest.push_back(centers[static_cast<std::size_t>(order[later])]);

    std::vector<AngularCoord> options;
    for (const AngularCoord& c : candidates[static_cast<std::size_t>(i)])
      if (std::find(chosen.begin(), chosen.end(), c) == chosen.end()) options.push_back(c);
    if (options.empty()) {
      // collision: fall back to the nearest free cells
      std::vector<std::pair<double, AngularCoord>> by_distance;
      for (int cell = 0; cell < grid.cells(); ++cell) {
        const AngularCoord c = grid.coord(cell);
        if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
        by_distance.push_back({sq(c.u - centers[static_cast<std::size_t>(i)].first) +
                                   sq(c.v - centers[static_cast<std::size_t>(i)].second),
                               c});
      }
      std::sort(by_distance.begin(), by_distance.end(),
                [](const auto& a, const auto& b) {
                  return a.first != b.first ? a.first < b.first : b.second < a.second;
                });
      options.push_back(by_distance.front().second);
    }

    Ranked best;
    for (const AngularCoord& c : options) {
      std::vector<AngularCoord> pat = chosen;
      pat.push_back(c);
      Ranked r;
      r.objective = mixed_objective(pat, rest, grid);
      r.divergence = divergence(pat);
      r.coords = pat;
      if (r.better_than(best)) best = r;
    }
    chosen = best.coords;
  }
  std::sort(chosen.begin(), chosen.end());
  SamplingPattern out;
  out.coords = chosen;
  return out;
}

}  // namespace

SamplingPattern round_pattern(const ContinuousPattern& cont, const AngularGrid& grid) {
  const int k = cont.size();
  if (k < 1) throw Error("round_pattern: empty pattern");
  if (k > grid.cells()) throw Error("round_pattern: K exceeds grid size");
  for (const auto& c : cont.centers) {
    if (!std::isfinite(c.first) || !std::isfinite(c.second))
      throw Error("round_pattern: non-finite center");
    if (c.first < 1.0 - 1e-9 || c.first > grid.rows + 1e-9 || c.second < 1.0 - 1e-9 ||
        c.second > grid.cols + 1e-9)
      throw Error("round_pattern: center outside the grid box");
  }

  std::vector<std::vector<AngularCoord>> candidates;
  std::uint64_t combos = 1;
  for (const auto& c : cont.centers) {
    candidates.push_back(candidate_cells(c.first, c.second, grid));
    combos *= candidates.back().size();
    if (combos > 65536) break;
  }

  if (combos <= 65536 && static_cast<int>(candidates.size()) == k) {
    // joint enumeration over all candidate combinations
    Ranked best;
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    for (;;) {
      std::vector<AngularCoord> pat;
      bool collision = false;
      for (int i = 0; i < k && !collision; ++i) {
        const AngularCoord c = candidates[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
        if (std::find(pat.begin(), pat.end(), c) != pat.end())
          collision = true;
        else
          pat.push_back(c);
      }
      if (!collision) {
        SamplingPattern sp;
        sp.coords = pat;
        Ranked r;
        r.objective = pattern_objective(sp, grid);
        r.divergence = divergence(pat);
        r.coords = pat;
        if (r.better_than(best)) best = r;
      }
      int carry = k - 1;
      while (carry >= 0) {
        if (++idx[static_cast<std::size_t>(carry)] <
            candidates[static_cast<std::size_t>(carry)].size())
          break;
        idx[static_cast<std::size_t>(carry)] = 0;
        --carry;
      }
      if (carry < 0) break;
    }
    if (best.divergence >= 0) {
      std::sort(best.coords.begin(), best.coords.end());
      SamplingPattern out;
      out.coords = best.coords;
      return out;
    }
    // every combination collided: fall through to the greedy path
  }
  while (static_cast<int>(candidates.size()) < k)
    candidates.push_back(candidate_cells(cont.centers[candidates.size()].first,
                                         cont.centers[candidates.size()].second, grid));
  return round_greedy(cont.centers, candidates, grid);
}

SamplingPattern optimize_pattern(const AngularGrid& grid, int k, int restarts,
                                 std::uint64_t seed) {
  if (k < 1 || k >= grid.cells()) throw Error("optimize_pattern: need 1 <= K < M*N");
  if (restarts < 1) throw Error("optimize_pattern: need at least one restart");
  Rng root(seed);
  SamplingPattern best;
  double best_objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = root.fork(static_cast<std::uint64_t>(r));
    const AnnealResult annealed = anneal_solve(grid, k, rng);
    const SamplingPattern rounded = round_pattern(annealed.centers, grid);
    const double obj = pattern_objective(rounded, grid);
    if (obj < best_objective ||
        (obj == best_objective && pattern_less(rounded.coords, best.coords))) {
      best_objective = obj;
      best = rounded;
    }
  }
  return best;
}

OracleResult exhaustive_oracle(const AngularGrid& grid, int k, std::uint64_t budget) {
  const int n = grid.cells();
  if (k < 1 || k > n) throw Error("exhaustive_oracle: bad K");
  // C(n, k) with overflow guard against the budget
  std::uint64_t count = 1;
  for (int i = 0; i < k; ++i) {
    count = count * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
    if (count > budget * 128) break;
  }
  if (count > budget)
    throw Error("exhaustive_oracle: " + std::to_string(count) + " candidates exceed budget " +
                std::to_string(budget));

  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;

  OracleResult best;
  std::int64_t best_objective = std::numeric_limits<std::int64_t>::max();
  std::vector<AngularCoord> coords(static_cast<std::size_t>(k));
  for (;;) {
    for (int i = 0; i < k; ++i) coords[static_cast<std::size_t>(i)] = grid.coord(idx[static_cast<std::size_t>(i)]);
    // integer objective
    std::int64_t total = 0;
    for (int cell = 0; cell < n; ++cell) {
      bool sampled = false;
      for (int i = 0; i < k; ++i)
        if (idx[static_cast<std::size_t>(i)] == cell) {
          sampled = true;
          break;
        }
      if (sampled) continue;
      const AngularCoord q = grid.coord(cell);
      std::int64_t dmin = std::numeric_limits<std::int64_t>::max();
      for (int i = 0; i < k; ++i) {
        const AngularCoord p = coords[static_cast<std::size_t>(i)];
        const std::int64_t d = static_cast<std::int64_t>(q.u - p.u) * (q.u - p.u) +
                               static_cast<std::int64_t>(q.v - p.v) * (q.v - p.v);
        dmin = std::min(dmin, d);
      }
      total += dmin;
      if (total >= best_objective) break;  // prune
    }
    if (total < best_objective) {
      best_objective = total;
      best.pattern.coords = coords;
    }
    // next combination (lexicographic, so the first optimum seen wins ties)
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  best.objective = static_cast<double>(best_objective);
  return best;
}

SamplingPattern load_pattern_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pattern file '" + path + "'");
  SamplingPattern pattern;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    int u = 0, v = 0;
    char comma = 0;
    std::stringstream ss(line);
    if (!(ss >> u >> comma >> v) || comma != ',')
      throw Error("bad pattern line '" + line + "'");
    pattern.coords.push_back({u, v});
  }
  if (pattern.coords.empty()) throw Error("pattern file '" + path + "' is empty");
  return pattern;
}

void save_pattern_file(const SamplingPattern& pattern, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const AngularCoord& c : pattern.coords) out << c.u << "," << c.v << "\n";
  if (!out) throw Error("I/O failure writing '" + path + "'");
}

}  // namespace lfkit::pattern
