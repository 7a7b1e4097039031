// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the code paths it is used to check.
#ifndef BEBP_TESTS_ORACLES_HPP
#define BEBP_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bebp/data.hpp"
#include "bebp/metrics.hpp"
#include "bebp/victims.hpp"

namespace oracle {

// Full sort of every candidate by (distance, index).
inline std::vector<std::size_t> brute_knn(const std::vector<bebp::Vector>& pts, std::size_t q,
                                          std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    if (j == q) continue;
    double d = 0.0;
    for (std::size_t f = 0; f < pts[q].size(); ++f) d += std::pow(pts[q][f] - pts[j][f], 2);
    all.emplace_back(std::sqrt(d), j);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
  return out;
}

// Andrew's monotone chain; returns indices of strict hull vertices.
inline std::vector<std::size_t> convex_hull(const std::vector<bebp::Vector>& pts) {
  std::vector<std::size_t> idx(pts.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return pts[a][0] < pts[b][0] || (pts[a][0] == pts[b][0] && pts[a][1] < pts[b][1]);
  });
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (pts[a][0] - pts[o][0]) * (pts[b][1] - pts[o][1]) -
           (pts[a][1] - pts[o][1]) * (pts[b][0] - pts[o][0]);
  };
  std::vector<std::size_t> hull(2 * idx.size());
  std::size_t k = 0;
  for (auto i : idx) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    const auto i = idx[t];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], i) <= 0) --k;
    hull[k++] = i;
  }
  hull.resize(k - 1);
  return hull;
}

inline bebp::ConfusionCounts tally(const bebp::Model& model, const bebp::Dataset& data) {
  bebp::ConfusionCounts c;
  for (const auto& s : data.samples) {
    const bool truth_abnormal = s.label == bebp::Label::kAbnormal;
    const bool said_abnormal = model.decision_value(s.features) > 0.0;
    if (truth_abnormal && said_abnormal) ++c.tp;
    if (truth_abnormal && !said_abnormal) ++c.fn;
    if (!truth_abnormal && said_abnormal) ++c.fp;
    if (!truth_abnormal && !said_abnormal) ++c.tn;
  }
  return c;
}

// log P(Abnormal | x) - log P(Normal | x) from the Gaussian densities directly.
inline double nb_log_posterior_ratio(const bebp::GaussianNbModel& m, const bebp::Vector& x) {
  double logp[2];
  for (int c = 0; c < 2; ++c) {
    logp[c] = m.log_prior()[c];
    for (std::size_t f = 0; f < x.size(); ++f) {
      const double var = m.var()[c][f];
      const double pdf = std::exp(-std::pow(x[f] - m.mean()[c][f], 2) / (2.0 * var)) /
                         std::sqrt(2.0 * std::numbers::pi * var);
      logp[c] += std::log(pdf);
    }
  }
  return logp[1] - logp[0];
}

template <class F>
bebp::Vector central_difference(F f, const bebp::Vector& at, double h) {
  bebp::Vector g(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    bebp::Vector up = at, down = at;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

// Writes a KDD-format file (41 features + label + NSL difficulty column) with
// the requested number of rows per attack name. Abnormal rows are shifted in
// a handful of numeric features so the classes are learnable.
inline void write_synthetic_kdd(const std::filesystem::path& path,
                                const std::map<std::string, std::size_t>& rows_per_tag,
                                unsigned seed, bool difficulty_column = true) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const char* protocols[] = {"tcp", "udp", "icmp"};
  const char* services[] = {"http", "smtp", "ftp", "private", "ecr_i", "domain_u"};
  const char* flags[] = {"SF", "S0", "REJ", "RSTO"};
  std::ofstream out(path);
  for (const auto& [tag, n] : rows_per_tag) {
    const bool normal = tag == "normal";
    const double shift = normal ? 0.0 : 0.35;
    for (std::size_t r = 0; r < n; ++r) {
      for (int f = 0; f < 41; ++f) {
        if (f == 1) {
          out << protocols[normal ? (u(gen) < 0.8 ? 0 : 1) : static_cast<int>(u(gen) * 3)];
        } else if (f == 2) {
          out << services[static_cast<int>(u(gen) * (normal ? 3 : 6))];
        } else if (f == 3) {
          out << flags[normal ? 0 : static_cast<int>(u(gen) * 4)];
        } else if (f == 19) {
          out << 0;  // num_outbound_cmds is constant in the real data too
        } else if (f == 4 || f == 5 || f == 22 || f == 23) {
          out << static_cast<int>(std::floor(1000.0 * (u(gen) * 0.6 + shift)));
        } else {
          const double v = std::clamp(u(gen) * 0.5 + (f % 3 == 0 ? shift : 0.1), 0.0, 1.0);
          out << std::round(v * 100.0) / 100.0;
        }
        out << ',';
      }
      out << tag;
      if (difficulty_column) out << ',' << 20;
      out << '\n';
    }
  }
}

}  // namespace oracle

#endif  // BEBP_TESTS_ORACLES_HPP
