#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hmi/core/error.hpp"
#include "hmi/core/params.hpp"

namespace hmi::ahp {

class AhpError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Saaty's random consistency index for n = 1..9.
inline constexpr std::array<double, 9> kRandomIndex = {0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45};
inline constexpr std::size_t kMaxDimension = kRandomIndex.size();
inline constexpr double kAcceptableCR = 0.1;

// Positive reciprocal matrix: a_ii = 1 and a_ji = 1/a_ij always hold.
class PairwiseMatrix {
 public:
  explicit PairwiseMatrix(std::size_t n, std::string name = "matrix") : n_(n), a_(n * n, 1.0), name_(std::move(name)) {
    if (n < 1 || n > kMaxDimension) throw AhpError(name_ + ": dimension must be in [1, 9]");
  }

  // Builds from a full table. The upper triangle is taken as the judgement;
  // the lower triangle must agree with its reciprocal to 1e-6 relative.
  static PairwiseMatrix from_rows(const std::vector<std::vector<double>>& rows, std::string name = "matrix") {
    PairwiseMatrix m(rows.size(), std::move(name));
    for (std::size_t i = 0; i < m.n_; ++i) {
      if (rows[i].size() != m.n_) throw AhpError(m.name_ + ": row " + std::to_string(i + 1) + " has wrong length");
      if (std::abs(rows[i][i] - 1.0) > 1e-9) throw AhpError(m.name_ + ": diagonal entries must be 1");
    }
    for (std::size_t i = 0; i < m.n_; ++i) {
      for (std::size_t j = i + 1; j < m.n_; ++j) {
        m.set(i, j, rows[i][j]);
        const double lower = rows[j][i];
        if (!(lower > 0.0) || std::abs(lower * rows[i][j] - 1.0) > 1e-6) {
          std::ostringstream os;
          os << m.name_ << ": entries (" << i + 1 << "," << j + 1 << ") and (" << j + 1 << "," << i + 1
             << ") are not reciprocal";
          throw AhpError(os.str());
        }
      }
    }
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  const std::string& name() const noexcept { return name_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double v) {
    if (i >= n_ || j >= n_) throw AhpError(name_ + ": index out of range");
    if (!(v > 0.0) || !std::isfinite(v)) throw AhpError(name_ + ": entries must be positive and finite");
    if (i == j) {
      if (std::abs(v - 1.0) > 1e-9) throw AhpError(name_ + ": diagonal entries must be 1");
      return;
    }
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = 1.0 / v;
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
  std::string name_;
};

struct PriorityVector {
  std::vector<double> weights;
};

struct ConsistencyReport {
  double lambda_max = 0.0;
  double ci = 0.0;
  double cr = 0.0;
  int iterations = 0;
};

struct Priorities {
  PriorityVector vector;
  ConsistencyReport consistency;
};

inline double random_index(std::size_t n) { return kRandomIndex.at(n - 1); }

// Principal eigenvector by power iteration (|w_k+1 - w_k|_inf < tol, at most
// max_iter steps), normalised to sum 1, with Saaty's consistency ratio.
inline Priorities priority_weights(const PairwiseMatrix& m, double tol = 1e-12, int max_iter = 10000) {
  const std::size_t n = m.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n)), next(n);
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += m(i, j) * w[j];
      next[i] = s;
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) break;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      delta = std::max(delta, std::abs(next[i] - w[i]));
    }
    w.swap(next);
    if (delta < tol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw AhpError(m.name() + ": power iteration did not converge");

  Priorities out;
  out.vector.weights = w;
  double lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += m(i, j) * w[j];
    lambda += s / w[i];
  }
  lambda /= static_cast<double>(n);
  out.consistency.lambda_max = lambda;
  out.consistency.iterations = it;
  if (n > 2) {
    out.consistency.ci = (lambda - static_cast<double>(n)) / static_cast<double>(n - 1);
    out.consistency.cr = out.consistency.ci / random_index(n);
  }
  return out;
}

struct RankedItem {
  std::string name;
  double weight = 0.0;
  std::size_t input_index = 0;
};

// Items by descending weight, ties kept in input order. Rejects judgements
// whose consistency ratio is not below 0.1.
inline std::vector<RankedItem> rank_tiers(const std::vector<std::string>& items, const PairwiseMatrix& m) {
  if (items.size() != m.size())
    throw AhpError(m.name() + ": " + std::to_string(items.size()) + " items but dimension " + std::to_string(m.size()));
  const auto pr = priority_weights(m);
  if (pr.consistency.cr >= kAcceptableCR) {
    std::ostringstream os;
    os << m.name() << ": inconsistent judgements (CR = " << pr.consistency.cr << " >= " << kAcceptableCR
       << "), revise the comparisons";
    throw AhpError(os.str());
  }
  std::vector<RankedItem> ranked;
  for (std::size_t i = 0; i < items.size(); ++i) ranked.push_back({items[i], pr.vector.weights[i], i});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedItem& a, const RankedItem& b) { return a.weight > b.weight; });
  return ranked;
}

// Text format: first non-comment line `n`, then n rows of n ratios.
// Entries may be decimals or fractions such as `1/3`; `#` starts a comment.
inline PairwiseMatrix parse_matrix(const std::string& text, const std::string& name = "matrix") {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (!toks.empty()) rows.push_back(std::move(toks));
  }
  if (rows.empty() || rows[0].size() != 1) throw AhpError(name + ": first line must be the dimension n");
  auto parse_ratio = [&](const std::string& t) {
    const auto slash = t.find('/');
    if (slash == std::string::npos) return parse_number(t, name);
    const double num = parse_number(t.substr(0, slash), name);
    const double den = parse_number(t.substr(slash + 1), name);
    if (den == 0.0) throw AhpError(name + ": zero denominator in '" + t + "'");
    return num / den;
  };
  const double nd = parse_number(rows[0][0], name);
  if (nd != std::floor(nd) || nd < 1 || nd > static_cast<double>(kMaxDimension))
    throw AhpError(name + ": dimension must be an integer in [1, 9]");
  const auto n = static_cast<std::size_t>(nd);
  if (rows.size() != n + 1) throw AhpError(name + ": expected " + std::to_string(n) + " matrix rows");
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != n) throw AhpError(name + ": row " + std::to_string(i + 1) + " needs " + std::to_string(n) + " entries");
    for (const auto& t : rows[i + 1]) table[i].push_back(parse_ratio(t));
  }
  return PairwiseMatrix::from_rows(table, name);
}

}  // namespace hmi::ahp
