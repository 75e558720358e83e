#include "objhc/partitioner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "objhc/error.hpp"
#include "objhc/parallel.hpp"
#include "objhc/random.hpp"

namespace objhc {

void PartitionConfig::validate() const {
  require(delta >= 0.0 && delta <= 0.5, ErrorKind::InvalidParam, "delta must lie in [0, 0.5]");
  require(iterations >= 1, ErrorKind::InvalidParam, "iterations must be >= 1");
  require(eta0 >= 0.0 && std::isfinite(eta0), ErrorKind::InvalidParam, "eta0 must be >= 0");
  require(noise_variance >= 0.0, ErrorKind::InvalidParam, "noise variance must be >= 0");
  require(restarts >= 1, ErrorKind::InvalidParam, "restarts must be >= 1");
  require(rounding_retries >= 0, ErrorKind::InvalidParam, "rounding retries must be >= 0");
}

int part_one_size(int n, double delta) {
  const int s = static_cast<int>(std::floor((0.5 + delta) * n + 0.5 + 1e-9));
  return std::clamp(s, 1, std::max(1, n - 1));
}

Eigen::VectorXd project_box_hyperplane(const Eigen::VectorXd& y, double target_sum) {
  const Eigen::Index n = y.size();
  if (!(std::abs(target_sum) <= static_cast<double>(n) * (1.0 + 1e-12))) {
    fail(ErrorKind::Infeasible, "target sum " + std::to_string(target_sum) +
                                    " outside [-n, n] for n = " + std::to_string(n));
  }
  if (n == 0) return y;

  // g(lambda) = sum clip(y_i - lambda, -1, 1) is piecewise linear and
  // non-increasing; element i is free between y_i - 1 and y_i + 1.
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    events.emplace_back(y(i) - 1.0, -1);
    events.emplace_back(y(i) + 1.0, +1);
  }
  std::sort(events.begin(), events.end());

  double lambda = events.front().first;
  double g = static_cast<double>(n);
  int slope = 0;
  for (const auto& [at, change] : events) {
    const double g_at = g + slope * (at - lambda);
    if (g_at <= target_sum) {
      lambda = slope == 0 ? lambda : lambda + (target_sum - g) / slope;
      break;
    }
    lambda = at;
    g = g_at;
    slope += change;
  }

  auto clip = [&](double l) {
    return (y.array() - l).max(-1.0).min(1.0).matrix().eval();
  };
  Eigen::VectorXd x = clip(lambda);
  // One Newton step on the free set removes drift from the running sum.
  const double residual = x.sum() - target_sum;
  const auto free_count = ((y.array() - lambda).abs() < 1.0).count();
  if (free_count > 0 && residual != 0.0) x = clip(lambda + residual / static_cast<double>(free_count));
  return x;
}

namespace {

double pair_dot(const FeatureMaps& maps, const Eigen::VectorXd& phi_a, const Eigen::VectorXd& psi_a,
                const Eigen::VectorXd& phi_b, const Eigen::VectorXd& psi_b) {
  if (maps.same) return phi_a.dot(phi_b);
  return 0.5 * (phi_a.dot(psi_b) + phi_b.dot(psi_a));
}

Eigen::VectorXd phi_sum(const FeatureMaps& maps, std::span<const int> rows) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(maps.phi.cols());
  for (int r : rows) s += maps.phi.row(r).transpose();
  return s;
}

Eigen::VectorXd psi_sum(const FeatureMaps& maps, std::span<const int> rows) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(maps.psi.cols());
  for (int r : rows) s += maps.psi.row(r).transpose();
  return s;
}

double step_scale(const FeatureMaps& maps, double eta0) {
  if (eta0 > 0.0) return eta0;
  const double a = maps.phi.rowwise().norm().maxCoeff();
  const double b = maps.psi.rowwise().norm().maxCoeff();
  return a > 0.0 && b > 0.0 ? 1.0 / (a * b) : 1.0;
}

std::vector<int> top_k(const Eigen::VectorXd& x, int k) {
  std::vector<int> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x(a) > x(b); });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<int> complement(std::span<const int> members, int n) {
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (int m : members) in[m] = 1;
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(n) - members.size());
  for (int i = 0; i < n; ++i) {
    if (!in[i]) rest.push_back(i);
  }
  return rest;
}

bool better(double candidate, double incumbent, CutSense sense) {
  return sense == CutSense::MaximizeCut ? candidate > incumbent : candidate < incumbent;
}

// Projected gradient descent from a projected Gaussian start. `gradient`
// returns the descent direction's raw vector (before scaling by eta_t).
template <typename Gradient>
Eigen::VectorXd descend(Eigen::Index n, double target, const PartitionConfig& config, double eta0,
                        Rng& rng, Gradient&& gradient) {
  Eigen::VectorXd x(n);
  const double sd = std::sqrt(config.noise_variance);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = sd * rng.normal();
  x = project_box_hyperplane(x, target);
  for (int t = 0; t < config.iterations; ++t) {
    const double eta = eta0 / std::sqrt(static_cast<double>(t) + 1.0);
    x = project_box_hyperplane(x - eta * gradient(x), target);
  }
  return x;
}

}  // namespace

double cut_weight(const FeatureMaps& maps, std::span<const int> a, std::span<const int> b) {
  return pair_dot(maps, phi_sum(maps, a), psi_sum(maps, a), phi_sum(maps, b), psi_sum(maps, b));
}

double internal_weight(const FeatureMaps& maps, std::span<const int> members) {
  const Eigen::VectorXd p = phi_sum(maps, members);
  const Eigen::VectorXd q = maps.same ? p : psi_sum(maps, members);
  double diag = 0.0;
  for (int m : members) diag += maps.weight(m, m);
  return 0.5 * (p.dot(q) - diag);
}

PartitionVector derandomized_balanced_cut(const FeatureMaps& maps, std::pair<int, int> sizes,
                                          CutSense sense) {
  const int n = static_cast<int>(maps.size());
  require(sizes.first >= 0 && sizes.second >= 0 && sizes.first + sizes.second == n,
          ErrorKind::InvalidParam, "part sizes must be non-negative and sum to n");
  const Eigen::Index k = maps.phi.cols();

  Eigen::VectorXd px = Eigen::VectorXd::Zero(k), qx = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd py = Eigen::VectorXd::Zero(k), qy = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd pu = maps.phi.colwise().sum().transpose();
  Eigen::VectorXd qu = maps.psi.colwise().sum().transpose();
  double diag_u = 0.0;
  for (int i = 0; i < n; ++i) diag_u += maps.weight(i, i);
  int rem_x = sizes.first;
  int rem_y = sizes.second;
  double cut = 0.0;

  // Expected final cut when the unassigned set U is split uniformly at random
  // into the remaining capacities.
  auto expected = [&](double cut_xy, const Eigen::VectorXd& pxs, const Eigen::VectorXd& qxs,
                      const Eigen::VectorXd& pys, const Eigen::VectorXd& qys,
                      const Eigen::VectorXd& pus, const Eigen::VectorXd& qus, double diag,
                      int rx, int ry) {
    const double r = rx + ry;
    if (r == 0) return cut_xy;
    double e = cut_xy + pair_dot(maps, pxs, qxs, pus, qus) * (ry / r) +
               pair_dot(maps, pys, qys, pus, qus) * (rx / r);
    if (r >= 2) {
      const double inner = 0.5 * (pus.dot(qus) - diag);
      e += inner * (2.0 * rx * ry / (r * (r - 1.0)));
    }
    return e;
  };

  PartitionVector out;
  out.relaxed.resize(n);
  for (int v = 0; v < n; ++v) {
    const Eigen::VectorXd fv = maps.phi.row(v).transpose();
    const Eigen::VectorXd gv = maps.psi.row(v).transpose();
    const double wvv = fv.dot(gv);
    const Eigen::VectorXd pu2 = pu - fv, qu2 = qu - gv;
    const double cut_if_x = cut + pair_dot(maps, fv, gv, py, qy);
    const double cut_if_y = cut + pair_dot(maps, fv, gv, px, qx);

    bool to_x;
    if (rem_x == 0) {
      to_x = false;
    } else if (rem_y == 0) {
      to_x = true;
    } else {
      const double ex = expected(cut_if_x, px + fv, qx + gv, py, qy, pu2, qu2, diag_u - wvv,
                                 rem_x - 1, rem_y);
      const double ey = expected(cut_if_y, px, qx, py + fv, qy + gv, pu2, qu2, diag_u - wvv,
                                 rem_x, rem_y - 1);
      to_x = !better(ey, ex, sense);
    }
    if (to_x) {
      px += fv;
      qx += gv;
      --rem_x;
      cut = cut_if_x;
      out.part_one.push_back(v);
      out.relaxed(v) = 1.0;
    } else {
      py += fv;
      qy += gv;
      --rem_y;
      cut = cut_if_y;
      out.part_two.push_back(v);
      out.relaxed(v) = -1.0;
    }
    pu = pu2;
    qu = qu2;
    diag_u -= wvv;
  }
  out.cut_value = cut_weight(maps, out.part_one, out.part_two);
  return out;
}

PartitionVector gd_partition(const FeatureMaps& maps, const PartitionConfig& config) {
  config.validate();
  const int n = static_cast<int>(maps.size());
  require(n >= 2, ErrorKind::InvalidParam, "partitioning needs at least two points");
  const int size_one = part_one_size(n, config.delta);
  const double target = 2.0 * config.delta * n;
  const double eta0 = step_scale(maps, config.eta0);
  // Descending on x^T W x maximizes the cut; ascending minimizes it.
  const double sign = config.sense == CutSense::MaximizeCut ? 1.0 : -1.0;

  struct Run {
    Eigen::VectorXd relaxed;
    std::vector<int> one;
    std::vector<int> two;
    double cut = 0.0;
  };
  std::vector<Run> runs(static_cast<std::size_t>(config.restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Rng rng(derive_seed(config.seed, r));
    Run& run = runs[r];
    run.relaxed = descend(n, target, config, eta0, rng,
                          [&](const Eigen::VectorXd& x) { return (sign * maps.apply(x)).eval(); });
    if (config.rounding == Rounding::Randomized) {
      for (int attempt = 0; attempt < config.rounding_retries; ++attempt) {
        run.one.clear();
        run.two.clear();
        for (int i = 0; i < n; ++i) {
          (rng.uniform() < 0.5 * (run.relaxed(i) + 1.0) ? run.one : run.two).push_back(i);
        }
        if (!run.one.empty() && !run.two.empty()) break;
      }
    }
    if (run.one.empty() || run.two.empty()) {
      run.one = top_k(run.relaxed, size_one);
      run.two = complement(run.one, n);
    }
    run.cut = cut_weight(maps, run.one, run.two);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (better(runs[r].cut, runs[best].cut, config.sense)) best = r;
  }
  PartitionVector out;
  out.relaxed = std::move(runs[best].relaxed);
  out.part_one = std::move(runs[best].one);
  out.part_two = std::move(runs[best].two);
  out.cut_value = runs[best].cut;

  auto greedy = derandomized_balanced_cut(maps, {size_one, n - size_one}, config.sense);
  if (better(greedy.cut_value, out.cut_value, config.sense)) {
    out.part_one = std::move(greedy.part_one);
    out.part_two = std::move(greedy.part_two);
    out.cut_value = greedy.cut_value;
  }
  return out;
}

SubsetChoice gd_min_internal(const FeatureMaps& maps, int size, const PartitionConfig& config) {
  config.validate();
  const int n = static_cast<int>(maps.size());
  require(size >= 0 && size <= n, ErrorKind::InvalidParam, "subset size out of range");
  SubsetChoice best;
  if (size == 0 || size == n || n < 2) {
    best.members = top_k(Eigen::VectorXd::Zero(n), size);
    best.internal = internal_weight(maps, best.members);
    return best;
  }
  const double target = 2.0 * size - n;
  const double eta0 = step_scale(maps, config.eta0);
  Eigen::VectorXd diag(n);
  for (int i = 0; i < n; ++i) diag(i) = maps.weight(i, i);
  // Off-diagonal W applied to (1 + z): the gradient of the relaxed internal
  // weight up to a factor 1/4.
  const Eigen::VectorXd w_ones = maps.apply(Eigen::VectorXd::Ones(n)) - diag;

  std::vector<SubsetChoice> runs(static_cast<std::size_t>(config.restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Rng rng(derive_seed(config.seed, r));
    const Eigen::VectorXd z = descend(n, target, config, eta0, rng, [&](const Eigen::VectorXd& x) {
      return (w_ones + maps.apply(x) - diag.cwiseProduct(x)).eval();
    });
    runs[r].members = top_k(z, size);
    runs[r].internal = internal_weight(maps, runs[r].members);
  });
  best = std::move(runs.front());
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].internal < best.internal) best = std::move(runs[r]);
  }
  return best;
}

SubsetChoice derandomized_min_internal(const FeatureMaps& maps, int size) {
  const int n = static_cast<int>(maps.size());
  require(size >= 0 && size <= n, ErrorKind::InvalidParam, "subset size out of range");
  const Eigen::Index k = maps.phi.cols();
  Eigen::VectorXd pm = Eigen::VectorXd::Zero(k), qm = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd pu = maps.phi.colwise().sum().transpose();
  Eigen::VectorXd qu = maps.psi.colwise().sum().transpose();
  double diag_u = 0.0;
  for (int i = 0; i < n; ++i) diag_u += maps.weight(i, i);
  double inside = 0.0;
  int rem_in = size;
  int rem_out = n - size;

  // Expected internal weight when the remaining members are drawn uniformly
  // from the unassigned set.
  auto expected = [&](double in_w, const Eigen::VectorXd& pms, const Eigen::VectorXd& qms,
                      const Eigen::VectorXd& pus, const Eigen::VectorXd& qus, double diag, int ri,
                      int ro) {
    const double r = ri + ro;
    if (r == 0) return in_w;
    double e = in_w + pair_dot(maps, pms, qms, pus, qus) * (ri / r);
    if (r >= 2) e += 0.5 * (pus.dot(qus) - diag) * (ri * (ri - 1.0) / (r * (r - 1.0)));
    return e;
  };

  SubsetChoice out;
  for (int v = 0; v < n; ++v) {
    const Eigen::VectorXd fv = maps.phi.row(v).transpose();
    const Eigen::VectorXd gv = maps.psi.row(v).transpose();
    const double wvv = fv.dot(gv);
    const Eigen::VectorXd pu2 = pu - fv, qu2 = qu - gv;
    const double in_if_member = inside + pair_dot(maps, fv, gv, pm, qm);
    bool take;
    if (rem_in == 0) {
      take = false;
    } else if (rem_out == 0) {
      take = true;
    } else {
      const double e_in = expected(in_if_member, pm + fv, qm + gv, pu2, qu2, diag_u - wvv,
                                   rem_in - 1, rem_out);
      const double e_out = expected(inside, pm, qm, pu2, qu2, diag_u - wvv, rem_in, rem_out - 1);
      take = e_in <= e_out;
    }
    if (take) {
      pm += fv;
      qm += gv;
      inside = in_if_member;
      --rem_in;
      out.members.push_back(v);
    } else {
      --rem_out;
    }
    pu = pu2;
    qu = qu2;
    diag_u -= wvv;
  }
  out.internal = internal_weight(maps, out.members);
  return out;
}

}  // namespace objhc
