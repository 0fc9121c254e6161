#include "sgrecon/lsq_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgrecon {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

LsqSolution solve(const LsqProblem& problem) {
  const int n = problem.a.cols();
  if (static_cast<int>(problem.b.size()) != problem.a.rows()) {
    throw std::invalid_argument("right-hand side length mismatch");
  }
  for (double v : problem.b) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite right-hand side");
  }
  const double a_norm = problem.a.inf_norm();
  if (a_norm == 0.0) throw std::invalid_argument("zero operator");

  // Append pin rows weight * e_i^T z = weight * value with weight = ||A||_inf
  // so the constraint is neither negligible nor dominating.
  const SparseOperator* a = &problem.a;
  SparseOperator augmented;
  std::vector<double> b = problem.b;
  if (!problem.options.pins.empty()) {
    std::vector<Triplet> rows;
    rows.reserve(problem.options.pins.size());
    for (std::size_t j = 0; j < problem.options.pins.size(); ++j) {
      const PinConstraint& pin = problem.options.pins[j];
      if (pin.index < 0 || pin.index >= n) throw std::invalid_argument("pin index out of range");
      rows.push_back(Triplet{static_cast<int>(j), pin.index, a_norm});
      b.push_back(a_norm * pin.value);
    }
    const SparseOperator pin_block =
        SparseOperator::from_triplets(static_cast<int>(problem.options.pins.size()), n, std::move(rows));
    augmented = vstack({{1.0, &problem.a}, {1.0, &pin_block}});
    a = &augmented;
  }

  const SparseOperator at = a->transposed();
  const int max_iters =
      problem.options.max_iters > 0 ? problem.options.max_iters : 10 * std::max(n, 1);

  LsqSolution sol;
  sol.z.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<double> r = b;                    // residual b - A x (x = 0)
  std::vector<double> s = matvec(at, r);        // normal-equation residual
  double gamma = dot(s, s);
  const double gamma0 = gamma;
  sol.normal_residual_history.push_back(std::sqrt(gamma));
  const double threshold = problem.options.tol_rel * problem.options.tol_rel * gamma0;

  if (gamma0 == 0.0) {
    sol.converged = true;
    sol.residual_norm = norm(r);
    return sol;
  }

  std::vector<double> p = s;
  std::vector<double> best_z = sol.z;
  double best_gamma = gamma;
  bool converged = false;
  int it = 0;

  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  while (it < max_iters) {
    if (gamma <= threshold) {
      converged = true;
      break;
    }
    ++it;
    const std::vector<double> q = matvec(*a, p);
    const double qq = dot(q, q);
    if (qq == 0.0) break;  // p in the nullspace; nothing further to gain
    const double alpha = gamma / qq;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
    s = matvec(at, r);
    const double gamma_new = dot(s, s);
    if (gamma_new < best_gamma) {
      best_gamma = gamma_new;
      best_z = x;
    }
    sol.normal_residual_history.push_back(std::sqrt(best_gamma));
    const double beta = gamma_new / gamma;
    gamma = gamma_new;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
  }
  if (gamma <= threshold) converged = true;

  sol.z = best_z;
  sol.iterations = it;
  sol.converged = converged;
  const std::vector<double> az = matvec(*a, sol.z);
  double rn = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = az[i] - b[i];
    rn += d * d;
  }
  sol.residual_norm = std::sqrt(rn);
  return sol;
}

std::vector<double> fix_gauge(std::vector<double> z, const PixelDomain& domain, GaugeMode mode,
                              const std::vector<int>& pin_indices) {
  if (static_cast<int>(z.size()) != domain.size()) throw std::invalid_argument("field length mismatch");
  const int comps = domain.component_count();

  if (mode == GaugeMode::offset_zero_mean) {
    std::vector<double> mean(static_cast<std::size_t>(comps), 0.0);
    for (int i = 0; i < domain.size(); ++i) mean[static_cast<std::size_t>(domain.component_of(i))] += z[static_cast<std::size_t>(i)];
    for (int c = 0; c < comps; ++c) mean[static_cast<std::size_t>(c)] /= domain.component_sizes()[static_cast<std::size_t>(c)];
    for (int i = 0; i < domain.size(); ++i) z[static_cast<std::size_t>(i)] -= mean[static_cast<std::size_t>(domain.component_of(i))];
    return z;
  }

  std::vector<double> pivot(static_cast<std::size_t>(comps), 0.0);
  std::vector<bool> have(static_cast<std::size_t>(comps), false);
  for (int idx : pin_indices) {
    if (idx < 0 || idx >= domain.size()) throw std::invalid_argument("pin index out of range");
    const int c = domain.component_of(idx);
    pivot[static_cast<std::size_t>(c)] = z[static_cast<std::size_t>(idx)];
    have[static_cast<std::size_t>(c)] = true;
  }
  for (int c = 0; c < comps; ++c) {
    if (!have[static_cast<std::size_t>(c)]) throw std::invalid_argument("component without pin index");
    if (std::fabs(pivot[static_cast<std::size_t>(c)]) < 1e-12) throw std::invalid_argument("degenerate pin pixel");
  }
  for (int i = 0; i < domain.size(); ++i) z[static_cast<std::size_t>(i)] /= pivot[static_cast<std::size_t>(domain.component_of(i))];

  // Sign fix: negate a component whose lower median is negative.
  std::vector<std::vector<double>> values(static_cast<std::size_t>(comps));
  for (int i = 0; i < domain.size(); ++i) values[static_cast<std::size_t>(domain.component_of(i))].push_back(z[static_cast<std::size_t>(i)]);
  std::vector<bool> flip(static_cast<std::size_t>(comps), false);
  for (int c = 0; c < comps; ++c) {
    std::vector<double>& v = values[static_cast<std::size_t>(c)];
    std::sort(v.begin(), v.end());
    flip[static_cast<std::size_t>(c)] = v[(v.size() - 1) / 2] < 0.0;
  }
  for (int i = 0; i < domain.size(); ++i) {
    if (flip[static_cast<std::size_t>(domain.component_of(i))]) z[static_cast<std::size_t>(i)] = -z[static_cast<std::size_t>(i)];
  }
  return z;
}

int pin_pixel_for_component(const PixelDomain& domain, int component) {
  double cu = 0.0, cv = 0.0;
  int count = 0;
  for (int i = 0; i < domain.size(); ++i) {
    if (domain.component_of(i) != component) continue;
    const Pixel p = domain.pixel_of(i);
    cu += p.u;
    cv += p.v;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("no such component");
  cu /= count;
  cv /= count;

  int best = -1;
  double best_d2 = 0.0;
  for (int i = 0; i < domain.size(); ++i) {
    if (domain.component_of(i) != component) continue;
    const Pixel p = domain.pixel_of(i);
    const double d2 = (p.u - cu) * (p.u - cu) + (p.v - cv) * (p.v - cv);
    if (best < 0 || d2 < best_d2) {
      best = i;
      best_d2 = d2;
    }
    // Foreground order is row-major, so the first minimum already has the
    // smallest (v, u); strictly-less keeps it.
  }
  return best;
}

}  // namespace sgrecon
