#include "imela/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

namespace imela {
namespace {

using Triplet = Eigen::Triplet<double>;

SparseRowMatrix select_rows(const SparseRowMatrix& A, const std::vector<Index>& rows) {
  std::vector<Triplet> trip;
  for (Index r = 0; r < static_cast<Index>(rows.size()); ++r) {
    for (SparseRowMatrix::InnerIterator it(A, rows[static_cast<size_t>(r)]); it; ++it)
      trip.emplace_back(r, it.col(), it.value());
  }
  SparseRowMatrix out(static_cast<Index>(rows.size()), A.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

double coerce_label(double raw) {
  if (raw == 1.0 || raw == -1.0) return raw;
  if (raw == 0.0) return -1.0;
  throw DataError("labels must be +-1 or 0/1");
}

// log(1 + exp(z)) without overflow.
double log1pexp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double row_norm(const SparseRowMatrix& A, Index r) {
  double s = 0.0;
  for (SparseRowMatrix::InnerIterator it(A, r); it; ++it) s += it.value() * it.value();
  return std::sqrt(s);
}

}  // namespace

Dataset load_libsvm(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open dataset: " + path);

  std::vector<double> labels;
  std::vector<Triplet> trip;
  Index max_col = 0;
  std::string line;
  Index row = 0;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;  // blank line
    labels.push_back(coerce_label(std::stod(tok)));
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw DataError("malformed libsvm entry: " + tok);
      const long long idx = std::stoll(tok.substr(0, colon));
      if (idx < 1) throw DataError("libsvm feature indices are 1-based");
      const double val = std::stod(tok.substr(colon + 1));
      trip.emplace_back(row, static_cast<Index>(idx - 1), val);
      max_col = std::max(max_col, static_cast<Index>(idx));
    }
    ++row;
  }
  if (row == 0) throw DataError("empty dataset: " + path);

  Dataset d;
  d.features.resize(row, max_col);
  d.features.setFromTriplets(trip.begin(), trip.end());
  d.labels = Eigen::Map<Vector>(labels.data(), static_cast<Index>(labels.size()));
  return d;
}

Dataset load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError("empty dataset: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::istringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  Index label_col = -1, group_col = -1;
  for (Index i = 0; i < static_cast<Index>(header.size()); ++i) {
    if (header[static_cast<size_t>(i)] == "label") label_col = i;
    if (header[static_cast<size_t>(i)] == "group") group_col = i;
  }
  if (label_col < 0) throw DataError("csv dataset needs a 'label' column");

  std::vector<double> labels, group;
  std::vector<Triplet> trip;
  Index row = 0;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    Index col = 0, feat = 0;
    while (std::getline(ss, cell, ',')) {
      const double v = std::stod(cell);
      if (col == label_col) {
        labels.push_back(coerce_label(v));
      } else if (col == group_col) {
        group.push_back(v);
      } else {
        if (v != 0.0) trip.emplace_back(row, feat, v);
        ++feat;
      }
      ++col;
    }
    if (col != static_cast<Index>(header.size())) throw DataError("csv row width mismatch");
    ++row;
  }
  if (row == 0) throw DataError("empty dataset: " + path);

  Dataset d;
  const Index n_feat = static_cast<Index>(header.size()) - 1 - (group_col >= 0 ? 1 : 0);
  d.features.resize(row, n_feat);
  d.features.setFromTriplets(trip.begin(), trip.end());
  d.labels = Eigen::Map<Vector>(labels.data(), static_cast<Index>(labels.size()));
  if (group_col >= 0) {
    d.group = Eigen::Map<Vector>(group.data(), static_cast<Index>(group.size()));
    d.has_group = true;
  }
  return d;
}

void assign_group_column(Dataset& d, Index column, bool keep_feature) {
  if (column < 0 || column >= d.cols()) throw InputError("assign_group_column: column out of range");
  d.group.resize(d.rows());
  for (Index r = 0; r < d.rows(); ++r) {
    double v = 0.0;
    for (SparseRowMatrix::InnerIterator it(d.features, r); it; ++it)
      if (it.col() == column) { v = it.value(); break; }
    d.group[r] = v > 0.5 ? 1.0 : 0.0;
  }
  d.has_group = true;
  if (keep_feature) return;

  std::vector<Triplet> trip;
  for (Index r = 0; r < d.rows(); ++r) {
    for (SparseRowMatrix::InnerIterator it(d.features, r); it; ++it) {
      if (it.col() == column) continue;
      trip.emplace_back(r, it.col() < column ? it.col() : it.col() - 1, it.value());
    }
  }
  SparseRowMatrix shrunk(d.rows(), d.cols() - 1);
  shrunk.setFromTriplets(trip.begin(), trip.end());
  d.features = std::move(shrunk);
}

FairnessSplit split_fairness(const Dataset& d, std::uint64_t seed) {
  if (!d.has_group) throw InputError("split_fairness: dataset has no group assignment");
  if (d.rows() < 3) throw DataError("split_fairness: too few rows");

  std::vector<Index> perm(static_cast<size_t>(d.rows()));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  for (Index i = d.rows() - 1; i > 0; --i)  // Fisher-Yates, fixed stream
    std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);

  const Index n_train = (2 * d.rows()) / 3;
  std::vector<Index> train(perm.begin(), perm.begin() + n_train);
  std::vector<Index> prot, unprot;
  for (Index k = n_train; k < d.rows(); ++k) {
    const Index r = perm[static_cast<size_t>(k)];
    (d.group[r] > 0.5 ? prot : unprot).push_back(r);
  }
  if (prot.empty() || unprot.empty())
    throw DataError("split_fairness: a held-out group is empty; adjust the seed or group column");

  FairnessSplit out;
  out.train_features = select_rows(d.features, train);
  out.train_labels.resize(n_train);
  for (Index k = 0; k < n_train; ++k) out.train_labels[k] = d.labels[train[static_cast<size_t>(k)]];
  out.heldout_protected = select_rows(d.features, prot);
  out.heldout_unprotected = select_rows(d.features, unprot);
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

OracleEval logistic_loss(const SparseRowMatrix& A, const Vector& b, const Vector& x) {
  if (A.rows() != b.size() || A.cols() != x.size()) throw InputError("logistic_loss: dimension mismatch");
  const double inv_n = 1.0 / static_cast<double>(A.rows());
  OracleEval out;
  out.gradient.setZero(x.size());
  const Vector scores = A * x;
  for (Index i = 0; i < A.rows(); ++i) {
    const double margin = b[i] * scores[i];
    out.value += log1pexp(-margin);
    const double w = -b[i] * sigmoid(-margin);  // d/dz log(1+e^-z) = -sigmoid(-z)
    for (SparseRowMatrix::InnerIterator it(A, i); it; ++it) out.gradient[it.col()] += w * it.value();
  }
  out.value *= inv_n;
  out.gradient *= inv_n;
  return out;
}

double dp_gap(const SparseRowMatrix& Ap, const SparseRowMatrix& Au, const Vector& x) {
  const Vector sp = Ap * x;
  const Vector su = Au * x;
  double mp = 0.0, mu = 0.0;
  for (Index i = 0; i < sp.size(); ++i) mp += sigmoid(sp[i]);
  for (Index i = 0; i < su.size(); ++i) mu += sigmoid(su[i]);
  return mp / static_cast<double>(sp.size()) - mu / static_cast<double>(su.size());
}

OracleEval dp_objective(const SparseRowMatrix& Ap, const SparseRowMatrix& Au, const Vector& x) {
  if (Ap.cols() != x.size() || Au.cols() != x.size()) throw InputError("dp_objective: dimension mismatch");
  const double gap = dp_gap(Ap, Au, x);

  Vector grad_gap = Vector::Zero(x.size());
  const Vector sp = Ap * x;
  for (Index i = 0; i < Ap.rows(); ++i) {
    const double s = sigmoid(sp[i]);
    const double w = s * (1.0 - s) / static_cast<double>(Ap.rows());
    for (SparseRowMatrix::InnerIterator it(Ap, i); it; ++it) grad_gap[it.col()] += w * it.value();
  }
  const Vector su = Au * x;
  for (Index i = 0; i < Au.rows(); ++i) {
    const double s = sigmoid(su[i]);
    const double w = s * (1.0 - s) / static_cast<double>(Au.rows());
    for (SparseRowMatrix::InnerIterator it(Au, i); it; ++it) grad_gap[it.col()] -= w * it.value();
  }

  OracleEval out;
  out.value = 0.5 * gap * gap;
  out.gradient = gap * grad_gap;
  return out;
}

FairnessConstants estimate_constants(const FairnessSplit& split) {
  FairnessConstants c;
  const Index np = split.heldout_protected.rows();
  const Index nu = split.heldout_unprotected.rows();
  const Index n = split.train_features.rows();
  if (np == 0 || nu == 0 || n == 0) throw InputError("estimate_constants: empty split");

  double sum_p = 0.0, sum_p2 = 0.0, sum_u = 0.0, sum_u2 = 0.0, sum_t = 0.0, sum_t2 = 0.0;
  for (Index i = 0; i < np; ++i) {
    const double nrm = row_norm(split.heldout_protected, i);
    sum_p += nrm;
    sum_p2 += nrm * nrm;
  }
  for (Index i = 0; i < nu; ++i) {
    const double nrm = row_norm(split.heldout_unprotected, i);
    sum_u += nrm;
    sum_u2 += nrm * nrm;
  }
  for (Index i = 0; i < n; ++i) {
    const double nrm = row_norm(split.train_features, i);
    sum_t += nrm;
    sum_t2 += nrm * nrm;
  }
  c.alpha = sum_p / (4.0 * static_cast<double>(np)) + sum_u / (4.0 * static_cast<double>(nu));
  c.beta = sum_p2 / (4.0 * static_cast<double>(np)) + sum_u2 / (4.0 * static_cast<double>(nu));
  c.gamma = sum_t / static_cast<double>(n);
  c.gamma_prime = sum_t2 / (4.0 * static_cast<double>(n));
  c.L = std::max(c.beta + c.alpha * c.alpha, c.gamma_prime);
  return c;
}

LstarResult solve_lstar(const SparseRowMatrix& A, const Vector& b, const FeasibleSet& set, double tol,
                        long long max_steps) {
  const double eta = 0.1;
  Vector x = Vector::Zero(set.dimension());
  LstarResult out;
  SmoothOracle loss(set.dimension(), [&A, &b](const Vector& v, Vector& grad) {
    OracleEval ev = logistic_loss(A, b, v);
    grad = ev.gradient;
    return ev.value;
  });
  for (long long k = 0; k < max_steps; ++k) {
    const OracleEval ev = loss.eval(x);
    const double res = set.normal_cone_distance(x, -ev.gradient);
    if (res <= tol) {
      out.value = ev.value;
      out.x = x;
      out.steps = k;
      out.residual = res;
      return out;
    }
    x = set.project(x - eta * ev.gradient);
  }
  throw ConfigError("solve_lstar: step budget exhausted before reaching the target residual");
}

FairnessProblem build_fairness_problem(const FairnessSplit& split, const FairnessOptions& opts) {
  if (!(opts.radius > 0.0)) throw InputError("build_fairness_problem: radius must be positive");
  const Index d = split.train_features.cols();

  FairnessProblem out;
  out.constants = estimate_constants(split);
  FairnessConstants& c = out.constants;
  if (opts.L_override) {
    if (!(*opts.L_override > 0.0)) throw ConfigError("build_fairness_problem: L override must be positive");
    c.L = *opts.L_override;
  }

  ProblemInstance& prob = out.instance;
  prob.name = "fairness";
  prob.set = FeasibleSet::l1_ball(d, opts.radius);

  const LstarResult ls = solve_lstar(split.train_features, split.train_labels, prob.set, opts.lstar_tol);
  c.lstar = ls.value;
  const double budget = c.lstar + opts.kappa_mult * ls.value;
  // budget - lstar is exact (the two agree within a factor of two), so
  // g(x_feas) = lstar - budget equals -kappa bitwise.
  c.kappa = budget - c.lstar;
  if (!(c.kappa > 0.0))
    throw DataError("build_fairness_problem: degenerate near-zero optimal loss, no feasible margin");
  const SparseRowMatrix& At = split.train_features;
  const Vector& bt = split.train_labels;
  prob.constraints.push_back(SmoothOracle(d, [At, bt, budget](const Vector& x, Vector& grad) {
    OracleEval ev = logistic_loss(At, bt, x);
    grad = ev.gradient;
    return ev.value - budget;
  }));
  const SparseRowMatrix Ap = split.heldout_protected;
  const SparseRowMatrix Au = split.heldout_unprotected;
  prob.objective = SmoothOracle(d, [Ap, Au](const Vector& x, Vector& grad) {
    OracleEval ev = dp_objective(Ap, Au, x);
    grad = ev.gradient;
    return ev.value;
  });

  // Certified constraint bound: the loss is convex so its maximum over the
  // ball sits at a vertex; |g| <= max(loss_max - budget, budget) and the
  // gradient norm is at most gamma. Falls back to the Lipschitz bound from
  // loss(0) = log 2 when the vertex sweep would be too expensive.
  double loss_max;
  if (d <= 2048) {
    loss_max = 0.0;
    Vector v = Vector::Zero(d);
    for (Index j = 0; j < d; ++j) {
      for (double sgn : {1.0, -1.0}) {
        v[j] = sgn * opts.radius;
        loss_max = std::max(loss_max, logistic_loss(At, bt, v).value);
      }
      v[j] = 0.0;
    }
  } else {
    loss_max = std::log(2.0) + c.gamma * opts.radius;
  }
  c.B_g = std::max({c.gamma, budget, loss_max - budget});
  if (opts.B_g_override) c.B_g = *opts.B_g_override;

  prob.constants.L = c.L;
  prob.constants.B_f = c.alpha;
  prob.constants.B_g = c.B_g;
  prob.constants.D_X = 2.0 * opts.radius;
  prob.constants.x_feas = ls.x;
  prob.constants.min_slack = c.kappa;  // g(x_feas) = -kappa by construction
  prob.constants.f_lower = 0.0;
  return out;
}

Dataset make_synthetic_fairness(std::uint64_t seed, Index n, Index d) {
  if (n < 10 || d < 2) throw InputError("make_synthetic_fairness: need n >= 10, d >= 2");
  Rng rng(seed);
  Vector w = rng.normal_vector(d);
  w.normalize();

  std::vector<Triplet> trip;
  Dataset out;
  out.labels.resize(n);
  out.group.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double grp = rng.uniform() < 0.4 ? 1.0 : 0.0;
    Vector a = rng.normal_vector(d);
    if (grp > 0.5) a += 0.8 * w;  // group-dependent shift creates the score gap
    const double margin = a.dot(w) + 0.5 * rng.normal();
    out.labels[i] = margin >= 0.0 ? 1.0 : -1.0;
    out.group[i] = grp;
    for (Index j = 0; j < d; ++j) trip.emplace_back(i, j, a[j]);
  }
  out.features.resize(n, d);
  out.features.setFromTriplets(trip.begin(), trip.end());
  out.has_group = true;
  return out;
}

}  // namespace imela
