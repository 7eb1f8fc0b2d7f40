#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgpca/features.hpp"

namespace lgpca {

// Whitened-PCA subspace: mean, descending positive eigenvalues, orthonormal
// basis rows. Trained with the covariance normalized by 1/r.
struct SubspaceModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd eigenvalues;        // descending, all > 0
  Eigen::MatrixXd basis;              // q x N, orthonormal rows
  int trained_on = 0;                 // r
  std::string layout;

  int components() const { return static_cast<int>(eigenvalues.size()); }
  int dimension() const { return static_cast<int>(mean.size()); }
};

struct Projection {
  Eigen::VectorXd coords;
};

struct GalleryEntry {
  std::string label;
  Projection projection;
};

struct Gallery {
  std::vector<GalleryEntry> entries;
  std::string layout;
};

namespace detail {

// Deterministic sign: the largest-magnitude component of each basis row is
// made positive (first occurrence on ties).
inline void fix_basis_signs(Eigen::MatrixXd& basis) {
  for (Eigen::Index r = 0; r < basis.rows(); ++r) {
    Eigen::Index imax = 0;
    double amax = -1.0;
    for (Eigen::Index c = 0; c < basis.cols(); ++c) {
      double a = std::abs(basis(r, c));
      if (a > amax) {
        amax = a;
        imax = c;
      }
    }
    if (basis(r, imax) < 0.0) basis.row(r) = -basis.row(r);
  }
}

}  // namespace detail

// Trains the whitened-PCA model. When r < N the eigenpairs come from the
// r x r Gram matrix (1/r) D^T D and are mapped back to length-N eigenvectors;
// otherwise the N x N covariance is decomposed directly. Components with
// eigenvalue <= 1e-12 * lambda_1 are discarded.
inline SubspaceModel train(const std::vector<FeatureVector>& vectors) {
  const size_t r = vectors.size();
  if (r < 2) throw std::invalid_argument("train: need at least 2 vectors");
  const size_t N = vectors[0].values.size();
  for (const auto& v : vectors)
    if (v.values.size() != N || v.layout != vectors[0].layout)
      throw std::invalid_argument("train: mismatched vector lengths or layouts");

  Eigen::MatrixXd D(N, r);  // centered data as columns
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N));
  for (size_t j = 0; j < r; ++j)
    mean += Eigen::Map<const Eigen::VectorXd>(vectors[j].values.data(), static_cast<Eigen::Index>(N));
  mean /= static_cast<double>(r);
  for (size_t j = 0; j < r; ++j)
    D.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(vectors[j].values.data(), static_cast<Eigen::Index>(N)) -
        mean;

  Eigen::VectorXd evals;
  Eigen::MatrixXd basis;  // q x N
  if (r < N) {
    Eigen::MatrixXd gram = (D.transpose() * D) / static_cast<double>(r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw std::runtime_error("train: eigendecomposition failed");
    // ascending from Eigen; reverse to descending
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();
    evals = ev;
    basis.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(N));
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      Eigen::VectorXd u = D * V.col(k);
      double n = u.norm();
      if (n > 0.0) u /= n;
      basis.row(k) = u.transpose();
    }
  } else {
    Eigen::MatrixXd cov = (D * D.transpose()) / static_cast<double>(r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("train: eigendecomposition failed");
    evals = es.eigenvalues().reverse();
    basis = es.eigenvectors().rowwise().reverse().transpose();
  }

  double lmax = evals.size() > 0 ? evals(0) : 0.0;
  if (lmax <= 0.0) throw std::invalid_argument("train: no positive eigenvalue (identical vectors?)");
  int q = 0;
  while (q < evals.size() && evals(q) > 1e-12 * lmax) ++q;

  SubspaceModel model;
  model.mean = mean;
  model.eigenvalues = evals.head(q);
  model.basis = basis.topRows(q);
  detail::fix_basis_signs(model.basis);
  model.trained_on = static_cast<int>(r);
  model.layout = vectors[0].layout;
  return model;
}

// Whitened projection: the first n coordinates of diag(1/sqrt(lambda)) * T * (x - m).
inline Projection project(const SubspaceModel& model, const FeatureVector& x, int n) {
  if (n < 1 || n > model.components())
    throw std::invalid_argument("project: component count out of range");
  if (static_cast<int>(x.values.size()) != model.dimension() || x.layout != model.layout)
    throw std::invalid_argument("project: feature vector does not match model layout");
  Eigen::Map<const Eigen::VectorXd> xv(x.values.data(), model.dimension());
  Eigen::VectorXd y = model.basis.topRows(n) * (xv - model.mean);
  for (int k = 0; k < n; ++k) y(k) /= std::sqrt(model.eigenvalues(k));
  return Projection{std::move(y)};
}

// Negative cosine distance in [-1, 1]; -1 means identical direction.
inline double distance(const Projection& a, const Projection& b) {
  if (a.coords.size() != b.coords.size())
    throw std::invalid_argument("distance: projection length mismatch");
  double na = a.coords.norm(), nb = b.coords.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("distance: zero-norm projection");
  return -a.coords.dot(b.coords) / (na * nb);
}

struct IdentifyResult {
  std::string label;  // empty when rejected
  bool rejected = false;
  // (distance, gallery index) ascending; ties keep insertion order
  std::vector<std::pair<double, size_t>> sorted_distances;
};

// Nearest neighbor over the gallery; rejects iff a threshold is supplied and
// the minimal distance is >= tau.
inline IdentifyResult identify(const Gallery& g, const Projection& z,
                               const double* tau = nullptr) {
  if (g.entries.empty()) throw std::invalid_argument("identify: empty gallery");
  IdentifyResult res;
  res.sorted_distances.reserve(g.entries.size());
  for (size_t i = 0; i < g.entries.size(); ++i)
    res.sorted_distances.emplace_back(distance(z, g.entries[i].projection), i);
  std::stable_sort(res.sorted_distances.begin(), res.sorted_distances.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto& best = res.sorted_distances.front();
  if (tau && best.first >= *tau) {
    res.rejected = true;
  } else {
    res.label = g.entries[best.second].label;
  }
  return res;
}

}  // namespace lgpca
