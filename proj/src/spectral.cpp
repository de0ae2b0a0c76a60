#include "tmlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "tmlab/errors.hpp"

namespace tmlab {

namespace {

// Make the largest-magnitude entry of every column real positive.  Near-ties
// go to the first index so tiny rounding differences cannot flip the choice.
void fix_phases(Matrix& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = std::abs(u(0, c));
    for (Eigen::Index r = 1; r < u.rows(); ++r) {
      const double a = std::abs(u(r, c));
      if (a > best_abs * (1.0 + 1e-12)) {
        best = r;
        best_abs = a;
      }
    }
    if (best_abs > 0.0) u.col(c) *= std::conj(u(best, c)) / best_abs;
  }
}

}  // namespace

HermitianTensor SpectralDecomposition::reconstruct(const RealVector& values) const {
  const Matrix& u = eigenbasis.unfold();
  Matrix m = u * values.cast<Complex>().asDiagonal() * u.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return HermitianTensor(eigenbasis.shape(), m);
}

SpectralDecomposition spectral_decompose(const HermitianTensor& h, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.unfold());
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition did not converge");
  // Eigen returns ascending order; flip to descending.
  const Eigen::Index d = h.unfold().rows();
  RealVector values(d);
  Matrix vectors(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    values(i) = solver.eigenvalues()(d - 1 - i);
    vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  fix_phases(vectors);
  const double top = values.cwiseAbs().maxCoeff();
  std::size_t rank = 0;
  if (top > 0.0) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (std::abs(values(i)) > rank_tol * top) ++rank;
    }
  }
  return SpectralDecomposition{std::move(values), Tensor(h.shape(), std::move(vectors)), rank};
}

RealVector eigenvalues(const HermitianTensor& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.unfold(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition did not converge");
  return solver.eigenvalues().reverse();
}

double lambda_max(const HermitianTensor& h) { return eigenvalues(h)(0); }

double lambda_min(const HermitianTensor& h) {
  const RealVector v = eigenvalues(h);
  return v(v.size() - 1);
}

HermitianTensor apply_spectral(const SpectralDecomposition& s, const std::function<double(double)>& phi,
                               DomainCheck check) {
  RealVector mapped(s.eigenvalues.size());
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double lambda = s.eigenvalues(i);
    if (check == DomainCheck::kPositiveSpectrum && !(lambda > 0.0)) {
      std::ostringstream msg;
      msg << "spectral function needs a positive spectrum, got eigenvalue " << lambda;
      throw DomainError(msg.str());
    }
    mapped(i) = phi(lambda);
    if (check != DomainCheck::kNone && !std::isfinite(mapped(i))) {
      std::ostringstream msg;
      msg << "spectral function is not finite at eigenvalue " << lambda;
      throw DomainError(msg.str());
    }
  }
  return s.reconstruct(mapped);
}

HermitianTensor apply_spectral(const HermitianTensor& h, const std::function<double(double)>& phi,
                               DomainCheck check) {
  return apply_spectral(spectral_decompose(h), phi, check);
}

bool is_pd(const HermitianTensor& h) {
  const RealVector v = eigenvalues(h);
  const double lo = v(v.size() - 1);
  return lo > 0.0 && lo > 1e-13 * v(0);
}

void require_pd(const HermitianTensor& h, const char* what) {
  if (!is_pd(h)) {
    std::ostringstream msg;
    msg << what << " is not positive definite (lambda_min = " << lambda_min(h) << ")";
    throw NotPositive(msg.str());
  }
}

void require_psd(const HermitianTensor& h, const char* what, double tol) {
  const RealVector v = eigenvalues(h);
  const double lo = v(v.size() - 1);
  if (lo < -tol * std::max(1.0, v(0))) {
    std::ostringstream msg;
    msg << what << " is not positive semidefinite (lambda_min = " << lo << ")";
    throw NotPositive(msg.str());
  }
}

HermitianTensor power(const HermitianTensor& h, double exponent) {
  if (exponent == 1.0) return h;
  if (exponent == 0.0) return HermitianTensor::identity(h.shape());
  const bool integral = exponent == std::round(exponent);
  return apply_spectral(
      h, [exponent](double x) { return std::pow(x, exponent); },
      integral && exponent > 0 ? DomainCheck::kFinite : DomainCheck::kPositiveSpectrum);
}

HermitianTensor psd_power(const HermitianTensor& h, double exponent) {
  const SpectralDecomposition s = spectral_decompose(h);
  const double top = std::max(0.0, s.lambda_max());
  return apply_spectral(s, [&](double x) {
    if (x <= kRankTolerance * top) {
      if (exponent > 0) return 0.0;
      if (exponent == 0) return 1.0;
      return std::numeric_limits<double>::infinity();
    }
    return std::pow(x, exponent);
  });
}

HermitianTensor sqrt(const HermitianTensor& h) { return psd_power(h, 0.5); }

HermitianTensor inverse(const HermitianTensor& h) {
  require_pd(h, "inverse argument");
  return apply_spectral(h, [](double x) { return 1.0 / x; });
}

const char* to_string(LoewnerRelation r) {
  switch (r) {
    case LoewnerRelation::kLeq: return "LEQ";
    case LoewnerRelation::kGeq: return "GEQ";
    case LoewnerRelation::kEq: return "EQ";
    case LoewnerRelation::kIncomparable: return "INCOMPARABLE";
  }
  return "?";
}

LoewnerVerdict loewner_compare(const HermitianTensor& x, const HermitianTensor& y, double tol) {
  if (!(x.shape() == y.shape())) throw ShapeMismatch("Loewner comparison of different shapes");
  const RealVector ex = eigenvalues(x);
  const RealVector ey = eigenvalues(y);
  const double scale = std::max({ex.cwiseAbs().maxCoeff(), ey.cwiseAbs().maxCoeff(), 1.0});
  const RealVector diff = eigenvalues(y - x);
  const double hi = diff(0);
  const double lo = diff(diff.size() - 1);
  const bool leq = lo >= -tol * scale;
  const bool geq = hi <= tol * scale;
  LoewnerVerdict v{LoewnerRelation::kIncomparable, lo, lo, hi};
  if (leq && geq) {
    v.relation = LoewnerRelation::kEq;
  } else if (leq) {
    v.relation = LoewnerRelation::kLeq;
  } else if (geq) {
    v.relation = LoewnerRelation::kGeq;
    v.witness = hi;
  }
  return v;
}

GaugeNorm parse_gauge_norm(const std::string& text) {
  if (text == "spectral") return GaugeNorm::spectral();
  if (text == "frobenius") return GaugeNorm::frobenius();
  if (text == "trace") return GaugeNorm::trace();
  if (text.rfind("kyfan:", 0) == 0) {
    try {
      const long k = std::stol(text.substr(6));
      if (k >= 1) return GaugeNorm::ky_fan(static_cast<std::size_t>(k));
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown norm '" + text + "'");
}

namespace {

// `values` are nonnegative and sorted descending.
double apply_gauge(const RealVector& values, const GaugeNorm& norm) {
  switch (norm.kind) {
    case GaugeNorm::Kind::kSpectral: return values(0);
    case GaugeNorm::Kind::kFrobenius: return values.norm();
    case GaugeNorm::Kind::kTrace: return values.sum();
    case GaugeNorm::Kind::kKyFan:
      if (norm.k == 0 || norm.k > static_cast<std::size_t>(values.size())) {
        throw ShapeMismatch("Ky Fan index " + std::to_string(norm.k) + " exceeds dimension " +
                            std::to_string(values.size()));
      }
      return values.head(static_cast<Eigen::Index>(norm.k)).sum();
  }
  return 0.0;
}

}  // namespace

double gauge_norm(const HermitianTensor& h, const GaugeNorm& norm) {
  RealVector a = eigenvalues(h).cwiseAbs();
  std::sort(a.data(), a.data() + a.size(), std::greater<>());
  return apply_gauge(a, norm);
}

double gauge_norm(const Tensor& t, const GaugeNorm& norm) {
  Eigen::JacobiSVD<Matrix> svd(t.unfold());
  return apply_gauge(svd.singularValues(), norm);
}

HermitianTensor range_projector(const HermitianTensor& h, double rank_tol) {
  require_psd(h, "range projector argument");
  const SpectralDecomposition s = spectral_decompose(h, rank_tol);
  const double top = std::max(0.0, s.lambda_max());
  return apply_spectral(s, [&](double x) { return x > rank_tol * top && top > 0.0 ? 1.0 : 0.0; });
}

}  // namespace tmlab
