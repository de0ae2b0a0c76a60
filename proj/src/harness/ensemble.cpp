#include "tmlab/harness/ensemble.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "tmlab/errors.hpp"
#include "tmlab/format.hpp"
#include "tmlab/means.hpp"

namespace tmlab::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, sep)) out.push_back(tok);
  return out;
}

double parse_number(const std::string& tok, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used == tok.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad number '" + tok + "' in ensemble '" + context + "'");
}

}  // namespace

EnsembleSpec EnsembleSpec::parse(const std::string& text, const TensorShape& shape, std::uint64_t seed) {
  const std::vector<std::string> toks = split(text, ':');
  EnsembleSpec spec;
  spec.shape = shape;
  spec.seed = seed;
  if (toks.size() == 2 && toks[0] == "wishart") {
    spec.kind = Kind::kWishart;
    spec.dof = parse_number(toks[1], text);
    if (spec.dof < 1.0 || spec.dof != std::floor(spec.dof)) {
      throw ConfigError("wishart degrees of freedom must be a positive integer");
    }
  } else if (toks.size() == 3 && toks[0] == "spectrum") {
    spec.kind = Kind::kSpectrum;
    spec.lo = parse_number(toks[1], text);
    spec.hi = parse_number(toks[2], text);
    if (spec.lo < 0.0 || spec.hi < spec.lo) throw ConfigError("spectrum bounds need 0 <= m <= M in '" + text + "'");
  } else if (toks.size() == 2 && toks[0] == "rank") {
    spec.kind = Kind::kRank;
    const double r = parse_number(toks[1], text);
    if (r < 1.0 || r != std::floor(r) || r > static_cast<double>(shape.side())) {
      throw ConfigError("rank must be an integer in [1, " + std::to_string(shape.side()) + "]");
    }
    spec.rank = static_cast<std::size_t>(r);
  } else {
    throw ConfigError("unknown ensemble '" + text + "' (wishart:<dof>, spectrum:<m>:<M>, rank:<r>)");
  }
  return spec;
}

std::string EnsembleSpec::describe() const {
  switch (kind) {
    case Kind::kWishart:
      return "wishart:" + format_number(dof);
    case Kind::kSpectrum:
      return "spectrum:" + format_number(lo) + ":" + format_number(hi);
    case Kind::kRank:
      return "rank:" + std::to_string(rank);
  }
  return "?";
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream) {
  const std::uint64_t key = splitmix64(seed ^ splitmix64(trial)) ^ splitmix64(stream * 0x2545f4914f6cdd1dULL + 1);
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

Matrix complex_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Matrix g(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  return g;
}

Matrix random_unitary(std::mt19937_64& rng, Eigen::Index d) {
  const Matrix g = complex_gaussian(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix& r = qr.matrixQR();
  // Fix the phases of diag(R) so the distribution is Haar.
  for (Eigen::Index i = 0; i < d; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

HermitianTensor random_hermitian(std::mt19937_64& rng, const TensorShape& shape, double lo, double hi) {
  const auto d = static_cast<Eigen::Index>(shape.side());
  const Matrix g = complex_gaussian(rng, d, d);
  const Matrix h = 0.5 * (g + g.adjoint());
  std::uniform_real_distribution<double> unif(lo, hi);
  const double target = unif(rng);
  const HermitianTensor raw(shape, h);
  const double norm = gauge_norm(raw, GaugeNorm::spectral());
  return (norm > 0 ? target / norm : 0.0) * raw;
}

HermitianTensor sample(const EnsembleSpec& spec, std::uint64_t trial, std::uint64_t stream) {
  std::mt19937_64 rng = trial_rng(spec.seed, trial, stream);
  const auto d = static_cast<Eigen::Index>(spec.shape.side());
  switch (spec.kind) {
    case EnsembleSpec::Kind::kWishart: {
      const auto dof = static_cast<Eigen::Index>(spec.dof);
      const Matrix g = complex_gaussian(rng, dof, d);
      Matrix w = g.adjoint() * g / spec.dof;
      w += 1e-6 * Matrix::Identity(d, d);
      return HermitianTensor(spec.shape, w);
    }
    case EnsembleSpec::Kind::kSpectrum: {
      if (spec.lo == spec.hi) return spec.lo * HermitianTensor::identity(spec.shape);
      const Matrix u = random_unitary(rng, d);
      std::uniform_real_distribution<double> unif(spec.lo, spec.hi);
      RealVector values(d);
      for (Eigen::Index i = 0; i < d; ++i) values(i) = unif(rng);
      return HermitianTensor(spec.shape, u * values.cast<Complex>().asDiagonal() * u.adjoint());
    }
    case EnsembleSpec::Kind::kRank: {
      const Matrix g = complex_gaussian(rng, d, static_cast<Eigen::Index>(spec.rank));
      return HermitianTensor(spec.shape, g * g.adjoint() / static_cast<double>(spec.rank));
    }
  }
  throw ConfigError("unknown ensemble kind");
}

PremiseResult enforce_premise(const HermitianTensor& x, const HermitianTensor& y, const ConnectionFunction& f,
                              PremiseDirection direction) {
  return enforce_premise(x, y, [&](const HermitianTensor& a, const HermitianTensor& b) { return mean_pd(a, b, f); },
                         direction);
}

PremiseResult enforce_premise(const HermitianTensor& x, const HermitianTensor& y, const MeanFn& mean,
                              PremiseDirection direction) {
  require_psd(x, "premise X");
  require_psd(y, "premise Y");
  const HermitianTensor m = mean(x, y);
  const double t = direction == PremiseDirection::kBelowIdentity ? lambda_max(m) : lambda_min(m);
  if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("premise mean has extreme eigenvalue " + format_number(t));
  return PremiseResult{(1.0 / t) * x, (1.0 / t) * y, t};
}

}  // namespace tmlab::harness
