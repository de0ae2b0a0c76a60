#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tmlab/connection.hpp"
#include "tmlab/spectral.hpp"

namespace tmlab {

struct PositiveLinearMap;

/// H -> K^H H K
struct Congruence {
  Tensor k;
  std::string label = "congruence";
};

/// H -> sum_i P_i H P_i over blocks of unfolding indices.  Indices not
/// listed in any block form singleton blocks.
struct Pinching {
  std::vector<std::vector<std::size_t>> blocks;
};

/// H -> sum_i w_i L_i(H) with nonnegative weights summing to 1.
struct Mixture {
  std::vector<PositiveLinearMap> maps;
  std::vector<double> weights;
};

struct PositiveLinearMap {
  std::variant<Congruence, Pinching, Mixture> kind;
};

HermitianTensor apply_map(const PositiveLinearMap& map, const HermitianTensor& h);
std::string describe(const PositiveLinearMap& map);

struct MapProbe {
  bool preserves_psd = true;
  bool linear = true;
  double worst_psd = 0.0;        // most negative lambda_min(L(P)) / scale
  double worst_linearity = 0.0;  // largest ||L(aX + bY) - aL(X) - bL(Y)||_F / scale
};

/// PSD preservation and linearity on random probes of the given shape.
MapProbe probe_map(const PositiveLinearMap& map, const TensorShape& shape, int probes = 100,
                   std::uint64_t seed = 7);

enum class DominationSide { kLeft, kRight };  // X <= cY, or cX >= Y

class DominationPair {
 public:
  /// Verifies the domination and records the least constant c.
  static DominationPair make(HermitianTensor x, HermitianTensor y, DominationSide side);

  const HermitianTensor& x() const { return x_; }
  const HermitianTensor& y() const { return y_; }
  DominationSide side() const { return side_; }
  double constant() const { return c_; }

 private:
  DominationPair(HermitianTensor x, HermitianTensor y, DominationSide side, double c)
      : x_(std::move(x)), y_(std::move(y)), side_(side), c_(c) {}
  HermitianTensor x_;
  HermitianTensor y_;
  DominationSide side_;
  double c_;
};

/// X #_g Y on a dominated pair: left pairs go through the PSD mean directly,
/// right pairs through Y #_{x g(1/x)} X.
HermitianTensor pair_mean(const HermitianTensor& x, const HermitianTensor& y, DominationSide side,
                          const ConnectionFunction& g);

struct GapResult {
  double gap = 0.0;  // lambda_min of (claimed larger side - claimed smaller side)
  LoewnerVerdict verdict;
};

/// gap = lambda_min(X1 #_g Y1 + X2 #_g Y2 - (X1 + X2) #_g (Y1 + Y2)); LEQ expected.
GapResult fusion_gap(const DominationPair& p1, const DominationPair& p2, const ConnectionFunction& g,
                     double tol = kPsdTolerance);

/// gap = lambda_min(L(X #_g Y) - L(X) #_g L(Y)); GEQ expected.
GapResult transform_gap(const PositiveLinearMap& map, const DominationPair& pair, const ConnectionFunction& g,
                        double tol = kPsdTolerance);

/// "congruence:<tensor-file>", "pinching:0|1,2" (or "pinching:diag"),
/// "mix:<w>:<map>:<w>:<map>..." with the weight/map list read to the end.
PositiveLinearMap parse_map(const std::string& text);

}  // namespace tmlab
