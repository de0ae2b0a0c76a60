#include "tmlab/processing.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tmlab/errors.hpp"
#include "tmlab/format.hpp"
#include "tmlab/means.hpp"

namespace tmlab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Matrix pinch(const Pinching& p, const Matrix& m) {
  const auto d = static_cast<std::size_t>(m.rows());
  std::vector<std::size_t> block_of(d);
  for (std::size_t i = 0; i < d; ++i) block_of[i] = p.blocks.size() + i;  // singleton by default
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    for (std::size_t idx : p.blocks[b]) {
      if (idx >= d) throw ShapeMismatch("pinching index " + std::to_string(idx) + " exceeds dimension " + std::to_string(d));
      block_of[idx] = b;
    }
  }
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      if (block_of[r] == block_of[c]) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      }
    }
  }
  return out;
}

void check_weights(const Mixture& mix) {
  if (mix.maps.size() != mix.weights.size() || mix.maps.empty()) {
    throw ConfigError("mixture needs one weight per map");
  }
  double total = 0.0;
  for (double w : mix.weights) {
    if (!(w >= 0.0)) throw ConfigError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("mixture weights sum to " + format_number(total));
}

}  // namespace

HermitianTensor apply_map(const PositiveLinearMap& map, const HermitianTensor& h) {
  return std::visit(
      Overloaded{
          [&](const Congruence& c) { return congruence(c.k.adjoint(), h); },
          [&](const Pinching& p) { return HermitianTensor(h.shape(), pinch(p, h.unfold())); },
          [&](const Mixture& mix) {
            check_weights(mix);
            HermitianTensor acc = HermitianTensor::zero(h.shape());
            for (std::size_t i = 0; i < mix.maps.size(); ++i) acc += mix.weights[i] * apply_map(mix.maps[i], h);
            return acc;
          },
      },
      map.kind);
}

std::string describe(const PositiveLinearMap& map) {
  return std::visit(Overloaded{
                        [](const Congruence& c) { return c.label; },
                        [](const Pinching& p) {
                          std::string s = "pinching:";
                          if (p.blocks.empty()) return s + "diag";
                          for (std::size_t b = 0; b < p.blocks.size(); ++b) {
                            if (b) s += "|";
                            for (std::size_t i = 0; i < p.blocks[b].size(); ++i) {
                              if (i) s += ",";
                              s += std::to_string(p.blocks[b][i]);
                            }
                          }
                          return s;
                        },
                        [](const Mixture& m) {
                          std::string s = "mix";
                          for (std::size_t i = 0; i < m.maps.size(); ++i) {
                            s += ":" + format_number(m.weights[i]) + ":" + describe(m.maps[i]);
                          }
                          return s;
                        },
                    },
                    map.kind);
}

MapProbe probe_map(const PositiveLinearMap& map, const TensorShape& shape, int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const auto d = static_cast<Eigen::Index>(shape.side());
  auto random_psd = [&]() {
    Matrix g(d, d);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) g(r, c) = Complex(normal(rng), normal(rng));
    return HermitianTensor(shape, g * g.adjoint() / static_cast<double>(d));
  };
  MapProbe out;
  for (int i = 0; i < probes; ++i) {
    const HermitianTensor p = random_psd();
    const HermitianTensor q = random_psd();
    const HermitianTensor lp = apply_map(map, p);
    const double scale = std::max(1.0, gauge_norm(lp, GaugeNorm::spectral()));
    const double lo = lambda_min(lp) / scale;
    out.worst_psd = std::min(out.worst_psd, lo);
    if (lo < -1e-9) out.preserves_psd = false;

    const double a = normal(rng);
    const double b = normal(rng);
    const HermitianTensor combined = apply_map(map, a * p + b * q);
    const HermitianTensor separate = a * lp + b * apply_map(map, q);
    const double lin_scale = std::max(1.0, gauge_norm(separate, GaugeNorm::frobenius()));
    const double err = gauge_norm(combined - separate, GaugeNorm::frobenius()) / lin_scale;
    out.worst_linearity = std::max(out.worst_linearity, err);
    if (err > 1e-10) out.linear = false;
  }
  return out;
}

DominationPair DominationPair::make(HermitianTensor x, HermitianTensor y, DominationSide side) {
  const EtaResult e = side == DominationSide::kLeft ? eta(x, y) : eta(y, x);
  return DominationPair(std::move(x), std::move(y), side, e.domination_constant);
}

HermitianTensor pair_mean(const HermitianTensor& x, const HermitianTensor& y, DominationSide side,
                          const ConnectionFunction& g) {
  if (side == DominationSide::kLeft) return mean_psd(x, y, g);
  return mean_psd(y, x, transpose_fn(g));
}

namespace {

void require_convex_bounded(const ConnectionFunction& g) {
  if (!g.tags().tc) throw UnsupportedFunction("'" + g.label() + "' is not tagged operator convex");
  if (!g.finite_at_0plus()) throw UnsupportedFunction("'" + g.label() + "' is unbounded at 0+");
}

}  // namespace

GapResult fusion_gap(const DominationPair& p1, const DominationPair& p2, const ConnectionFunction& g, double tol) {
  require_convex_bounded(g);
  if (p1.side() != p2.side()) throw PreconditionError("fusion needs both pairs dominated on the same side");
  const DominationSide side = p1.side();
  const HermitianTensor fused = pair_mean(p1.x() + p2.x(), p1.y() + p2.y(), side, g);
  const HermitianTensor separate = pair_mean(p1.x(), p1.y(), side, g) + pair_mean(p2.x(), p2.y(), side, g);
  return {lambda_min(separate - fused), loewner_compare(fused, separate, tol)};
}

GapResult transform_gap(const PositiveLinearMap& map, const DominationPair& pair, const ConnectionFunction& g,
                        double tol) {
  require_convex_bounded(g);
  const DominationSide side = pair.side();
  const HermitianTensor mapped_mean = apply_map(map, pair_mean(pair.x(), pair.y(), side, g));
  const HermitianTensor mean_of_mapped = pair_mean(apply_map(map, pair.x()), apply_map(map, pair.y()), side, g);
  return {lambda_min(mapped_mean - mean_of_mapped), loewner_compare(mapped_mean, mean_of_mapped, tol)};
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, sep)) out.push_back(tok);
  return out;
}

Pinching parse_pinching(const std::string& spec) {
  Pinching p;
  if (spec == "diag") return p;
  for (const std::string& group : split(spec, '|')) {
    std::vector<std::size_t> block;
    for (const std::string& idx : split(group, ',')) {
      if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("bad pinching index '" + idx + "' in '" + spec + "'");
      }
      block.push_back(std::stoul(idx));
    }
    if (block.empty()) throw ConfigError("empty pinching block in '" + spec + "'");
    p.blocks.push_back(std::move(block));
  }
  return p;
}

PositiveLinearMap parse_map_tokens(const std::vector<std::string>& toks, std::size_t& pos, const std::string& text) {
  if (pos >= toks.size()) throw ConfigError("map spec '" + text + "' ends early");
  const std::string head = toks[pos++];
  if (head == "congruence") {
    if (pos >= toks.size()) throw ConfigError("congruence needs a tensor file");
    const std::string file = toks[pos++];
    return PositiveLinearMap{Congruence{read_tensor_file(file), "congruence:" + file}};
  }
  if (head == "pinching") {
    if (pos >= toks.size()) throw ConfigError("pinching needs a block list");
    return PositiveLinearMap{parse_pinching(toks[pos++])};
  }
  if (head == "mix") {
    Mixture mix;
    while (pos < toks.size()) {
      const std::string& wtok = toks[pos++];
      double w = 0.0;
      try {
        std::size_t used = 0;
        w = std::stod(wtok, &used);
        if (used != wtok.size()) throw std::invalid_argument(wtok);
      } catch (const std::exception&) {
        throw ConfigError("expected a mixture weight, got '" + wtok + "'");
      }
      mix.weights.push_back(w);
      mix.maps.push_back(parse_map_tokens(toks, pos, text));
    }
    check_weights(mix);
    return PositiveLinearMap{std::move(mix)};
  }
  throw ConfigError("unknown map kind '" + head + "'");
}

}  // namespace

PositiveLinearMap parse_map(const std::string& text) {
  const std::vector<std::string> toks = split(text, ':');
  std::size_t pos = 0;
  PositiveLinearMap map = parse_map_tokens(toks, pos, text);
  if (pos != toks.size()) throw ConfigError("trailing tokens in map spec '" + text + "'");
  return map;
}

}  // namespace tmlab
