#include "tmlab/tensor.hpp"

#include <fstream>
#include <sstream>

#include "tmlab/errors.hpp"

namespace tmlab {

TensorShape::TensorShape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ShapeMismatch("tensor shape needs at least one dimension");
  for (std::size_t d : dims_) {
    if (d == 0) throw ShapeMismatch("tensor dimensions must be positive");
    side_ *= d;
  }
}

std::size_t TensorShape::encode(std::span<const std::size_t> index) const {
  if (index.size() != dims_.size()) throw ShapeMismatch("multi-index has the wrong length");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (index[k] >= dims_[k]) throw ShapeMismatch("multi-index out of range");
    flat = flat * dims_[k] + index[k];
  }
  return flat;
}

std::vector<std::size_t> TensorShape::decode(std::size_t flat) const {
  if (flat >= side_) throw ShapeMismatch("flat index out of range");
  std::vector<std::size_t> index(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    index[k] = flat % dims_[k];
    flat /= dims_[k];
  }
  return index;
}

Tensor::Tensor(TensorShape shape, Matrix unfolded) : shape_(std::move(shape)), data_(std::move(unfolded)) {
  const auto d = static_cast<Eigen::Index>(shape_.side());
  if (data_.rows() != d || data_.cols() != d) {
    throw ShapeMismatch("unfolding is not " + std::to_string(d) + "x" + std::to_string(d));
  }
}

Tensor Tensor::zero(const TensorShape& shape) {
  const auto d = static_cast<Eigen::Index>(shape.side());
  return Tensor(shape, Matrix::Zero(d, d));
}

Tensor Tensor::identity(const TensorShape& shape) {
  const auto d = static_cast<Eigen::Index>(shape.side());
  return Tensor(shape, Matrix::Identity(d, d));
}

Complex Tensor::entry(std::span<const std::size_t> row, std::span<const std::size_t> col) const {
  return data_(static_cast<Eigen::Index>(shape_.encode(row)), static_cast<Eigen::Index>(shape_.encode(col)));
}

Tensor Tensor::adjoint() const { return Tensor(shape_, data_.adjoint()); }

static void require_same_shape(const TensorShape& a, const TensorShape& b) {
  if (!(a == b)) throw ShapeMismatch("tensor shapes differ");
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(shape_, other.shape_);
  data_ += other.data_;
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(shape_, other.shape_);
  data_ -= other.data_;
  return *this;
}

Tensor& Tensor::operator*=(Complex scale) {
  data_ *= scale;
  return *this;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(Complex scale, Tensor a) { return a *= scale; }

Tensor einstein_product(const Tensor& a, const Tensor& b) {
  require_same_shape(a.shape(), b.shape());
  return Tensor(a.shape(), a.unfold() * b.unfold());
}

double hermiticity_defect(const Tensor& t) { return (t.unfold() - t.unfold().adjoint()).norm(); }

HermitianTensor::HermitianTensor(const Tensor& t) : tensor_(t) {
  const double defect = hermiticity_defect(t);
  const double limit = kHermiticityTolerance * std::max(1.0, t.unfold().norm());
  if (!(defect <= limit)) {
    std::ostringstream msg;
    msg << "tensor is not Hermitian: defect " << defect << " exceeds " << limit;
    throw NotHermitian(msg.str());
  }
  const Matrix sym = 0.5 * (t.unfold() + t.unfold().adjoint());
  tensor_ = Tensor(t.shape(), sym);
}

HermitianTensor::HermitianTensor(const TensorShape& shape, const Matrix& unfolded)
    : HermitianTensor(Tensor(shape, unfolded)) {}

HermitianTensor HermitianTensor::zero(const TensorShape& shape) { return {Trusted{}, Tensor::zero(shape)}; }

HermitianTensor HermitianTensor::identity(const TensorShape& shape) { return {Trusted{}, Tensor::identity(shape)}; }

HermitianTensor HermitianTensor::diagonal(const TensorShape& shape, std::span<const double> values) {
  if (values.size() != shape.side()) throw ShapeMismatch("diagonal needs one value per unfolding row");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
  return {Trusted{}, Tensor(shape, m)};
}

HermitianTensor& HermitianTensor::operator+=(const HermitianTensor& other) {
  tensor_ += other.tensor_;
  return *this;
}

HermitianTensor& HermitianTensor::operator-=(const HermitianTensor& other) {
  tensor_ -= other.tensor_;
  return *this;
}

HermitianTensor& HermitianTensor::operator*=(double scale) {
  tensor_ *= scale;
  return *this;
}

HermitianTensor operator+(HermitianTensor a, const HermitianTensor& b) { return a += b; }
HermitianTensor operator-(HermitianTensor a, const HermitianTensor& b) { return a -= b; }
HermitianTensor operator*(double scale, HermitianTensor a) { return a *= scale; }

HermitianTensor congruence(const Tensor& a, const HermitianTensor& h) {
  require_same_shape(a.shape(), h.shape());
  Matrix m = a.unfold() * h.unfold() * a.unfold().adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return {HermitianTensor::Trusted{}, Tensor(h.shape(), m)};
}

nlohmann::ordered_json to_json(const Tensor& t) {
  nlohmann::ordered_json j;
  j["dims"] = t.shape().dims();
  std::vector<double> re;
  std::vector<double> im;
  const Matrix& m = t.unfold();
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

Tensor tensor_from_json(const nlohmann::json& j) {
  try {
    TensorShape shape(j.at("dims").get<std::vector<std::size_t>>());
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    const std::size_t d = shape.side();
    if (re.size() != d * d || im.size() != d * d) {
      throw ShapeMismatch("tensor JSON has " + std::to_string(re.size()) + " entries, expected " +
                          std::to_string(d * d));
    }
    Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d * d; ++k) {
      m(static_cast<Eigen::Index>(k / d), static_cast<Eigen::Index>(k % d)) = Complex(re[k], im[k]);
    }
    return Tensor(std::move(shape), std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed tensor JSON: ") + e.what());
  }
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read tensor file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse tensor file " + path.string() + ": " + e.what());
  }
  return tensor_from_json(j);
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write tensor file " + path.string());
  out << to_json(t).dump() << '\n';
}

}  // namespace tmlab
