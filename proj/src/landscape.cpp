#include "rbo/landscape.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "rbo/errors.hpp"

namespace rbo {

double Landscape::value_and_gradient(const Vector& theta, Vector& grad) const {
  grad = gradient(theta);
  return value(theta);
}

double Landscape::value1d(double t) const {
  Vector theta(1);
  theta[0] = t;
  return value(theta);
}

double Landscape::derivative1d(double t) const {
  Vector theta(1);
  theta[0] = t;
  return gradient(theta)[0];
}

void Landscape::values1d(std::span<const double> ts, std::span<double> out) const {
  if (dim() != 1) throw InvalidArgument("values1d needs a 1D landscape, got d=" + std::to_string(dim()));
  if (ts.size() != out.size()) throw InvalidArgument("values1d: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(ts.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = value1d(ts[i]);
}

void Landscape::require_dim(const Vector& theta) const {
  if (theta.size() != dim()) {
    throw InvalidArgument(id() + ": expected theta of size " + std::to_string(dim()) + ", got " +
                          std::to_string(theta.size()));
  }
}

namespace {

class Quadratic final : public Landscape {
 public:
  Quadratic(Matrix A, Vector center) : A_(std::move(A)), center_(std::move(center)) {}

  Index dim() const override { return center_.size(); }
  double value(const Vector& theta) const override {
    require_dim(theta);
    const Vector r = theta - center_;
    return 0.5 * r.dot(A_ * r);
  }
  Vector gradient(const Vector& theta) const override {
    require_dim(theta);
    return A_ * (theta - center_);
  }
  double value_and_gradient(const Vector& theta, Vector& grad) const override {
    require_dim(theta);
    const Vector r = theta - center_;
    grad = A_ * r;
    return 0.5 * r.dot(grad);
  }
  std::optional<Matrix> hessian(const Vector&) const override { return A_; }
  std::string id() const override { return "quadratic"; }
  double value1d(double t) const override {
    const double r = t - center_[0];
    return 0.5 * A_(0, 0) * r * r;
  }
  double derivative1d(double t) const override { return A_(0, 0) * (t - center_[0]); }

 private:
  Matrix A_;
  Vector center_;
};

class Riemann final : public Landscape {
 public:
  explicit Riemann(int terms) : terms_(terms) {
    for (int n = 1; n <= terms_; ++n) bound_ += 1.0 / (static_cast<double>(n) * n);
  }

  Index dim() const override { return 1; }
  double value(const Vector& theta) const override {
    require_dim(theta);
    return value1d(theta[0]);
  }
  Vector gradient(const Vector& theta) const override {
    require_dim(theta);
    Vector g(1);
    g[0] = derivative1d(theta[0]);
    return g;
  }
  std::optional<Matrix> hessian(const Vector& theta) const override {
    require_dim(theta);
    double h = 0.0;
    for (int n = 1; n <= terms_; ++n) {
      const double n2 = static_cast<double>(n) * n;
      h -= n2 * std::sin(n2 * theta[0]);
    }
    return Matrix::Constant(1, 1, h);
  }
  std::optional<Bounds> bounds() const override { return Bounds{-bound_, bound_, terms_ == 1}; }
  std::string id() const override { return "riemann"; }

  double value1d(double t) const override {
    double s = 0.0;
    for (int n = 1; n <= terms_; ++n) {
      const double n2 = static_cast<double>(n) * n;
      s += std::sin(n2 * t) / n2;
    }
    return s;
  }
  double derivative1d(double t) const override {
    double s = 0.0;
    for (int n = 1; n <= terms_; ++n) {
      const double n2 = static_cast<double>(n) * n;
      s += std::cos(n2 * t);
    }
    return s;
  }

 private:
  int terms_;
  double bound_ = 0.0;
};

class Sinusoid final : public Landscape {
 public:
  Index dim() const override { return 1; }
  double value(const Vector& theta) const override {
    require_dim(theta);
    return std::sin(theta[0]);
  }
  Vector gradient(const Vector& theta) const override {
    require_dim(theta);
    return Vector::Constant(1, std::cos(theta[0]));
  }
  std::optional<Matrix> hessian(const Vector& theta) const override {
    require_dim(theta);
    return Matrix::Constant(1, 1, -std::sin(theta[0]));
  }
  std::optional<Bounds> bounds() const override { return Bounds{-1.0, 1.0, true}; }
  std::string id() const override { return "sinusoid"; }
  double value1d(double t) const override { return std::sin(t); }
  double derivative1d(double t) const override { return std::cos(t); }
};

class Constant final : public Landscape {
 public:
  Constant(Index dim, double c) : dim_(dim), c_(c) {}
  Index dim() const override { return dim_; }
  double value(const Vector& theta) const override {
    require_dim(theta);
    return c_;
  }
  Vector gradient(const Vector& theta) const override {
    require_dim(theta);
    return Vector::Zero(dim_);
  }
  std::optional<Matrix> hessian(const Vector&) const override { return Matrix::Zero(dim_, dim_); }
  std::optional<Bounds> bounds() const override { return Bounds{c_, c_, true}; }
  std::string id() const override { return "constant"; }
  double value1d(double) const override { return c_; }
  double derivative1d(double) const override { return 0.0; }

 private:
  Index dim_;
  double c_;
};

Vector json_vector(const nlohmann::json& j, const char* what) {
  if (j.is_number()) return Vector::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) throw InvalidArgument(std::string("expected a non-empty array for ") + what);
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Matrix json_matrix(const nlohmann::json& j, const char* what) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw InvalidArgument(std::string("expected a matrix for ") + what);
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (static_cast<Index>(j[r].size()) != cols) throw InvalidArgument(std::string("ragged matrix for ") + what);
    for (Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

LandscapePtr quadratic(const Matrix& A, const Vector& center) {
  if (A.rows() != A.cols() || A.rows() != center.size() || A.rows() == 0) {
    throw InvalidArgument("quadratic: A must be square and match the center's dimension");
  }
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("quadratic: A is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw InvalidArgument("quadratic: A is not positive semidefinite");
  }
  return std::make_shared<Quadratic>(A, center);
}

LandscapePtr riemann(int terms) {
  if (terms < 1) throw InvalidArgument("riemann: N must be >= 1");
  return std::make_shared<Riemann>(terms);
}

LandscapePtr sinusoid() { return std::make_shared<Sinusoid>(); }

LandscapePtr constant(Index dim, double value) {
  if (dim < 1) throw InvalidArgument("constant: dim must be >= 1");
  return std::make_shared<Constant>(dim, value);
}

BumpProfile sin_profile() {
  return BumpProfile{"sin",
                     [](double x) { return std::sin(x); },
                     [](double x) { return std::cos(x); },
                     [](double x) { return -std::sin(x); },
                     1.0,
                     1.0,
                     -1.0};
}

BumpProfile gaussian_profile() {
  return BumpProfile{"gaussian",
                     [](double x) { return std::exp(-0.5 * x * x); },
                     [](double x) { return -x * std::exp(-0.5 * x * x); },
                     [](double x) { return (x * x - 1.0) * std::exp(-0.5 * x * x); },
                     1.0,
                     1.0,
                     0.0};
}

BumpProfile profile_by_name(const std::string& name) {
  if (name == "sin") return sin_profile();
  if (name == "gaussian") return gaussian_profile();
  throw InvalidArgument("unknown bump profile '" + name + "'");
}

AffinePlusBump::AffinePlusBump(Vector a, double b, BumpProfile profile, double amplitude, BumpPattern pattern)
    : a_(std::move(a)), b_(b), profile_(std::move(profile)), amplitude_(amplitude), pattern_(pattern) {
  if (a_.size() == 0) throw InvalidArgument("affine_plus_bump: empty slope");
  if (!std::isfinite(profile_.sup_norm) || profile_.sup_norm < 0.0 || !profile_.value) {
    throw InvalidArgument("affine_plus_bump: profile must be bounded with a finite sup-norm");
  }
}

double AffinePlusBump::value(const Vector& theta) const {
  require_dim(theta);
  double bump = 0.0;
  if (amplitude_ != 0.0) {
    if (pattern_ == BumpPattern::separable) {
      for (Index i = 0; i < theta.size(); ++i) bump += profile_.value(theta[i]);
    } else {
      bump = profile_.value(theta.norm());
    }
  }
  return a_.dot(theta) + b_ + amplitude_ * bump;
}

Vector AffinePlusBump::gradient(const Vector& theta) const {
  require_dim(theta);
  Vector g = a_;
  if (amplitude_ == 0.0) return g;
  if (pattern_ == BumpPattern::separable) {
    for (Index i = 0; i < theta.size(); ++i) g[i] += amplitude_ * profile_.derivative(theta[i]);
  } else {
    const double r = theta.norm();
    // phi(|theta|) is differentiable at 0 only when phi'(0) == 0; report the
    // one-sided limit direction as zero there.
    if (r > 0.0) g += amplitude_ * profile_.derivative(r) / r * theta;
  }
  return g;
}

std::optional<Matrix> AffinePlusBump::hessian(const Vector& theta) const {
  require_dim(theta);
  const Index d = dim();
  Matrix h = Matrix::Zero(d, d);
  if (amplitude_ == 0.0) return h;
  if (pattern_ == BumpPattern::separable) {
    for (Index i = 0; i < d; ++i) h(i, i) = amplitude_ * profile_.second_derivative(theta[i]);
    return h;
  }
  const double r = theta.norm();
  if (r == 0.0) {
    h.diagonal().setConstant(amplitude_ * profile_.second_derivative(0.0));
    return h;
  }
  const Vector u = theta / r;
  const double d1 = profile_.derivative(r);
  const double d2 = profile_.second_derivative(r);
  h = amplitude_ * (d2 * u * u.transpose() + d1 / r * (Matrix::Identity(d, d) - u * u.transpose()));
  return h;
}

std::optional<Bounds> AffinePlusBump::bounds() const {
  if (a_.cwiseAbs().maxCoeff() != 0.0) return std::nullopt;
  const double terms = pattern_ == BumpPattern::separable ? static_cast<double>(dim()) : 1.0;
  const double low = amplitude_ >= 0.0 ? amplitude_ * profile_.inf : amplitude_ * profile_.sup;
  return Bounds{b_ + terms * low, b_ + terms * bump_sup(), true};
}

double AffinePlusBump::value1d(double t) const {
  double bump = 0.0;
  if (amplitude_ != 0.0) bump = pattern_ == BumpPattern::separable ? profile_.value(t) : profile_.value(std::abs(t));
  return a_[0] * t + b_ + amplitude_ * bump;
}

double AffinePlusBump::derivative1d(double t) const {
  if (amplitude_ == 0.0) return a_[0];
  if (pattern_ == BumpPattern::separable) return a_[0] + amplitude_ * profile_.derivative(t);
  if (t == 0.0) return a_[0];
  return a_[0] + amplitude_ * profile_.derivative(std::abs(t)) * (t > 0.0 ? 1.0 : -1.0);
}

LandscapePtr AffinePlusBump::affine_part() const {
  return std::make_shared<AffinePlusBump>(a_, b_, profile_, 0.0, pattern_);
}

double AffinePlusBump::bump_sup() const {
  if (amplitude_ >= 0.0) return amplitude_ * profile_.sup;
  return amplitude_ * profile_.inf;
}

std::shared_ptr<const AffinePlusBump> affine_plus_bump(const Vector& a, double b, BumpProfile profile,
                                                       double amplitude, BumpPattern pattern) {
  return std::make_shared<AffinePlusBump>(a, b, std::move(profile), amplitude, pattern);
}

LandscapePtr make_landscape(const std::string& id, const nlohmann::json& params) {
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  try {
    if (id == "quadratic") {
      Matrix A = p.contains("A") ? json_matrix(p.at("A"), "A") : Matrix::Identity(1, 1);
      if (p.contains("diag")) A = json_vector(p.at("diag"), "diag").asDiagonal();
      const Vector center = p.contains("center") ? json_vector(p.at("center"), "center") : Vector::Zero(A.rows());
      return quadratic(A, center);
    }
    if (id == "riemann") return riemann(p.value("N", 100));
    if (id == "sinusoid" || id == "sin") return sinusoid();
    if (id == "constant") return constant(p.value("dim", 1), p.value("value", 0.0));
    if (id == "affine_plus_bump" || id == "affine") {
      const Vector a = p.contains("a") ? json_vector(p.at("a"), "a") : Vector::Ones(1);
      const double amplitude = id == "affine" ? 0.0 : p.value("amplitude", 0.0);
      const std::string pattern = p.value("pattern", std::string("separable"));
      BumpPattern bp;
      if (pattern == "separable") {
        bp = BumpPattern::separable;
      } else if (pattern == "radial") {
        bp = BumpPattern::radial;
      } else {
        throw InvalidArgument("unknown bump pattern '" + pattern + "'");
      }
      return affine_plus_bump(a, p.value("b", 0.0), profile_by_name(p.value("profile", std::string("sin"))),
                              amplitude, bp);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("landscape '" + id + "': bad parameters: " + e.what());
  }
  throw InvalidArgument("unknown landscape id '" + id + "'");
}

Vector finite_difference_grad(const Landscape& f, const Vector& theta, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_difference_grad: h must be > 0");
  Vector g(theta.size());
  Vector probe = theta;
  for (Index i = 0; i < theta.size(); ++i) {
    probe[i] = theta[i] + h;
    const double up = f.value(probe);
    probe[i] = theta[i] - h;
    const double down = f.value(probe);
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

Vector finite_difference_grad_relative(const Landscape& f, const Vector& theta, double rel_h) {
  if (!(rel_h > 0.0)) throw InvalidArgument("finite_difference_grad_relative: step must be > 0");
  Vector g(theta.size());
  Vector probe = theta;
  for (Index i = 0; i < theta.size(); ++i) {
    const double h = rel_h * (1.0 + std::abs(theta[i]));
    probe[i] = theta[i] + h;
    const double up = f.value(probe);
    probe[i] = theta[i] - h;
    const double down = f.value(probe);
    probe[i] = theta[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace rbo
