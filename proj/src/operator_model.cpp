#include "ncconv/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ncconv {

namespace {

constexpr double kClusterTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr double kRenormDefectTol = 1e-12;

bool is_hermitian(const Matrix& a, double tol = 1e-12) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

struct EigenSystem {
  std::vector<Complex> values;
  Matrix vectors;  // orthonormal columns
};

// Orthonormal eigensystem of a normal matrix: self-adjoint solver for
// Hermitian input, complex Schur otherwise (T is diagonal for normal A).
EigenSystem normal_eigensystem(const Matrix& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  if (comm.cwiseAbs().maxCoeff() > 1e-10 * scale * std::max(1.0, scale))
    throw NonNormalError("matrix is not normal within 1e-10");
  EigenSystem sys;
  if (is_hermitian(a)) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
    if (solver.info() != Eigen::Success)
      throw NonNormalError("eigendecomposition failed");
    sys.vectors = solver.eigenvectors();
    sys.values.reserve(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      sys.values.emplace_back(solver.eigenvalues()[i], 0.0);
    return sys;
  }
  Eigen::ComplexSchur<Matrix> schur(a, true);
  if (schur.info() != Eigen::Success)
    throw NonNormalError("Schur decomposition failed");
  const Matrix& t = schur.matrixT();
  double offdiag = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = i + 1; j < t.cols(); ++j)
      offdiag = std::max(offdiag, std::abs(t(i, j)));
  if (offdiag > 1e-8 * scale)
    throw NonNormalError("Schur form has off-diagonal mass " + std::to_string(offdiag));
  sys.vectors = schur.matrixU();
  sys.values.reserve(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) sys.values.push_back(t(i, i));
  return sys;
}

Vector sqrt_weights(const AtomicMeasure& mu) {
  Vector v(static_cast<Eigen::Index>(mu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = std::sqrt(mu.atoms()[i].weight);
  return v;
}

// Unitary whose first column is the (real, unit) vector w.
Matrix householder_with_first_column(const Vector& w) {
  const Eigen::Index n = w.size();
  Matrix u = Matrix::Identity(n, n);
  Vector v = Vector::Zero(n);
  v[0] = 1.0;
  v -= w;
  const double norm2 = v.squaredNorm();
  if (norm2 < 1e-30) return u;
  u -= (2.0 / norm2) * (v * v.adjoint());
  return u;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::MonotoneAdditive: return "monotone_additive";
    case ModelKind::MonotoneShifted: return "monotone_shifted";
    case ModelKind::BooleanAdditive: return "boolean_additive";
    case ModelKind::BooleanShifted: return "boolean_shifted";
  }
  return "?";
}

Matrix monotone_projection(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  const Eigen::Index n = static_cast<Eigen::Index>(mu.size());
  const Eigen::Index m = static_cast<Eigen::Index>(nu.size());
  const Vector s = sqrt_weights(nu);
  const Matrix block = s * s.adjoint();
  Matrix p2 = Matrix::Zero(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i)
    p2.block(i * m, i * m, m, m) = block;
  return p2;
}

OperatorModel build_monotone_pair(const AtomicMeasure& mu,
                                  const AtomicMeasure& nu, bool shifted) {
  if (mu.domain() != nu.domain())
    throw DomainError("model marginals on different domains");
  if (shifted && mu.domain() == Domain::RealLine)
    throw DomainError("shifted monotone models need half-line or circle marginals");
  const Eigen::Index n = static_cast<Eigen::Index>(mu.size());
  const Eigen::Index m = static_cast<Eigen::Index>(nu.size());
  const Eigen::Index dim = n * m;
  const Vector s = sqrt_weights(nu);
  const Matrix block = s * s.adjoint();

  Matrix x = Matrix::Zero(dim, dim);
  Matrix y = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.block(i * m, i * m, m, m) = mu.point(static_cast<std::size_t>(i)) * block;
    for (Eigen::Index j = 0; j < m; ++j)
      y(i * m + j, i * m + j) = nu.point(static_cast<std::size_t>(j));
  }
  if (shifted) {
    // S_x = M_x P2 + (1 - P2)
    Matrix p2 = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) p2.block(i * m, i * m, m, m) = block;
    x += Matrix::Identity(dim, dim) - p2;
  }
  Vector omega(dim);
  const Vector sp = sqrt_weights(mu);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) omega[i * m + j] = sp[i] * s[j];

  return OperatorModel{shifted ? ModelKind::MonotoneShifted
                               : ModelKind::MonotoneAdditive,
                       std::move(x), std::move(y), std::move(omega), mu, nu};
}

OperatorModel build_boolean_pair(const AtomicMeasure& mu,
                                 const AtomicMeasure& nu, bool shifted) {
  if (mu.domain() != nu.domain())
    throw DomainError("model marginals on different domains");
  if (shifted && mu.domain() == Domain::RealLine)
    throw DomainError("shifted boolean models need half-line or circle marginals");
  const Eigen::Index n = static_cast<Eigen::Index>(mu.size());
  const Eigen::Index m = static_cast<Eigen::Index>(nu.size());
  const Eigen::Index dim = 1 + (n - 1) + (m - 1);

  // M_x on L2(mu) expressed in the basis {vacuum, L2(mu)_0}
  const Matrix u = householder_with_first_column(sqrt_weights(mu));
  Matrix dx = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) dx(i, i) = mu.point(static_cast<std::size_t>(i));
  const Matrix bx = u.adjoint() * dx * u;

  const Matrix v = householder_with_first_column(sqrt_weights(nu));
  Matrix dy = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j) dy(j, j) = nu.point(static_cast<std::size_t>(j));
  const Matrix by = v.adjoint() * dy * v;

  // global coordinates: 0 = vacuum, 1..n-1 = L2(mu)_0, n..n+m-2 = L2(nu)_0
  auto gx = [](Eigen::Index a) { return a; };
  auto gy = [n](Eigen::Index b) { return b == 0 ? 0 : n - 1 + b; };

  Matrix x = Matrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) x(gx(a), gx(b)) = bx(a, b);
  Matrix y = Matrix::Zero(dim, dim);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) y(gy(a), gy(b)) = by(a, b);
  if (shifted) {
    for (Eigen::Index k = n; k < dim; ++k) x(k, k) = 1.0;  // Q_x: identity on L2(nu)_0
    for (Eigen::Index k = 1; k < n; ++k) y(k, k) = 1.0;    // Q_y: identity on L2(mu)_0
  }
  Vector omega = Vector::Zero(dim);
  omega[0] = 1.0;

  return OperatorModel{shifted ? ModelKind::BooleanShifted
                               : ModelKind::BooleanAdditive,
                       std::move(x), std::move(y), std::move(omega), mu, nu};
}

AtomicMeasure spectral_distribution(const Matrix& a, const Vector& omega,
                                    Domain domain) {
  if (std::abs(omega.norm() - 1.0) > 1e-12)
    throw PreconditionError("state vector must be a unit vector");
  EigenSystem sys = normal_eigensystem(a);
  const Eigen::Index d = a.rows();

  struct Entry {
    Complex value;
    double weight;
  };
  std::vector<Entry> entries;
  entries.reserve(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex overlap = sys.vectors.col(k).dot(omega);
    entries.push_back({sys.values[static_cast<std::size_t>(k)], std::norm(overlap)});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });

  // cluster eigenvalues within 1e-9 and sum vacuum weights
  std::vector<Entry> clusters;
  for (const auto& e : entries) {
    if (!clusters.empty() && std::abs(e.value - clusters.back().value) <= kClusterTol) {
      Entry& c = clusters.back();
      const double w = c.weight + e.weight;
      if (w > 0) c.value = (c.value * c.weight + e.value * e.weight) / w;
      c.weight = w;
    } else {
      clusters.push_back(e);
    }
  }

  double total = 0.0;
  std::vector<Atom> atoms;
  for (const auto& c : clusters) {
    if (c.weight < kDropTol) continue;
    total += c.weight;
    double pos;
    switch (domain) {
      case Domain::UnitCircle: {
        if (std::abs(std::abs(c.value) - 1.0) > 1e-8)
          throw DomainError("spectral value off the unit circle");
        pos = std::arg(c.value);
        break;
      }
      case Domain::PositiveHalfLine: {
        pos = c.value.real();
        if (pos < -1e-8) throw DomainError("negative spectral value on R+");
        if (pos < 0) pos = 0;
        break;
      }
      default:
        pos = c.value.real();
        break;
    }
    if (domain != Domain::UnitCircle && std::abs(c.value.imag()) > 1e-8)
      throw DomainError("complex spectral value for a real-supported measure");
    atoms.push_back({pos, c.weight});
  }
  if (std::abs(total - 1.0) > kRenormDefectTol)
    throw PreconditionError("vacuum weights sum to " + std::to_string(total));
  return make_atomic_rescaled(domain, std::move(atoms));
}

Matrix matrix_sqrt_psd(const Matrix& a) {
  if (!is_hermitian(a, 1e-10))
    throw PreconditionError("matrix square root needs a Hermitian input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw NotPSDError("eigendecomposition failed");
  Eigen::VectorXd vals = solver.eigenvalues();
  // eigenvalues within machine noise of zero deflate exactly, so that the
  // square root does not amplify eps-level noise to sqrt(eps)
  const double zero_tol = 1e-13 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-8)
      throw NotPSDError("eigenvalue " + std::to_string(vals[i]) + " < -1e-8");
    if (vals[i] < zero_tol) vals[i] = 0;
  }
  const Matrix& v = solver.eigenvectors();
  return v * vals.cwiseSqrt().asDiagonal() * v.adjoint();
}

Complex matrix_resolvent(const Matrix& a, const Vector& omega, Complex z) {
  Matrix shifted = -a;
  shifted.diagonal().array() += z;
  const Vector u = shifted.partialPivLu().solve(omega);
  return omega.dot(u);
}

namespace {

Complex atomic_g(const AtomicMeasure& mu, Complex z) {
  Complex acc(0, 0);
  for (std::size_t i = 0; i < mu.size(); ++i)
    acc += mu.atoms()[i].weight / (z - mu.point(i));
  return acc;
}

Complex atomic_w(const AtomicMeasure& mu, Complex z) {
  Complex acc(0, 0);
  for (const auto& a : mu.atoms())
    acc += a.weight * std::sqrt(a.position) / (z - a.position);
  return acc;
}

}  // namespace

Complex analytic_resolvent(ResolventKind kind, const AtomicMeasure& mu,
                           const AtomicMeasure& nu, Complex z) {
  if (mu.domain() == Domain::UnitCircle || nu.domain() == Domain::UnitCircle)
    throw DomainError("analytic resolvents apply to real-supported marginals");
  if (std::abs(z.imag()) < 1e-12)
    throw PreconditionError("resolvents are evaluated off the real axis");
  const Complex gnu = atomic_g(nu, z);
  const Complex gmu = atomic_g(mu, z);
  switch (kind) {
    case ResolventKind::MonotoneAdd: {
      // (z - M_x P2 - M_y)^{-1} applied to 1: psi/(z-y) + x G_nu /((z-y)(1-x G_nu))
      Complex acc(0, 0);
      for (const auto& ax : mu.atoms()) {
        for (const auto& ay : nu.atoms()) {
          const Complex zy = z - ay.position;
          acc += ax.weight * ay.weight *
                 (1.0 / zy + ax.position * gnu / (zy * (1.0 - ax.position * gnu)));
        }
      }
      return acc;
    }
    case ResolventKind::BooleanAdd: {
      // beta with alpha = 1, psi_1 = psi_2 = 0
      return gmu * gnu / (gmu + gnu - z * gmu * gnu);
    }
    case ResolventKind::MonotoneMult: {
      // <1, (1+g1)/(z-y) + h1> with the displayed g, h at psi = 1
      Complex acc(0, 0);
      for (const auto& ax : mu.atoms()) {
        const double x = ax.position;
        const double sx = std::sqrt(x);
        const Complex d = (1.0 - x) * z * gnu + x;
        const Complex g1 = ((sx - x) + z * (x - 1.0) * gnu) / d;
        const Complex h1 = ((sx - 1.0) * (sx - 1.0) * gnu + (sx - x) * gnu) / d;
        acc += ax.weight * ((1.0 + g1) * gnu + h1);
      }
      return acc;
    }
    case ResolventKind::MonotoneMultAlt: {
      // <1, (psi + sqrt(y) h)/(z-y)> with h(x) = (x-1) W_nu / d(x)
      const Complex wnu = atomic_w(nu, z);
      Complex acc = gnu;
      for (const auto& ax : mu.atoms()) {
        const double x = ax.position;
        const Complex d = (1.0 - x) * z * gnu + x;
        acc += ax.weight * (x - 1.0) * wnu / d * wnu;
      }
      return acc;
    }
    case ResolventKind::BooleanMultNew: {
      const Complex wmu = atomic_w(mu, z);
      const Complex denom =
          z * gmu * gnu - (z * gmu - 1.0) * (z * gnu - 1.0);
      const Complex c1 = gnu * wmu / denom;
      const Complex c2 = (z * gnu - 1.0) * wmu / denom;
      return gmu + wmu * (c2 - c1);
    }
  }
  throw PreconditionError("unknown resolvent kind");
}

namespace {

// Spectral projections onto eigenvalue clusters with |lambda| > tol; these
// are exactly the h(A) with h an indicator vanishing at 0.
std::vector<Matrix> nonzero_spectral_projections(const Matrix& a) {
  EigenSystem sys = normal_eigensystem(a);
  const Eigen::Index d = a.rows();
  std::vector<std::pair<Complex, Matrix>> clusters;
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex lambda = sys.values[static_cast<std::size_t>(k)];
    bool placed = false;
    for (auto& [value, proj] : clusters) {
      if (std::abs(lambda - value) <= kClusterTol) {
        proj += sys.vectors.col(k) * sys.vectors.col(k).adjoint();
        placed = true;
        break;
      }
    }
    if (!placed)
      clusters.emplace_back(lambda,
                            Matrix(sys.vectors.col(k) * sys.vectors.col(k).adjoint()));
  }
  std::vector<Matrix> projections;
  for (auto& [value, proj] : clusters)
    if (std::abs(value) > kClusterTol) projections.push_back(std::move(proj));
  return projections;
}

struct WordChecker {
  const std::vector<Matrix>* letters[2];
  const Vector* omega;
  bool boolean_target;
  double max_defect = 0.0;
  long words = 0;
  std::string worst;
  std::vector<std::pair<int, std::size_t>> path;  // (algebra, letter index)

  // DFS builds words right to left; v_full carries L_j ... L_k omega and
  // v_sub the product over the first algebra's letters only (order kept).
  void search(int depth_left, int algebra, const Vector& v_full,
              const Vector& v_sub, Complex scalar2, Complex scalar_all) {
    if (depth_left == 0) {
      const Complex lhs = omega->dot(v_full);
      const Complex rhs =
          boolean_target ? scalar_all : omega->dot(v_sub) * scalar2;
      const double defect = std::abs(lhs - rhs);
      ++words;
      if (defect > max_defect) {
        max_defect = defect;
        std::ostringstream oss;
        for (auto it = path.rbegin(); it != path.rend(); ++it)
          oss << (it->first == 0 ? "x" : "y") << it->second << ' ';
        worst = oss.str();
      }
      return;
    }
    const auto& ls = *letters[algebra];
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const Vector nf = ls[i] * v_full;
      const Vector ns = algebra == 0 ? Vector(ls[i] * v_sub) : v_sub;
      const Complex e = omega->dot(ls[i] * (*omega));
      path.emplace_back(algebra, i);
      search(depth_left - 1, 1 - algebra, nf, ns,
             algebra == 1 ? scalar2 * e : scalar2, scalar_all * e);
      path.pop_back();
    }
  }
};

IndependenceReport run_word_check(const OperatorModel& model, int max_word_len,
                                  bool boolean_target) {
  if (max_word_len > 8)
    throw PreconditionError("alternating-word length capped at 8");
  const bool shift_x = model.kind == ModelKind::MonotoneShifted ||
                       model.kind == ModelKind::BooleanShifted;
  const bool shift_y = model.kind == ModelKind::BooleanShifted;
  const Eigen::Index d = model.dim();
  const Matrix a = shift_x ? Matrix(model.X - Matrix::Identity(d, d)) : model.X;
  const Matrix b = shift_y ? Matrix(model.Y - Matrix::Identity(d, d)) : model.Y;
  const auto letters_a = nonzero_spectral_projections(a);
  const auto letters_b = nonzero_spectral_projections(b);

  WordChecker checker;
  checker.letters[0] = &letters_a;
  checker.letters[1] = &letters_b;
  checker.omega = &model.omega;
  checker.boolean_target = boolean_target;
  for (int len = 1; len <= max_word_len; ++len)
    for (int start : {0, 1})
      checker.search(len, start, model.omega, model.omega, Complex(1, 0),
                     Complex(1, 0));
  IndependenceReport report;
  report.max_defect = checker.max_defect;
  report.words_checked = checker.words;
  report.worst_word = checker.worst;
  return report;
}

}  // namespace

IndependenceReport verify_independence(const OperatorModel& model,
                                       int max_word_len) {
  const bool boolean = model.kind == ModelKind::BooleanAdditive ||
                       model.kind == ModelKind::BooleanShifted;
  return run_word_check(model, max_word_len, boolean);
}

IndependenceReport boolean_factorization_defect(const OperatorModel& model,
                                                int max_word_len) {
  return run_word_check(model, max_word_len, true);
}

std::pair<Matrix, Matrix> lenczewski_decompose(const Matrix& x, const Matrix& y,
                                               const Vector& omega) {
  if (!is_hermitian(x, 1e-10) || !is_hermitian(y, 1e-10))
    throw PreconditionError("Lenczewski decomposition expects Hermitian inputs");
  const Eigen::Index d = x.rows();
  // Krylov basis of span{poly(X) omega}
  std::vector<Vector> basis;
  Vector v = omega;
  for (Eigen::Index k = 0; k < d; ++k) {
    for (const auto& q : basis) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm < 1e-12) break;
    basis.push_back(v / norm);
    v = x * basis.back();
  }
  Matrix p = Matrix::Zero(d, d);
  for (const auto& q : basis) p += q * q.adjoint();
  Matrix x0 = x * p;
  // X (1 - P_X) + Y, evaluated as (X - X0) + Y so X0 + Z reproduces X + Y
  // to a rounding
  Matrix z = (x - x0) + y;
  return {std::move(x0), std::move(z)};
}

}  // namespace ncconv
