#include "salttrack/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "salttrack/error.hpp"

namespace salttrack {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) fail(ErrorKind::usage, "tensor mode must be 1, 2 or 3");
}

// Flip each column so its largest-magnitude entry is positive.
void fix_signs(Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index arg = 0;
    m.col(c).cwiseAbs().maxCoeff(&arg);
    if (m(arg, c) < 0.0) m.col(c) = -m.col(c);
  }
}

}  // namespace

Tensor3::Tensor3(int i1, int i2, int i3, double fill) : dims_{i1, i2, i3} {
  if (i1 < 1 || i2 < 1 || i3 < 0) fail(ErrorKind::usage, "tensor dimensions must be positive");
  data_.assign(dims_.volume(), fill);
}

Tensor3 Tensor3::from_slice(const Matrix& patch) {
  Tensor3 t(static_cast<int>(patch.rows()), static_cast<int>(patch.cols()), 1);
  Eigen::Map<Matrix>(t.data_.data(), patch.rows(), patch.cols()) = patch;
  return t;
}

Matrix Tensor3::slice(int i3) const {
  const std::size_t n = static_cast<std::size_t>(dims_.i1) * dims_.i2;
  return Eigen::Map<const Matrix>(data_.data() + n * i3, dims_.i1, dims_.i2);
}

void Tensor3::append_slice(const Matrix& patch) {
  if (patch.rows() != dims_.i1 || patch.cols() != dims_.i2) {
    fail(ErrorKind::usage, "appended slice does not match tensor dims");
  }
  const std::size_t n = static_cast<std::size_t>(dims_.i1) * dims_.i2;
  const std::size_t old = data_.size();
  data_.resize(old + n);
  Eigen::Map<Matrix>(data_.data() + old, dims_.i1, dims_.i2) = patch;
  ++dims_.i3;
}

double Tensor3::squared_norm() const {
  return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size()))
      .squaredNorm();
}

Matrix unfold(const Tensor3& t, int mode) {
  check_mode(mode);
  const auto [i1, i2, i3] = t.dims();
  const double* d = t.data().data();
  switch (mode) {
    case 1:
      return Eigen::Map<const Matrix>(d, i1, static_cast<Eigen::Index>(i2) * i3);
    case 3:
      return Eigen::Map<const Matrix>(d, static_cast<Eigen::Index>(i1) * i2, i3).transpose();
    default: {
      Matrix m(i2, static_cast<Eigen::Index>(i1) * i3);
      for (int c = 0; c < i3; ++c) {
        for (int b = 0; b < i2; ++b) {
          for (int a = 0; a < i1; ++a) m(b, a + static_cast<Eigen::Index>(i1) * c) = t(a, b, c);
        }
      }
      return m;
    }
  }
}

Tensor3 fold(const Matrix& m, int mode, TensorDims dims) {
  check_mode(mode);
  const Eigen::Index rows = dims[mode];
  const Eigen::Index cols = static_cast<Eigen::Index>(dims.volume()) / std::max(rows, Eigen::Index{1});
  if (m.rows() != rows || m.cols() != cols) {
    fail(ErrorKind::usage, "fold: matrix shape does not match tensor dims");
  }
  Tensor3 t(dims);
  double* d = t.data().data();
  switch (mode) {
    case 1:
      Eigen::Map<Matrix>(d, dims.i1, static_cast<Eigen::Index>(dims.i2) * dims.i3) = m;
      break;
    case 3:
      Eigen::Map<Matrix>(d, static_cast<Eigen::Index>(dims.i1) * dims.i2, dims.i3) = m.transpose();
      break;
    default:
      for (int c = 0; c < dims.i3; ++c) {
        for (int b = 0; b < dims.i2; ++b) {
          for (int a = 0; a < dims.i1; ++a) t(a, b, c) = m(b, a + static_cast<Eigen::Index>(dims.i1) * c);
        }
      }
  }
  return t;
}

Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode) {
  check_mode(mode);
  if (m.cols() != t.dims()[mode]) {
    fail(ErrorKind::usage, "mode_product: matrix columns must equal I_n");
  }
  TensorDims out = t.dims();
  const int j = static_cast<int>(m.rows());
  (mode == 1 ? out.i1 : mode == 2 ? out.i2 : out.i3) = j;
  return fold(m * unfold(t, mode), mode, out);
}

Matrix leading_eigenvectors(const Matrix& symmetric, int count) {
  const Eigen::Index n = symmetric.rows();
  if (n == 0 || count <= 0) return Matrix(n, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  if (es.info() != Eigen::Success) fail(ErrorKind::numerical, "eigendecomposition failed");
  // eigenvalues ascending
  const Vector& values = es.eigenvalues();
  const double largest = values(n - 1);
  if (!(largest > 0.0)) return Matrix(n, 0);
  const double floor = kEigenRelTolerance * largest;
  int keep = 0;
  while (keep < count && keep < n && values(n - 1 - keep) > floor) ++keep;
  Matrix u(n, keep);
  for (int k = 0; k < keep; ++k) u.col(k) = es.eigenvectors().col(n - 1 - k);
  fix_signs(u);
  return u;
}

SubspaceBasis compute_basis(const Tensor3& t, SubspaceDims requested) {
  if (!(t.squared_norm() > 0.0)) fail(ErrorKind::numerical, "all-zero tensor has no subspace");
  SubspaceBasis b;
  const Matrix a1 = unfold(t, 1);
  const Matrix a2 = unfold(t, 2);
  b.u1 = leading_eigenvectors(a1 * a1.transpose(), requested.p1);
  b.u2 = leading_eigenvectors(a2 * a2.transpose(), requested.p2);

  const Matrix a3 = unfold(t, 3);
  Eigen::BDCSVD<Matrix> svd(a3, Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double floor = std::sqrt(kEigenRelTolerance) * s(0);
  int keep = 0;
  while (keep < requested.p3 && keep < s.size() && s(keep) > floor) ++keep;
  b.u3 = svd.matrixV().leftCols(keep);
  fix_signs(b.u3);
  b.mode3_singular_values = s.head(keep);
  return b;
}

double captured_energy(const Tensor3& t, const SubspaceBasis& basis, int mode) {
  check_mode(mode);
  const Matrix a = unfold(t, mode);
  switch (mode) {
    case 1:
      return (basis.u1.transpose() * a).squaredNorm();
    case 2:
      return (basis.u2.transpose() * a).squaredNorm();
    default:
      return (a * basis.u3).squaredNorm();
  }
}

RowSpaceState skl_append(const RowSpaceState& state, const Vector& row, int max_rank) {
  if (row.size() != state.row_length) {
    fail(ErrorKind::usage, "skl_append: row length mismatch");
  }
  RowSpaceState next;
  next.row_length = state.row_length;
  next.rows_seen = state.rows_seen + 1;

  const double row_norm = row.norm();
  const Eigen::Index k = state.basis.cols();
  if (k == 0) {
    if (row_norm > 0.0 && max_rank > 0) {
      next.basis = row / row_norm;
      next.singular_values = Vector::Constant(1, row_norm);
    } else {
      next.basis = Matrix(state.row_length, 0);
      next.singular_values = Vector(0);
    }
    return next;
  }

  // project, then re-orthogonalize once against the current basis
  Vector coeff = state.basis.transpose() * row;
  Vector residual = row - state.basis * coeff;
  const Vector again = state.basis.transpose() * residual;
  coeff += again;
  residual -= state.basis * again;
  const double rho = residual.norm();
  const double scale = std::max(row_norm, state.singular_values(0));
  const bool grows = rho > 1e-12 * scale;

  const Eigen::Index m = grows ? k + 1 : k;
  Matrix core = Matrix::Zero(m, k + 1);
  for (Eigen::Index i = 0; i < k; ++i) core(i, i) = state.singular_values(i);
  core.block(0, k, k, 1) = coeff;
  if (grows) core(k, k) = rho;

  Eigen::JacobiSVD<Matrix> svd(core, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  const double floor = std::sqrt(kEigenRelTolerance) * s(0);
  int keep = 0;
  while (keep < max_rank && keep < s.size() && s(keep) > floor) ++keep;

  Matrix extended(state.row_length, m);
  extended.leftCols(k) = state.basis;
  if (grows) extended.col(k) = residual / rho;
  next.basis = extended * svd.matrixU().leftCols(keep);
  next.singular_values = s.head(keep);
  return next;
}

ModalResiduals modal_residuals(const Matrix& patch, const SubspaceBasis& basis) {
  ModalResiduals r;
  if (basis.u1.rows() != patch.rows() || basis.u2.rows() != patch.cols() ||
      basis.u3.rows() != patch.size()) {
    fail(ErrorKind::usage, "patch dims do not match basis dims");
  }
  r.mode1 = (patch - basis.u1 * (basis.u1.transpose() * patch)).squaredNorm();
  r.mode2 = (patch - (patch * basis.u2) * basis.u2.transpose()).squaredNorm();
  const Eigen::Map<const Vector> x(patch.data(), patch.size());
  r.mode3 = (x - basis.u3 * (basis.u3.transpose() * x)).squaredNorm();
  return r;
}

double reconstruction_error(const Tensor3& patch_s, const Tensor3& patch_c,
                            const SubspaceBasis& basis_s, const SubspaceBasis& basis_c,
                            double lambda_s, double lambda_c) {
  if (patch_s.dims().i3 != 1 || patch_c.dims().i3 != 1) {
    fail(ErrorKind::usage, "reconstruction_error expects I1 x I2 x 1 patches");
  }
  if (!(patch_s.dims() == patch_c.dims())) {
    fail(ErrorKind::usage, "amplitude and contrast patches differ in size");
  }
  const double es = modal_residuals(patch_s.slice(0), basis_s).total();
  const double ec = modal_residuals(patch_c.slice(0), basis_c).total();
  return lambda_s * es + lambda_c * ec;
}

// --- TextureStack -----------------------------------------------------------

TextureStack::TextureStack(const Matrix& first_patch, SubspaceDims dims, bool spatial_modes)
    : dims_(dims),
      spatial_modes_(spatial_modes),
      tensor_(Tensor3::from_slice(first_patch)) {
  const auto i1 = first_patch.rows();
  const auto i2 = first_patch.cols();
  cov1_ = first_patch * first_patch.transpose();
  cov2_ = first_patch.transpose() * first_patch;
  RowSpaceState empty;
  empty.row_length = static_cast<int>(i1 * i2);
  empty.basis = Matrix(i1 * i2, 0);
  rows_ = skl_append(empty, Eigen::Map<const Vector>(first_patch.data(), first_patch.size()),
                     dims_.p3);
  if (spatial_modes_) {
    basis_.u1 = leading_eigenvectors(cov1_, dims_.p1);
    basis_.u2 = leading_eigenvectors(cov2_, dims_.p2);
  } else {
    basis_.u1 = Matrix(i1, 0);
    basis_.u2 = Matrix(i2, 0);
  }
  basis_.u3 = rows_.basis;
  basis_.mode3_singular_values = rows_.singular_values;
}

TextureStack::Trial TextureStack::trial(const Matrix& patch) const {
  if (patch.rows() != tensor_.dims().i1 || patch.cols() != tensor_.dims().i2) {
    fail(ErrorKind::usage, "patch does not match texture stack dims");
  }
  Trial t;
  if (spatial_modes_) {
    t.cov1 = cov1_;
    t.cov1.noalias() += patch * patch.transpose();
    t.cov2 = cov2_;
    t.cov2.noalias() += patch.transpose() * patch;
    t.basis.u1 = leading_eigenvectors(t.cov1, dims_.p1);
    t.basis.u2 = leading_eigenvectors(t.cov2, dims_.p2);
  } else {
    t.basis.u1 = Matrix(patch.rows(), 0);
    t.basis.u2 = Matrix(patch.cols(), 0);
  }
  t.rows = skl_append(rows_, Eigen::Map<const Vector>(patch.data(), patch.size()), dims_.p3);
  t.basis.u3 = t.rows.basis;
  t.basis.mode3_singular_values = t.rows.singular_values;
  return t;
}

void TextureStack::commit(const Matrix& patch, Trial trial) {
  tensor_.append_slice(patch);
  if (spatial_modes_) {
    cov1_ = std::move(trial.cov1);
    cov2_ = std::move(trial.cov2);
  }
  rows_ = std::move(trial.rows);
  basis_ = std::move(trial.basis);
}

}  // namespace salttrack
