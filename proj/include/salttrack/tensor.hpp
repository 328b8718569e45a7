#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace salttrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TensorDims {
  int i1 = 0;
  int i2 = 0;
  int i3 = 0;

  std::size_t volume() const noexcept {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(i2) *
           static_cast<std::size_t>(i3);
  }
  int operator[](int mode) const { return mode == 1 ? i1 : mode == 2 ? i2 : i3; }
  friend bool operator==(const TensorDims&, const TensorDims&) = default;
};

/// Dense third-order tensor. Element (i1, i2, i3) lives at linear offset
/// i1 + I1 * (i2 + I2 * i3), so each frontal slice (fixed i3) is a
/// column-major I1 x I2 matrix and slices are contiguous.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int i1, int i2, int i3, double fill = 0.0);
  explicit Tensor3(TensorDims dims, double fill = 0.0)
      : Tensor3(dims.i1, dims.i2, dims.i3, fill) {}

  /// A single I1 x I2 x 1 tensor holding `patch`.
  static Tensor3 from_slice(const Matrix& patch);

  const TensorDims& dims() const noexcept { return dims_; }

  double& operator()(int i1, int i2, int i3) { return data_[index(i1, i2, i3)]; }
  double operator()(int i1, int i2, int i3) const { return data_[index(i1, i2, i3)]; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  /// Frontal slice i3 as an I1 x I2 matrix.
  Matrix slice(int i3) const;
  /// Stacks `patch` along mode 3 (I3 grows by one).
  void append_slice(const Matrix& patch);

  double squared_norm() const;

 private:
  std::size_t index(int i1, int i2, int i3) const noexcept {
    return static_cast<std::size_t>(i1) +
           static_cast<std::size_t>(dims_.i1) *
               (static_cast<std::size_t>(i2) +
                static_cast<std::size_t>(dims_.i2) * static_cast<std::size_t>(i3));
  }

  TensorDims dims_;
  std::vector<double> data_;
};

/// n-mode unfolding A(n): I_n rows. Column index of element (i1,i2,i3):
///   mode 1: i2 + I2*i3,   mode 2: i1 + I1*i3,   mode 3: i1 + I1*i2.
Matrix unfold(const Tensor3& t, int mode);
Tensor3 fold(const Matrix& m, int mode, TensorDims dims);

/// t x_n M with M of shape J x I_n; mode n of the result has size J.
Tensor3 mode_product(const Tensor3& t, const Matrix& m, int mode);

struct SubspaceDims {
  int p1 = 15;
  int p2 = 15;
  int p3 = 5;

  friend bool operator==(const SubspaceDims&, const SubspaceDims&) = default;
};

/// Orthonormal projection bases of one texture tensor. u3 spans the row space
/// of the mode-3 unfolding, so it is (I1*I2) x P3.
struct SubspaceBasis {
  Matrix u1;
  Matrix u2;
  Matrix u3;
  Vector mode3_singular_values;

  SubspaceDims effective_dims() const {
    return {static_cast<int>(u1.cols()), static_cast<int>(u2.cols()),
            static_cast<int>(u3.cols())};
  }
};

/// Relative eigenvalue floor below which a direction counts as rank-deficient.
inline constexpr double kEigenRelTolerance = 1e-12;

/// Eigenvectors of a symmetric PSD matrix for its largest `count` eigenvalues,
/// in descending order, capped at the numerical rank. Signs are fixed so the
/// largest-magnitude entry of each column is positive.
Matrix leading_eigenvectors(const Matrix& symmetric, int count);

/// Single-pass multilinear bases: modes 1 and 2 from the eigenvectors of
/// A(n) A(n)^T, mode 3 from the right singular vectors of A(3). Throws
/// Error(numerical) for an all-zero tensor.
SubspaceBasis compute_basis(const Tensor3& t, SubspaceDims requested);

/// Frobenius energy of A(n) captured by the mode-n basis.
double captured_energy(const Tensor3& t, const SubspaceBasis& basis, int mode);

/// Truncated right-singular state of a matrix whose rows arrive one at a time.
struct RowSpaceState {
  int row_length = 0;
  int rows_seen = 0;
  Matrix basis;             // row_length x k, orthonormal columns
  Vector singular_values;   // k, descending
};

/// Sequential Karhunen-Loeve step (no forgetting): folds `row` into `state`
/// and keeps at most `max_rank` leading components.
RowSpaceState skl_append(const RowSpaceState& state, const Vector& row, int max_rank);

/// Squared residuals ||X - X x_n (U U^T)||_F^2 of one I1 x I2 patch for each
/// mode. A mode with an empty basis leaves the whole patch as residual.
struct ModalResiduals {
  double mode1 = 0.0;
  double mode2 = 0.0;
  double mode3 = 0.0;

  double total() const { return mode1 + mode2 + mode3; }
};

ModalResiduals modal_residuals(const Matrix& patch, const SubspaceBasis& basis);

/// Weighted error over both modalities and all three modes. Patches must be
/// I1 x I2 x 1 tensors matching the bases.
double reconstruction_error(const Tensor3& patch_s, const Tensor3& patch_c,
                            const SubspaceBasis& basis_s, const SubspaceBasis& basis_c,
                            double lambda_s, double lambda_c);

/// Incrementally maintained texture tensor for one modality: exact running
/// mode-1/mode-2 covariances plus an SKL mode-3 row-space state.
class TextureStack {
 public:
  struct Trial {
    Matrix cov1;
    Matrix cov2;
    RowSpaceState rows;
    SubspaceBasis basis;
  };

  TextureStack(const Matrix& first_patch, SubspaceDims dims, bool spatial_modes = true);

  int member_count() const noexcept { return tensor_.dims().i3; }
  const Tensor3& tensor() const noexcept { return tensor_; }
  const SubspaceBasis& basis() const noexcept { return basis_; }
  SubspaceDims requested_dims() const noexcept { return dims_; }

  /// Bases of the tensor extended by `patch`, without modifying this stack.
  Trial trial(const Matrix& patch) const;
  /// Appends `patch` adopting a trial previously computed for it.
  void commit(const Matrix& patch, Trial trial);
  void append(const Matrix& patch) { commit(patch, trial(patch)); }

 private:
  SubspaceDims dims_;
  bool spatial_modes_;
  Tensor3 tensor_;
  Matrix cov1_;
  Matrix cov2_;
  RowSpaceState rows_;
  SubspaceBasis basis_;
};

}  // namespace salttrack
