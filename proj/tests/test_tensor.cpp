#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "salttrack/tensor.hpp"
#include "support.hpp"

using namespace salttrack;

namespace {

Tensor3 random_tensor(std::mt19937_64& rng, int i1, int i2, int i3) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor3 t(i1, i2, i3);
  for (double& v : t.data()) v = n(rng);
  return t;
}

// Index-loop oracles, written against the element definition only.
Matrix unfold_oracle(const Tensor3& t, int mode) {
  const auto d = t.dims();
  Matrix m(d[mode], static_cast<Eigen::Index>(d.volume() / d[mode]));
  for (int a = 0; a < d.i1; ++a) {
    for (int b = 0; b < d.i2; ++b) {
      for (int c = 0; c < d.i3; ++c) {
        if (mode == 1) m(a, b + d.i2 * c) = t(a, b, c);
        if (mode == 2) m(b, a + d.i1 * c) = t(a, b, c);
        if (mode == 3) m(c, a + d.i1 * b) = t(a, b, c);
      }
    }
  }
  return m;
}

Tensor3 mode_product_oracle(const Tensor3& t, const Matrix& u, int mode) {
  auto d = t.dims();
  TensorDims out = d;
  if (mode == 1) out.i1 = static_cast<int>(u.rows());
  if (mode == 2) out.i2 = static_cast<int>(u.rows());
  if (mode == 3) out.i3 = static_cast<int>(u.rows());
  Tensor3 r(out);
  for (int a = 0; a < out.i1; ++a) {
    for (int b = 0; b < out.i2; ++b) {
      for (int c = 0; c < out.i3; ++c) {
        double s = 0.0;
        for (int k = 0; k < d[mode]; ++k) {
          if (mode == 1) s += u(a, k) * t(k, b, c);
          if (mode == 2) s += u(b, k) * t(a, k, c);
          if (mode == 3) s += u(c, k) * t(a, b, k);
        }
        r(a, b, c) = s;
      }
    }
  }
  return r;
}

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  REQUIRE(a.dims() == b.dims());
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

// sin of the largest principal angle between two column spaces
double subspace_gap(const Matrix& a, const Matrix& b) {
  const Matrix r = b - a * (a.transpose() * b);
  if (r.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(r).singularValues()(0);
}

Tensor3 project_all_modes(const Tensor3& t, const SubspaceBasis& b) {
  Tensor3 r = mode_product(t, b.u1 * b.u1.transpose(), 1);
  r = mode_product(r, b.u2 * b.u2.transpose(), 2);
  const Matrix a3 = unfold(r, 3) * b.u3 * b.u3.transpose();
  return fold(a3, 3, r.dims());
}

}  // namespace

TEST_CASE("element layout: slices are contiguous column-major matrices") {
  Tensor3 t(2, 3, 2);
  for (std::size_t i = 0; i < t.data().size(); ++i) t.data()[i] = static_cast<double>(i);
  CHECK(t(1, 0, 0) == 1.0);
  CHECK(t(0, 1, 0) == 2.0);
  CHECK(t(0, 0, 1) == 6.0);
  const Matrix s = t.slice(1);
  CHECK(s(1, 2) == t(1, 2, 1));
}

TEST_CASE("unfold, fold and mode_product agree with index-loop oracles") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor3 t = random_tensor(rng, dim(rng), std::min(dim(rng), 5), std::min(dim(rng), 4));
    for (int mode = 1; mode <= 3; ++mode) {
      const Matrix u = unfold(t, mode);
      CHECK((u - unfold_oracle(t, mode)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(max_abs_diff(fold(u, mode, t.dims()), t) == 0.0);

      std::normal_distribution<double> n(0.0, 1.0);
      Matrix m(dim(rng), t.dims()[mode]);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
      CHECK(max_abs_diff(mode_product(t, m, mode), mode_product_oracle(t, m, mode)) <= 1e-12);
    }
  }
}

TEST_CASE("mode product by identity is a no-op and products on distinct modes commute") {
  std::mt19937_64 rng(11);
  const Tensor3 t = random_tensor(rng, 4, 3, 5);
  CHECK(max_abs_diff(mode_product(t, Matrix::Identity(3, 3), 2), t) <= 1e-15);
  const Matrix a = Matrix::Random(2, 4);
  const Matrix b = Matrix::Random(6, 5);
  CHECK(max_abs_diff(mode_product(mode_product(t, a, 1), b, 3),
                     mode_product(mode_product(t, b, 3), a, 1)) <= 1e-12);
}

TEST_CASE("append_slice grows mode 3 and squared_norm matches the Frobenius norm") {
  Tensor3 t = Tensor3::from_slice(Matrix::Constant(2, 3, 1.0));
  t.append_slice(Matrix::Constant(2, 3, 2.0));
  CHECK(t.dims() == TensorDims{2, 3, 2});
  CHECK(t(1, 2, 1) == 2.0);
  CHECK(t.squared_norm() == doctest::Approx(6.0 + 24.0));
}

TEST_CASE("leading_eigenvectors: order, sign convention and rank cap") {
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 1.0;
  s(2, 2) = 4.0;
  const Matrix u = leading_eigenvectors(s, 3);
  REQUIRE(u.cols() == 2);
  CHECK(u(2, 0) == doctest::Approx(1.0));
  CHECK(u(0, 1) == doctest::Approx(1.0));
  Matrix m(2, 2);
  m << 1.0, -0.9, -0.9, 1.0;  // leading direction (1,-1)/sqrt(2) up to sign
  const Matrix v = leading_eigenvectors(m, 1);
  CHECK(v.cwiseAbs().maxCoeff() == doctest::Approx(v.maxCoeff()));
}

TEST_CASE("full-dimension bases reconstruct any tensor") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor3 t = random_tensor(rng, 5, 4, 6);
    const SubspaceBasis b = compute_basis(t, {5, 4, 20});
    const Tensor3 r = project_all_modes(t, b);
    double err = 0.0;
    for (std::size_t i = 0; i < t.data().size(); ++i) {
      err += std::pow(t.data()[i] - r.data()[i], 2);
    }
    CHECK(std::sqrt(err / t.squared_norm()) <= 1e-9);
  }
}

TEST_CASE("captured energy matches dense SVD and grows with the subspace size") {
  std::mt19937_64 rng(5);
  const Tensor3 t = random_tensor(rng, 6, 5, 4);
  for (int mode = 1; mode <= 3; ++mode) {
    const Vector sv = Eigen::JacobiSVD<Matrix>(unfold(t, mode)).singularValues();
    double prev = -1.0;
    const int max_p = static_cast<int>(sv.size());
    for (int p = 1; p <= max_p; ++p) {
      SubspaceDims d{6, 5, 4};
      if (mode == 1) d.p1 = p;
      if (mode == 2) d.p2 = p;
      if (mode == 3) d.p3 = p;
      const double e = captured_energy(t, compute_basis(t, d), mode);
      const double want = sv.head(p).squaredNorm();
      CHECK(std::abs(e - want) <= 1e-9 * std::max(1.0, want));
      CHECK(e >= prev);
      prev = e;
    }
  }
}

TEST_CASE("rank-1 tensor is captured completely by P = (1,1,1)") {
  Vector a(3), b(4), c(2);
  a << 1, 2, 3;
  b << -1, 0.5, 2, 1;
  c << 2, -1;
  Tensor3 t(3, 4, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 2; ++k) t(i, j, k) = a(i) * b(j) * c(k);
  const SubspaceBasis basis = compute_basis(t, {1, 1, 1});
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK(captured_energy(t, basis, mode) == doctest::Approx(t.squared_norm()).epsilon(1e-12));
  }
}

TEST_CASE("compute_basis rejects an all-zero tensor") {
  CHECK(testing::error_kind_of([] { compute_basis(Tensor3(3, 3, 2), {2, 2, 1}); }) ==
        ErrorKind::numerical);
}

TEST_CASE("SKL streaming of a rank-3 generator matches batch SVD") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  const int len = 40;
  Matrix gen(3, len);
  for (Eigen::Index i = 0; i < gen.size(); ++i) gen.data()[i] = n(rng);
  Matrix rows(50, len);
  RowSpaceState st{len, 0, Matrix(len, 0), Vector(0)};
  for (int r = 0; r < 50; ++r) {
    Vector coef(3);
    coef << n(rng), n(rng), n(rng);
    rows.row(r) = (gen.transpose() * coef).transpose();
    st = skl_append(st, rows.row(r).transpose(), 3);
  }
  Eigen::JacobiSVD<Matrix> svd(rows, Eigen::ComputeThinV);
  const Matrix batch = svd.matrixV().leftCols(3);
  REQUIRE(st.basis.cols() == 3);
  CHECK(st.rows_seen == 50);
  CHECK(subspace_gap(batch, st.basis) <= 1e-6);
  CHECK((st.singular_values - svd.singularValues().head(3)).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((st.basis.transpose() * st.basis - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);

  Vector coef(3);
  coef << 0.3, -1.2, 0.7;
  const RowSpaceState next = skl_append(st, gen.transpose() * coef, 3);
  const Matrix p0 = st.basis * st.basis.transpose();
  const Matrix p1 = next.basis * next.basis.transpose();
  CHECK((p0 - p1).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("SKL keeps at most max_rank components") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  RowSpaceState st{10, 0, Matrix(10, 0), Vector(0)};
  for (int r = 0; r < 8; ++r) {
    Vector row(10);
    for (int i = 0; i < 10; ++i) row(i) = n(rng);
    st = skl_append(st, row, 4);
    CHECK(st.basis.cols() <= 4);
  }
  CHECK(st.basis.cols() == 4);
  CHECK(st.rows_seen == 8);
}

TEST_CASE("modal residuals vanish inside the subspace and equal the norm for empty bases") {
  std::mt19937_64 rng(19);
  Tensor3 t = random_tensor(rng, 4, 5, 3);
  const SubspaceBasis full = compute_basis(t, {4, 5, 3});
  const Matrix patch = t.slice(1);
  const ModalResiduals r = modal_residuals(patch, full);
  CHECK(r.mode1 <= 1e-20 + 1e-12 * patch.squaredNorm());
  CHECK(r.mode2 <= 1e-20 + 1e-12 * patch.squaredNorm());
  CHECK(r.mode3 <= 1e-20 + 1e-12 * patch.squaredNorm());

  SubspaceBasis empty;
  empty.u1 = Matrix(4, 0);
  empty.u2 = Matrix(5, 0);
  empty.u3 = Matrix(20, 0);
  const ModalResiduals e = modal_residuals(patch, empty);
  CHECK(e.mode1 == doctest::Approx(patch.squaredNorm()));
  CHECK(e.mode3 == doctest::Approx(patch.squaredNorm()));
}

TEST_CASE("reconstruction error is non-negative and ignores the contrast patch at weight 0") {
  std::mt19937_64 rng(23);
  const Tensor3 s = random_tensor(rng, 4, 4, 3);
  const Tensor3 c = random_tensor(rng, 4, 4, 3);
  const SubspaceBasis bs = compute_basis(s, {2, 2, 2});
  const SubspaceBasis bc = compute_basis(c, {2, 2, 2});
  const Tensor3 ps = Tensor3::from_slice(random_tensor(rng, 4, 4, 1).slice(0));
  const Tensor3 pc1 = Tensor3::from_slice(random_tensor(rng, 4, 4, 1).slice(0));
  const Tensor3 pc2 = Tensor3::from_slice(random_tensor(rng, 4, 4, 1).slice(0));
  const double e1 = reconstruction_error(ps, pc1, bs, bc, 1.0, 0.0);
  const double e2 = reconstruction_error(ps, pc2, bs, bc, 1.0, 0.0);
  CHECK(e1 >= 0.0);
  CHECK(e1 == e2);
  CHECK(reconstruction_error(ps, pc1, bs, bc, 1.0, 2.0) >= e1);
}

TEST_CASE("TextureStack: trial leaves the stack untouched and modes 1/2 match batch bases") {
  std::mt19937_64 rng(29);
  Tensor3 all = random_tensor(rng, 7, 6, 5);
  TextureStack stack(all.slice(0), {3, 3, 2});
  for (int k = 1; k < 4; ++k) stack.append(all.slice(k));
  const Matrix before = stack.basis().u1;
  const auto trial = stack.trial(all.slice(4));
  CHECK(stack.member_count() == 4);
  CHECK((stack.basis().u1 - before).cwiseAbs().maxCoeff() == 0.0);

  stack.commit(all.slice(4), trial);
  CHECK(stack.member_count() == 5);
  const SubspaceBasis batch = compute_basis(all, {3, 3, 2});
  CHECK(subspace_gap(batch.u1, stack.basis().u1) <= 1e-9);
  CHECK(subspace_gap(batch.u2, stack.basis().u2) <= 1e-9);
}

TEST_CASE("TextureStack without spatial modes keeps only the row-space basis") {
  TextureStack stack(Matrix::Random(5, 5), {3, 3, 2}, false);
  stack.append(Matrix::Random(5, 5));
  CHECK(stack.basis().u1.cols() == 0);
  CHECK(stack.basis().u2.cols() == 0);
  CHECK(stack.basis().u3.cols() == 2);
}
