#pragma once

#include <complex>
#include <cstddef>
#include <utility>

#include "calabi/domain.hpp"
#include "calabi/fft.hpp"

namespace calabi {

/// A Hermitian n×n matrix, n ∈ {1, 2}, stored as (a11, a22, a12); a21 = conj(a12).
/// Entry (i, j) is the coefficient of dz^i ∧ dz̄^j.
struct HermitianMatrix {
  int n = 1;
  double a11 = 0.0;
  double a22 = 0.0;
  std::complex<double> a12{};

  static HermitianMatrix identity(int n) { return {n, 1.0, n == 2 ? 1.0 : 0.0, {}}; }
  static HermitianMatrix scalar(int n, double s) { return {n, s, n == 2 ? s : 0.0, {}}; }

  double trace() const { return n == 2 ? a11 + a22 : a11; }
  double det() const { return n == 2 ? a11 * a22 - std::norm(a12) : a11; }
  HermitianMatrix inverse() const;

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);
};

HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b);
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b);
HermitianMatrix operator*(double s, HermitianMatrix a);

/// tr(A·B), real for Hermitian A, B. With A = g^{-1} this is the contraction
/// g^{ij̄} B_{ij̄}.
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

/// |T|²_g = g^{ik̄} g^{lj̄} T_{ij̄} T_{lk̄} = tr((g^{-1}T)²), given g^{-1}.
double hermitian_norm_sq(const HermitianMatrix& g_inv, const HermitianMatrix& t);

/// Roots of det(A − λG) = 0 for positive definite G, as (min, max).
std::pair<double, double> generalized_eigenvalues(const HermitianMatrix& a, const HermitianMatrix& g);

/// Largest modulus over the entries of A.
double max_abs_entry(const HermitianMatrix& a);

/// A Hermitian matrix per grid point, stored as separate real planes:
/// diag(0), diag(1), Re a12, Im a12 (the last three only for n = 2).
class HermitianField {
 public:
  explicit HermitianField(const TorusDomain& domain);

  const TorusDomain& domain() const noexcept { return domain_; }
  int n() const noexcept { return domain_.complex_dim(); }
  std::size_t size() const noexcept { return domain_.num_points(); }

  HermitianMatrix at(std::size_t p) const {
    if (n() == 1) return {1, diag0_[p], 0.0, {}};
    return {2, diag0_[p], diag1_[p], {off_re_[p], off_im_[p]}};
  }
  void set(std::size_t p, const HermitianMatrix& m) {
    diag0_[p] = m.a11;
    if (n() == 2) {
      diag1_[p] = m.a22;
      off_re_[p] = m.a12.real();
      off_im_[p] = m.a12.imag();
    }
  }

  /// Number of independent real planes: 1 for n = 1, 4 for n = 2.
  int num_planes() const noexcept { return n() == 1 ? 1 : 4; }
  RealBuffer& plane(int i);
  const RealBuffer& plane(int i) const;

  /// sup over points of the largest entry modulus of (this − other).
  double max_abs_difference(const HermitianField& other) const;

 private:
  TorusDomain domain_;
  RealBuffer diag0_;
  RealBuffer diag1_;
  RealBuffer off_re_;
  RealBuffer off_im_;
};

}  // namespace calabi
