#include "calabi/hermitian.hpp"

#include <algorithm>
#include <cmath>

namespace calabi {

HermitianMatrix HermitianMatrix::inverse() const {
  if (n == 1) return {1, 1.0 / a11, 0.0, {}};
  const double d = det();
  return {2, a22 / d, a11 / d, -a12 / d};
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  a11 += o.a11;
  a22 += o.a22;
  a12 += o.a12;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  a11 -= o.a11;
  a22 -= o.a22;
  a12 -= o.a12;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  a11 *= s;
  a22 *= s;
  a12 *= s;
  return *this;
}

HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.n == 1) return a.a11 * b.a11;
  return a.a11 * b.a11 + a.a22 * b.a22 + 2.0 * (a.a12 * std::conj(b.a12)).real();
}

double hermitian_norm_sq(const HermitianMatrix& p, const HermitianMatrix& t) {
  if (p.n == 1) {
    const double m = p.a11 * t.a11;
    return m * m;
  }
  using C = std::complex<double>;
  const C t21 = std::conj(t.a12);
  const C p21 = std::conj(p.a12);
  const C m11 = p.a11 * t.a11 + p.a12 * t21;
  const C m12 = p.a11 * t.a12 + p.a12 * t.a22;
  const C m21 = p21 * t.a11 + p.a22 * t21;
  const C m22 = p21 * t.a12 + p.a22 * t.a22;
  return (m11 * m11 + 2.0 * m12 * m21 + m22 * m22).real();
}

std::pair<double, double> generalized_eigenvalues(const HermitianMatrix& a, const HermitianMatrix& g) {
  if (a.n == 1) {
    const double l = a.a11 / g.a11;
    return {l, l};
  }
  // det(A − λG) = det(G) λ² − (a11 g22 + a22 g11 − 2 Re(a12 conj g12)) λ + det(A)
  const double qa = g.det();
  const double qb = -(a.a11 * g.a22 + a.a22 * g.a11 - 2.0 * (a.a12 * std::conj(g.a12)).real());
  const double qc = a.det();
  const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  double l1, l2;
  if (q == 0.0) {
    l1 = l2 = 0.0;
  } else {
    l1 = q / qa;
    l2 = qc / q;
  }
  return {std::min(l1, l2), std::max(l1, l2)};
}

double max_abs_entry(const HermitianMatrix& a) {
  if (a.n == 1) return std::abs(a.a11);
  return std::max({std::abs(a.a11), std::abs(a.a22), std::abs(a.a12)});
}

HermitianField::HermitianField(const TorusDomain& domain) : domain_(domain), diag0_(domain.num_points()) {
  if (domain.complex_dim() == 2) {
    diag1_.resize(domain.num_points());
    off_re_.resize(domain.num_points());
    off_im_.resize(domain.num_points());
  }
}

RealBuffer& HermitianField::plane(int i) {
  switch (i) {
    case 0: return diag0_;
    case 1: return diag1_;
    case 2: return off_re_;
    default: return off_im_;
  }
}

const RealBuffer& HermitianField::plane(int i) const { return const_cast<HermitianField*>(this)->plane(i); }

double HermitianField::max_abs_difference(const HermitianField& other) const {
  require_same_domain(domain_, other.domain_, "max_abs_difference");
  double worst = 0.0;
  for (std::size_t p = 0; p < size(); ++p) worst = std::max(worst, max_abs_entry(at(p) - other.at(p)));
  return worst;
}

}  // namespace calabi
