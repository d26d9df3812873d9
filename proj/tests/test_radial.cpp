#include <doctest.h>

#include "wqr/errors.hpp"
#include "wqr/radial.hpp"
#include "wqr/random.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <numbers>

using namespace wqr;

namespace {

Point p3(double x, double y, double z) { return Point{{x, y, z}}; }

RadialStretch make(StretchKind kind, double K, const Point& y, double r, const Point& z,
                   double t) {
  return RadialStretch(Ball(y, r), z, std::log(t), StretchVariant(kind, K));
}

// Second implementation of the map on raw arrays.
std::array<double, 3> plain_eval(double alpha, const double* y, double r, const double* z,
                                 double t, const double* x) {
  const double d[3] = {x[0] - y[0], x[1] - y[1], x[2] - y[2]};
  const double rho = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  const double s = t * std::pow(r / rho, alpha);
  return {z[0] + s * d[0], z[1] + s * d[1], z[2] + s * d[2]};
}

Matrix central_difference(const RadialStretch& m, const Point& x, double h) {
  const auto n = x.size();
  Matrix J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Point xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (eval(m, xp) - eval(m, xm)) / (2.0 * h);
  }
  return J;
}

// Spectral norm of the Jacobian along a ray, from the SVD rather than the closed form.
double ray_norm(const RadialStretch& m, double rho) {
  Point x = m.ball.center;
  x[0] += rho;
  Eigen::JacobiSVD<Matrix> svd(jacobian(m, x));
  return svd.singularValues()[0];
}

double quadrature_energy(const RadialStretch& m, double p, double a) {
  const double r = m.ball.radius;
  const double area = unit_sphere_area(m.dim());
  const double n = static_cast<double>(m.dim());
  auto f = [&](double rho) { return area * std::pow(ray_norm(m, rho), p) * std::pow(rho, n - 1.0); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a * r, r, 20, 1e-14);
}

RadialStretch random_stretch(Rng& rng, std::size_t n = 3) {
  const StretchKind kind = rng.uniform() < 0.5 ? StretchKind::Phi : StretchKind::Psi;
  const double K = rng.uniform(1.0, 10.0);
  Point y = Point::Zero(static_cast<Eigen::Index>(n));
  Point z = Point::Zero(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = rng.uniform(-1, 1);
    z[i] = rng.uniform(-1, 1);
  }
  return make(kind, K, y, rng.uniform(0.1, 2.0), z, std::exp(rng.uniform(-2, 2)));
}

Point annulus_point(Rng& rng, const RadialStretch& m, double a) {
  const double rho = m.ball.radius * rng.uniform(a, 1.0);
  return m.ball.center + rho * rng.on_sphere(m.dim());
}

}  // namespace

TEST_SUITE("radial") {

TEST_CASE("exponents and names") {
  CHECK(StretchVariant(StretchKind::Phi, 2.0).alpha() == 1.5);
  CHECK(StretchVariant(StretchKind::Psi, 2.0).alpha() == 3.0);
  CHECK(StretchVariant(StretchKind::Phi, 1.0).alpha() == 2.0);
  CHECK_THROWS_AS(StretchVariant(StretchKind::Phi, 0.5), InvalidArgument);
  CHECK(stretch_kind_from_string(to_string(StretchKind::Psi)) == StretchKind::Psi);
  CHECK(stretch_kind_from_string("PHI") == StretchKind::Phi);
  CHECK_THROWS_AS(stretch_kind_from_string("CHI"), InvalidArgument);
}

TEST_CASE("evaluation fixtures") {
  const RadialStretch inv = make(StretchKind::Phi, 1.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  CHECK((eval(inv, p3(1, 0, 0)) - p3(1, 0, 0)).norm() < 1e-15);
  CHECK((eval(inv, p3(0.5, 0, 0)) - p3(2, 0, 0)).norm() < 1e-14);

  const RadialStretch m = make(StretchKind::Phi, 2.0, p3(0, 0, 0), 1.0, p3(1, 1, 1), 2.0);
  CHECK((eval(m, p3(0.25, 0, 0)) - p3(5, 1, 1)).norm() < 1e-13);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const RadialStretch s = random_stretch(rng);
    const Point x = annulus_point(rng, s, 0.1);
    const auto ref = plain_eval(s.variant.alpha(), s.ball.center.data(), s.ball.radius,
                                s.target.data(), s.scale(), x.data());
    const Point got = eval(s, x);
    const double scale = (got - s.target).norm();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(got[k] - ref[k]) <= 1e-12 * scale);
  }
  CHECK_THROWS_AS(eval(m, p3(0, 0, 0)), SingularPoint);
  CHECK_THROWS_AS(jacobian(m, p3(0, 0, 0)), SingularPoint);
}

TEST_CASE("boundary sphere matches the affine extension") {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const RadialStretch s = random_stretch(rng);
    const Point x = s.ball.center + s.ball.radius * rng.on_sphere(3);
    const Point affine = s.target + s.scale() * (x - s.ball.center);
    CHECK((eval(s, x) - affine).norm() <= 1e-12 * (affine - s.target).norm());
  }
}

TEST_CASE("jacobian fixtures") {
  const RadialStretch inv = make(StretchKind::Phi, 1.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  const Matrix J = jacobian(inv, p3(1, 0, 0));
  CHECK((J - Eigen::Vector3d(-1, 1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-15);

  const double t = 1.7;
  const RadialStretch psi = make(StretchKind::Psi, 2.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), t);
  Eigen::SelfAdjointEigenSolver<Matrix> es(jacobian(psi, p3(0, 0.6, 0.8)));
  const auto ev = es.eigenvalues();
  CHECK(ev[0] == doctest::Approx(-2.0 * t).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(t).epsilon(1e-13));
  CHECK(ev[2] == doctest::Approx(t).epsilon(1e-13));
}

TEST_CASE("jacobian agrees with central differences") {
  Rng rng(3);
  for (StretchKind kind : {StretchKind::Phi, StretchKind::Psi}) {
    for (int i = 0; i < 100; ++i) {
      RadialStretch s = random_stretch(rng);
      s.variant = StretchVariant(kind, s.variant.K);
      const Point x = annulus_point(rng, s, 0.3);
      const Matrix J = jacobian(s, x);
      const Matrix F = central_difference(s, x, 1e-6 * s.ball.radius);
      CHECK((J - F).norm() <= 1e-5 * J.norm());
      CHECK((J - J.transpose()).norm() <= 1e-14 * J.norm());
    }
  }
}

TEST_CASE("singular structure fixtures") {
  const RadialStretch phi3 = make(StretchKind::Phi, 3.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  const SingularStructure a = singular_structure(phi3, p3(0.7, 0, 0));
  CHECK(a.distortion == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(a.det < 0.0);

  const RadialStretch inv = make(StretchKind::Phi, 1.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  const SingularStructure b = singular_structure(inv, p3(0, 0.6, 0));
  CHECK(b.tangential == doctest::Approx(-b.radial_signed).epsilon(1e-15));
  CHECK(b.distortion == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(b.det == doctest::Approx(-std::pow(b.tangential, 3)).epsilon(1e-14));

  const RadialStretch psi = make(StretchKind::Psi, 2.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  const SingularStructure c = singular_structure(psi, p3(1, 0, 0));
  CHECK(c.tangential == doctest::Approx(1.0));
  CHECK(c.radial_signed == doctest::Approx(-2.0));
  CHECK(c.det == doctest::Approx(-2.0));
  CHECK(c.operator_norm == doctest::Approx(2.0));
  CHECK(c.distortion == doctest::Approx(2.0));
}

TEST_CASE("distortion is K by SVD with a negative determinant, any dimension") {
  Rng rng(4);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int i = 0; i < 200; ++i) {
      const RadialStretch s = random_stretch(rng, n);
      const Matrix J = jacobian(s, annulus_point(rng, s, 0.05));
      Eigen::JacobiSVD<Matrix> svd(J);
      const auto sv = svd.singularValues();
      CHECK(sv[0] / sv[sv.size() - 1] == doctest::Approx(s.variant.K).epsilon(1e-9));
      CHECK(J.determinant() < 0.0);
    }
  }
}

TEST_CASE("adjugate identities") {
  const Matrix d = Eigen::Vector3d(-1, 1, 1).asDiagonal().toDenseMatrix();
  CHECK((adjugate(d) - Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  CHECK((adjugate(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-15);
  CHECK_THROWS_AS(adjugate(Matrix::Zero(2, 3)), DimensionMismatch);

  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const RadialStretch s = random_stretch(rng);
    const Point x = annulus_point(rng, s, 0.2);
    const Matrix J = jacobian(s, x);
    const double det = J.determinant();
    const Matrix residual = adjugate(s, x) * J - det * Matrix::Identity(3, 3);
    CHECK(residual.norm() <= 1e-10 * std::abs(det));
  }
}

TEST_CASE("annulus energy: inversion fixture equals 2 pi") {
  const RadialStretch inv = make(StretchKind::Phi, 1.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  CHECK(annulus_energy(inv, 1.0, 0.5) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
  CHECK(quadrature_energy(inv, 1.0, 0.5) ==
        doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("annulus energy agrees with adaptive quadrature") {
  Rng rng(6);
  for (int i = 0; i < 40; ++i) {
    const RadialStretch s = random_stretch(rng);
    const double p = rng.uniform(1.0, 3.0);
    const double a = rng.uniform(0.05, 0.9);
    const double exact = quadrature_energy(s, p, a);
    CHECK(annulus_energy(s, p, a) == doctest::Approx(exact).epsilon(1e-8));
    CHECK(log_annulus_energy(s, p, a) == doctest::Approx(std::log(exact)).epsilon(1e-9));
  }
}

TEST_CASE("logarithmic branch at the critical exponent") {
  for (StretchKind kind : {StretchKind::Phi, StretchKind::Psi}) {
    for (double K : {1.0, 2.0, 3.5}) {
      const StretchVariant v(kind, K);
      const double p = 3.0 / v.alpha();
      if (p < 1.0) continue;
      const RadialStretch s = make(kind, K, p3(0.1, 0.2, 0.3), 0.7, p3(0, 0, 0), 1.3);
      const double a = 0.4;
      const double q = quadrature_energy(s, p, a);
      CHECK(annulus_energy(s, p, a) == doctest::Approx(q).epsilon(1e-8));
      if (kind == StretchKind::Phi) {
        const double closed = unit_sphere_area(3) * std::pow(1.3, p) * std::pow(0.7, 3.0) *
                              std::log(1.0 / a);
        CHECK(annulus_energy(s, p, a) == doctest::Approx(closed).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("energy vanishes as the annulus closes and scales like t^p") {
  const RadialStretch s = make(StretchKind::Phi, 2.0, p3(0, 0, 0), 1.0, p3(0, 0, 0), 1.0);
  CHECK(annulus_energy(s, 1.5, 1.0 - 1e-9) < 1e-7);

  RadialStretch big = s;
  big.log_scale += std::log(3.0);
  const Point x = p3(0.3, 0.4, 0.2);
  CHECK(annulus_energy(big, 2.0, 0.5) == doctest::Approx(9.0 * annulus_energy(s, 2.0, 0.5)));
  CHECK((eval(big, x) - big.target).norm() ==
        doctest::Approx(3.0 * (eval(s, x) - s.target).norm()));
  CHECK((jacobian(big, x) - 3.0 * jacobian(s, x)).norm() < 1e-12);
  CHECK(singular_structure(big, x).operator_norm ==
        doctest::Approx(3.0 * singular_structure(s, x).operator_norm));
}

TEST_CASE("log energy stays finite where the value overflows") {
  const RadialStretch s(Ball(p3(0, 0, 0), 1.0), p3(0, 0, 0), 800.0,
                        StretchVariant(StretchKind::Phi, 2.0));
  CHECK(std::isinf(annulus_energy(s, 2.0, 0.5)));
  const double l = log_annulus_energy(s, 2.0, 0.5);
  CHECK(std::isfinite(l));
  RadialStretch small = s;
  small.log_scale = 0.0;
  CHECK(l == doctest::Approx(1600.0 + std::log(annulus_energy(small, 2.0, 0.5))).epsilon(1e-14));
}

}  // TEST_SUITE
