#include "wqr/pairing.hpp"

#include "wqr/errors.hpp"
#include "wqr/random.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace wqr {

Bump::Bump(Point c, double w) : center(std::move(c)), width(w) {
  if (!(width > 0.0)) throw InvalidArgument("bump width must be positive");
}

namespace {

double psi(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

double Bump::value(const Point& x) const {
  require_same_dim(dim(), static_cast<std::size_t>(x.size()), "bump");
  double v = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) v *= psi((x[i] - center[i]) / width);
  return v;
}

Point Bump::gradient(const Point& x) const {
  const double v = value(x);
  Point g = Point::Zero(x.size());
  if (v == 0.0) return g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double s = (x[i] - center[i]) / width;
    const double d = 1.0 - s * s;
    g[i] = v * (-2.0 * s / (d * d)) / width;
  }
  return g;
}

BoxDomain Bump::support() const {
  const Point w = Point::Constant(center.size(), width);
  return {center - w, center + w};
}

SampledMap affine_map(const Matrix& A, const Point& b) {
  return {[A, b](const Point& x) -> Point { return A * x + b; },
          [A](const Point&) -> Matrix { return A; }};
}

SampledMap stretch_map(const RadialStretch& map, double a) {
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("annulus ratio must lie in (0,1)");
  const double r = map.ball.radius;
  const double inner = map.scale() * std::pow(a, -map.variant.alpha());
  // Scalar factor of the affine piece containing x, or 0 on the annulus.
  auto affine_factor = [map, a, r, inner](const Point& x) {
    const double rho = (x - map.ball.center).norm();
    if (rho >= r) return map.scale();
    if (rho <= a * r) return inner;
    return 0.0;
  };
  return {[map, affine_factor](const Point& x) -> Point {
            const double s = affine_factor(x);
            return s > 0.0 ? Point(map.target + s * (x - map.ball.center)) : eval(map, x);
          },
          [map, affine_factor](const Point& x) -> Matrix {
            const double s = affine_factor(x);
            const auto n = static_cast<Eigen::Index>(map.dim());
            return s > 0.0 ? Matrix(s * Matrix::Identity(n, n)) : jacobian(map, x);
          }};
}

SampledMap tree_map(const MapTree& tree) {
  return {[&tree](const Point& x) { return evaluate(tree, x); },
          [&tree](const Point& x) { return evaluate_gradient(tree, x); }};
}

PairingResult distributional_pairing(const SampledMap& f, const Bump& phi, std::size_t samples,
                                     std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("pairing needs at least one sample");
  const BoxDomain box = phi.support();
  const double vol = box.volume();
  const double n = static_cast<double>(phi.dim());
  Rng rng(seed, 0x7061);

  // Welford accumulators for the two integrands and their difference.
  double mean[3] = {0, 0, 0}, m2[3] = {0, 0, 0};
  std::size_t drawn = 0;
  std::size_t redraws = 0;
  while (drawn < samples) {
    const Point x = rng.in_box(box);
    Matrix J;
    Point y;
    try {
      J = f.gradient(x);
      y = f.value(x);
    } catch (const OnInterface&) {
      if (++redraws > samples) throw;
      continue;
    } catch (const SingularPoint&) {
      if (++redraws > samples) throw;
      continue;
    }
    require_same_dim(static_cast<std::size_t>(J.rows()), phi.dim(), "pairing map");
    const double flux = -(adjugate(J) * y).dot(phi.gradient(x)) / n * vol;
    const double ac = J.determinant() * phi.value(x) * vol;
    const double v[3] = {flux, ac, flux - ac};
    ++drawn;
    for (int i = 0; i < 3; ++i) {
      const double d = v[i] - mean[i];
      mean[i] += d / static_cast<double>(drawn);
      m2[i] += d * (v[i] - mean[i]);
    }
  }
  auto err = [&](int i) {
    return samples > 1 ? std::sqrt(m2[i] / static_cast<double>(samples - 1) /
                                   static_cast<double>(samples))
                       : 0.0;
  };
  PairingResult r;
  r.pairing = mean[0];
  r.ac_part = mean[1];
  r.gap = mean[2];
  r.pairing_stderr = err(0);
  r.ac_stderr = err(1);
  r.gap_stderr = err(2);
  r.samples = samples;
  r.seed = seed;
  return r;
}

double stretch_interface_flux(const RadialStretch& map, double a, const Bump& phi,
                              int azimuth_nodes) {
  if (map.dim() != 3) throw DimensionMismatch("interface flux quadrature is implemented for n = 3");
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("annulus ratio must lie in (0,1)");
  if (azimuth_nodes < 8) throw InvalidArgument("azimuth rule needs at least 8 nodes");
  const double r = map.ball.radius;
  const double inner_scale = map.scale() * std::pow(a, -map.variant.alpha());
  const Matrix I = Matrix::Identity(3, 3);

  // Integrand over the sphere of radius R in (cos theta, azimuth) coordinates.
  auto sphere_term = [&](double R, bool outer) {
    auto density = [&](double c, double ph) {
      const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
      Point nu(3);
      nu << s * std::cos(ph), s * std::sin(ph), c;
      const Point x = map.ball.center + R * nu;
      const Point y = eval(map, x);
      const Matrix annulus = adjugate(jacobian(map, x));
      // Outer sphere: annulus inside, boundary affine data outside. Inner: affine inside.
      const Matrix jump = outer ? Matrix(annulus - adjugate(Matrix(map.scale() * I)))
                                : Matrix(adjugate(Matrix(inner_scale * I)) - annulus);
      return phi.value(x) * (jump * y).dot(nu) * R * R;
    };
    // Trapezoid in azimuth is spectrally accurate for the periodic integrand.
    auto over_c = [&](double c) {
      const double h = 2.0 * std::numbers::pi / azimuth_nodes;
      double sum = 0.0;
      for (int j = 0; j < azimuth_nodes; ++j) sum += density(c, h * j);
      return sum * h;
    };
    return boost::math::quadrature::gauss<double, 64>::integrate(over_c, -1.0, 1.0);
  };
  return -(sphere_term(r, true) + sphere_term(a * r, false)) / 3.0;
}

}  // namespace wqr
