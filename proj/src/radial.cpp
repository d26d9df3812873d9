#include "wqr/radial.hpp"

#include "wqr/errors.hpp"

#include <cmath>
#include <string>

namespace wqr {

std::string_view to_string(StretchKind k) { return k == StretchKind::Phi ? "PHI" : "PSI"; }

StretchKind stretch_kind_from_string(std::string_view s) {
  if (s == "PHI" || s == "phi") return StretchKind::Phi;
  if (s == "PSI" || s == "psi") return StretchKind::Psi;
  throw InvalidArgument("unknown stretch variant '" + std::string(s) + "'");
}

StretchVariant::StretchVariant(StretchKind kind_, double K_) : kind(kind_), K(K_) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw InvalidArgument("distortion K must be >= 1");
}

RadialStretch::RadialStretch(Ball b, Point z, double ls, StretchVariant v)
    : ball(std::move(b)), target(std::move(z)), log_scale(ls), variant(v) {
  require_same_dim(ball.dim(), static_cast<std::size_t>(target.size()), "RadialStretch");
  if (!std::isfinite(log_scale)) throw InvalidArgument("log scale must be finite");
}

double RadialStretch::scale() const { return std::exp(log_scale); }

namespace {

struct Polar {
  Point offset;
  double rho;
  double factor;  // t (r / rho)^alpha
};

Polar polar(const RadialStretch& map, const Point& x) {
  require_same_dim(map.dim(), static_cast<std::size_t>(x.size()), "radial stretch");
  Polar p{x - map.ball.center, 0.0, 0.0};
  p.rho = p.offset.norm();
  if (!(p.rho >= 1e-300 * map.ball.radius) || p.rho == 0.0) {
    throw SingularPoint("radial stretch evaluated at its center");
  }
  const double alpha = map.variant.alpha();
  p.factor = map.scale() * std::pow(map.ball.radius / p.rho, alpha);
  return p;
}

}  // namespace

Point eval(const RadialStretch& map, const Point& x) {
  const Polar p = polar(map, x);
  return map.target + p.factor * p.offset;
}

Matrix jacobian(const RadialStretch& map, const Point& x) {
  const Polar p = polar(map, x);
  const Point u = p.offset / p.rho;
  const auto n = static_cast<Eigen::Index>(map.dim());
  return p.factor * (Matrix::Identity(n, n) - map.variant.alpha() * (u * u.transpose()));
}

SingularStructure singular_structure(const RadialStretch& map, const Point& x) {
  const Polar p = polar(map, x);
  const double n = static_cast<double>(map.dim());
  SingularStructure s;
  s.tangential = p.factor;
  s.radial_signed = p.factor * (1.0 - map.variant.alpha());
  s.det = std::pow(s.tangential, n - 1.0) * s.radial_signed;
  const double radial = std::abs(s.radial_signed);
  s.operator_norm = std::max(s.tangential, radial);
  s.distortion = s.operator_norm / std::min(s.tangential, radial);
  return s;
}

Matrix adjugate(const RadialStretch& map, const Point& x) { return adjugate(jacobian(map, x)); }

double log_annulus_energy(const RadialStretch& map, double p, double a) {
  if (!(p >= 1.0)) throw InvalidArgument("energy exponent must be >= 1");
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("annulus ratio must lie in (0,1)");
  const std::size_t dim = map.dim();
  const double n = static_cast<double>(dim);
  const double alpha = map.variant.alpha();
  // Spectral norm at rho = r: tangential for Phi, radial for Psi.
  const double log_c = map.log_scale + std::log(std::max(1.0, alpha - 1.0));
  const double beta = n - p * alpha;
  const double log_a = std::log(a);
  // (1 - a^beta) / beta, with the beta -> 0 limit ln(1/a).
  const double shell = std::abs(beta) < 1e-12 ? -log_a : -std::expm1(beta * log_a) / beta;
  return std::log(unit_sphere_area(dim)) + p * log_c + n * std::log(map.ball.radius) +
         std::log(shell);
}

double annulus_energy(const RadialStretch& map, double p, double a) {
  return std::exp(log_annulus_energy(map, p, a));
}

Matrix adjugate(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("adjugate needs a square matrix");
  const Eigen::Index n = m.rows();
  if (n == 1) return Matrix::Ones(1, 1);
  Matrix adj(n, n);
  Matrix minor(n - 1, n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = m(r, c);
        }
        ++mr;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * minor.determinant();
    }
  }
  return adj;
}

}  // namespace wqr
