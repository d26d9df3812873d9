#pragma once

#include "wqr/geometry.hpp"

#include <string_view>

namespace wqr {

enum class StretchKind { Phi, Psi };

std::string_view to_string(StretchKind k);
StretchKind stretch_kind_from_string(std::string_view s);

/// Radial power law exponent: alpha = 1 + 1/K for Phi, 1 + K for Psi.
struct StretchVariant {
  StretchKind kind = StretchKind::Phi;
  double K = 1.0;

  StretchVariant() = default;
  StretchVariant(StretchKind kind, double K);

  double alpha() const { return kind == StretchKind::Phi ? 1.0 + 1.0 / K : 1.0 + K; }
};

/// x -> z + t (x - y) (r / |x - y|)^alpha on the ball B(y, r); t is kept as ln t.
struct RadialStretch {
  Ball ball;
  Point target;
  double log_scale = 0.0;
  StretchVariant variant;

  RadialStretch() = default;
  RadialStretch(Ball ball, Point target, double log_scale, StretchVariant variant);

  double scale() const;
  std::size_t dim() const { return ball.dim(); }
};

struct SingularStructure {
  double tangential = 0.0;     // multiplicity n - 1
  double radial_signed = 0.0;  // tangential * (1 - alpha)
  double det = 0.0;
  double operator_norm = 0.0;
  double distortion = 0.0;
};

Point eval(const RadialStretch& map, const Point& x);
Matrix jacobian(const RadialStretch& map, const Point& x);
SingularStructure singular_structure(const RadialStretch& map, const Point& x);
Matrix adjugate(const RadialStretch& map, const Point& x);

/// Closed-form integral of |Df|^p (spectral norm) over B \ aB.
double annulus_energy(const RadialStretch& map, double p, double a);
/// Natural log of annulus_energy; stays finite where the value would overflow.
double log_annulus_energy(const RadialStretch& map, double p, double a);

/// Adjugate of a square matrix via cofactors: adj(A) A = det(A) I.
Matrix adjugate(const Matrix& m);

}  // namespace wqr
