#include "fiberseg/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "fiberseg/error.hpp"

namespace fiberseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One Jacobi rotation zeroing a[p][q], accumulating rotations into v.
void jacobi_rotate(double a[3][3], double v[3][3], int p, int q) {
  if (a[p][q] == 0.0) return;
  const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  const double apq = a[p][q];
  a[p][p] -= t * apq;
  a[q][q] += t * apq;
  a[p][q] = 0.0;
  a[q][p] = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (i == p || i == q) continue;
    const double aip = a[i][p];
    const double aiq = a[i][q];
    a[i][p] = aip - s * (aiq + tau * aip);
    a[p][i] = a[i][p];
    a[i][q] = aiq + s * (aip - tau * aiq);
    a[q][i] = a[i][q];
  }
  for (int i = 0; i < 3; ++i) {
    const double vip = v[i][p];
    const double viq = v[i][q];
    v[i][p] = vip - s * (viq + tau * vip);
    v[i][q] = viq + s * (vip - tau * viq);
  }
}

double off_diagonal_norm(const double a[3][3]) {
  return std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
}

Vec3 canonical_sign(const Vec3& v) {
  double best = v.x;
  if (std::abs(v.y) > std::abs(best)) best = v.y;
  if (std::abs(v.z) > std::abs(best)) best = v.z;
  return best < 0.0 ? -v : v;
}

}  // namespace

bool DiffusionTensor::is_finite() const {
  return std::isfinite(dxx) && std::isfinite(dyy) && std::isfinite(dzz) &&
         std::isfinite(dxy) && std::isfinite(dxz) && std::isfinite(dyz);
}

double DiffusionTensor::frobenius_norm() const {
  return std::sqrt(dxx * dxx + dyy * dyy + dzz * dzz +
                   2.0 * (dxy * dxy + dxz * dxz + dyz * dyz));
}

std::array<double, 3> DiffusionTensor::row(int i) const {
  switch (i) {
    case 0:
      return {dxx, dxy, dxz};
    case 1:
      return {dxy, dyy, dyz};
    default:
      return {dxz, dyz, dzz};
  }
}

DiffusionTensor operator+(const DiffusionTensor& a, const DiffusionTensor& b) {
  return {a.dxx + b.dxx, a.dyy + b.dyy, a.dzz + b.dzz,
          a.dxy + b.dxy, a.dxz + b.dxz, a.dyz + b.dyz};
}

DiffusionTensor operator*(double s, const DiffusionTensor& t) {
  return {s * t.dxx, s * t.dyy, s * t.dzz, s * t.dxy, s * t.dxz, s * t.dyz};
}

EigenSystem eigendecompose(const DiffusionTensor& d) {
  if (!d.is_finite()) {
    throw InvalidTensorError("eigendecompose: non-finite tensor component");
  }
  double a[3][3] = {{d.dxx, d.dxy, d.dxz}, {d.dxy, d.dyy, d.dyz}, {d.dxz, d.dyz, d.dzz}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  const double fro = d.frobenius_norm();
  const double tol = 1e-13 * std::max(fro, 1e-300);
  for (int sweep = 0; sweep < 50 && off_diagonal_norm(a) > tol; ++sweep) {
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }

  struct Pair {
    double lambda;
    Vec3 e;
  };
  Pair pairs[3] = {{a[0][0], {v[0][0], v[1][0], v[2][0]}},
                   {a[1][1], {v[0][1], v[1][1], v[2][1]}},
                   {a[2][2], {v[0][2], v[1][2], v[2][2]}}};
  std::sort(pairs, pairs + 3, [](const Pair& l, const Pair& r) { return l.lambda > r.lambda; });

  EigenSystem es;
  es.lambda1 = pairs[0].lambda;
  es.lambda2 = pairs[1].lambda;
  es.lambda3 = pairs[2].lambda;
  es.e1 = canonical_sign(normalized(pairs[0].e));
  es.e2 = canonical_sign(normalized(pairs[1].e));
  es.e3 = canonical_sign(normalized(pairs[2].e));
  return es;
}

DiffusionTensor from_eigensystem(const EigenSystem& es) {
  DiffusionTensor d;
  const Vec3 e[3] = {es.e1, es.e2, es.e3};
  const double l[3] = {es.lambda1, es.lambda2, es.lambda3};
  for (int i = 0; i < 3; ++i) {
    d.dxx += l[i] * e[i].x * e[i].x;
    d.dyy += l[i] * e[i].y * e[i].y;
    d.dzz += l[i] * e[i].z * e[i].z;
    d.dxy += l[i] * e[i].x * e[i].y;
    d.dxz += l[i] * e[i].x * e[i].z;
    d.dyz += l[i] * e[i].y * e[i].z;
  }
  return d;
}

double fractional_anisotropy(double lambda1, double lambda2, double lambda3) {
  const double sq = lambda1 * lambda1 + lambda2 * lambda2 + lambda3 * lambda3;
  if (sq == 0.0) return 0.0;
  const double d12 = lambda1 - lambda2;
  const double d23 = lambda2 - lambda3;
  const double d13 = lambda1 - lambda3;
  const double fa = std::sqrt((d12 * d12 + d23 * d23 + d13 * d13) / (2.0 * sq));
  return std::clamp(fa, 0.0, 1.0);
}

double fractional_anisotropy(const DiffusionTensor& d) {
  const EigenSystem es = eigendecompose(d);
  return fractional_anisotropy(es.lambda1, es.lambda2, es.lambda3);
}

Vec3 principal_direction(const DiffusionTensor& d) { return eigendecompose(d).e1; }

double angle_between_principal(const Vec3& u, const Vec3& v) {
  const double nu = norm(u);
  const double nv = norm(v);
  if (nu == 0.0 || nv == 0.0) {
    throw InvalidDirectionError("angle_between_principal: zero-length direction");
  }
  const double c = std::clamp(std::abs(dot(u, v)) / (nu * nv), 0.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

}  // namespace fiberseg
