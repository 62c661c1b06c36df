#pragma once

#include <array>

#include "fiberseg/vec3.hpp"

namespace fiberseg {

// Six unique components of a symmetric 3x3 diffusion tensor, mm^2/s.
struct DiffusionTensor {
  double dxx = 0.0;
  double dyy = 0.0;
  double dzz = 0.0;
  double dxy = 0.0;
  double dxz = 0.0;
  double dyz = 0.0;

  bool is_finite() const;
  double frobenius_norm() const;

  // Full matrix row, i in {0,1,2}.
  std::array<double, 3> row(int i) const;
};

DiffusionTensor operator+(const DiffusionTensor& a, const DiffusionTensor& b);
DiffusionTensor operator*(double s, const DiffusionTensor& t);

// Eigenvalues sorted descending with matching orthonormal eigenvectors.
struct EigenSystem {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  Vec3 e1;
  Vec3 e2;
  Vec3 e3;
};

// Cyclic Jacobi diagonalization of the symmetric tensor. Eigenvector signs
// are canonicalized so the largest-magnitude component of each vector is
// positive. Throws InvalidTensorError on non-finite input.
EigenSystem eigendecompose(const DiffusionTensor& d);

// Rebuild the tensor from an eigensystem (sum of lambda_i e_i e_i^T).
DiffusionTensor from_eigensystem(const EigenSystem& es);

// Fractional anisotropy, clamped to [0,1]. All-zero eigenvalues yield 0.
double fractional_anisotropy(double lambda1, double lambda2, double lambda3);

double fractional_anisotropy(const DiffusionTensor& d);

// e1 of the eigendecomposition. Unreliable when FA is near zero.
Vec3 principal_direction(const DiffusionTensor& d);

// Angle between two axial directions in degrees, in [0,90]; invariant under
// sign flips of either argument. Throws InvalidDirectionError on zero input.
double angle_between_principal(const Vec3& u, const Vec3& v);

}  // namespace fiberseg
