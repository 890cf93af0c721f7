#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace oyldp::gue {

// Hermitian n x n draw with E|H_jk|^2 = 1/(4n) for every entry, which puts
// the spectrum edge at 1 as n grows.
Eigen::MatrixXcd sample_matrix(int n, std::uint64_t seed);

// Largest eigenvalue of a real symmetric tridiagonal matrix by Sturm-count
// bisection inside the Gershgorin bracket.
double top_eigenvalue_tridiagonal(const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& sub);

// Largest eigenvalue of a Hermitian matrix: Householder tridiagonalization
// followed by the bisection above.
double top_eigenvalue(const Eigen::MatrixXcd& h);

}  // namespace oyldp::gue
