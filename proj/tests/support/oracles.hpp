#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they are used to check.

#include <complex>
#include <functional>
#include <vector>

#include "qmegs/linalg.hpp"
#include "qmegs/rng.hpp"

namespace oracle {

using cplx = std::complex<double>;

struct Svd {
    std::vector<cplx> u;       // m x n column-major (thin)
    std::vector<double> sigma; // descending
    std::vector<cplx> v;       // n x n column-major
    int rows = 0, cols = 0;
};

/// Dense thin SVD by one-sided Jacobi on the columns (requires rows >= cols).
Svd jacobi_svd(const qmegs::linalg::ComplexMatrix& a);

/// Principal angles (radians, descending sigma order) between the subspaces
/// spanned by the orthonormal column blocks u1 and u2 (both rows x r,
/// column-major).
std::vector<double> principal_angles(const std::vector<cplx>& u1, const std::vector<cplx>& u2,
                                     int rows, int r);

/// 2^sites dense matrix of a Pauli string (characters I, X, Y, Z; index 0 is
/// qubit 1, the most significant), built by explicit Kronecker products.
qmegs::linalg::ComplexMatrix pauli_string_matrix(const std::string& ops);

/// TFIM reference: assembled from explicit Pauli-string matrices.
qmegs::linalg::ComplexMatrix tfim_pauli_oracle(int sites, double coupling);

/// Hubbard reference: fermionic operators applied in the occupation basis
/// with explicit Jordan-Wigner parity signs.
std::vector<double> hubbard_occupation_oracle(int sites, double hopping, double interaction);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Integral of f over [a, b] by composite Gauss-Legendre with `panels`
/// panels of `points` nodes each.
double integrate(const std::function<double(double)>& f, double a, double b, int panels,
                 int points = 16);

/// Chi-square survival function P(X >= x) with k degrees of freedom.
double chi2_sf(double x, double k);

/// Haar-ish random unitary (QR of a complex Gaussian matrix), column-major.
std::vector<cplx> random_unitary(int n, qmegs::Rng& rng);

double median(std::vector<double> v);

} // namespace oracle
