#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace qmegs::linalg {

using cplx = std::complex<double>;

/// Dense real symmetric matrix, row-major. Off-diagonal writes go through
/// add()/set() which mirror both triangles, so storage stays exactly
/// symmetric.
class SymMatrix {
public:
    explicit SymMatrix(int dim);
    SymMatrix(int dim, std::vector<double> entries); // validates symmetry

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

    void set(int i, int j, double v);
    void add(int i, int j, double v);

    const std::vector<double>& data() const { return a_; }
    double frob_norm() const;

private:
    int dim_;
    std::vector<double> a_;
};

/// Dense complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix(int rows, int cols);
    ComplexMatrix(int rows, int cols, std::vector<cplx> entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    cplx operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }
    double frob_norm() const;

private:
    int rows_, cols_;
    std::vector<cplx> a_;
};

struct SymEig {
    std::vector<double> eigenvalues; // ascending
    /// Column-major orthonormal eigenvectors: vectors[j*dim + i] is the
    /// i-th component of the eigenvector for eigenvalues[j].
    std::vector<double> eigenvectors;
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
/// Stops when the off-diagonal Frobenius mass falls below 1e-12 * ||A||_F;
/// throws ConvergenceError after 50 sweeps.
SymEig sym_eig(const SymMatrix& a);

/// Matrix available only through matvec callbacks.
struct LinearOperator {
    int rows = 0;
    int cols = 0;
    std::function<void(const cplx* x, cplx* y)> apply;     // y = M x
    std::function<void(const cplx* x, cplx* y)> apply_adj; // y = M^H x
};

/// Leading left singular subspace by randomized block power iteration with
/// oversampling r+6 and re-orthonormalization each step. Returns a rows x r
/// matrix with orthonormal columns. `tol` bounds the subspace residual
/// ||M v_i - s_i u_i|| / s_1 over the leading r Ritz pairs.
ComplexMatrix top_singular_subspace(const LinearOperator& op, int r, double tol,
                                    int max_iter = 600);

/// Eigenvalues of a small (K <= 32) dense complex matrix. Closed form for
/// K <= 2, otherwise Hessenberg reduction plus shifted QR iteration.
std::vector<cplx> small_complex_eig(const ComplexMatrix& a);

/// Minimum-norm least squares solution of A x ~ b via Householder QR with
/// column pivoting. Throws RankError when the numerical rank (relative
/// threshold 1e-10) is below the column count.
std::vector<cplx> lstsq_complex(const ComplexMatrix& a, std::span<const cplx> b);

} // namespace qmegs::linalg
