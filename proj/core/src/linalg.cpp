#include "qmegs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qmegs/errors.hpp"
#include "qmegs/rng.hpp"

namespace qmegs::linalg {

namespace {

std::size_t idx(int i, int j, int n) {
    return static_cast<std::size_t>(i) * n + j;
}

double sqr(double x) { return x * x; }

} // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
    a_.assign(static_cast<std::size_t>(dim) * dim, 0.0);
}

SymMatrix::SymMatrix(int dim, std::vector<double> entries) : dim_(dim), a_(std::move(entries)) {
    if (dim < 1) throw std::invalid_argument("SymMatrix: dim must be >= 1");
    if (a_.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("SymMatrix: entry count does not match dim^2");
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (a_[idx(i, j, dim)] != a_[idx(j, i, dim)])
                throw std::invalid_argument("SymMatrix: entries are not symmetric");
}

void SymMatrix::set(int i, int j, double v) {
    a_[idx(i, j, dim_)] = v;
    a_[idx(j, i, dim_)] = v;
}

void SymMatrix::add(int i, int j, double v) {
    a_[idx(i, j, dim_)] += v;
    if (i != j) a_[idx(j, i, dim_)] += v;
}

double SymMatrix::frob_norm() const {
    double s = 0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ComplexMatrix: empty shape");
    a_.assign(static_cast<std::size_t>(rows) * cols, cplx{0, 0});
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("ComplexMatrix: empty shape");
    if (a_.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
}

double ComplexMatrix::frob_norm() const {
    double s = 0;
    for (const cplx& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Symmetric eigensolver: cyclic Jacobi.
// ---------------------------------------------------------------------------

SymEig sym_eig(const SymMatrix& a) {
    const int n = a.dim();
    if (n > 4096) throw std::invalid_argument("sym_eig: dim exceeds 4096");

    const double norm_f = a.frob_norm();
    std::vector<double> w = a.data();
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[idx(i, i, n)] = 1.0;

    const double stop = 1e-12 * norm_f;
    const int max_sweeps = 50;
    double off = 0;

    auto off_norm = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += sqr(w[idx(i, j, n)]);
        return std::sqrt(2.0 * s);
    };

    if (norm_f == 0.0) {
        return SymEig{std::vector<double>(n, 0.0), v};
    }

    bool converged = (off = off_norm()) <= stop;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = w[idx(p, q, n)];
                if (std::abs(apq) <= 1e-18 * norm_f) continue;
                const double app = w[idx(p, p, n)];
                const double aqq = w[idx(q, q, n)];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                w[idx(p, p, n)] = app - t * apq;
                w[idx(q, q, n)] = aqq + t * apq;
                w[idx(p, q, n)] = 0.0;
                w[idx(q, p, n)] = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double wkp = w[idx(k, p, n)];
                    const double wkq = w[idx(k, q, n)];
                    w[idx(k, p, n)] = w[idx(p, k, n)] = c * wkp - s * wkq;
                    w[idx(k, q, n)] = w[idx(q, k, n)] = s * wkp + c * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[idx(k, p, n)];
                    const double vkq = v[idx(k, q, n)];
                    v[idx(k, p, n)] = c * vkp - s * vkq;
                    v[idx(k, q, n)] = s * vkp + c * vkq;
                }
            }
        }
        converged = (off = off_norm()) <= stop;
    }
    if (!converged)
        throw ConvergenceError("sym_eig: Jacobi sweeps did not converge", off / norm_f);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return w[idx(i, i, n)] < w[idx(j, j, n)]; });

    SymEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        out.eigenvalues[j] = w[idx(order[j], order[j], n)];
        for (int i = 0; i < n; ++i)
            out.eigenvectors[static_cast<std::size_t>(j) * n + i] = v[idx(i, order[j], n)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Small Hermitian eigensolver (internal Ritz step of the subspace iteration).
// ---------------------------------------------------------------------------

namespace {

struct HermEig {
    std::vector<double> values;  // descending
    std::vector<cplx> vectors;   // column-major
};

HermEig herm_eig_desc(std::vector<cplx> w, int n) {
    std::vector<cplx> v(static_cast<std::size_t>(n) * n, cplx{0, 0});
    for (int i = 0; i < n; ++i) v[idx(i, i, n)] = 1.0;

    double norm_f = 0;
    for (const cplx& x : w) norm_f += std::norm(x);
    norm_f = std::sqrt(norm_f);
    if (norm_f == 0.0) norm_f = 1.0;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += std::norm(w[idx(i, j, n)]);
        if (std::sqrt(2.0 * off) <= 1e-14 * norm_f) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx alpha = w[idx(p, q, n)];
                const double am = std::abs(alpha);
                if (am <= 1e-18 * norm_f) continue;
                const cplx phase = alpha / am;
                const double app = w[idx(p, p, n)].real();
                const double aqq = w[idx(q, q, n)].real();
                const double theta = (aqq - app) / (2.0 * am);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx se = s * phase;        // s e^{i phi}
                const cplx sec = s * std::conj(phase);

                w[idx(p, p, n)] = app - t * am;
                w[idx(q, q, n)] = aqq + t * am;
                w[idx(p, q, n)] = 0.0;
                w[idx(q, p, n)] = 0.0;
                for (int k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const cplx wkp = w[idx(k, p, n)];
                    const cplx wkq = w[idx(k, q, n)];
                    w[idx(k, p, n)] = c * wkp - sec * wkq;
                    w[idx(k, q, n)] = se * wkp + c * wkq;
                    w[idx(p, k, n)] = std::conj(w[idx(k, p, n)]);
                    w[idx(q, k, n)] = std::conj(w[idx(k, q, n)]);
                }
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v[idx(k, p, n)];
                    const cplx vkq = v[idx(k, q, n)];
                    v[idx(k, p, n)] = c * vkp - sec * vkq;
                    v[idx(k, q, n)] = se * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return w[idx(i, i, n)].real() > w[idx(j, j, n)].real();
    });
    HermEig out;
    out.values.resize(n);
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = w[idx(order[j], order[j], n)].real();
        for (int i = 0; i < n; ++i)
            out.vectors[static_cast<std::size_t>(j) * n + i] = v[idx(i, order[j], n)];
    }
    return out;
}

// Modified Gram-Schmidt with one reorthogonalization pass. Columns that
// vanish are replaced by a deterministic fallback direction so the block
// keeps full width even on rank-deficient input.
void orthonormalize(std::vector<cplx>& block, int rows, int cols) {
    auto col = [&](int j) { return block.data() + static_cast<std::size_t>(j) * rows; };
    for (int j = 0; j < cols; ++j) {
        cplx* cj = col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < j; ++i) {
                const cplx* ci = col(i);
                cplx dot{0, 0};
                for (int k = 0; k < rows; ++k) dot += std::conj(ci[k]) * cj[k];
                for (int k = 0; k < rows; ++k) cj[k] -= dot * ci[k];
            }
        }
        double nrm = 0;
        for (int k = 0; k < rows; ++k) nrm += std::norm(cj[k]);
        nrm = std::sqrt(nrm);
        if (nrm > 1e-154) {
            for (int k = 0; k < rows; ++k) cj[k] /= nrm;
            continue;
        }
        // fallback: unit vectors cycled through the row indices
        bool placed = false;
        for (int attempt = 0; attempt < rows && !placed; ++attempt) {
            std::fill(cj, cj + rows, cplx{0, 0});
            cj[(j + attempt) % rows] = 1.0;
            for (int i = 0; i < j; ++i) {
                const cplx* ci = col(i);
                cplx dot{0, 0};
                for (int k = 0; k < rows; ++k) dot += std::conj(ci[k]) * cj[k];
                for (int k = 0; k < rows; ++k) cj[k] -= dot * ci[k];
            }
            double n2 = 0;
            for (int k = 0; k < rows; ++k) n2 += std::norm(cj[k]);
            n2 = std::sqrt(n2);
            if (n2 > 1e-8) {
                for (int k = 0; k < rows; ++k) cj[k] /= n2;
                placed = true;
            }
        }
        if (!placed) std::fill(cj, cj + rows, cplx{0, 0});
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Randomized block power iteration for the top left singular subspace.
// ---------------------------------------------------------------------------

ComplexMatrix top_singular_subspace(const LinearOperator& op, int r, double tol, int max_iter) {
    const int rows = op.rows;
    const int cols = op.cols;
    if (rows < 1 || cols < 1) throw std::invalid_argument("top_singular_subspace: empty operator");
    if (r < 1 || r > std::min(rows, cols))
        throw std::invalid_argument("top_singular_subspace: rank out of range");

    const int b = std::min(std::min(rows, cols), r + 6);

    // deterministic start block: the routine is a pure function of (op, r, tol)
    Rng rng(hash_combine(0x9d2c5680aULL, static_cast<std::uint64_t>(rows) * 1000003u + cols));

    std::vector<cplx> u(static_cast<std::size_t>(rows) * b);
    std::vector<cplx> w(static_cast<std::size_t>(cols) * b);
    std::vector<cplx> tmp_col(cols);

    {
        std::vector<cplx> omega(static_cast<std::size_t>(cols) * b);
        for (auto& x : omega) x = cplx{rng.normal(0, 1), rng.normal(0, 1)};
        for (int j = 0; j < b; ++j)
            op.apply(omega.data() + static_cast<std::size_t>(j) * cols,
                     u.data() + static_cast<std::size_t>(j) * rows);
        orthonormalize(u, rows, b);
    }

    double residual = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        // W = M^H U
        for (int j = 0; j < b; ++j)
            op.apply_adj(u.data() + static_cast<std::size_t>(j) * rows,
                         w.data() + static_cast<std::size_t>(j) * cols);

        // Rayleigh-Ritz on G = W^H W = U^H M M^H U
        std::vector<cplx> g(static_cast<std::size_t>(b) * b);
        for (int i = 0; i < b; ++i) {
            for (int j = i; j < b; ++j) {
                cplx dot{0, 0};
                const cplx* wi = w.data() + static_cast<std::size_t>(i) * cols;
                const cplx* wj = w.data() + static_cast<std::size_t>(j) * cols;
                for (int k = 0; k < cols; ++k) dot += std::conj(wi[k]) * wj[k];
                g[idx(i, j, b)] = dot;
                g[idx(j, i, b)] = std::conj(dot);
            }
        }
        HermEig ritz = herm_eig_desc(std::move(g), b);

        std::vector<double> s(r);
        for (int i = 0; i < r; ++i) s[i] = std::sqrt(std::max(ritz.values[i], 0.0));
        const double s_max = s[0];

        // U_r = U P_r, V_r = W P_r / s
        ComplexMatrix ur(rows, r);
        std::vector<cplx> vr(static_cast<std::size_t>(cols) * r, cplx{0, 0});
        for (int j = 0; j < r; ++j) {
            const cplx* pj = ritz.vectors.data() + static_cast<std::size_t>(j) * b;
            for (int c = 0; c < b; ++c) {
                const cplx f = pj[c];
                const cplx* uc = u.data() + static_cast<std::size_t>(c) * rows;
                for (int k = 0; k < rows; ++k) ur(k, j) += f * uc[k];
                const cplx* wc = w.data() + static_cast<std::size_t>(c) * cols;
                cplx* vj = vr.data() + static_cast<std::size_t>(j) * cols;
                for (int k = 0; k < cols; ++k) vj[k] += f * wc[k];
            }
        }

        if (s_max <= 1e-300) return ur; // zero operator: any orthonormal block

        double res2 = 0;
        std::vector<cplx> mv(rows);
        for (int j = 0; j < r; ++j) {
            if (s[j] <= 1e-14 * s_max) continue; // exhausted rank, no residual
            cplx* vj = vr.data() + static_cast<std::size_t>(j) * cols;
            for (int k = 0; k < cols; ++k) tmp_col[k] = vj[k] / s[j];
            op.apply(tmp_col.data(), mv.data());
            for (int k = 0; k < rows; ++k) res2 += std::norm(mv[k] - s[j] * ur(k, j));
        }
        residual = std::sqrt(res2) / s_max;
        if (residual <= tol) return ur;

        // power step: V = orth(W), U = orth(M V)
        orthonormalize(w, cols, b);
        for (int j = 0; j < b; ++j)
            op.apply(w.data() + static_cast<std::size_t>(j) * cols,
                     u.data() + static_cast<std::size_t>(j) * rows);
        orthonormalize(u, rows, b);
    }
    throw ConvergenceError("top_singular_subspace: iteration cap reached", residual);
}

// ---------------------------------------------------------------------------
// Small dense complex eigenvalues: Hessenberg + shifted QR.
// ---------------------------------------------------------------------------

namespace {

struct Givens {
    double c;
    cplx s;
};

// G^H [f; g] = [r; 0] with c real, |c|^2 + |s|^2 = 1
Givens make_givens(cplx f, cplx g, cplx& r) {
    const double af = std::abs(f);
    const double ag = std::abs(g);
    if (ag == 0.0) {
        r = f;
        return {1.0, cplx{0, 0}};
    }
    if (af == 0.0) {
        r = ag;
        return {0.0, std::conj(g) / ag};
    }
    const double d = std::hypot(af, ag);
    const cplx fhat = f / af;
    r = fhat * d;
    return {af / d, fhat * std::conj(g) / d};
}

void hessenberg_reduce(std::vector<cplx>& h, int n) {
    for (int k = 0; k + 2 < n; ++k) {
        double xnorm = 0;
        for (int i = k + 1; i < n; ++i) xnorm += std::norm(h[idx(i, k, n)]);
        xnorm = std::sqrt(xnorm);
        if (xnorm <= 1e-300) continue;

        std::vector<cplx> v(n - k - 1);
        for (int i = k + 1; i < n; ++i) v[i - k - 1] = h[idx(i, k, n)];
        const cplx x0 = v[0];
        const cplx phase = (std::abs(x0) > 0) ? x0 / std::abs(x0) : cplx{1, 0};
        v[0] += phase * xnorm;
        double vnorm2 = 0;
        for (const cplx& x : v) vnorm2 += std::norm(x);
        if (vnorm2 <= 1e-300) continue;
        const double beta = 2.0 / vnorm2;

        // rows k+1..n-1, columns k..n-1
        for (int j = k; j < n; ++j) {
            cplx dot{0, 0};
            for (int i = k + 1; i < n; ++i) dot += std::conj(v[i - k - 1]) * h[idx(i, j, n)];
            dot *= beta;
            for (int i = k + 1; i < n; ++i) h[idx(i, j, n)] -= v[i - k - 1] * dot;
        }
        // all rows, columns k+1..n-1
        for (int i = 0; i < n; ++i) {
            cplx dot{0, 0};
            for (int j = k + 1; j < n; ++j) dot += h[idx(i, j, n)] * v[j - k - 1];
            dot *= beta;
            for (int j = k + 1; j < n; ++j) h[idx(i, j, n)] -= dot * std::conj(v[j - k - 1]);
        }
        for (int i = k + 2; i < n; ++i) h[idx(i, k, n)] = 0.0;
    }
}

std::pair<cplx, cplx> eig2(cplx a, cplx b, cplx c, cplx d) {
    const cplx tr = a + d;
    const cplx det = a * d - b * c;
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

} // namespace

std::vector<cplx> small_complex_eig(const ComplexMatrix& a) {
    const int n = a.rows();
    if (n != a.cols()) throw std::invalid_argument("small_complex_eig: matrix not square");
    if (n > 32) throw std::invalid_argument("small_complex_eig: dimension exceeds 32");

    if (n == 1) return {a(0, 0)};
    if (n == 2) {
        auto [m1, m2] = eig2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        return {m1, m2};
    }

    std::vector<cplx> h = a.data();
    hessenberg_reduce(h, n);

    std::vector<cplx> eigs;
    eigs.reserve(n);
    int hi = n - 1; // active block is rows/cols 0..hi
    int iters_at_block = 0;
    const int max_per_block = 80;

    auto subdiag_small = [&](int i) {
        const double s = std::abs(h[idx(i - 1, i - 1, n)]) + std::abs(h[idx(i, i, n)]);
        return std::abs(h[idx(i, i - 1, n)]) <= 1e-15 * std::max(s, 1e-300);
    };

    while (hi >= 0) {
        if (hi == 0) {
            eigs.push_back(h[idx(0, 0, n)]);
            break;
        }
        if (subdiag_small(hi)) {
            h[idx(hi, hi - 1, n)] = 0.0;
            eigs.push_back(h[idx(hi, hi, n)]);
            --hi;
            iters_at_block = 0;
            continue;
        }
        if (hi == 1 || subdiag_small(hi - 1)) {
            // trailing 2x2 is isolated
            auto [m1, m2] = eig2(h[idx(hi - 1, hi - 1, n)], h[idx(hi - 1, hi, n)],
                                 h[idx(hi, hi - 1, n)], h[idx(hi, hi, n)]);
            eigs.push_back(m1);
            eigs.push_back(m2);
            hi -= 2;
            iters_at_block = 0;
            continue;
        }
        if (++iters_at_block > max_per_block)
            throw ConvergenceError("small_complex_eig: QR iteration stalled",
                                   std::abs(h[idx(hi, hi - 1, n)]));

        // Wilkinson-style shift from the trailing 2x2, occasionally perturbed
        auto [m1, m2] = eig2(h[idx(hi - 1, hi - 1, n)], h[idx(hi - 1, hi, n)],
                             h[idx(hi, hi - 1, n)], h[idx(hi, hi, n)]);
        cplx shift = (std::abs(m1 - h[idx(hi, hi, n)]) < std::abs(m2 - h[idx(hi, hi, n)])) ? m1 : m2;
        if (iters_at_block % 16 == 10) shift += 0.5 * std::abs(h[idx(hi, hi - 1, n)]);

        // determine the top of the unreduced block
        int lo = hi;
        while (lo > 0 && !subdiag_small(lo)) --lo;

        for (int i = lo; i <= hi; ++i) h[idx(i, i, n)] -= shift;
        std::vector<Givens> rot(hi - lo);
        for (int i = lo; i < hi; ++i) {
            cplx r;
            Givens g = make_givens(h[idx(i, i, n)], h[idx(i + 1, i, n)], r);
            rot[i - lo] = g;
            h[idx(i, i, n)] = r;
            h[idx(i + 1, i, n)] = 0.0;
            for (int j = i + 1; j <= hi; ++j) {
                const cplx t1 = h[idx(i, j, n)];
                const cplx t2 = h[idx(i + 1, j, n)];
                h[idx(i, j, n)] = g.c * t1 + g.s * t2;
                h[idx(i + 1, j, n)] = -std::conj(g.s) * t1 + g.c * t2;
            }
        }
        for (int i = lo; i < hi; ++i) {
            const Givens& g = rot[i - lo];
            for (int k = lo; k <= std::min(i + 1, hi); ++k) {
                const cplx t1 = h[idx(k, i, n)];
                const cplx t2 = h[idx(k, i + 1, n)];
                h[idx(k, i, n)] = g.c * t1 + std::conj(g.s) * t2;
                h[idx(k, i + 1, n)] = -g.s * t1 + g.c * t2;
            }
        }
        for (int i = lo; i <= hi; ++i) h[idx(i, i, n)] += shift;
    }
    return eigs;
}

// ---------------------------------------------------------------------------
// Complex least squares via Householder QR with column pivoting.
// ---------------------------------------------------------------------------

std::vector<cplx> lstsq_complex(const ComplexMatrix& a, std::span<const cplx> b) {
    const int m = a.rows();
    const int k = a.cols();
    if (static_cast<int>(b.size()) != m)
        throw std::invalid_argument("lstsq_complex: rhs length does not match rows");
    if (m < k) throw std::invalid_argument("lstsq_complex: system is underdetermined");

    std::vector<cplx> r = a.data();
    std::vector<cplx> rhs(b.begin(), b.end());
    std::vector<int> piv(k);
    std::iota(piv.begin(), piv.end(), 0);

    double r00 = 0;

    for (int step = 0; step < k; ++step) {
        // exact residual column norms (k is small throughout this project)
        int best = step;
        double best_norm = -1;
        for (int j = step; j < k; ++j) {
            double s = 0;
            for (int i = step; i < m; ++i) s += std::norm(r[idx(i, j, k)]);
            if (s > best_norm) {
                best_norm = s;
                best = j;
            }
        }
        if (best != step) {
            for (int i = 0; i < m; ++i) std::swap(r[idx(i, step, k)], r[idx(i, best, k)]);
            std::swap(piv[step], piv[best]);
        }

        double xnorm = std::sqrt(std::max(best_norm, 0.0));
        if (step == 0) r00 = xnorm;
        if (xnorm <= 1e-10 * std::max(r00, 1e-300))
            throw RankError("lstsq_complex: rank-deficient matrix", step);

        const cplx x0 = r[idx(step, step, k)];
        const cplx phase = (std::abs(x0) > 0) ? x0 / std::abs(x0) : cplx{1, 0};
        std::vector<cplx> v(m - step);
        v[0] = x0 + phase * xnorm;
        for (int i = step + 1; i < m; ++i) v[i - step] = r[idx(i, step, k)];
        double vnorm2 = 0;
        for (const cplx& x : v) vnorm2 += std::norm(x);
        const double beta = 2.0 / vnorm2;

        for (int j = step; j < k; ++j) {
            cplx dot{0, 0};
            for (int i = step; i < m; ++i) dot += std::conj(v[i - step]) * r[idx(i, j, k)];
            dot *= beta;
            for (int i = step; i < m; ++i) r[idx(i, j, k)] -= v[i - step] * dot;
        }
        cplx dot{0, 0};
        for (int i = step; i < m; ++i) dot += std::conj(v[i - step]) * rhs[i];
        dot *= beta;
        for (int i = step; i < m; ++i) rhs[i] -= v[i - step] * dot;
    }

    // back substitution on the k x k triangle
    std::vector<cplx> y(k);
    for (int i = k - 1; i >= 0; --i) {
        cplx s = rhs[i];
        for (int j = i + 1; j < k; ++j) s -= r[idx(i, j, k)] * y[j];
        y[i] = s / r[idx(i, i, k)];
    }
    std::vector<cplx> x(k);
    for (int j = 0; j < k; ++j) x[piv[j]] = y[j];
    return x;
}

} // namespace qmegs::linalg
