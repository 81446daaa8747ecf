#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oracle {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Svd jacobi_svd(const qmegs::linalg::ComplexMatrix& a) {
    const int m = a.rows();
    const int n = a.cols();
    if (m < n) throw std::invalid_argument("jacobi_svd: requires rows >= cols");

    // column-major working copy
    std::vector<cplx> w(static_cast<std::size_t>(m) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(j) * m + i] = a(i, j);
    std::vector<cplx> v(static_cast<std::size_t>(n) * n, cplx{0, 0});
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(j) * n + j] = 1.0;

    auto colw = [&](int j) { return w.data() + static_cast<std::size_t>(j) * m; };
    auto colv = [&](int j) { return v.data() + static_cast<std::size_t>(j) * n; };

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                cplx g{0, 0};
                double alpha = 0, beta = 0;
                const cplx* ci = colw(i);
                const cplx* cj = colw(j);
                for (int k = 0; k < m; ++k) {
                    alpha += std::norm(ci[k]);
                    beta += std::norm(cj[k]);
                    g += std::conj(ci[k]) * cj[k];
                }
                const double ag = std::abs(g);
                if (ag == 0.0 || ag <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const cplx phase = g / ag;
                const double zeta = (beta - alpha) / (2.0 * ag);
                const double t = (zeta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                cplx* wi = colw(i);
                cplx* wj = colw(j);
                for (int k = 0; k < m; ++k) {
                    const cplx x = wi[k];
                    const cplx y = wj[k];
                    wi[k] = c * x - s * std::conj(phase) * y;
                    wj[k] = s * phase * x + c * y;
                }
                cplx* vi = colv(i);
                cplx* vj = colv(j);
                for (int k = 0; k < n; ++k) {
                    const cplx x = vi[k];
                    const cplx y = vj[k];
                    vi[k] = c * x - s * std::conj(phase) * y;
                    vj[k] = s * phase * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        const cplx* cj = colw(j);
        for (int k = 0; k < m; ++k) s += std::norm(cj[k]);
        sigma[j] = std::sqrt(s);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return sigma[i] > sigma[j]; });

    Svd out;
    out.rows = m;
    out.cols = n;
    out.sigma.resize(n);
    out.u.resize(static_cast<std::size_t>(m) * n);
    out.v.resize(static_cast<std::size_t>(n) * n);
    for (int jj = 0; jj < n; ++jj) {
        const int j = order[jj];
        out.sigma[jj] = sigma[j];
        const cplx* cj = colw(j);
        const double inv = sigma[j] > 0 ? 1.0 / sigma[j] : 0.0;
        for (int k = 0; k < m; ++k) out.u[static_cast<std::size_t>(jj) * m + k] = cj[k] * inv;
        const cplx* vj = colv(j);
        for (int k = 0; k < n; ++k) out.v[static_cast<std::size_t>(jj) * n + k] = vj[k];
    }
    return out;
}

std::vector<double> principal_angles(const std::vector<cplx>& u1, const std::vector<cplx>& u2,
                                     int rows, int r) {
    qmegs::linalg::ComplexMatrix g(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
            cplx dot{0, 0};
            for (int k = 0; k < rows; ++k)
                dot += std::conj(u1[static_cast<std::size_t>(i) * rows + k]) *
                       u2[static_cast<std::size_t>(j) * rows + k];
            g(i, j) = dot;
        }
    Svd s = jacobi_svd(g);
    std::vector<double> angles(r);
    for (int i = 0; i < r; ++i) angles[i] = std::acos(std::clamp(s.sigma[i], 0.0, 1.0));
    return angles;
}

qmegs::linalg::ComplexMatrix pauli_string_matrix(const std::string& ops) {
    const cplx i1{0, 1};
    auto single = [&](char c) -> std::vector<cplx> {
        switch (c) {
            case 'I': return {1, 0, 0, 1};
            case 'X': return {0, 1, 1, 0};
            case 'Y': return {0, -i1, i1, 0};
            case 'Z': return {1, 0, 0, -1};
            default: throw std::invalid_argument("pauli_string_matrix: bad operator");
        }
    };
    std::vector<cplx> acc = single(ops.at(0)); // row-major, qubit 1 most significant
    int dim = 2;
    for (std::size_t q = 1; q < ops.size(); ++q) {
        const std::vector<cplx> b = single(ops[q]);
        std::vector<cplx> next(static_cast<std::size_t>(dim) * 2 * dim * 2);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                for (int bi = 0; bi < 2; ++bi)
                    for (int bj = 0; bj < 2; ++bj)
                        next[static_cast<std::size_t>(i * 2 + bi) * (dim * 2) + (j * 2 + bj)] =
                            acc[static_cast<std::size_t>(i) * dim + j] * b[bi * 2 + bj];
        acc = std::move(next);
        dim *= 2;
    }
    return qmegs::linalg::ComplexMatrix(dim, dim, std::move(acc));
}

qmegs::linalg::ComplexMatrix tfim_pauli_oracle(int sites, double coupling) {
    const int dim = 1 << sites;
    qmegs::linalg::ComplexMatrix h(dim, dim);
    auto add_scaled = [&](const qmegs::linalg::ComplexMatrix& term, double w) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) h(i, j) += w * term(i, j);
    };
    for (int i = 1; i <= sites; ++i) {
        const int j = (i % sites) + 1;
        std::string s(sites, 'I');
        s[i - 1] = 'Z';
        s[j - 1] = 'Z';
        add_scaled(pauli_string_matrix(s), -1.0);
    }
    for (int i = 1; i <= sites; ++i) {
        std::string s(sites, 'I');
        s[i - 1] = 'X';
        add_scaled(pauli_string_matrix(s), -coupling);
    }
    return h;
}

std::vector<double> hubbard_occupation_oracle(int sites, double hopping, double interaction) {
    const int modes = 2 * sites;
    const int dim = 1 << modes;
    std::vector<double> h(static_cast<std::size_t>(dim) * dim, 0.0);

    auto occ = [&](int state, int mode) { return (state >> (modes - mode)) & 1; };
    auto parity_below = [&](int state, int mode) {
        int count = 0;
        for (int k = 1; k < mode; ++k) count += occ(state, k);
        return count % 2 ? -1.0 : 1.0;
    };

    std::vector<std::pair<int, int>> hops; // (p, q) meaning c^dag_p c_q
    for (int j = 1; j < sites; ++j) {
        hops.emplace_back(j, j + 1);
        hops.emplace_back(j + 1, j);
        hops.emplace_back(sites + j, sites + j + 1);
        hops.emplace_back(sites + j + 1, sites + j);
    }

    for (int s = 0; s < dim; ++s) {
        for (const auto& [p, q] : hops) {
            if (!occ(s, q)) continue;
            const double sign1 = parity_below(s, q);
            const int s1 = s & ~(1 << (modes - q));
            if (occ(s1, p)) continue;
            const double sign2 = parity_below(s1, p);
            const int s2 = s1 | (1 << (modes - p));
            h[static_cast<std::size_t>(s2) * dim + s] += -hopping * sign1 * sign2;
        }
        double diag = 0;
        for (int j = 1; j <= sites; ++j)
            diag += interaction * (occ(s, j) - 0.5) * (occ(s, sites + j) - 0.5);
        h[static_cast<std::size_t>(s) * dim + s] += diag;
    }
    return h;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double integrate(const std::function<double(double)>& f, double a, double b, int panels,
                 int points) {
    std::vector<double> x, w;
    gauss_legendre(points, x, w);
    double acc = 0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        for (int k = 0; k < points; ++k) acc += 0.5 * h * w[k] * f(mid + 0.5 * h * x[k]);
    }
    return acc;
}

namespace {

// regularized lower incomplete gamma (series for x < a+1, else via the
// continued fraction for the upper tail)
double gamma_p(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0) return 0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - gln) * h;
    return 1.0 - q;
}

} // namespace

double chi2_sf(double x, double k) { return 1.0 - gamma_p(0.5 * k, 0.5 * x); }

std::vector<cplx> random_unitary(int n, qmegs::Rng& rng) {
    std::vector<cplx> a(static_cast<std::size_t>(n) * n);
    for (auto& v : a) v = cplx{rng.normal(0, 1), rng.normal(0, 1)};
    auto col = [&](int j) { return a.data() + static_cast<std::size_t>(j) * n; };
    for (int j = 0; j < n; ++j) {
        cplx* cj = col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; ++i) {
                const cplx* ci = col(i);
                cplx dot{0, 0};
                for (int k = 0; k < n; ++k) dot += std::conj(ci[k]) * cj[k];
                for (int k = 0; k < n; ++k) cj[k] -= dot * ci[k];
            }
        double nrm = 0;
        for (int k = 0; k < n; ++k) nrm += std::norm(cj[k]);
        nrm = std::sqrt(nrm);
        for (int k = 0; k < n; ++k) cj[k] /= nrm;
    }
    return a;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace oracle
