#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "weyl/error.hpp"
#include "weyl/jet.hpp"

namespace weyl {

/// Row-major dense matrix of doubles, sized for pointwise geometry work
/// (dimensions stay below ~10^3 rows and ~10 columns).
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Returns eigenvalues
/// (ascending) and the orthogonal matrix of column eigenvectors.
struct SymEig {
    std::vector<double> values;
    Mat vectors;
};

inline SymEig sym_eigen(Mat m) {
    const int n = m.rows;
    Mat v = Mat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
        if (off <= 1e-30 * (1.0 + std::abs(m(0, 0)))) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    SymEig out;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = m(i, i);
    // sort ascending with matching columns
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::sort(perm.begin(), perm.end(), [&](int i, int j) {
        return out.values[static_cast<std::size_t>(i)] < out.values[static_cast<std::size_t>(j)];
    });
    SymEig sorted;
    sorted.values.resize(static_cast<std::size_t>(n));
    sorted.vectors = Mat(n, n);
    for (int j = 0; j < n; ++j) {
        sorted.values[static_cast<std::size_t>(j)] = out.values[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        for (int i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, perm[static_cast<std::size_t>(j)]);
    }
    return sorted;
}

/// Thin SVD of an m x k matrix (m >= 1, k small) by one-sided Jacobi.
/// singular values descending; V holds right singular vectors as columns.
struct Svd {
    std::vector<double> sigma;
    Mat v;
};

inline Svd svd(Mat a) {
    const int m = a.rows, k = a.cols;
    Mat v = Mat::identity(k);
    auto col_dot = [&](int p, int q) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += a(i, p) * a(i, q);
        return s;
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) {
                const double app = col_dot(p, p), aqq = col_dot(q, q), apq = col_dot(p, q);
                if (std::abs(apq) <= 1e-30 + 1e-16 * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int i = 0; i < m; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (int i = 0; i < k; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        if (!rotated) break;
    }
    Svd out;
    out.sigma.resize(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) out.sigma[static_cast<std::size_t>(j)] = std::sqrt(std::max(col_dot(j, j), 0.0));
    std::vector<int> perm(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) perm[static_cast<std::size_t>(j)] = j;
    std::sort(perm.begin(), perm.end(), [&](int i, int j) {
        return out.sigma[static_cast<std::size_t>(i)] > out.sigma[static_cast<std::size_t>(j)];
    });
    Svd sorted;
    sorted.sigma.resize(static_cast<std::size_t>(k));
    sorted.v = Mat(k, k);
    for (int j = 0; j < k; ++j) {
        sorted.sigma[static_cast<std::size_t>(j)] = out.sigma[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
        for (int i = 0; i < k; ++i) sorted.v(i, j) = v(i, perm[static_cast<std::size_t>(j)]);
    }
    return sorted;
}

/// Minimum-norm least-squares solution of A x = b using the SVD, treating
/// singular values below rel_tol * sigma_max as zero.
inline std::vector<double> lstsq_min_norm(const Mat& a, const std::vector<double>& b,
                                          double rel_tol = 1e-12) {
    Svd s = svd(a);
    const int k = a.cols;
    std::vector<double> x(static_cast<std::size_t>(k), 0.0);
    const double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
    for (int j = 0; j < k; ++j) {
        const double sj = s.sigma[static_cast<std::size_t>(j)];
        if (sj <= rel_tol * smax || sj == 0.0) continue;
        // u_j = A v_j / sigma_j; coefficient = (u_j . b) / sigma_j
        double uj_dot_b = 0.0;
        for (int i = 0; i < a.rows; ++i) {
            double av = 0.0;
            for (int c = 0; c < k; ++c) av += a(i, c) * s.v(c, j);
            uj_dot_b += av * b[static_cast<std::size_t>(i)];
        }
        const double coef = uj_dot_b / (sj * sj);
        for (int c = 0; c < k; ++c) x[static_cast<std::size_t>(c)] += coef * s.v(c, j);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Jet-valued square matrices (metric inversion, determinants, adjugates).
// ---------------------------------------------------------------------------

/// Invert an n x n jet matrix by Gaussian elimination, pivoting on value
/// parts. Exact truncated-Taylor inverse; throws on a singular value part.
inline std::vector<Jet> jet_matrix_inverse(const std::vector<Jet>& m, int n) {
    std::vector<Jet> a = m;
    const int nv = a[0].nvars();
    const int order = a[0].order();
    std::vector<Jet> inv(static_cast<std::size_t>(n) * n, Jet(nv, order, 0.0));
    for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i) * n + i] = Jet(nv, order, 1.0);
    auto A = [&](int i, int j) -> Jet& { return a[static_cast<std::size_t>(i) * n + j]; };
    auto B = [&](int i, int j) -> Jet& { return inv[static_cast<std::size_t>(i) * n + j]; };
    for (int c = 0; c < n; ++c) {
        int best = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A(r, c).value()) > std::abs(A(best, c).value())) best = r;
        if (std::abs(A(best, c).value()) < 1e-300)
            throw NumericError("singular matrix in jet inversion");
        if (best != c)
            for (int j = 0; j < n; ++j) {
                std::swap(A(c, j), A(best, j));
                std::swap(B(c, j), B(best, j));
            }
        const Jet pivot_inv = recip(A(c, c));
        for (int j = 0; j < n; ++j) {
            A(c, j) = A(c, j) * pivot_inv;
            B(c, j) = B(c, j) * pivot_inv;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const Jet f = A(r, c);
            if (f.value() == 0.0) {
                bool zero = true;
                for (double co : f.coeffs())
                    if (co != 0.0) { zero = false; break; }
                if (zero) continue;
            }
            for (int j = 0; j < n; ++j) {
                A(r, j) -= f * A(c, j);
                B(r, j) -= f * B(c, j);
            }
        }
    }
    return inv;
}

/// Determinant of a jet matrix by recursive cofactor expansion (no division,
/// safe at points where the determinant vanishes).
inline Jet jet_det_cofactor(const std::vector<Jet>& m, int n) {
    const int nv = m[0].nvars();
    const int order = m[0].order();
    std::vector<int> cols(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) cols[static_cast<std::size_t>(j)] = j;
    auto rec = [&](auto&& self, int row, std::vector<int>& cs) -> Jet {
        if (cs.size() == 1)
            return m[static_cast<std::size_t>(row) * n + cs[0]];
        Jet acc(nv, order, 0.0);
        for (std::size_t k = 0; k < cs.size(); ++k) {
            const int col = cs[k];
            std::vector<int> rest;
            rest.reserve(cs.size() - 1);
            for (std::size_t j = 0; j < cs.size(); ++j)
                if (j != k) rest.push_back(cs[j]);
            Jet sub = self(self, row + 1, rest);
            Jet term = m[static_cast<std::size_t>(row) * n + col] * sub;
            if (k % 2 == 0)
                acc += term;
            else
                acc -= term;
        }
        return acc;
    };
    return rec(rec, 0, cols);
}

/// Adjugate (transposed cofactor matrix): adj(M) * M = det(M) * Id.
inline std::vector<Jet> jet_adjugate(const std::vector<Jet>& m, int n) {
    const int nv = m[0].nvars();
    const int order = m[0].order();
    std::vector<Jet> adj(static_cast<std::size_t>(n) * n, Jet(nv, order, 0.0));
    if (n == 1) {
        adj[0] = Jet(nv, order, 1.0);
        return adj;
    }
    std::vector<Jet> minor(static_cast<std::size_t>(n - 1) * (n - 1), Jet(nv, order, 0.0));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            int mi = 0;
            for (int i = 0; i < n; ++i) {
                if (i == r) continue;
                int mj = 0;
                for (int j = 0; j < n; ++j) {
                    if (j == c) continue;
                    minor[static_cast<std::size_t>(mi) * (n - 1) + mj] =
                        m[static_cast<std::size_t>(i) * n + j];
                    ++mj;
                }
                ++mi;
            }
            Jet cof = jet_det_cofactor(minor, n - 1);
            if ((r + c) % 2 != 0) cof = -cof;
            adj[static_cast<std::size_t>(c) * n + r] = cof; // transpose
        }
    return adj;
}

} // namespace weyl
