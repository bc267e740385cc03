#include "fieldvar/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fieldvar::cli {

std::vector<double> jacobi_eigen_symmetric(std::vector<double> a, std::size_t d,
                                           std::vector<double>& eigenvectors) {
    if (a.size() != d * d) {
        throw std::invalid_argument("jacobi: matrix size mismatch");
    }
    eigenvectors.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        eigenvectors[i * d + i] = 1.0;
    }
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * d + c]; };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                off += at(p, q) * at(p, q);
            }
        }
        if (off < 1e-24) {
            break;
        }
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double apq = at(p, q);
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                double tau = (at(q, q) - at(p, p)) / (2.0 * apq);
                double t = (tau >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                for (std::size_t r = 0; r < d; ++r) {
                    double arp = at(r, p), arq = at(r, q);
                    at(r, p) = c * arp - s * arq;
                    at(r, q) = s * arp + c * arq;
                }
                for (std::size_t r = 0; r < d; ++r) {
                    double apr = at(p, r), aqr = at(q, r);
                    at(p, r) = c * apr - s * aqr;
                    at(q, r) = s * apr + c * aqr;
                }
                for (std::size_t r = 0; r < d; ++r) {
                    double vrp = eigenvectors[r * d + p], vrq = eigenvectors[r * d + q];
                    eigenvectors[r * d + p] = c * vrp - s * vrq;
                    eigenvectors[r * d + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    std::vector<double> eigenvalues(d);
    for (std::size_t i = 0; i < d; ++i) {
        eigenvalues[i] = at(i, i);
    }
    return eigenvalues;
}

std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& vectors,
                                             std::size_t dims) {
    if (dims < 1) {
        throw std::invalid_argument("projection needs at least one output dimension");
    }
    if (vectors.size() < dims) {
        throw std::runtime_error("fewer vectors than projection dimensions");
    }
    const std::size_t n = vectors.size();
    const std::size_t d = vectors[0].size();
    if (d < dims) {
        throw std::runtime_error("vector dimension below projection dimensions");
    }
    for (const auto& v : vectors) {
        if (v.size() != d) {
            throw std::invalid_argument("projection input dimensions disagree");
        }
    }

    std::vector<double> mean(d, 0.0);
    for (const auto& v : vectors) {
        for (std::size_t j = 0; j < d; ++j) {
            mean[j] += v[j];
        }
    }
    for (double& m : mean) {
        m /= static_cast<double>(n);
    }

    std::vector<double> centered(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            centered[i * d + j] = vectors[i][j] - mean[j];
        }
    }

    // Sample covariance (divisor n-1; single-point input has no direction).
    std::vector<double> cov(d * d, 0.0);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = centered.data() + i * d;
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p; q < d; ++q) {
                cov[p * d + q] += row[p] * row[q];
            }
        }
    }
    for (std::size_t p = 0; p < d; ++p) {
        for (std::size_t q = p; q < d; ++q) {
            cov[p * d + q] /= denom;
            cov[q * d + p] = cov[p * d + q];
        }
    }

    std::vector<double> eigenvectors;
    std::vector<double> eigenvalues = jacobi_eigen_symmetric(std::move(cov), d, eigenvectors);

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return eigenvalues[a] != eigenvalues[b] ? eigenvalues[a] > eigenvalues[b] : a < b;
    });

    std::vector<std::vector<double>> components(dims, std::vector<double>(d));
    for (std::size_t c = 0; c < dims; ++c) {
        std::size_t col = order[c];
        double best = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            components[c][r] = eigenvectors[r * d + col];
            if (std::abs(components[c][r]) > std::abs(best)) {
                best = components[c][r];
            }
        }
        if (best < 0.0) {
            for (double& v : components[c]) {
                v = -v;
            }
        }
    }

    std::vector<std::vector<double>> coords(n, std::vector<double>(dims, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = centered.data() + i * d;
        for (std::size_t c = 0; c < dims; ++c) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                dot += row[j] * components[c][j];
            }
            coords[i][c] = dot;
        }
    }
    return coords;
}

}  // namespace fieldvar::cli
