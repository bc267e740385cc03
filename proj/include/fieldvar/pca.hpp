#pragma once

#include <cstddef>
#include <vector>

namespace fieldvar::cli {

/// Mean-centered projection onto the top `dims` principal components
/// (eigenvectors of the sample covariance), ordered by descending
/// eigenvalue. Sign convention: the largest-magnitude coordinate of each
/// component is positive, so repeated runs emit identical coordinates.
/// Throws when fewer than `dims` vectors are given or dimensions disagree.
std::vector<std::vector<double>> pca_project(const std::vector<std::vector<double>>& vectors,
                                             std::size_t dims = 2);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major d*d).
/// Returns eigenvalues; `eigenvectors` holds the matching unit vectors as
/// columns (eigenvectors[r*d + c] is row r of eigenvector c).
std::vector<double> jacobi_eigen_symmetric(std::vector<double> matrix, std::size_t d,
                                           std::vector<double>& eigenvectors);

}  // namespace fieldvar::cli
