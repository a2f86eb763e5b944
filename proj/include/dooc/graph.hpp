#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dooc {

struct DirectedEdge {
    int from = 0;  // 1-based tail node
    int to = 0;    // 1-based head node
    double weight = 1.0;
};

/// Weighted digraph over nodes 1..n. adjacency(i, j) = a_ij > 0 iff there is
/// an edge j -> i, so row i collects the in-neighbors of node i. No
/// self-loops, all weights nonnegative.
struct Digraph {
    int n = 0;
    Eigen::MatrixXd adjacency;

    static Digraph from_edges(int n, const std::vector<DirectedEdge>& edges);

    /// Throws ValidationError on negative weights, nonzero diagonal, or n < 1.
    void validate() const;
};

/// Laplacian of a digraph: l_ii = sum_j a_ij, l_ij = -a_ij. Rows sum to zero.
struct Laplacian {
    Eigen::MatrixXd matrix;
    Digraph source;
};

Laplacian laplacian(const Digraph& g);

/// True iff every node reaches every other along directed edges.
bool is_strongly_connected(const Digraph& g);

/// 1^T L != 0 exactly characterizes weight imbalance.
bool is_weight_balanced(const Laplacian& lap, double tol = 1e-12);

/// Left eigenvector r of the Laplacian for eigenvalue zero, normalized so
/// r^T 1 = 1 and r > 0 elementwise. Requires a strongly connected source
/// graph; rejects inputs whose null space is not one-dimensional and
/// positive (singular-value ratio threshold 1e-8).
Eigen::VectorXd left_eigenvector(const Laplacian& lap);

}  // namespace dooc
