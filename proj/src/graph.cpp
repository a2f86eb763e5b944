#include "dooc/graph.hpp"

#include "dooc/errors.hpp"

#include <string>
#include <vector>

namespace dooc {

Digraph Digraph::from_edges(int n, const std::vector<DirectedEdge>& edges) {
    if (n < 1) throw ValidationError("graph: node count must be >= 1");
    Digraph g;
    g.n = n;
    g.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges) {
        if (e.from < 1 || e.from > n || e.to < 1 || e.to > n)
            throw ValidationError("graph: edge endpoint out of range: " + std::to_string(e.from) +
                                  "->" + std::to_string(e.to));
        if (e.from == e.to) throw ValidationError("graph: self-loops are not allowed");
        if (e.weight <= 0.0) throw ValidationError("graph: edge weights must be positive");
        // Edge j -> i lands in a_ij.
        g.adjacency(e.to - 1, e.from - 1) = e.weight;
    }
    return g;
}

void Digraph::validate() const {
    if (n < 1) throw ValidationError("graph: node count must be >= 1");
    if (adjacency.rows() != n || adjacency.cols() != n)
        throw ValidationError("graph: adjacency must be n x n");
    if ((adjacency.array() < 0.0).any())
        throw ValidationError("graph: adjacency weights must be nonnegative");
    if (adjacency.diagonal().cwiseAbs().maxCoeff() != 0.0)
        throw ValidationError("graph: self-loops are not allowed (nonzero diagonal)");
}

Laplacian laplacian(const Digraph& g) {
    g.validate();
    Laplacian lap;
    lap.source = g;
    lap.matrix = -g.adjacency;
    lap.matrix.diagonal() = g.adjacency.rowwise().sum();
    return lap;
}

namespace {

// Reachability from `start` following edges tail -> head. adjacency(i, j) > 0
// means j -> i, so forward travel from j scans column j.
void dfs(const Eigen::MatrixXd& adjacency, int start, bool transpose, std::vector<bool>& seen) {
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
        const int j = stack.back();
        stack.pop_back();
        for (int i = 0; i < adjacency.rows(); ++i) {
            const double w = transpose ? adjacency(j, i) : adjacency(i, j);
            if (w > 0.0 && !seen[static_cast<std::size_t>(i)]) {
                seen[static_cast<std::size_t>(i)] = true;
                stack.push_back(i);
            }
        }
    }
}

bool all(const std::vector<bool>& v) {
    for (bool b : v)
        if (!b) return false;
    return true;
}

}  // namespace

bool is_strongly_connected(const Digraph& g) {
    g.validate();
    if (g.n == 1) return true;
    // Strongly connected iff node 0 reaches everyone in G and in G reversed.
    std::vector<bool> fwd(static_cast<std::size_t>(g.n), false);
    std::vector<bool> bwd(static_cast<std::size_t>(g.n), false);
    dfs(g.adjacency, 0, false, fwd);
    dfs(g.adjacency, 0, true, bwd);
    return all(fwd) && all(bwd);
}

bool is_weight_balanced(const Laplacian& lap, double tol) {
    return (lap.matrix.colwise().sum()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::VectorXd left_eigenvector(const Laplacian& lap) {
    const Eigen::MatrixXd lt = lap.matrix.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lt, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const Eigen::Index n = lt.rows();
    if (n > 1) {
        const double scale = sigma(0);
        if (scale <= 0.0) throw ValidationError("left_eigenvector: zero Laplacian with n > 1");
        // One-dimensional null space: exactly one singular value collapses.
        if (sigma(n - 1) / scale >= 1e-8 || sigma(n - 2) / scale < 1e-8)
            throw ValidationError(
                "left_eigenvector: null space of L^T is not one-dimensional "
                "(graph not strongly connected?)");
    }
    Eigen::VectorXd r = svd.matrixV().col(n - 1);
    const double total = r.sum();
    if (total == 0.0) throw ValidationError("left_eigenvector: null vector has zero sum");
    r /= total;
    if ((r.array() <= 0.0).any())
        throw ValidationError(
            "left_eigenvector: null vector is not positive "
            "(graph not strongly connected?)");
    return r;
}

}  // namespace dooc
