#pragma once

#include <vector>

#include "ctst/kernel.hpp"

namespace ctst {

// Paired per-node observation sets: X[v] holds the n x d sample from the
// first distribution at node v, Xp[v] the n' x d sample from the second.
// Every node carries exactly n and n' observations of common dimension d --
// the permutation test exchanges whole cross-node observation columns, which
// only makes sense with aligned counts.
struct NodeSampleSet {
    std::vector<Matrix> X;
    std::vector<Matrix> Xp;

    int num_nodes() const { return static_cast<int>(X.size()); }
    int n() const { return X.empty() ? 0 : static_cast<int>(X[0].rows()); }
    int n_prime() const { return Xp.empty() ? 0 : static_cast<int>(Xp[0].rows()); }
    int dim() const { return X.empty() ? 0 : static_cast<int>(X[0].cols()); }

    // Throws InputError unless counts and dimensions agree across nodes.
    void validate() const;

    // All rows of all nodes stacked: first every X_v, then every X'_v.
    Matrix pooled() const;

    // Roles exchanged (X <-> X'), for the reverse-direction fit.
    NodeSampleSet swapped() const;
};

// Applies one permutation tau of the pooled observation index set
// {0, ..., n+n'-1} simultaneously at every node: index j < n refers to row j
// of X_v, index j >= n to row j-n of X'_v. The first n permuted indices
// become the new X_v, the rest the new X'_v. tau[k] is the source index for
// target position k.
NodeSampleSet permute_columns(const NodeSampleSet& s, const std::vector<int>& tau);

} // namespace ctst
