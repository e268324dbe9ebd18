#include "ctst/samples.hpp"

#include <string>
#include <vector>

#include "ctst/errors.hpp"

namespace ctst {

void NodeSampleSet::validate() const {
    if (X.empty()) throw InputError("sample set has no nodes");
    if (X.size() != Xp.size())
        throw InputError("sample set has " + std::to_string(X.size()) +
                         " X nodes but " + std::to_string(Xp.size()) +
                         " X' nodes");
    const auto rows_n = X[0].rows();
    const auto rows_np = Xp[0].rows();
    const auto d = X[0].cols();
    if (rows_n < 1 || rows_np < 1)
        throw InputError("every node needs at least one observation per sample");
    for (std::size_t v = 0; v < X.size(); ++v) {
        if (X[v].rows() != rows_n || Xp[v].rows() != rows_np)
            throw InputError("node " + std::to_string(v) +
                             " has mismatched observation counts");
        if (X[v].cols() != d || Xp[v].cols() != d)
            throw InputError("node " + std::to_string(v) +
                             " has mismatched observation dimension");
        if (!X[v].allFinite() || !Xp[v].allFinite())
            throw InputError("node " + std::to_string(v) +
                             " has non-finite observations");
    }
}

Matrix NodeSampleSet::pooled() const {
    const int N = num_nodes();
    Matrix out(static_cast<Eigen::Index>(N) * (n() + n_prime()), dim());
    Eigen::Index row = 0;
    for (const Matrix& x : X) {
        out.middleRows(row, x.rows()) = x;
        row += x.rows();
    }
    for (const Matrix& x : Xp) {
        out.middleRows(row, x.rows()) = x;
        row += x.rows();
    }
    return out;
}

NodeSampleSet NodeSampleSet::swapped() const { return {Xp, X}; }

NodeSampleSet permute_columns(const NodeSampleSet& s, const std::vector<int>& tau) {
    const int n = s.n();
    const int np = s.n_prime();
    const int total = n + np;
    if (static_cast<int>(tau.size()) != total)
        throw InputError("permutation has " + std::to_string(tau.size()) +
                         " entries, expected " + std::to_string(total));
    std::vector<char> seen(total, 0);
    for (int j : tau) {
        if (j < 0 || j >= total || seen[j])
            throw InputError("not a permutation of the pooled index set");
        seen[j] = 1;
    }
    NodeSampleSet out;
    const int N = s.num_nodes();
    out.X.reserve(N);
    out.Xp.reserve(N);
    for (int v = 0; v < N; ++v) {
        Matrix nx(n, s.dim()), nxp(np, s.dim());
        for (int k = 0; k < total; ++k) {
            const int j = tau[k];
            const auto row = j < n ? s.X[v].row(j) : s.Xp[v].row(j - n);
            if (k < n)
                nx.row(k) = row;
            else
                nxp.row(k - n) = row;
        }
        out.X.push_back(std::move(nx));
        out.Xp.push_back(std::move(nxp));
    }
    return out;
}

} // namespace ctst
