#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ctst/model_selection.hpp"

namespace ctst {

enum class Method { Ctst, Pool, Rulsif, Ulsif, MmdMedian };

Method method_from_string(const std::string& name);
std::string method_name(Method m);

// One bundle of knobs shared by the CLI and the test orchestration. Every
// random choice anywhere downstream is keyed off `seed`.
struct RunConfig {
    double alpha = 0.1;
    int n_perm = 500;
    double pi_star = 0.05;
    std::uint64_t seed = 0;
    int anchors_max = 256;
    double tol = 1e-6;
    int max_iter = 1000;
    double eigen_floor = 1e-9;
    int cv_folds = 5;
    int threads = 0; // 0 = hardware concurrency
    Method method = Method::Ctst;
    std::optional<HyperGrid> grid_override;

    // Effective relative-ratio parameter: the ULSIF method pins alpha to 0.
    double effective_alpha() const {
        return method == Method::Ulsif ? 0.0 : alpha;
    }

    void validate() const;
};

} // namespace ctst
