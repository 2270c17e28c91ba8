#pragma once

#include "epiwarn/learners.hpp"

namespace epiwarn {

double knn_vote(const Rows& x, const std::vector<Label>& y, const std::vector<std::size_t>& pool,
                const std::vector<double>& query, int k);

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma);

}  // namespace epiwarn
