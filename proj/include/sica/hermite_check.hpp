#pragma once

#include <string>
#include <vector>

namespace sica::hermite {

// Agreement of one family of closed-form product expectations with
// Gauss-Hermite quadrature (1-D, or a tensor rule in 3-D for correlated
// arguments).
struct ProductCheck {
    std::string family;
    int cases = 0;
    double max_rel_error = 0.0; // |closed - quad| / max(1, |quad|)
    std::string worst;          // index tuple of the largest error
};

// All index tuples with total degree <= max_total_degree.
std::vector<ProductCheck> check_products(int max_total_degree = 12);

} // namespace sica::hermite
