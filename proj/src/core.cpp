#include "nlclaw/core.hpp"

#include <cmath>

namespace nlclaw {

Grid make_grid(int dim, int n, double length) {
    if (dim != 1 && dim != 2)
        throw unsupported_error("grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (n < 8)
        throw unsupported_error("grid: cells per axis must be >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
        throw unsupported_error("grid: length must be positive and finite");
    return Grid{dim, n, length};
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (!(a == b)) throw shape_error(std::string(what) + ": grids differ");
}

}  // namespace nlclaw
