#pragma once

#include <cstdint>

#include "robzero/common.hpp"

namespace robzero {

// Boundary of the cross-polytope in R^n: vertices are the signed unit vectors
// +-e_j, a vertex set spans a simplex iff it contains no antipodal pair.
// Fixed vertex order: e_1 < -e_1 < e_2 < -e_2 < ...
class SpherePolytope {
public:
    explicit SpherePolytope(int n) : n_(n) {}

    int codim_dim() const { return n_; }
    int vertex_count() const { return 2 * n_; }

    static int rank(int axis, int sign) { return 2 * axis + (sign < 0 ? 1 : 0); }
    static int axis_of(int r) { return r >> 1; }
    static int sign_of(int r) { return (r & 1) ? -1 : +1; }
    static bool antipodal(int r1, int r2) { return r1 != r2 && (r1 >> 1) == (r2 >> 1); }

    // Rank sequence of the fixed top simplex [e_1, ..., e_n] whose
    // characteristic cochain generates H^(n-1).
    bool is_fixed_top_rank(int position, int r) const { return r == 2 * position; }

private:
    int n_;
};

} // namespace robzero
