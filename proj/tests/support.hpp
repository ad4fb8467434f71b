#pragma once

// Shared helpers for unit and acceptance tests.

#include <vector>

#include "robzero/assembly.hpp"
#include "robzero/gen.hpp"
#include "robzero/obstruction.hpp"
#include "oracle.hpp"

namespace robzero::testing {

// Column source over an explicit small matrix (columns in stream order).
class VectorSource : public ColumnSource {
public:
    explicit VectorSource(std::vector<StreamedColumn> cols) : cols_(std::move(cols)) {}
    std::optional<StreamedColumn> next() override {
        if (pos_ >= cols_.size()) return std::nullopt;
        return cols_[pos_++];
    }

private:
    std::vector<StreamedColumn> cols_;
    std::size_t pos_ = 0;
};

// A field whose magnitude landscape is a given positive scalar: f = (u, 0, ..., 0).
// The vertex approximation is constantly e_1, so every level is simplicial and
// filtration values equal u.
inline SampledField scalar_landscape(const GridDomain& grid, int n, CounterRng& rng) {
    SampledField f{grid, n, {}, 0.0, Norm::linf};
    f.values.assign(static_cast<std::size_t>(grid.vertex_count()) * n, 0.0);
    for (VertexId v = 0; v < grid.vertex_count(); ++v)
        f.values[static_cast<std::size_t>(v) * n] = 0.25 + rng.next_unit();
    f.alpha = 1e-9; // levels start at the smallest magnitude
    double inc = f.max_edge_increment();
    f.alpha = std::max(inc * 1e-6, 1e-12);
    return f;
}

// Dense mpz matrix of the coboundaries of the table prefix with rank <= r.
// Rows are indexed densely in first-seen order via `rows`.
inline oracle::Mat dense_prefix(const ColumnTable& table, const SimplicialComplex& cx,
                                std::int32_t max_rank,
                                std::unordered_map<Row, std::int64_t>& rows) {
    oracle::Mat m;
    TableSource src(table, cx, max_rank);
    while (auto col = src.next()) {
        std::vector<std::pair<std::int64_t, int>> ent;
        for (auto [row, c] : col->entries) {
            auto [it, fresh] = rows.emplace(row, static_cast<std::int64_t>(rows.size()));
            ent.emplace_back(it->second, c);
        }
        std::vector<mpz_class> dense;
        for (auto [r, c] : ent) {
            if (static_cast<std::size_t>(r) >= dense.size()) dense.resize(r + 1, 0);
            dense[r] += c;
        }
        m.push_back(std::move(dense));
    }
    return m;
}

} // namespace robzero::testing
