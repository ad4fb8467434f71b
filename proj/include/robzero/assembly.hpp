#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "robzero/ez.hpp"
#include "robzero/filtration.hpp"
#include "robzero/reduction.hpp"

namespace robzero {

inline Row face_row(const CubeFace& f) { return (static_cast<Row>(f.axes) << 40) | f.base; }

// Every (n-1)-cell of the active structure, sorted by (filtration rank,
// deterministic id); table positions double as column sort ids.
struct ColumnTable {
    bool cubical = false;
    std::vector<Simplex> simplices;
    std::vector<CubeFace> faces;
    std::vector<std::int32_t> ranks;

    std::size_t size() const { return ranks.size(); }
    Row row_key(std::size_t i, const SimplicialComplex& cx) const {
        return cubical ? face_row(faces[i]) : simplex_sort_id(cx, simplices[i]);
    }
};

ColumnTable build_table(const Filtration& filt, int k);

// Streams coboundary columns of a table in order, optionally re-keying rows
// (used by the optimization module to order rows by objective value).
class TableSource : public ColumnSource {
public:
    TableSource(const ColumnTable& table, const SimplicialComplex& cx,
                std::int32_t rank_cutoff = INT32_MAX, std::function<Row(Row)> row_map = {})
        : t_(&table), cx_(&cx), cutoff_(rank_cutoff), row_map_(std::move(row_map)) {}

    std::optional<StreamedColumn> next() override;

private:
    const ColumnTable* t_;
    const SimplicialComplex* cx_;
    std::size_t pos_ = 0;
    std::int32_t cutoff_;
    std::function<Row(Row)> row_map_;
};

// N-matrix source for persistent generators: coboundaries of (n-2)-cells with
// rows given by the position of each (n-1)-cell in the M column table.
class GeneratorNSource : public ColumnSource {
public:
    GeneratorNSource(const ColumnTable& ntable, const SimplicialComplex& cx,
                     const std::unordered_map<std::int64_t, std::int64_t>& mpos)
        : t_(&ntable), cx_(&cx), mpos_(&mpos) {}

    std::optional<StreamedColumn> next() override;

private:
    const ColumnTable* t_;
    const SimplicialComplex* cx_;
    const std::unordered_map<std::int64_t, std::int64_t>* mpos_;
    std::size_t pos_ = 0;
};

class Pullback; // obstruction.hpp

// delta(ybar) expressed over the n-cells of the active structure.
std::vector<std::pair<Row, int>> primary_rhs(const Filtration& filt, const Pullback& pb,
                                             const EzOps& ez,
                                             const std::function<Row(Row)>& row_map = {});

} // namespace robzero
