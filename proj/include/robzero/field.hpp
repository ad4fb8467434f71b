#pragma once

#include <string>
#include <vector>

#include "robzero/grid.hpp"
#include "robzero/mag.hpp"

namespace robzero {

// Function values sampled at grid vertices, with a simplexwise Lipschitz
// constant alpha bounding the unknown continuous field between samples.
struct SampledField {
    GridDomain grid;
    int n = 0;                  // codomain dimension
    std::vector<double> values; // n components per vertex, vertex-major
    double alpha = 0.0;
    Norm p = Norm::linf;

    const double* at(VertexId v) const { return values.data() + static_cast<std::size_t>(v) * n; }
    double* at(VertexId v) { return values.data() + static_cast<std::size_t>(v) * n; }

    Mag magnitude(VertexId v) const { return Mag::of(at(v), n, p); }

    // Largest |f(u)-f(v)|_p over triangulation edges (all comparable in-cell
    // vertex pairs); used to sanity-check a declared alpha.
    double max_edge_increment() const;
    bool alpha_consistent() const { return max_edge_increment() <= alpha; }

    double min_magnitude() const;
    double max_magnitude() const;
};

// Scalar objective sampled on the same grid.
struct ObjectiveField {
    GridDomain grid;
    std::vector<double> values;
    double alpha = 0.0;

    double at(VertexId v) const { return values[static_cast<std::size_t>(v)]; }
};

// ROBF serialization, version 1.  Text or binary body, bit-exact round trip.
SampledField load_field(const std::string& path);
void save_field(const SampledField& field, const std::string& path, bool binary = true);

ObjectiveField load_objective(const std::string& path);
void save_objective(const ObjectiveField& field, const std::string& path, bool binary = true);

} // namespace robzero
