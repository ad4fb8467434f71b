#include "robzero/field.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace robzero {

double SampledField::max_edge_increment() const {
    SimplicialComplex cx(grid);
    double worst = 0.0;
    std::vector<double> diff(n);
    cx.for_each_simplex(1, [&](const Simplex& e) {
        VertexId vs[kMaxDim + 1];
        cx.vertices(e, vs);
        const double* a = at(vs[0]);
        const double* b = at(vs[1]);
        for (int i = 0; i < n; ++i) diff[i] = a[i] - b[i];
        worst = std::max(worst, norm_value(diff.data(), n, p));
    });
    return worst;
}

double SampledField::min_magnitude() const {
    double m = norm_value(at(0), n, p);
    for (VertexId v = 1; v < grid.vertex_count(); ++v) m = std::min(m, norm_value(at(v), n, p));
    return m;
}

double SampledField::max_magnitude() const {
    double m = 0.0;
    for (VertexId v = 0; v < grid.vertex_count(); ++v) m = std::max(m, norm_value(at(v), n, p));
    return m;
}

namespace {

struct Header {
    Topology topo = Topology::cube;
    int m = 0;
    std::vector<int> res;
    int n = 0;
    double alpha = 0.0;
    Norm p = Norm::linf;
    bool binary = false;
};

Header read_header(std::istream& in, const std::string& path) {
    Header h;
    std::string line;
    auto fail = [&](const std::string& what) {
        throw InputError(path + ": " + what);
    };
    auto next = [&](const char* key) -> std::istringstream {
        if (!std::getline(in, line)) fail(std::string("missing header line '") + key + "'");
        std::istringstream ss(line);
        std::string k;
        ss >> k;
        if (k != key) fail("expected '" + std::string(key) + "', got '" + k + "'");
        return ss;
    };
    {
        auto ss = next("robf");
        int version = 0;
        ss >> version;
        if (version != 1) fail("unsupported format version");
    }
    {
        auto ss = next("topology");
        std::string t;
        ss >> t;
        if (t == "cube") h.topo = Topology::cube;
        else if (t == "torus") h.topo = Topology::torus;
        else fail("unknown topology '" + t + "'");
    }
    {
        auto ss = next("dims");
        ss >> h.m;
        if (h.m < 1 || h.m > kMaxDim) fail("bad dims");
    }
    {
        auto ss = next("grid");
        h.res.resize(h.m);
        for (int j = 0; j < h.m; ++j)
            if (!(ss >> h.res[j])) fail("grid line too short");
    }
    {
        auto ss = next("codomain");
        ss >> h.n;
        if (h.n < 1) fail("bad codomain");
    }
    {
        auto ss = next("alpha");
        ss >> h.alpha;
        if (!(h.alpha > 0.0) || !std::isfinite(h.alpha)) fail("alpha must be positive and finite");
    }
    {
        auto ss = next("norm");
        std::string t;
        ss >> t;
        if (t == "1") h.p = Norm::l1;
        else if (t == "2") h.p = Norm::l2;
        else if (t == "inf") h.p = Norm::linf;
        else fail("unknown norm '" + t + "'");
    }
    {
        auto ss = next("data");
        std::string t;
        ss >> t;
        if (t == "text") h.binary = false;
        else if (t == "binary") h.binary = true;
        else fail("unknown data encoding '" + t + "'");
    }
    return h;
}

void write_header(std::ostream& out, Topology topo, int m, const int* res, int n, double alpha,
                  Norm p, bool binary) {
    char buf[64];
    out << "robf 1\n";
    out << "topology " << (topo == Topology::torus ? "torus" : "cube") << "\n";
    out << "dims " << m << "\n";
    out << "grid";
    for (int j = 0; j < m; ++j) out << " " << res[j];
    out << "\n";
    out << "codomain " << n << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", alpha);
    out << "alpha " << buf << "\n";
    out << "norm " << norm_name(p) << "\n";
    out << "data " << (binary ? "binary" : "text") << "\n";
}

void read_body(std::istream& in, const std::string& path, bool binary, std::int64_t vcount, int n,
               std::vector<double>& values) {
    values.resize(static_cast<std::size_t>(vcount) * n);
    if (binary) {
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(double)));
        if (in.gcount() != static_cast<std::streamsize>(values.size() * sizeof(double)))
            throw InputError(path + ": binary body truncated");
    } else {
        for (std::int64_t v = 0; v < vcount; ++v) {
            std::string line;
            // Skip blank lines between records but demand n values per vertex.
            do {
                if (!std::getline(in, line)) throw InputError(path + ": text body truncated");
            } while (line.find_first_not_of(" \t\r") == std::string::npos);
            std::istringstream ss(line);
            for (int i = 0; i < n; ++i)
                if (!(ss >> values[static_cast<std::size_t>(v) * n + i]))
                    throw InputError(path + ": vertex record has fewer than codomain components");
            double extra;
            if (ss >> extra) throw InputError(path + ": vertex record has more than codomain components");
        }
    }
    for (double x : values)
        if (!std::isfinite(x)) throw InputError(path + ": non-finite value in body");
}

void write_body(std::ostream& out, bool binary, std::int64_t vcount, int n, const std::vector<double>& values) {
    if (binary) {
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
    } else {
        char buf[64];
        for (std::int64_t v = 0; v < vcount; ++v) {
            for (int i = 0; i < n; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", values[static_cast<std::size_t>(v) * n + i]);
                out << (i ? " " : "") << buf;
            }
            out << "\n";
        }
    }
}

} // namespace

SampledField load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open");
    Header h = read_header(in, path);
    SampledField f{GridDomain(h.m, h.res, h.topo), h.n, {}, h.alpha, h.p};
    read_body(in, path, h.binary, f.grid.vertex_count(), h.n, f.values);
    return f;
}

void save_field(const SampledField& field, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    std::vector<int> res(field.grid.dim());
    for (int j = 0; j < field.grid.dim(); ++j) res[j] = field.grid.resolution(j);
    write_header(out, field.grid.topology(), field.grid.dim(), res.data(), field.n, field.alpha,
                 field.p, binary);
    write_body(out, binary, field.grid.vertex_count(), field.n, field.values);
    if (!out) throw InputError(path + ": write failed");
}

ObjectiveField load_objective(const std::string& path) {
    SampledField f = load_field(path);
    if (f.n != 1) throw InputError(path + ": objective files must have codomain 1");
    return ObjectiveField{std::move(f.grid), std::move(f.values), f.alpha};
}

void save_objective(const ObjectiveField& field, const std::string& path, bool binary) {
    std::vector<int> res(field.grid.dim());
    for (int j = 0; j < field.grid.dim(); ++j) res[j] = field.grid.resolution(j);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    write_header(out, field.grid.topology(), field.grid.dim(), res.data(), 1, field.alpha,
                 Norm::linf, binary);
    write_body(out, binary, field.grid.vertex_count(), 1, field.values);
    if (!out) throw InputError(path + ": write failed");
}

} // namespace robzero
