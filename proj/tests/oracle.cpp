#include "oracle.hpp"

#include <algorithm>

namespace robzero::oracle {

namespace {

std::int64_t lowest_row(const std::vector<mpz_class>& col) {
    for (std::int64_t r = static_cast<std::int64_t>(col.size()) - 1; r >= 0; --r)
        if (sgn(col[r]) != 0) return r;
    return -1;
}

void axpy(std::vector<mpz_class>& dst, const mpz_class& c, const std::vector<mpz_class>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
}

} // namespace

Mat hnf(const Mat& m, std::int64_t rows, Mat* u) {
    Mat h = m;
    for (auto& col : h) col.resize(static_cast<std::size_t>(rows), 0);
    Mat uu;
    if (u != nullptr) {
        uu.assign(h.size(), std::vector<mpz_class>(h.size(), 0));
        for (std::size_t j = 0; j < h.size(); ++j) uu[j][j] = 1;
    }
    // Reduce from the bottom row up, keeping one pivot per row.
    std::vector<std::size_t> active(h.size());
    for (std::size_t j = 0; j < h.size(); ++j) active[j] = j;
    std::vector<std::size_t> placed;
    for (std::int64_t row = rows - 1; row >= 0 && !active.empty(); --row) {
        // gather active columns with lowest nonzero at this row
        std::vector<std::size_t> hits;
        for (std::size_t j : active)
            if (lowest_row(h[j]) == row) hits.push_back(j);
        if (hits.empty()) continue;
        // chain-gcd them down to one pivot column
        while (hits.size() > 1) {
            std::sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
                return cmp(abs(h[a][row]), abs(h[b][row])) < 0;
            });
            std::size_t piv = hits[0];
            bool again = false;
            for (std::size_t t = 1; t < hits.size(); ++t) {
                mpz_class q = h[hits[t]][row] / h[piv][row];
                if (sgn(q) != 0) {
                    axpy(h[hits[t]], -q, h[piv]);
                    if (u != nullptr) axpy(uu[hits[t]], -q, uu[piv]);
                }
                if (sgn(h[hits[t]][row]) != 0) again = true;
            }
            std::vector<std::size_t> next{piv};
            for (std::size_t t = 1; t < hits.size(); ++t)
                if (sgn(h[hits[t]][row]) != 0) next.push_back(hits[t]);
            hits = std::move(next);
            if (!again && hits.size() > 1) {
                // remainders all vanished: everything but the pivot moved up
                break;
            }
        }
        std::size_t piv = hits[0];
        if (sgn(h[piv][row]) < 0) {
            for (auto& x : h[piv]) x = -x;
            if (u != nullptr)
                for (auto& x : uu[piv]) x = -x;
        }
        placed.push_back(piv);
        active.erase(std::remove(active.begin(), active.end(), piv), active.end());
    }
    if (u != nullptr) *u = std::move(uu);
    return h;
}

namespace {

bool solve_with_hnf(const Mat& h, std::int64_t rows, const std::vector<mpz_class>& a) {
    std::vector<mpz_class> r = a;
    r.resize(static_cast<std::size_t>(rows), 0);
    // eliminate bottom-up with the pivot columns
    for (std::int64_t row = rows - 1; row >= 0; --row) {
        if (sgn(r[row]) == 0) continue;
        const std::vector<mpz_class>* piv = nullptr;
        for (const auto& col : h)
            if (lowest_row(col) == row) {
                piv = &col;
                break;
            }
        if (piv == nullptr) return false;
        mpz_class rem = r[row] % (*piv)[row];
        if (sgn(rem) != 0) return false;
        mpz_class q = r[row] / (*piv)[row];
        axpy(r, -q, *piv);
    }
    return true;
}

} // namespace

bool solvable(const Mat& m, std::int64_t rows, const std::vector<mpz_class>& a) {
    return solve_with_hnf(hnf(m, rows), rows, a);
}

Solver::Solver(const Mat& m, std::int64_t rows) : h_(hnf(m, rows)), rows_(rows) {}

bool Solver::solvable(const std::vector<mpz_class>& a) const { return solve_with_hnf(h_, rows_, a); }

Mat kernel(const Mat& m, std::int64_t rows) {
    Mat u;
    Mat h = hnf(m, rows, &u);
    Mat out;
    for (std::size_t j = 0; j < h.size(); ++j)
        if (lowest_row(h[j]) < 0) out.push_back(u[j]);
    return out;
}

} // namespace robzero::oracle
