#include "nlrom/tensor.hpp"

#include <cmath>

namespace nlrom {

DenseTensor::DenseTensor(int n_, int rank_) : n(n_), rank(rank_) {
    std::size_t s = 1;
    for (int a = 0; a < rank; ++a) s *= std::size_t(n);
    data.assign(s, 0.0);
}

namespace {

std::size_t flat_index(int n, const std::vector<int>& idx) {
    std::size_t f = 0;
    for (int i : idx) {
        if (i < 0 || i >= n) throw std::out_of_range("tensor index out of range");
        f = f * std::size_t(n) + std::size_t(i);
    }
    return f;
}

// Walks every index tuple of length rank over n values.
template <typename F>
void for_each_index(int n, int rank, F&& f) {
    std::vector<int> idx(rank, 0);
    if (n == 0) return;
    while (true) {
        f(idx);
        int a = rank - 1;
        while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
        if (a < 0) break;
    }
}

}  // namespace

double& DenseTensor::at(const std::vector<int>& idx) {
    if (int(idx.size()) != rank) throw std::invalid_argument("tensor rank mismatch");
    return data[flat_index(n, idx)];
}

double DenseTensor::at(const std::vector<int>& idx) const {
    if (int(idx.size()) != rank) throw std::invalid_argument("tensor rank mismatch");
    return data[flat_index(n, idx)];
}

SymmetryReport check_symmetry(const DenseTensor& t, double tol) {
    SymmetryReport rep;
    double scale = 0.0;
    for (double v : t.data) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return rep;

    for_each_index(t.n, t.rank, [&](const std::vector<int>& idx) {
        std::vector<int> p = idx;
        std::sort(p.begin(), p.end());
        double v = t.at(idx);
        do {
            // each unordered pair is visited twice; keep the lexicographic one
            if (!(idx < p)) continue;
            double d = std::abs(v - t.at(p)) / scale;
            if (d > rep.max_violation) rep.max_violation = d;
            if (d > tol) rep.violations.push_back({idx, p, d});
        } while (std::next_permutation(p.begin(), p.end()));
    });
    rep.pass = rep.max_violation <= tol;
    return rep;
}

template <int R>
SymTensor<R> symmetrize(const DenseTensor& t) {
    if (t.rank != R) throw std::invalid_argument("tensor rank mismatch");
    SymTensor<R> out(t.n);
    for_each_index(t.n, R, [&](const std::vector<int>& idx) {
        if (!std::is_sorted(idx.begin(), idx.end())) return;
        std::vector<int> p = idx;
        double sum = 0.0;
        int count = 0;
        do {
            sum += t.at(p);
            ++count;
        } while (std::next_permutation(p.begin(), p.end()));
        typename SymTensor<R>::Key k;
        std::copy(idx.begin(), idx.end(), k.begin());
        out.set(k, sum / count);
    });
    return out;
}

template SymTensor<3> symmetrize<3>(const DenseTensor&);
template SymTensor<4> symmetrize<4>(const DenseTensor&);

namespace {

template <int R>
DenseTensor dense_of(const SymTensor<R>& s) {
    DenseTensor d(s.dim(), R);
    d.data = s.dense();
    return d;
}

}  // namespace

DenseTensor to_dense(const QuadTensor& g) { return dense_of(g); }
DenseTensor to_dense(const CubicTensor& h) { return dense_of(h); }

}  // namespace nlrom
