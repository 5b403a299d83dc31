#ifndef NLROM_TENSOR_HPP
#define NLROM_TENSOR_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <vector>

namespace nlrom {

/// Fully symmetric tensor of rank R over n indices, stored sparsely by its
/// sorted index tuple. The stored value is the symmetric component, so
/// T(1,0,0) == T(0,0,1) == T(0,1,0) by construction.
template <int R, typename Scalar = double>
class SymTensor {
public:
    using Key = std::array<int, R>;

    SymTensor() = default;
    explicit SymTensor(int n) : n_(n) {}

    int dim() const { return n_; }
    std::size_t nnz() const { return entries_.size(); }
    const std::map<Key, Scalar>& entries() const { return entries_; }

    static Key canonical(Key k) {
        std::sort(k.begin(), k.end());
        return k;
    }

    Scalar operator()(const Key& k) const {
        auto it = entries_.find(canonical(k));
        return it == entries_.end() ? Scalar(0) : it->second;
    }

    void set(const Key& k, Scalar v) {
        check(k);
        Key c = canonical(k);
        if (v == Scalar(0))
            entries_.erase(c);
        else
            entries_[c] = v;
    }

    void add(const Key& k, Scalar v) {
        check(k);
        Key c = canonical(k);
        Scalar s = (*this)(c) + v;
        set(c, s);
    }

    Scalar max_abs() const {
        double m = 0.0;
        for (const auto& [k, v] : entries_) m = std::max(m, double(std::abs(v)));
        return Scalar(m);
    }

    /// Distinct index permutations of a canonical key.
    static std::vector<Key> permutations(Key k) {
        std::vector<Key> out;
        std::sort(k.begin(), k.end());
        do {
            out.push_back(k);
        } while (std::next_permutation(k.begin(), k.end()));
        return out;
    }

    /// out_s = sum T(s,i,j,..) v1_i v2_j ..., with R-1 argument vectors.
    template <typename Vec>
    Eigen::Matrix<typename Vec::Scalar, Eigen::Dynamic, 1>
    contract(const std::array<const Vec*, R - 1>& args) const {
        using S = typename Vec::Scalar;
        Eigen::Matrix<S, Eigen::Dynamic, 1> out = Eigen::Matrix<S, Eigen::Dynamic, 1>::Zero(n_);
        for (const auto& [key, val] : entries_) {
            Key p = key;
            do {
                S prod = S(val);
                for (int a = 1; a < R; ++a) prod *= (*args[a - 1])(p[a]);
                out(p[0]) += prod;
            } while (std::next_permutation(p.begin(), p.end()));
        }
        return out;
    }

    /// Dense row-major copy with n^R entries.
    std::vector<Scalar> dense() const {
        std::vector<Scalar> d(pow_n(), Scalar(0));
        for (const auto& [key, val] : entries_)
            for (const Key& p : permutations(key)) d[flat(p)] = val;
        return d;
    }

    std::size_t pow_n() const {
        std::size_t s = 1;
        for (int a = 0; a < R; ++a) s *= std::size_t(n_);
        return s;
    }

    std::size_t flat(const Key& k) const {
        std::size_t f = 0;
        for (int a = 0; a < R; ++a) f = f * std::size_t(n_) + std::size_t(k[a]);
        return f;
    }

    /// Drops entries below tol * max |entry|.
    void prune(double tol) {
        double cut = tol * double(std::abs(max_abs()));
        for (auto it = entries_.begin(); it != entries_.end();) {
            if (double(std::abs(it->second)) <= cut)
                it = entries_.erase(it);
            else
                ++it;
        }
    }

private:
    void check(const Key& k) const {
        for (int i : k)
            if (i < 0 || i >= n_) throw std::out_of_range("tensor index out of range");
    }

    int n_ = 0;
    std::map<Key, Scalar> entries_;
};

using QuadTensor = SymTensor<3>;
using CubicTensor = SymTensor<4>;

/// G(x, y) for the quadratic tensor.
template <typename Vec>
auto quad_apply(const QuadTensor& g, const Vec& x, const Vec& y) {
    return g.contract<Vec>({&x, &y});
}

/// H(x, y, z) for the cubic tensor.
template <typename Vec>
auto cubic_apply(const CubicTensor& h, const Vec& x, const Vec& y, const Vec& z) {
    return h.contract<Vec>({&x, &y, &z});
}

/// Raw (not necessarily symmetric) dense tensor, used for user-supplied or
/// identified entries before symmetrisation.
struct DenseTensor {
    int n = 0;
    int rank = 0;
    std::vector<double> data;

    DenseTensor() = default;
    DenseTensor(int n_, int rank_);
    double& at(const std::vector<int>& idx);
    double at(const std::vector<int>& idx) const;
};

struct SymmetryViolation {
    std::vector<int> index;
    std::vector<int> permuted;
    double magnitude = 0.0;
};

struct SymmetryReport {
    double max_violation = 0.0;  // relative to the largest entry
    std::vector<SymmetryViolation> violations;
    bool pass = true;
};

/// Compares every entry with all its index permutations.
SymmetryReport check_symmetry(const DenseTensor& t, double tol);

/// Averages each entry over its index permutations.
template <int R>
SymTensor<R> symmetrize(const DenseTensor& t);

DenseTensor to_dense(const QuadTensor& g);
DenseTensor to_dense(const CubicTensor& h);

}  // namespace nlrom

#endif
