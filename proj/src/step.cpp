#include "nlrom/step.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace nlrom {

namespace {

struct ModalProbe {
    const ForceEvaluator& force;
    const MatrixXd& V;
    int count = 0;

    VectorXd operator()(const VectorXd& q) {
        ++count;
        return V.transpose() * force(V * q);
    }
};

VectorXd unit(int N, std::initializer_list<std::pair<int, double>> parts) {
    VectorXd q = VectorXd::Zero(N);
    for (auto [i, c] : parts) q(i) += c;
    return q;
}

void fill_h(DenseTensor& h, int k, int a, int b, int c, double v) {
    std::vector<int> idx{a, b, c};
    std::sort(idx.begin(), idx.end());
    do {
        h.at({k, idx[0], idx[1], idx[2]}) = v;
    } while (std::next_permutation(idx.begin(), idx.end()));
}

}  // namespace

StepResult step_identify(const ForceEvaluator& force, const MatrixXd& V, const MatrixXd& M,
                         const StepPlan& plan, double symmetry_tol) {
    const int N = int(V.cols());
    if (plan.lambda.size() != N) throw std::invalid_argument("one amplitude per mode is required");
    for (int p = 0; p < N; ++p)
        if (!(plan.lambda(p) > 0)) throw NumericalError("identification system is singular: amplitude must be positive");
    if (M.rows() != V.rows()) throw std::invalid_argument("mass matrix does not match eigenvectors");
    double orth = (V.transpose() * M * V - MatrixXd::Identity(N, N)).norm();
    if (orth > 1e-8 * N) throw std::invalid_argument("eigenvectors are not mass normalised");

    ModalProbe F{force, V};
    DenseTensor g(N, 3), h(N, 4);
    const VectorXd& lam = plan.lambda;

    std::vector<VectorXd> hiii(N);
    for (int p = 0; p < N; ++p) {
        const double l = lam(p);
        VectorXd fp = F(unit(N, {{p, l}})), fm = F(unit(N, {{p, -l}}));
        VectorXd gpp = (fp + fm) / (2 * l * l);
        VectorXd hppp = (fp - fm) / (2 * l * l * l);
        hiii[p] = hppp;
        for (int k = 0; k < N; ++k) {
            g.at({k, p, p}) = gpp(k);
            if (plan.cubic) h.at({k, p, p, p}) = hppp(k);
        }
    }

    // h_iij and h_ijj per pair, needed by the triples
    std::vector<std::vector<VectorXd>> hiij(N, std::vector<VectorXd>(N)), hijj(N, std::vector<VectorXd>(N));
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) {
            const double l = std::min(lam(i), lam(j));
            VectorXd fpp = F(unit(N, {{i, l}, {j, l}})), fmm = F(unit(N, {{i, -l}, {j, -l}}));
            VectorXd fpm = F(unit(N, {{i, l}, {j, -l}})), fmp = F(unit(N, {{i, -l}, {j, l}}));
            VectorXd qp = (fpp + fmm) / 2, qm = (fpm + fmp) / 2;
            VectorXd cp = (fpp - fmm) / 2, cm = (fpm - fmp) / 2;
            VectorXd gij = (qp - qm) / (4 * l * l);
            for (int k = 0; k < N; ++k) g.at({k, i, j}) = g.at({k, j, i}) = gij(k);
            if (!plan.cubic) continue;
            const double l3 = l * l * l;
            hijj[i][j] = ((cp + cm) / (2 * l3) - hiii[i]) / 3.0;
            hiij[i][j] = ((cp - cm) / (2 * l3) - hiii[j]) / 3.0;
            for (int k = 0; k < N; ++k) {
                fill_h(h, k, i, j, j, hijj[i][j](k));
                fill_h(h, k, i, i, j, hiij[i][j](k));
            }
        }

    if (plan.cubic)
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j)
                for (int l_ = j + 1; l_ < N; ++l_) {
                    const double l = std::min({lam(i), lam(j), lam(l_)});
                    VectorXd fp = F(unit(N, {{i, l}, {j, l}, {l_, l}}));
                    VectorXd fm = F(unit(N, {{i, -l}, {j, -l}, {l_, -l}}));
                    VectorXd c = (fp - fm) / (2 * l * l * l);
                    VectorXd known = hiii[i] + hiii[j] + hiii[l_] +
                                     3.0 * (hiij[i][j] + hijj[i][j] + hiij[i][l_] + hijj[i][l_] +
                                            hiij[j][l_] + hijj[j][l_]);
                    VectorXd hijl = (c - known) / 6.0;
                    for (int k = 0; k < N; ++k) fill_h(h, k, i, j, l_, hijl(k));
                }

    StepResult res;
    res.lambda = lam;
    res.symmetry.quad = check_symmetry(g, symmetry_tol);
    res.symmetry.cubic = check_symmetry(h, symmetry_tol);
    res.symmetry.pass = res.symmetry.quad.pass && res.symmetry.cubic.pass;
    if (!res.symmetry.pass) {
        std::ostringstream os;
        os << "identified tensors violate index symmetry (quadratic " << res.symmetry.quad.max_violation
           << ", cubic " << res.symmetry.cubic.max_violation
           << "): force may be non-polynomial or non-conservative";
        res.warnings.push_back(os.str());
    }
    res.g = symmetrize<3>(g);
    res.h = symmetrize<4>(h);
    res.g.prune(1e-12);
    res.h.prune(1e-12);

    // predicted vs evaluated force at a combination not used above
    double worst = 0.0;
    for (int t = 0; t < 2; ++t) {
        VectorXd q(N);
        for (int p = 0; p < N; ++p) q(p) = lam(p) * std::cos(1.3 * p + 0.7 * t + 0.4) * (t ? -0.8 : 0.9);
        VectorXd f = F(q);
        VectorXd pred = quad_apply(res.g, q, q);
        if (plan.cubic) pred += cubic_apply(res.h, q, q, q);
        double s = f.norm();
        worst = std::max(worst, s > 0 ? (f - pred).norm() / s : pred.norm());
    }
    res.check_residual = worst;
    res.evaluations = F.count;
    return res;
}

VectorXd choose_lambda(const ForceEvaluator& force, const MatrixXd& V, const MatrixXd& K, double lo,
                       double hi) {
    const int N = int(V.cols());
    const double target = std::sqrt(lo * hi);
    VectorXd out = VectorXd::Constant(N, std::numeric_limits<double>::quiet_NaN());
    std::vector<int> inert;
    for (int p = 0; p < N; ++p) {
        VectorXd phi = V.col(p);
        const double lin = (K * phi).norm();
        if (lin == 0) throw NumericalError("band unreachable: mode " + std::to_string(p + 1) + " has zero stiffness");
        auto ratio = [&](double l) { return force(l * phi).norm() / (l * lin); };

        // no self-nonlinearity along this mode: any amplitude identifies it exactly
        if (ratio(1e-2) == 0.0 && ratio(1.0) == 0.0 && ratio(1e2) == 0.0) {
            inert.push_back(p);
            continue;
        }
        double a = 1.0, ra = ratio(a);
        int guard = 0;
        while (ra < target && guard++ < 40) {
            a *= 10;
            ra = ratio(a);
        }
        double b = a, rb = ra;
        guard = 0;
        while (rb >= target && guard++ < 80) {
            b /= 10;
            rb = ratio(b);
        }
        if (!(ra >= target) || !(rb < target))
            throw NumericalError("band unreachable: nonlinear force ratio never reaches [" + std::to_string(lo) +
                                 ", " + std::to_string(hi) + "] for mode " + std::to_string(p + 1));
        // log bisection between b (below) and a (above)
        double la = std::log(a), lb = std::log(b);
        for (int it = 0; it < 100; ++it) {
            double lm = 0.5 * (la + lb), r = ratio(std::exp(lm));
            if (r >= target)
                la = lm;
            else
                lb = lm;
            if (la - lb < 1e-6) break;
        }
        double l = std::exp(0.5 * (la + lb)), r = ratio(l);
        if (r < lo || r > hi)
            throw NumericalError("band unreachable for mode " + std::to_string(p + 1));
        out(p) = l;
    }
    // inert modes borrow the geometric mean of the others, or 1
    double logsum = 0.0;
    int count = 0;
    for (int p = 0; p < N; ++p)
        if (std::isfinite(out(p))) {
            logsum += std::log(out(p));
            ++count;
        }
    const double fallback = count ? std::exp(logsum / count) : 1.0;
    for (int p : inert) out(p) = fallback;
    return out;
}

}  // namespace nlrom
