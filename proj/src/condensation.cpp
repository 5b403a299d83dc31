#include "nlrom/condensation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace nlrom {

namespace {

bool newton(const PhysicalModel& model, const VectorXd& load, VectorXd& X, const NewtonOptions& opt) {
    const double scale = std::max(load.norm(), 1e-300);
    VectorXd Y = X;
    for (int it = 0; it < opt.max_iter; ++it) {
        VectorXd r = eval_internal_force(model, Y) - load;
        if (!r.allFinite()) return false;
        if (r.norm() <= opt.tol * scale || r.norm() == 0.0) {
            X = Y;
            return true;
        }
        Eigen::PartialPivLU<MatrixXd> lu(tangent_stiffness(model, Y));
        VectorXd dx = lu.solve(r);
        if (!dx.allFinite()) return false;
        Y -= dx;
    }
    VectorXd r = eval_internal_force(model, Y) - load;
    if (r.allFinite() && r.norm() <= 10 * opt.tol * scale) {
        X = Y;
        return true;
    }
    return false;
}

void master_basis(const PhysicalModel& model, const std::vector<int>& masters, MatrixXd& phi, VectorXd& omega) {
    check_masters(model.n, masters);
    int top = *std::max_element(masters.begin(), masters.end()) + 1;
    ModalModel lin = assemble_modal(PhysicalModel{model.n, model.mass, model.stiffness, QuadTensor(model.n),
                                                  CubicTensor(model.n)},
                                    top);
    phi.resize(model.n, masters.size());
    omega.resize(masters.size());
    for (size_t a = 0; a < masters.size(); ++a) {
        phi.col(a) = lin.V.col(masters[a]);
        omega(a) = lin.omega(masters[a]);
    }
}

// Monomials of degree 1..order in m variables.
std::vector<Exps> fit_basis(int m, int order) {
    std::vector<Exps> out;
    Exps e(m, 0);
    std::function<void(int, int)> rec = [&](int v, int left) {
        if (v == m - 1) {
            e[v] = left;
            out.push_back(e);
            return;
        }
        for (int k = left; k >= 0; --k) {
            e[v] = k;
            rec(v + 1, left - k);
        }
    };
    for (int d = 1; d <= order; ++d) rec(0, d);
    return out;
}

}  // namespace

VectorXd static_solve(const PhysicalModel& model, const VectorXd& load, const VectorXd& X0, const NewtonOptions& opt) {
    VectorXd X = X0;
    const VectorXd F0 = eval_internal_force(model, X0);
    double done = 0.0, step = 1.0;
    int halvings = 0;
    while (done < 1.0) {
        double s = std::min(1.0, done + step);
        VectorXd trial = X;
        if (newton(model, F0 + s * (load - F0), trial, opt)) {
            X = trial;
            done = s;
            step = std::min(1.0, 2.0 * step);
        } else {
            step *= 0.5;
            if (++halvings > opt.max_halvings) {
                std::ostringstream os;
                os << "static Newton solve diverged; last convergent load fraction " << done;
                throw NumericalError(os.str());
            }
        }
    }
    return X;
}

IceSamples ice_sample(const PhysicalModel& model, const std::vector<int>& masters,
                      const std::vector<VectorXd>& betas, const NewtonOptions& opt) {
    IceSamples out;
    out.masters = masters;
    master_basis(model, masters, out.phi, out.omega);
    const MatrixXd Mphi = model.mass * out.phi;

    std::vector<const IceSample*> solved;
    out.samples.reserve(betas.size());
    VectorXd last_good;
    for (const VectorXd& beta : betas) {
        if (beta.size() != int(masters.size())) throw std::invalid_argument("load factor size does not match masters");
        // warm start from the closest solved load
        VectorXd X0 = VectorXd::Zero(model.n);
        double best = beta.norm();
        for (const IceSample* s : solved) {
            double d = (s->beta - beta).norm();
            if (d < best) {
                best = d;
                X0 = s->X;
            }
        }
        IceSample s;
        s.beta = beta;
        try {
            s.X = static_solve(model, Mphi * beta, X0, opt);
        } catch (const NumericalError&) {
            std::ostringstream os;
            os << "static Newton solve diverged at beta = " << beta.transpose();
            if (last_good.size()) os << "; last convergent beta = " << last_good.transpose();
            throw NumericalError(os.str());
        }
        s.x_master = Mphi.transpose() * s.X;
        last_good = beta;
        out.samples.push_back(std::move(s));
        solved.push_back(&out.samples.back());
    }
    return out;
}

IceSamples ice_sample_target(const PhysicalModel& model, const std::vector<int>& masters, double amp_target,
                             int points, const NewtonOptions& opt) {
    const int m = int(masters.size());
    if (m > 2) throw std::invalid_argument("implicit condensation supports at most two masters");
    if (!(amp_target > 0)) throw std::invalid_argument("amplitude target must be positive");
    if (points < 3) throw std::invalid_argument("at least three load levels are required");
    MatrixXd phi;
    VectorXd omega;
    master_basis(model, masters, phi, omega);

    // per axis, the load level whose larger end response equals the target
    VectorXd bmax(m);
    for (int a = 0; a < m; ++a) {
        auto reach = [&](double b) {
            double worst = 0.0;
            for (double sgn : {1.0, -1.0}) {
                VectorXd beta = VectorXd::Zero(m);
                beta(a) = sgn * b;
                try {
                    worst = std::max(worst, std::abs(ice_sample(model, masters, {beta}, opt).samples[0].x_master(a)));
                } catch (const NumericalError&) {
                    return std::numeric_limits<double>::infinity();
                }
            }
            return worst;
        };
        double hi = amp_target * omega(a) * omega(a), lo = 0.0;
        int guard = 0;
        while (reach(hi) < amp_target && guard++ < 60) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            (reach(mid) < amp_target ? lo : hi) = mid;
        }
        bmax(a) = 0.5 * (lo + hi);
    }

    // outward ordering keeps warm starts close
    std::vector<double> levels;
    const int half = points / 2;
    levels.push_back(0.0);
    for (int k = 1; k <= half; ++k) {
        double t = double(k) / half;
        levels.push_back(t);
        levels.push_back(-t);
    }
    std::vector<VectorXd> betas;
    if (m == 1) {
        for (double t : levels) betas.push_back(VectorXd::Constant(1, t * bmax(0)));
    } else {
        for (double t1 : levels)
            for (double t2 : levels) betas.push_back(Eigen::Vector2d(t1 * bmax(0), t2 * bmax(1)));
    }
    return ice_sample(model, masters, betas, opt);
}

IceFit ice_fit(const IceSamples& s, int order) {
    const int m = int(s.masters.size());
    const int ns = int(s.samples.size());
    if (order < 1) throw std::invalid_argument("fit order must be at least 1");
    if (ns == 0) throw NumericalError("no samples to fit");
    const int n = int(s.samples[0].X.size());

    if (m == 1) {
        std::vector<std::pair<double, double>> bx;
        for (const auto& p : s.samples) bx.emplace_back(p.beta(0), p.x_master(0));
        std::sort(bx.begin(), bx.end());
        for (size_t k = 1; k < bx.size(); ++k)
            if (bx[k].first > bx[k - 1].first && !(bx[k].second > bx[k - 1].second))
                throw NumericalError("sample map from load to master coordinate is not invertible");
    }

    VectorXd scale(m);
    for (int a = 0; a < m; ++a) {
        double mx = 0.0;
        for (const auto& p : s.samples) mx = std::max(mx, std::abs(p.x_master(a)));
        scale(a) = mx > 0 ? mx : 1.0;
    }
    std::vector<Exps> basis = fit_basis(m, order);
    const int nb = int(basis.size());
    MatrixXd A(ns, nb), Bt(ns, m), Xs(ns, n);
    for (int r = 0; r < ns; ++r) {
        const auto& p = s.samples[r];
        for (int c = 0; c < nb; ++c) {
            double v = 1.0;
            for (int a = 0; a < m; ++a) v *= std::pow(p.x_master(a) / scale(a), basis[c][a]);
            A(r, c) = v;
        }
        Bt.row(r) = p.beta.transpose();
        Xs.row(r) = p.X.transpose();
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < nb) throw NumericalError("rank-deficient fit: too few distinct samples for the fit order");
    MatrixXd cb = qr.solve(Bt), cx = qr.solve(Xs);

    IceFit fit;
    fit.fit_residual = (A * cb - Bt).cwiseAbs().maxCoeff() / std::max(Bt.cwiseAbs().maxCoeff(), 1e-300);
    fit.beta_max = Bt.cwiseAbs().maxCoeff();

    auto unscale = [&](const Exps& e) {
        double d = 1.0;
        for (int a = 0; a < m; ++a) d *= std::pow(scale(a), e[a]);
        return d;
    };
    auto extend = [m](const Exps& e) {
        Exps full(2 * m, 0);
        std::copy(e.begin(), e.end(), full.begin());
        return full;
    };

    ReducedModel& rm = fit.rom.reduced;
    rm.method = "ice";
    rm.masters = s.masters;
    rm.omega = s.omega;
    rm.restoring.assign(m, zero_poly(m));
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < nb; ++c) rm.restoring[r].add(extend(basis[c]), cb(c, r) / unscale(basis[c]));
        std::vector<int> lin(m, 0);
        lin[r] = 1;
        rm.restoring[r].add(exponents(lin, std::vector<int>(m, 0)), -s.omega(r) * s.omega(r));
        rm.restoring[r].prune(1e-14 * std::max(1.0, s.omega(r) * s.omega(r)));
    }

    ManifoldMap& map = fit.rom.map;
    map.style = "stress";
    map.space = "physical";
    map.order = order;
    map.masters = s.masters;
    map.displacement.assign(n, zero_poly(m));
    map.velocity.assign(n, zero_poly(m));
    for (int d = 0; d < n; ++d) {
        for (int c = 0; c < nb; ++c) map.displacement[d].add(extend(basis[c]), cx(c, d) / unscale(basis[c]));
        // velocity follows by the chain rule
        for (int a = 0; a < m; ++a)
            map.velocity[d] += map.displacement[d].derivative(a).mul(RealPoly::variable(2 * m, m + a));
    }
    return fit;
}

Rom static_condensation_third(const ModalModel& mm, int m) {
    const int N = mm.size();
    if (m < 0 || m >= N) throw std::invalid_argument("master index out of range");
    Rom rom;
    rom.map = linear_modal_map(N, {m}, "stress");
    rom.map.order = 2;
    double cubic = mm.h({m, m, m, m});
    for (int s = 0; s < N; ++s) {
        if (s == m) continue;
        const double ws2 = mm.omega(s) * mm.omega(s);
        if (!(ws2 > 0)) throw std::invalid_argument("slave frequencies must be positive");
        const double gs = mm.g({s, m, m});
        cubic -= 2.0 * mm.g({m, m, s}) * gs / ws2;
        rom.map.displacement[s].add({2, 0}, -gs / ws2);
        rom.map.velocity[s].add({1, 1}, -2.0 * gs / ws2);
    }
    RealPoly rest = zero_poly(1);
    rest.add({2, 0}, mm.g({m, m, m}));
    rest.add({3, 0}, cubic);
    ReducedModel& rm = rom.reduced;
    rm.method = "ice";
    rm.masters = {m};
    rm.omega = VectorXd::Constant(1, mm.omega(m));
    if (mm.xi(m) != 0.0) rm.damping_ratio = VectorXd::Constant(1, mm.xi(m));
    rm.restoring = {rest};
    return rom;
}

double correction_factor(double rho) {
    if (!(rho > 0)) throw std::invalid_argument("frequency ratio must be positive");
    const double r2 = rho * rho;
    if (std::abs(r2 - 4.0) < 1e-12) throw NumericalError("correction factor diverges at frequency ratio 2");
    return (r2 - 8.0 / 3.0) / (r2 - 4.0);
}

}  // namespace nlrom
