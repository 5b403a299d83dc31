#include "nlrom/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <sstream>

namespace nlrom {

namespace {

/// Harmonic balance of a reduced model with alternating frequency/time
/// evaluation of the polynomial restoring force. Unknowns are the Fourier
/// coefficients of every master followed by the frequency.
class HarmonicBalance {
public:
    HarmonicBalance(const ReducedModel& rm, int harmonics, bool cos_only)
        : rm_(rm), m_(rm.m()), H_(harmonics), cos_only_(cos_only) {
        if (H_ < 1) throw std::invalid_argument("at least one harmonic is required");
        nb_ = cos_only ? H_ + 1 : 2 * H_ + 1;
        nt_ = std::max(4 * H_ + 4, 16);
        basis_at(nt_, B_, dB_, ddB_);
        proj_ = B_.transpose() * (2.0 / nt_);
        proj_.row(0) *= 0.5;
        MatrixXd d1, d2;
        basis_at(256, fine_, d1, d2);
        dNx_.assign(m_, std::vector<RealPoly>(m_));
        dNv_.assign(m_, std::vector<RealPoly>(m_));
        for (int r = 0; r < m_; ++r)
            for (int q = 0; q < m_; ++q) {
                dNx_[r][q] = rm.restoring[r].derivative(q);
                dNv_[r][q] = rm.restoring[r].derivative(m_ + q);
            }
        F_ = rm.forced() ? rm.force_amplitude : VectorXd::Zero(m_);
    }

    int m() const { return m_; }
    int nb() const { return nb_; }
    int size() const { return m_ * nb_; }  // equations; unknowns are size() + 1
    int cos1() const { return 1; }           // index of the first cosine coefficient

    /// Residual and Jacobian (size() x size()+1).
    void eval(const VectorXd& u, VectorXd& R, MatrixXd* J) const {
        const double W = u(size());
        MatrixXd X(nt_, m_), Vt(nt_, m_);
        for (int r = 0; r < m_; ++r) {
            auto c = u.segment(r * nb_, nb_);
            X.col(r) = B_ * c;
            Vt.col(r) = W * (dB_ * c);
        }
        MatrixXd S(nt_, m_);
        std::vector<std::vector<VectorXd>> gx, gv;
        if (J) {
            gx.assign(m_, std::vector<VectorXd>(m_, VectorXd(nt_)));
            gv.assign(m_, std::vector<VectorXd>(m_, VectorXd(nt_)));
        }
        std::vector<double> z(2 * m_);
        for (int i = 0; i < nt_; ++i) {
            for (int r = 0; r < m_; ++r) {
                z[r] = X(i, r);
                z[m_ + r] = Vt(i, r);
            }
            for (int r = 0; r < m_; ++r) {
                S(i, r) = rm_.restoring[r].evaluate(z);
                if (J)
                    for (int q = 0; q < m_; ++q) {
                        gx[r][q](i) = dNx_[r][q].evaluate(z);
                        gv[r][q](i) = dNv_[r][q].evaluate(z);
                    }
            }
        }
        R.resize(size());
        if (J) J->setZero(size(), size() + 1);
        for (int r = 0; r < m_; ++r) {
            const double w = rm_.omega(r), c1 = 2.0 * rm_.xi(r) * w;
            auto c = u.segment(r * nb_, nb_);
            VectorXd samples = W * W * (ddB_ * c) + c1 * W * (dB_ * c) + w * w * (B_ * c) + S.col(r);
            if (F_(r) != 0.0) samples -= F_(r) * B_.col(cos1());
            R.segment(r * nb_, nb_) = proj_ * samples;
            if (!J) continue;
            MatrixXd lin = W * W * ddB_ + c1 * W * dB_ + w * w * B_;
            J->block(r * nb_, r * nb_, nb_, nb_) += proj_ * lin;
            VectorXd dW = 2.0 * W * (ddB_ * c) + c1 * (dB_ * c);
            for (int q = 0; q < m_; ++q) {
                auto cq = u.segment(q * nb_, nb_);
                J->block(r * nb_, q * nb_, nb_, nb_) +=
                    proj_ * (gx[r][q].asDiagonal() * B_ + W * (gv[r][q].asDiagonal() * dB_));
                dW += gv[r][q].cwiseProduct(dB_ * cq);
            }
            J->col(size()).segment(r * nb_, nb_) = proj_ * dW;
        }
    }

    /// Max over one period of |x_r|: grid search refined by Newton on x_r'.
    VectorXd amplitude(const VectorXd& u) const {
        VectorXd a(m_), b, db, ddb;
        const int nt = int(fine_.rows());
        for (int r = 0; r < m_; ++r) {
            const auto c = u.segment(r * nb_, nb_);
            VectorXd x = fine_ * c;
            Eigen::Index k;
            a(r) = x.cwiseAbs().maxCoeff(&k);
            double tau = 2.0 * M_PI * double(k) / nt;
            for (int it = 0; it < 8; ++it) {
                basis_row(tau, b, db, ddb);
                const double d2 = ddb.dot(c);
                if (d2 == 0.0) break;
                const double step = db.dot(c) / d2;
                if (std::abs(step) > M_PI / nt) break;
                tau -= step;
                if (std::abs(step) < 1e-15) break;
            }
            basis_row(tau, b, db, ddb);
            a(r) = std::max(a(r), std::abs(b.dot(c)));
        }
        return a;
    }

    /// Floquet multipliers from the monodromy matrix of the variational equations.
    Eigen::VectorXcd multipliers(const VectorXd& u, int steps) const {
        const double W = u(size());
        const double T = 2.0 * M_PI / W, h = T / steps;
        auto A = [&](double t) {
            VectorXd b, db, ddb;
            basis_row(W * t, b, db, ddb);
            std::vector<double> z(2 * m_);
            for (int r = 0; r < m_; ++r) {
                auto c = u.segment(r * nb_, nb_);
                z[r] = b.dot(c);
                z[m_ + r] = W * db.dot(c);
            }
            MatrixXd a = MatrixXd::Zero(2 * m_, 2 * m_);
            a.topRightCorner(m_, m_).setIdentity();
            for (int r = 0; r < m_; ++r) {
                const double w = rm_.omega(r);
                a(m_ + r, r) -= w * w;
                a(m_ + r, m_ + r) -= 2.0 * rm_.xi(r) * w;
                for (int q = 0; q < m_; ++q) {
                    a(m_ + r, q) -= dNx_[r][q].evaluate(z);
                    a(m_ + r, m_ + q) -= dNv_[r][q].evaluate(z);
                }
            }
            return a;
        };
        MatrixXd P = MatrixXd::Identity(2 * m_, 2 * m_);
        for (int k = 0; k < steps; ++k) {
            const double t = k * h;
            MatrixXd a0 = A(t), am = A(t + 0.5 * h), a1 = A(t + h);
            MatrixXd k1 = a0 * P, k2 = am * (P + 0.5 * h * k1), k3 = am * (P + 0.5 * h * k2), k4 = a1 * (P + h * k3);
            P += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return Eigen::EigenSolver<MatrixXd>(P).eigenvalues();
    }

private:
    void basis_row(double tau, VectorXd& b, VectorXd& db, VectorXd& ddb) const {
        b.resize(nb_);
        db.resize(nb_);
        ddb.resize(nb_);
        b(0) = 1.0;
        db(0) = ddb(0) = 0.0;
        for (int k = 1; k <= H_; ++k) {
            const double c = std::cos(k * tau), s = std::sin(k * tau);
            if (cos_only_) {
                b(k) = c;
                db(k) = -k * s;
                ddb(k) = -k * k * c;
            } else {
                b(2 * k - 1) = c;
                db(2 * k - 1) = -k * s;
                ddb(2 * k - 1) = -k * k * c;
                b(2 * k) = s;
                db(2 * k) = k * c;
                ddb(2 * k) = -k * k * s;
            }
        }
    }

    void basis_at(int nt, MatrixXd& B, MatrixXd& dB, MatrixXd& ddB) const {
        B.resize(nt, nb_);
        dB.resize(nt, nb_);
        ddB.resize(nt, nb_);
        VectorXd b, db, ddb;
        for (int i = 0; i < nt; ++i) {
            basis_row(2.0 * M_PI * i / nt, b, db, ddb);
            B.row(i) = b.transpose();
            dB.row(i) = db.transpose();
            ddB.row(i) = ddb.transpose();
        }
    }

    const ReducedModel& rm_;
    int m_, H_;
    bool cos_only_;
    int nb_ = 0, nt_ = 0;
    MatrixXd B_, dB_, ddB_, proj_, fine_;
    std::vector<std::vector<RealPoly>> dNx_, dNv_;
    VectorXd F_;
};

struct Corrected {
    VectorXd u;
    int iterations = 0;
    double residual = 0.0;
};

// Newton on R(u) = 0 plus one extra linear row: row . u = rhs.
bool newton(const HarmonicBalance& hb, VectorXd& u, const VectorXd& row, double rhs, const HbOptions& opt,
            Corrected& out) {
    const int n = hb.size();
    VectorXd R;
    MatrixXd J;
    for (int it = 0; it <= opt.max_iterations; ++it) {
        hb.eval(u, R, &J);
        if (!R.allFinite()) return false;
        const double extra = row.dot(u) - rhs;
        const double res = R.cwiseAbs().maxCoeff();
        if (res <= opt.tol && std::abs(extra) <= 1e-14 * (1.0 + u.norm())) {
            out = {u, it, res};
            return true;
        }
        MatrixXd A(n + 1, n + 1);
        A.topRows(n) = J;
        A.row(n) = row.transpose();
        VectorXd rhs_v(n + 1);
        rhs_v << R, extra;
        Eigen::PartialPivLU<MatrixXd> lu(A);
        VectorXd du = lu.solve(rhs_v);
        if (!du.allFinite()) return false;
        u -= du;
        if (du.norm() <= 1e-15 * (1.0 + u.norm())) {
            hb.eval(u, R, nullptr);
            const double r2 = R.cwiseAbs().maxCoeff();
            if (r2 <= 1e-10) {
                out = {u, it + 1, r2};
                return true;
            }
        }
    }
    return false;
}

VectorXd tangent(const HarmonicBalance& hb, const VectorXd& u, const VectorXd& prev) {
    const int n = hb.size();
    VectorXd R;
    MatrixXd J;
    hb.eval(u, R, &J);
    MatrixXd A(n + 1, n + 1);
    A.topRows(n) = J;
    A.row(n) = prev.transpose();
    VectorXd e = VectorXd::Zero(n + 1);
    e(n) = 1.0;
    VectorXd t = Eigen::FullPivLU<MatrixXd>(A).solve(e);
    t.normalize();
    if (t.dot(prev) < 0) t = -t;
    return t;
}

struct BranchPoint {
    VectorXd u;
    VectorXd t;
    double residual;
};

// Pseudo-arclength continuation from a converged point.
std::vector<BranchPoint> trace(const HarmonicBalance& hb, BranchPoint start, const HbOptions& opt, double ds0,
                               double ds_min, double ds_max, const std::function<bool(const VectorXd&)>& stop) {
    std::vector<BranchPoint> pts{start};
    double ds = ds0;
    for (int step = 0; step < opt.max_steps; ++step) {
        const BranchPoint& cur = pts.back();
        if (stop(cur.u)) break;
        VectorXd pred = cur.u + ds * cur.t;
        VectorXd u = pred;
        Corrected c;
        if (!newton(hb, u, cur.t, cur.t.dot(pred), opt, c)) {
            ds *= 0.5;
            if (ds < ds_min) {
                std::ostringstream os;
                os << "continuation stall at frequency " << cur.u(hb.size()) << ": step fell below " << ds_min;
                throw NumericalError(os.str());
            }
            continue;
        }
        VectorXd t = tangent(hb, c.u, cur.t);
        pts.push_back({c.u, t, c.residual});
        const double grow = std::clamp(double(opt.target_iterations) / std::max(c.iterations, 1), 0.5, 2.0);
        ds = std::min(ds * grow, ds_max);
    }
    return pts;
}

Curve to_curve(const HarmonicBalance& hb, const std::vector<BranchPoint>& pts, const HbOptions& opt,
               const std::string& method, bool conservative) {
    Curve curve;
    curve.method = method;
    const int n = hb.size();
    int last_sign = 0;
    std::vector<Eigen::VectorXcd> mult(pts.size());
    for (size_t k = 0; k < pts.size(); ++k) {
        CurvePoint p;
        p.omega = pts[k].u(n);
        p.amplitude = hb.amplitude(pts[k].u);
        curve.max_residual = std::max(curve.max_residual, pts[k].residual);
        const double dw = pts[k].t(n);
        const int sign = std::abs(dw) < 1e-9 ? 0 : (dw > 0 ? 1 : -1);
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) p.tag = "SN";
            last_sign = sign;
        }
        if (opt.stability) {
            mult[k] = hb.multipliers(pts[k].u, 100 * opt.harmonics);
            const double tol = conservative ? 1e-3 : 1e-6;
            p.stable = mult[k].cwiseAbs().maxCoeff() <= 1.0 + tol;
        }
        curve.points.push_back(p);
    }
    if (!opt.stability) return curve;
    for (size_t k = 1; k < curve.points.size(); ++k) {
        if (curve.points[k].stable == curve.points[k - 1].stable) continue;
        bool near_sn = false;
        for (size_t j = (k >= 2 ? k - 2 : 0); j <= std::min(k + 1, curve.points.size() - 1); ++j)
            near_sn = near_sn || curve.points[j].tag == "SN";
        const auto& mu = curve.points[k].stable ? mult[k - 1] : mult[k];
        int idx;
        mu.cwiseAbs().maxCoeff(&idx);
        const cplx z = mu(idx);
        std::string tag;
        if (std::abs(z.imag()) > 1e-6 * std::abs(z))
            tag = "NS-candidate";
        else if (z.real() < 0)
            tag = "NS-candidate";
        else if (!near_sn)
            tag = "PF";
        if (!tag.empty() && curve.points[k].tag == "none") curve.points[k].tag = tag;
    }
    return curve;
}

}  // namespace

Curve backbone(const ReducedModel& rm, double a_max, const HbOptions& opt) {
    if (!(a_max > 0)) throw std::invalid_argument("amplitude bound must be positive");
    for (int r = 0; r < rm.m(); ++r) {
        if (rm.xi(r) != 0.0) throw std::invalid_argument("backbone requires an undamped reduced model");
        if (!even_in_velocity(rm.restoring[r], rm.m()))
            throw std::invalid_argument("backbone requires a restoring force even in the velocities");
    }
    ReducedModel free = rm;
    free.force_amplitude.resize(0);
    HarmonicBalance hb(free, opt.harmonics, true);
    const int n = hb.size();

    const double a0 = a_max / 100.0;
    VectorXd u = VectorXd::Zero(n + 1);
    u(hb.cos1()) = a0;
    u(n) = rm.omega(0);
    VectorXd row = VectorXd::Zero(n + 1);
    row(hb.cos1()) = 1.0;
    Corrected c;
    if (!newton(hb, u, row, a0, opt, c)) throw NumericalError("backbone start point did not converge");
    VectorXd t = tangent(hb, c.u, row);

    const double ds0 = opt.ds_initial > 0 ? opt.ds_initial : a_max / 100.0;
    const double dmin = opt.ds_min > 0 ? opt.ds_min : a_max * 1e-9;
    const double dmax = opt.ds_max > 0 ? opt.ds_max : a_max / 25.0;
    auto stop = [&](const VectorXd& v) { return hb.amplitude(v)(0) >= a_max || v(n) <= 0.0; };
    auto pts = trace(hb, {c.u, t, c.residual}, opt, ds0, dmin, dmax, stop);
    return to_curve(hb, pts, opt, rm.method, true);
}

Curve frf(const ReducedModel& rm, double omega_min, double omega_max, const HbOptions& opt, bool reverse) {
    if (!(omega_max > omega_min) || !(omega_min > 0)) throw std::invalid_argument("invalid frequency range");
    for (int r = 0; r < rm.m(); ++r)
        if (!(rm.xi(r) > 0)) throw std::invalid_argument("forced response requires positive damping");
    HarmonicBalance hb(rm, opt.harmonics, false);
    const int n = hb.size(), nb = hb.nb();
    const double W0 = reverse ? omega_max : omega_min;

    // linear response as the first guess
    VectorXd u = VectorXd::Zero(n + 1);
    u(n) = W0;
    for (int r = 0; r < rm.m(); ++r) {
        const double F = rm.forced() ? rm.force_amplitude(r) : 0.0;
        const double w = rm.omega(r), k = w * w - W0 * W0, c = 2.0 * rm.xi(r) * w * W0;
        const double det = k * k + c * c;
        u(r * nb + 1) = F * k / det;
        u(r * nb + 2) = F * c / det;
    }
    VectorXd row = VectorXd::Zero(n + 1);
    row(n) = 1.0;
    Corrected c;
    if (!newton(hb, u, row, W0, opt, c)) throw NumericalError("forced response start point did not converge");
    VectorXd t = tangent(hb, c.u, reverse ? VectorXd(-row) : row);

    const double range = omega_max - omega_min;
    const double ds0 = opt.ds_initial > 0 ? opt.ds_initial : range / 200.0;
    const double dmin = opt.ds_min > 0 ? opt.ds_min : range * 1e-10;
    const double dmax = opt.ds_max > 0 ? opt.ds_max : range / 50.0;
    auto stop = [&](const VectorXd& v) {
        return reverse ? v(n) <= omega_min || v(n) > omega_max + range : v(n) >= omega_max || v(n) < omega_min - range;
    };
    auto pts = trace(hb, {c.u, t, c.residual}, opt, ds0, dmin, dmax, stop);
    return to_curve(hb, pts, opt, rm.method, false);
}

double gamma_from_backbone(const Curve& curve, double a_fit) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : curve.points)
        if (p.amplitude.size() && p.amplitude(0) <= a_fit) pts.emplace_back(p.amplitude(0), p.omega);
    if (pts.size() < 6) throw NumericalError("insufficient backbone points below the fit amplitude");
    const int n = int(pts.size());
    MatrixXd A(n, 4);
    VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        const double a = pts[i].first / a_fit;
        A.row(i) << 1.0, a * a, a * a * a, a * a * a * a;
        b(i) = pts[i].second;
    }
    VectorXd c = A.colPivHouseholderQr().solve(b);
    return c(1) / (a_fit * a_fit) / c(0);
}

}  // namespace nlrom
