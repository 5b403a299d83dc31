#include "nlrom/dynamics.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace nlrom {

namespace {

using Accel = std::function<VectorXd(const VectorXd&, const VectorXd&, double)>;

Trajectory rk4(const Accel& acc, const VectorXd& x0, const VectorXd& v0, double t_end, double dt, int stride) {
    if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
    if (stride < 1) throw std::invalid_argument("stride must be positive");
    if (x0.size() != v0.size()) throw std::invalid_argument("state size mismatch");
    const long steps = std::lround(std::ceil(t_end / dt - 1e-9));
    const long stored = steps / stride + 1;
    Trajectory tr;
    tr.x.resize(stored, x0.size());
    tr.v.resize(stored, x0.size());
    tr.t.reserve(stored);
    VectorXd x = x0, v = v0;
    tr.x.row(0) = x.transpose();
    tr.v.row(0) = v.transpose();
    tr.t.push_back(0.0);
    for (long k = 1; k <= steps; ++k) {
        const double t = (k - 1) * dt;
        VectorXd k1x = v, k1v = acc(x, v, t);
        VectorXd k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x, k2x, t + 0.5 * dt);
        VectorXd k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x, k3x, t + 0.5 * dt);
        VectorXd k4x = v + dt * k3v, k4v = acc(x + dt * k3x, k4x, t + dt);
        x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        if (!x.allFinite() || !v.allFinite()) {
            std::ostringstream os;
            os << "integration blew up at t = " << k * dt;
            throw NumericalError(os.str());
        }
        if (k % stride == 0) {
            const long row = k / stride;
            tr.x.row(row) = x.transpose();
            tr.v.row(row) = v.transpose();
            tr.t.push_back(k * dt);
        }
    }
    return tr;
}

}  // namespace

Trajectory integrate(const PhysicalModel& model, const VectorXd& x0, const VectorXd& v0, double t_end, double dt,
                     int stride) {
    Eigen::LLT<MatrixXd> llt(model.mass);
    if (llt.info() != Eigen::Success) throw NumericalError("mass matrix is not positive definite");
    Accel acc = [&](const VectorXd& x, const VectorXd&, double) -> VectorXd {
        return -llt.solve(eval_internal_force(model, x));
    };
    return rk4(acc, x0, v0, t_end, dt, stride);
}

Trajectory integrate(const ModalModel& mm, const VectorXd& q0, const VectorXd& v0, double t_end, double dt,
                     int stride) {
    const VectorXd w2 = mm.omega.array().square();
    VectorXd c = VectorXd::Zero(mm.size());
    for (int p = 0; p < mm.size(); ++p) c(p) = 2.0 * mm.xi(p) * mm.omega(p);
    Accel acc = [&](const VectorXd& q, const VectorXd& v, double) -> VectorXd {
        return -(w2.cwiseProduct(q) + c.cwiseProduct(v) + nonlinear_force(mm, q));
    };
    return rk4(acc, q0, v0, t_end, dt, stride);
}

Trajectory integrate(const ReducedModel& rm, const VectorXd& x0, const VectorXd& v0, double t_end, double dt,
                     int stride) {
    Accel acc = [&](const VectorXd& x, const VectorXd& v, double t) { return rm.acceleration(x, v, t); };
    return rk4(acc, x0, v0, t_end, dt, stride);
}

GammaMethod parse_gamma_method(const std::string& name) {
    if (name == "nf") return GammaMethod::NF;
    if (name == "ice") return GammaMethod::ICE;
    if (name == "qm-md" || name == "md") return GammaMethod::MD;
    if (name == "qm-smd" || name == "smd") return GammaMethod::SMD;
    throw std::invalid_argument("unknown method '" + name + "' (expected nf, ice, qm-md, qm-smd)");
}

std::string to_string(GammaMethod method) {
    switch (method) {
        case GammaMethod::NF: return "nf";
        case GammaMethod::ICE: return "ice";
        case GammaMethod::MD: return "qm-md";
        case GammaMethod::SMD: return "qm-smd";
    }
    return "";
}

GammaTerms gamma_terms(const ModalModel& mm, int m, GammaMethod method, double tol) {
    const int N = mm.size();
    if (m < 0 || m >= N) throw std::invalid_argument("master index out of range");
    const double wm = mm.omega(m), wm2 = wm * wm;
    const double gmm = mm.g({m, m, m});
    GammaTerms t;
    t.common = -5.0 / (12.0 * wm2) * (gmm / wm) * (gmm / wm) + 3.0 / (8.0 * wm2) * mm.h({m, m, m, m});
    double sum = 0.0;
    for (int s = 0; s < N; ++s) {
        if (s == m) continue;
        const double gs = mm.g({s, m, m});
        if (gs == 0.0) continue;
        const double ws = mm.omega(s), ws2 = ws * ws;
        double factor = 1.0;
        switch (method) {
            case GammaMethod::NF:
                if (std::abs(ws - 2.0 * wm) < tol * wm)
                    throw ResonanceError("cross resonance: mode " + std::to_string(s + 1) +
                                         " is in 1:2 internal resonance with mode " + std::to_string(m + 1));
                factor = 1.0 + 4.0 * wm2 / (3.0 * (ws2 - 4.0 * wm2));
                break;
            case GammaMethod::ICE: break;
            case GammaMethod::MD:
                if (std::abs(ws - wm) < tol * wm)
                    throw ResonanceError("modal derivative undefined: mode " + std::to_string(s + 1) +
                                         " has the frequency of mode " + std::to_string(m + 1));
                factor = 1.0 + wm2 * (4.0 * ws2 - 3.0 * wm2) / (3.0 * (ws2 - wm2) * (ws2 - wm2));
                break;
            case GammaMethod::SMD: factor = 1.0 + 4.0 * wm2 / (3.0 * ws2); break;
        }
        sum += 2.0 * (gs / ws) * (gs / ws) * factor;
    }
    t.summed = -3.0 / (8.0 * wm2) * sum;
    return t;
}

double gamma_closed_form(const ModalModel& mm, int m, GammaMethod method, double tol) {
    return gamma_terms(mm, m, method, tol).total();
}

ManifoldDistance compare_manifolds(const ManifoldMap& a, const ManifoldMap& b, const VectorXd& omega,
                                   const std::vector<double>& amplitudes, int samples) {
    if (a.masters != b.masters) throw std::invalid_argument("manifold maps have different master sets");
    if (a.space != b.space || a.n_outputs() != b.n_outputs())
        throw std::invalid_argument("manifold maps live in different spaces");
    const int m = a.n_masters();
    if (omega.size() != m) throw std::invalid_argument("one frequency per master is required");

    std::vector<int> outputs;
    for (int d = 0; d < a.n_outputs(); ++d)
        if (a.space != "modal" || std::find(a.masters.begin(), a.masters.end(), d) == a.masters.end())
            outputs.push_back(d);

    auto gap = [&](const VectorXd& x, const VectorXd& y) {
        VectorXd da = a.displacement_at(x, y), db = b.displacement_at(x, y);
        double g = 0.0;
        for (int d : outputs) g = std::max(g, std::abs(da(d) - db(d)));
        return g;
    };

    ManifoldDistance out;
    for (double A : amplitudes) {
        double slice = 0.0, circle = 0.0;
        for (int r = 0; r < m; ++r)
            for (int k = 0; k < samples; ++k) {
                const double th = 2.0 * M_PI * k / samples;
                VectorXd x = VectorXd::Zero(m), y = VectorXd::Zero(m);
                x(r) = A * std::cos(th);
                slice = std::max(slice, gap(x, y));
                y(r) = -A * omega(r) * std::sin(th);
                circle = std::max(circle, gap(x, y));
            }
        out.amplitudes.push_back(A);
        out.zero_velocity.push_back(slice);
        out.full_circle.push_back(circle);
    }
    return out;
}

}  // namespace nlrom
