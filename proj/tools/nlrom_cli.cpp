// Command-line front end for the nlrom library.

#include "nlrom/condensation.hpp"
#include "nlrom/dynamics.hpp"
#include "nlrom/invariant.hpp"
#include "nlrom/io.hpp"
#include "nlrom/parametrisation.hpp"
#include "nlrom/qm.hpp"
#include "nlrom/step.hpp"
#include "nlrom/zoo.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace nlrom;

namespace {

/// Bad values for otherwise valid flags.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw UsageError(flag + ": cannot parse '" + cell + "'");
        }
    }
    return out;
}

/// 1-based mode numbers on the command line, 0-based internally.
std::vector<int> parse_modes(const std::string& text, const std::string& flag) {
    std::vector<int> out;
    for (double v : parse_numbers(text, flag)) {
        if (v != std::floor(v) || v < 1) throw UsageError(flag + ": mode numbers start at 1");
        out.push_back(int(v) - 1);
    }
    return out;
}

PhysicalModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

ModalModel load_modal(const std::string& path) {
    PhysicalModel pm = load_model(path);
    return assemble_modal(pm, pm.n);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

std::string num(double v) { return format_double(v); }

// ---- zoo ---------------------------------------------------------------------

struct ZooArgs {
    std::string kind, out;
    double w1 = 1.0, w2 = 2.0;
    std::vector<std::string> g, h;
    BeamSpec beam;
    std::string axial = "stretching";
};

int run_zoo(const ZooArgs& a) {
    PhysicalModel pm;
    if (a.kind == "two-dof") {
        std::vector<QuadEntry> g;
        std::vector<CubicEntry> h;
        for (const auto& s : a.g) {
            auto v = parse_numbers(s, "--quad");
            if (v.size() != 4) throw UsageError("--quad expects s,i,j,value with 1-based modes");
            g.push_back({int(v[0]) - 1, int(v[1]) - 1, int(v[2]) - 1, v[3]});
        }
        for (const auto& s : a.h) {
            auto v = parse_numbers(s, "--cubic");
            if (v.size() != 5) throw UsageError("--cubic expects s,i,j,k,value with 1-based modes");
            h.push_back({int(v[0]) - 1, int(v[1]) - 1, int(v[2]) - 1, int(v[3]) - 1, v[4]});
        }
        pm = as_physical(make_two_dof(a.w1, a.w2, g, h));
    } else {
        BeamSpec spec = a.beam;
        if (a.axial == "stretching")
            spec.axial = AxialLaw::Stretching;
        else if (a.axial == "bending")
            spec.axial = AxialLaw::Bending;
        else
            throw UsageError("--axial must be stretching or bending");
        if (a.kind == "vk-beam")
            pm = beam_galerkin(BeamKind::VonKarman, spec);
        else if (a.kind == "foundation-beam")
            pm = beam_galerkin(BeamKind::Foundation, spec);
        else if (a.kind == "arch")
            pm = beam_galerkin(BeamKind::ShallowArch, spec);
        else
            throw UsageError("unknown zoo model '" + a.kind + "' (two-dof, vk-beam, foundation-beam, arch)");
    }
    emit(a.out, dump_json(model_to_json(pm)));
    return 0;
}

// ---- modal / step --------------------------------------------------------------

int run_modal(const std::string& model, int modes, const std::string& out) {
    PhysicalModel pm = load_model(model);
    ModalModel mm = assemble_modal(pm, modes > 0 ? modes : pm.n);
    emit(out, dump_json(modal_to_json(mm)));
    return 0;
}

int run_step(const std::string& model, const std::string& lambda, int modes, const std::string& out) {
    PhysicalModel pm = load_model(model);
    ModalModel lin = assemble_modal(PhysicalModel{pm.n, pm.mass, pm.stiffness, QuadTensor(pm.n), CubicTensor(pm.n)},
                                    modes > 0 ? modes : pm.n);
    ForceEvaluator force = as_blackbox(pm);
    StepPlan plan;
    if (lambda == "auto") {
        plan.lambda = choose_lambda(force, lin.V, pm.stiffness);
    } else {
        auto v = parse_numbers(lambda, "--lambda");
        if (v.size() != 1) throw UsageError("--lambda expects auto or one value");
        plan.lambda = VectorXd::Constant(lin.size(), v[0]);
    }
    StepResult res = step_identify(force, lin.V, pm.mass, plan);
    ModalModel id = lin;
    id.g = res.g;
    id.h = res.h;
    json j = modal_to_json(id);
    json prov;
    prov["lambda_mode"] = lambda == "auto" ? "auto" : "fixed";
    json lam = json::array();
    for (int p = 0; p < res.lambda.size(); ++p) lam.push_back(res.lambda(p));
    prov["lambda"] = lam;
    prov["evaluations"] = res.evaluations;
    prov["check_residual"] = res.check_residual;
    prov["quad_symmetry_violation"] = res.symmetry.quad.max_violation;
    prov["cubic_symmetry_violation"] = res.symmetry.cubic.max_violation;
    prov["warnings"] = res.warnings;
    j["provenance"] = prov;
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    emit(out, dump_json(j));
    return 0;
}

// ---- rom -----------------------------------------------------------------------

struct RomArgs {
    std::string model, method, masters = "1", out, samples_csv;
    int order = 3, fit_order = 3, points = 21;
    double amp_target = 0.1, damping = 0.0;
};

int run_rom(const RomArgs& a) {
    const std::vector<int> masters = parse_modes(a.masters, "--masters");
    PhysicalModel pm = load_model(a.model);
    Rom rom;
    const std::string& m = a.method;
    if (m == "graph" || m == "nf" || m == "param-graph" || m == "param-nf" || m == "ice-closed") {
        ModalModel mm = assemble_modal(pm, pm.n);
        if (m == "graph")
            rom = masters.size() == 1 ? graph_single(mm, masters[0]) : graph_multi(mm, masters);
        else if (m == "nf")
            rom = nf_third_order(mm, masters);
        else if (m == "ice-closed") {
            if (masters.size() != 1) throw UsageError("ice-closed takes a single master");
            rom = static_condensation_third(mm, masters[0]);
        } else {
            DiagonalSystem sys = diagonalize(mm);
            Style st = m == "param-graph" ? Style::Graph : Style::NormalForm;
            rom = to_real_form(parametrise(sys, masters, a.order, st), sys, m);
        }
    } else if (m == "dnf") {
        rom = dnf_second_order(pm, masters).rom;
    } else if (m == "ice") {
        IceSamples s = ice_sample_target(pm, masters, a.amp_target, a.points);
        if (!a.samples_csv.empty()) {
            std::ostringstream os;
            const int nm = int(masters.size());
            for (int r = 0; r < nm; ++r) os << (r ? "," : "") << "beta_" << masters[r] + 1;
            for (int r = 0; r < nm; ++r) os << ",x_" << masters[r] + 1;
            for (int d = 0; d < pm.n; ++d) os << ",X_" << d + 1;
            os << "\n";
            for (const auto& p : s.samples) {
                for (int r = 0; r < nm; ++r) os << (r ? "," : "") << num(p.beta(r));
                for (int r = 0; r < nm; ++r) os << "," << num(p.x_master(r));
                for (int d = 0; d < pm.n; ++d) os << "," << num(p.X(d));
                os << "\n";
            }
            write_text_file(a.samples_csv, os.str());
        }
        IceFit fit = ice_fit(s, a.fit_order);
        std::cerr << "fit residual " << num(fit.fit_residual) << ", max load " << num(fit.beta_max) << "\n";
        rom = fit.rom;
    } else if (m == "qm-md" || m == "qm-smd") {
        rom = qm_build(pm, masters, m == "qm-md" ? DerivativeKind::Full : DerivativeKind::Static);
    } else {
        throw UsageError("unknown method '" + m +
                         "' (graph, nf, dnf, ice, ice-closed, qm-md, qm-smd, param-graph, param-nf)");
    }
    if (a.damping > 0) rom.reduced.damping_ratio = VectorXd::Constant(rom.reduced.m(), a.damping);
    emit(a.out, dump_json(rom_to_json(rom)));
    return 0;
}

// ---- gamma / continuation -------------------------------------------------------

int run_gamma(const std::string& model, const std::string& method, int master) {
    ModalModel mm = load_modal(model);
    if (master < 1 || master > mm.size()) throw UsageError("--master out of range");
    std::cout << num(gamma_closed_form(mm, master - 1, parse_gamma_method(method))) << "\n";
    return 0;
}

HbOptions hb_options(int harmonics, bool stability) {
    HbOptions o;
    o.harmonics = harmonics;
    o.stability = stability;
    return o;
}

int run_backbone(const std::string& rom_path, double a_max, int harmonics, bool stability, const std::string& out) {
    Rom rom = rom_from_json(read_json_file(rom_path));
    rom.reduced.damping_ratio.resize(0);
    Curve c = backbone(rom.reduced, a_max, hb_options(harmonics, stability));
    emit(out, curve_to_csv(c));
    return 0;
}

struct FrfArgs {
    std::string rom, out, force = "0";
    double wmin = 0.5, wmax = 1.5, damping = -1.0;
    int harmonics = 7;
    bool reverse = false, stability = true;
};

int run_frf(const FrfArgs& a) {
    Rom rom = rom_from_json(read_json_file(a.rom));
    ReducedModel rm = rom.reduced;
    if (a.damping >= 0) rm.damping_ratio = VectorXd::Constant(rm.m(), a.damping);
    auto f = parse_numbers(a.force, "--force");
    VectorXd F = VectorXd::Zero(rm.m());
    if (f.size() == 1)
        F(0) = f[0];
    else if (int(f.size()) == rm.m())
        for (int r = 0; r < rm.m(); ++r) F(r) = f[r];
    else
        throw UsageError("--force expects one value or one per master");
    rm.force_amplitude = F;
    Curve c = frf(rm, a.wmin, a.wmax, hb_options(a.harmonics, a.stability), a.reverse);
    emit(a.out, curve_to_csv(c));
    return 0;
}

// ---- validate / compare -----------------------------------------------------------

int run_validate(const std::string& model, int master) {
    ModalModel mm = load_modal(model);
    if (master < 1 || master > mm.size()) throw UsageError("--master out of range");
    const int m = master - 1;
    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;
    auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
        try {
            auto [ok, detail] = f();
            checks.push_back({name, ok, detail});
        } catch (const std::exception& e) {
            checks.push_back({name, false, e.what()});
        }
    };
    run("symmetry", [&] {
        auto rep = check_tensor_symmetry(load_model(model), 1e-12);
        return std::make_pair(rep.pass, "max violation " + num(std::max(rep.quad.max_violation, rep.cubic.max_violation)));
    });
    run("invariance-slope", [&] {
        DiagonalSystem sys = diagonalize(mm);
        Parametrisation par = parametrise(sys, {m}, 3, Style::Graph);
        std::vector<double> amps{1e-3, 2e-3, 4e-3, 1e-2};
        double s = loglog_slope(amps, invariance_residual(par, sys, amps));
        return std::make_pair(std::abs(s - 4.0) <= 0.3, "slope " + num(s));
    });
    run("equivalence", [&] {
        EquivalenceReport r = gamma_equivalence_check(mm, m);
        bool ok = r.max_coefficient_gap <= 1e-12 &&
                  std::abs(r.gamma_graph - r.gamma_nf) <= 1e-10 * std::max(1.0, std::abs(r.gamma_nf)) &&
                  r.slope >= 3.7;
        return std::make_pair(ok, "gamma gap " + num(std::abs(r.gamma_graph - r.gamma_nf)) + ", slope " + num(r.slope));
    });
    run("gamma-identities", [&] {
        double nf = gamma_closed_form(mm, m, GammaMethod::NF);
        double from_rom = hb_gamma(nf_third_order(mm, {m}).reduced);
        double ice = gamma_closed_form(mm, m, GammaMethod::ICE);
        double ice_rom = hb_gamma(static_condensation_third(mm, m).reduced);
        double gap = std::max(std::abs(nf - from_rom), std::abs(ice - ice_rom));
        return std::make_pair(gap <= 1e-10 * std::max(1.0, std::abs(nf)), "max gap " + num(gap));
    });
    int failed = 0;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        failed += !c.pass;
    }
    std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed ? 1 : 0;
}

int run_compare(const std::string& a, const std::string& b, const std::string& amps) {
    Rom ra = rom_from_json(read_json_file(a)), rb = rom_from_json(read_json_file(b));
    auto A = parse_numbers(amps, "--amplitudes");
    ManifoldDistance d = compare_manifolds(ra.map, rb.map, ra.reduced.omega, A);
    std::cout << "amplitude,zero_velocity,full_circle\n";
    for (size_t k = 0; k < A.size(); ++k)
        std::cout << num(d.amplitudes[k]) << "," << num(d.zero_velocity[k]) << "," << num(d.full_circle[k]) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear reduced-order models of vibrating structures"};
    app.require_subcommand(1);

    ZooArgs zoo;
    auto* zc = app.add_subcommand("zoo", "Generate a model (two-dof, vk-beam, foundation-beam, arch)");
    zc->add_option("kind", zoo.kind, "Model family")->required();
    zc->add_option("--w1", zoo.w1, "First frequency (two-dof)");
    zc->add_option("--w2", zoo.w2, "Second frequency (two-dof)");
    zc->add_option("--quad", zoo.g, "Quadratic coupling s,i,j,value (1-based, repeatable)");
    zc->add_option("--cubic", zoo.h, "Cubic coupling s,i,j,k,value (1-based, repeatable)");
    zc->add_option("--modes", zoo.beam.modes, "Galerkin modes (beams)");
    zc->add_option("--length", zoo.beam.length);
    zc->add_option("--young", zoo.beam.young);
    zc->add_option("--inertia", zoo.beam.inertia);
    zc->add_option("--area", zoo.beam.area);
    zc->add_option("--density", zoo.beam.density);
    zc->add_option("--thickness", zoo.beam.thickness);
    zc->add_option("--kappa", zoo.beam.kappa, "Cubic foundation stiffness");
    zc->add_option("--w0", zoo.beam.w0, "Arch rise");
    zc->add_option("--axial", zoo.axial, "Axial law: stretching or bending");
    zc->add_option("-o,--output", zoo.out, "Output model JSON")->required();

    std::string modal_model, modal_out;
    int modal_modes = 0;
    auto* mc = app.add_subcommand("modal", "Modal model from a physical one");
    mc->add_option("model", modal_model)->required();
    mc->add_option("--modes", modal_modes, "Number of modes (default all)");
    mc->add_option("-o,--output", modal_out)->required();

    std::string step_model, step_lambda = "auto", step_out;
    int step_modes = 0;
    auto* sc = app.add_subcommand("step", "Identify modal tensors from static force evaluations");
    sc->add_option("--model", step_model)->required();
    sc->add_option("--lambda", step_lambda, "auto or an amplitude");
    sc->add_option("--modes", step_modes, "Number of modes (default all)");
    sc->add_option("-o,--output", step_out)->required();

    RomArgs rom;
    auto* rc = app.add_subcommand("rom", "Build a reduced-order model");
    rc->add_option("model", rom.model)->required();
    rc->add_option("--method", rom.method, "graph, nf, dnf, ice, ice-closed, qm-md, qm-smd, param-graph, param-nf")
        ->required();
    rc->add_option("--masters", rom.masters, "Master modes, 1-based, comma separated");
    rc->add_option("--order", rom.order, "Parametrisation order");
    rc->add_option("--amp-target", rom.amp_target, "Largest master amplitude of the condensation samples");
    rc->add_option("--fit-order", rom.fit_order, "Polynomial order of the condensation fit");
    rc->add_option("--points", rom.points, "Load levels per master");
    rc->add_option("--samples-csv", rom.samples_csv, "Dump condensation samples");
    rc->add_option("--damping", rom.damping, "Modal damping ratio of the masters");
    rc->add_option("-o,--output", rom.out)->required();

    std::string gamma_model, gamma_method = "nf";
    int gamma_master = 1;
    auto* gc = app.add_subcommand("gamma", "Closed-form backbone curvature");
    gc->add_option("model", gamma_model)->required();
    gc->add_option("--method", gamma_method, "nf, ice, qm-md, qm-smd");
    gc->add_option("--master", gamma_master, "Master mode, 1-based");

    std::string bb_rom, bb_out;
    double bb_amax = 0.1;
    int bb_h = 7;
    bool bb_nostab = false;
    auto* bc = app.add_subcommand("backbone", "Backbone curve of a reduced model");
    bc->add_option("rom", bb_rom)->required();
    bc->add_option("--a-max", bb_amax, "Largest amplitude");
    bc->add_option("--harmonics", bb_h);
    bc->add_flag("--no-stability", bb_nostab);
    bc->add_option("-o,--output", bb_out)->required();

    FrfArgs fa;
    bool fa_nostab = false;
    auto* fc = app.add_subcommand("frf", "Forced response curve of a reduced model");
    fc->add_option("rom", fa.rom)->required();
    fc->add_option("--omega-min", fa.wmin);
    fc->add_option("--omega-max", fa.wmax);
    fc->add_option("--force", fa.force, "Modal force amplitude(s)");
    fc->add_option("--damping", fa.damping, "Override damping ratio");
    fc->add_option("--harmonics", fa.harmonics);
    fc->add_flag("--reverse", fa.reverse, "Start at omega-max");
    fc->add_flag("--no-stability", fa_nostab);
    fc->add_option("-o,--output", fa.out)->required();

    std::string val_model;
    int val_master = 1;
    auto* vc = app.add_subcommand("validate", "Run the property checks on a model");
    vc->add_option("model", val_model)->required();
    vc->add_option("--master", val_master);

    std::string cmp_a, cmp_b, cmp_amps = "0.01,0.05,0.1";
    auto* cc = app.add_subcommand("compare", "Slave discrepancy between two reduced-model maps");
    cc->add_option("a", cmp_a)->required();
    cc->add_option("b", cmp_b)->required();
    cc->add_option("--amplitudes", cmp_amps);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (zc->parsed()) return run_zoo(zoo);
        if (mc->parsed()) return run_modal(modal_model, modal_modes, modal_out);
        if (sc->parsed()) return run_step(step_model, step_lambda, step_modes, step_out);
        if (rc->parsed()) return run_rom(rom);
        if (gc->parsed()) return run_gamma(gamma_model, gamma_method, gamma_master);
        if (bc->parsed()) return run_backbone(bb_rom, bb_amax, bb_h, !bb_nostab, bb_out);
        if (fc->parsed()) {
            fa.stability = !fa_nostab;
            return run_frf(fa);
        }
        if (vc->parsed()) return run_validate(val_model, val_master);
        if (cc->parsed()) return run_compare(cmp_a, cmp_b, cmp_amps);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
