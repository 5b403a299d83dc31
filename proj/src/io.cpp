#include "nlrom/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nlrom {

namespace {

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void write(std::ostringstream& os, const json& j, int indent) {
    const std::string pad(indent, ' '), inner(indent + 2, ' ');
    if (j.is_number_float()) {
        os << format_double(j.get<double>());
    } else if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ",\n";
            first = false;
            os << inner << json(it.key()).dump() << ": ";
            write(os, it.value(), indent + 2);
        }
        os << "\n" << pad << "}";
    } else if (j.is_array()) {
        bool flat = std::all_of(j.begin(), j.end(), [](const json& e) {
            return is_scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), [](const json& f) {
                                        return is_scalar(f) || (f.is_array() && std::all_of(f.begin(), f.end(), is_scalar));
                                    }));
        });
        bool scalars = std::all_of(j.begin(), j.end(), is_scalar);
        if (scalars || (flat && j.size() <= 1)) {
            os << "[";
            for (size_t k = 0; k < j.size(); ++k) {
                if (k) os << ", ";
                write(os, j[k], indent + 2);
            }
            os << "]";
            return;
        }
        os << "[\n";
        for (size_t k = 0; k < j.size(); ++k) {
            if (k) os << ",\n";
            os << inner;
            write(os, j[k], indent + 2);
        }
        os << "\n" << pad << "]";
    } else {
        os << j.dump();
    }
}

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw SchemaError("field '" + field + "': " + what);
}

const json& need(const json& j, const std::string& key, const std::string& where = "") {
    const std::string name = where.empty() ? key : where + "." + key;
    if (!j.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
    if (!j.contains(key)) fail(name, "missing");
    return j.at(key);
}

double number(const json& j, const std::string& field) {
    if (!j.is_number()) fail(field, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(field, "non-finite value");
    return v;
}

int integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    return j.get<int>();
}

json vec_json(const VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

VectorXd vec_from(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of numbers");
    VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i) v(i) = number(j[i], field + "[" + std::to_string(i) + "]");
    return v;
}

json mat_json(const MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vec_json(m.row(i).transpose()));
    return a;
}

MatrixXd mat_from(const json& j, const std::string& field, int rows, int cols) {
    if (j.is_string() && j.get<std::string>() == "identity") {
        if (rows != cols) fail(field, "identity requires a square matrix");
        return MatrixXd::Identity(rows, cols);
    }
    if (!j.is_array() || int(j.size()) != rows) fail(field, "expected " + std::to_string(rows) + " rows");
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        VectorXd r = vec_from(j[i], field + "[" + std::to_string(i) + "]");
        if (r.size() != cols) fail(field + "[" + std::to_string(i) + "]", "expected " + std::to_string(cols) + " columns");
        m.row(i) = r.transpose();
    }
    return m;
}

template <int R>
json tensor_json(const SymTensor<R>& t) {
    json a = json::array();
    for (const auto& [k, v] : t.entries()) {
        json e = json::array();
        for (int i : k) e.push_back(i);
        e.push_back(v);
        a.push_back(e);
    }
    return a;
}

template <int R>
SymTensor<R> tensor_from(const json& j, const std::string& field, int n) {
    if (!j.is_array()) fail(field, "expected an array of entries");
    SymTensor<R> t(n);
    std::set<typename SymTensor<R>::Key> seen;
    for (size_t e = 0; e < j.size(); ++e) {
        const std::string f = field + "[" + std::to_string(e) + "]";
        if (!j[e].is_array() || int(j[e].size()) != R + 1)
            fail(f, "expected " + std::to_string(R) + " indices and a value");
        typename SymTensor<R>::Key k;
        for (int a = 0; a < R; ++a) {
            k[a] = integer(j[e][a], f);
            if (k[a] < 0 || k[a] >= n) fail(f, "index out of range");
        }
        auto c = SymTensor<R>::canonical(k);
        if (!seen.insert(c).second) fail(f, "duplicate entry for the same index set");
        t.set(c, number(j[e][R], f));
    }
    return t;
}

json poly_list(const RealPoly& p, int m) {
    json a = json::array();
    for (const auto& [e, c] : p.terms()) {
        json d = json::array(), v = json::array();
        for (int r = 0; r < m; ++r) {
            d.push_back(e[r]);
            v.push_back(e[m + r]);
        }
        a.push_back(json::array({c, d, v}));
    }
    return a;
}

RealPoly poly_from(const json& j, const std::string& field, int m) {
    if (!j.is_array()) fail(field, "expected a list of monomials");
    RealPoly p = zero_poly(m);
    for (size_t k = 0; k < j.size(); ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const json& t = j[k];
        if (!t.is_array() || t.size() != 3) fail(f, "expected [coefficient, displacement exponents, velocity exponents]");
        const double c = number(t[0], f);
        std::vector<int> d, v;
        for (int w = 1; w <= 2; ++w) {
            if (!t[w].is_array() || int(t[w].size()) != m) fail(f, "exponent list must have one entry per master");
            for (const auto& x : t[w]) {
                int e = integer(x, f);
                if (e < 0) fail(f, "negative exponent");
                (w == 1 ? d : v).push_back(e);
            }
        }
        Exps e = exponents(d, v);
        if (p.coeff(e) != 0.0) fail(f, "duplicate monomial");
        p.add(e, c);
    }
    return p;
}

std::vector<int> int_list(const json& j, const std::string& field) {
    if (!j.is_array()) fail(field, "expected an array of integers");
    std::vector<int> out;
    for (const auto& x : j) out.push_back(integer(x, field));
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot serialise a non-finite value");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string dump_json(const json& j) {
    std::ostringstream os;
    write(os, j, 0);
    os << "\n";
    return os.str();
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json model_to_json(const PhysicalModel& model) {
    json j;
    j["n"] = model.n;
    if (model.mass.isIdentity(0.0))
        j["mass"] = "identity";
    else
        j["mass"] = mat_json(model.mass);
    j["stiffness"] = mat_json(model.stiffness);
    j["quad"] = tensor_json(model.quad);
    j["cubic"] = tensor_json(model.cubic);
    return j;
}

PhysicalModel model_from_json(const json& j) {
    PhysicalModel m;
    m.n = integer(need(j, "n"), "n");
    if (m.n < 1) fail("n", "must be positive");
    m.mass = mat_from(need(j, "mass"), "mass", m.n, m.n);
    m.stiffness = mat_from(need(j, "stiffness"), "stiffness", m.n, m.n);
    m.quad = j.contains("quad") ? tensor_from<3>(j["quad"], "quad", m.n) : QuadTensor(m.n);
    m.cubic = j.contains("cubic") ? tensor_from<4>(j["cubic"], "cubic", m.n) : CubicTensor(m.n);
    auto asym = [](const MatrixXd& a) { return (a - a.transpose()).norm() / std::max(a.norm(), 1e-300); };
    if (asym(m.mass) > 1e-12) fail("mass", "not symmetric");
    if (asym(m.stiffness) > 1e-12) fail("stiffness", "not symmetric");
    return m;
}

json modal_to_json(const ModalModel& mm) {
    json j;
    j["omega"] = vec_json(mm.omega);
    j["V"] = mat_json(mm.V);
    j["g"] = tensor_json(mm.g);
    j["h"] = tensor_json(mm.h);
    if (mm.damping_ratio.size()) j["damping_ratio"] = vec_json(mm.damping_ratio);
    return j;
}

ModalModel modal_from_json(const json& j) {
    ModalModel mm;
    mm.omega = vec_from(need(j, "omega"), "omega");
    const int N = int(mm.omega.size());
    const json& V = need(j, "V");
    if (!V.is_array() || V.empty()) fail("V", "expected rows");
    mm.V = mat_from(V, "V", int(V.size()), N);
    mm.g = tensor_from<3>(need(j, "g"), "g", N);
    mm.h = tensor_from<4>(need(j, "h"), "h", N);
    if (j.contains("damping_ratio")) {
        mm.damping_ratio = vec_from(j["damping_ratio"], "damping_ratio");
        if (mm.damping_ratio.size() != N) fail("damping_ratio", "one value per mode is required");
    }
    return mm;
}

json map_to_json(const ManifoldMap& map) {
    const int m = map.n_masters();
    json j;
    j["style"] = map.style;
    j["space"] = map.space;
    j["order"] = map.order;
    j["masters"] = map.masters;
    json d = json::array(), v = json::array();
    for (const auto& p : map.displacement) d.push_back(poly_list(p, m));
    for (const auto& p : map.velocity) v.push_back(poly_list(p, m));
    j["displacement"] = d;
    j["velocity"] = v;
    return j;
}

ManifoldMap map_from_json(const json& j) {
    ManifoldMap map;
    const json& st = need(j, "style", "map");
    if (!st.is_string()) fail("map.style", "expected a string");
    map.style = st.get<std::string>();
    const json& sp = need(j, "space", "map");
    if (!sp.is_string()) fail("map.space", "expected a string");
    map.space = sp.get<std::string>();
    map.order = integer(need(j, "order", "map"), "map.order");
    map.masters = int_list(need(j, "masters", "map"), "map.masters");
    const int m = map.n_masters();
    const json& d = need(j, "displacement", "map");
    const json& v = need(j, "velocity", "map");
    if (!d.is_array() || !v.is_array() || d.size() != v.size()) fail("map.velocity", "must match map.displacement");
    for (size_t k = 0; k < d.size(); ++k) {
        map.displacement.push_back(poly_from(d[k], "map.displacement[" + std::to_string(k) + "]", m));
        map.velocity.push_back(poly_from(v[k], "map.velocity[" + std::to_string(k) + "]", m));
    }
    return map;
}

json rom_to_json(const Rom& rom) {
    const ReducedModel& rm = rom.reduced;
    json j;
    j["method"] = rm.method;
    j["masters"] = rm.masters;
    j["omega"] = vec_json(rm.omega);
    if (rm.damping_ratio.size()) j["damping_ratio"] = vec_json(rm.damping_ratio);
    if (rm.force_amplitude.size()) {
        j["force_amplitude"] = vec_json(rm.force_amplitude);
        j["force_frequency"] = rm.force_frequency;
    }
    json mono = json::array();
    for (const auto& p : rm.restoring) mono.push_back(poly_list(p, rm.m()));
    j["monomials"] = mono;
    j["map"] = map_to_json(rom.map);
    return j;
}

Rom rom_from_json(const json& j) {
    Rom rom;
    ReducedModel& rm = rom.reduced;
    const json& meth = need(j, "method");
    if (!meth.is_string()) fail("method", "expected a string");
    rm.method = meth.get<std::string>();
    rm.masters = int_list(need(j, "masters"), "masters");
    rm.omega = vec_from(need(j, "omega"), "omega");
    const int m = rm.m();
    if (int(rm.masters.size()) != m) fail("omega", "one frequency per master is required");
    if (j.contains("damping_ratio")) {
        rm.damping_ratio = vec_from(j["damping_ratio"], "damping_ratio");
        if (rm.damping_ratio.size() != m) fail("damping_ratio", "one value per master is required");
    }
    if (j.contains("force_amplitude")) {
        rm.force_amplitude = vec_from(j["force_amplitude"], "force_amplitude");
        if (rm.force_amplitude.size() != m) fail("force_amplitude", "one value per master is required");
        rm.force_frequency = j.contains("force_frequency") ? number(j["force_frequency"], "force_frequency") : 0.0;
    }
    const json& mono = need(j, "monomials");
    if (!mono.is_array() || int(mono.size()) != m) fail("monomials", "one list per master equation is required");
    for (int r = 0; r < m; ++r) rm.restoring.push_back(poly_from(mono[r], "monomials[" + std::to_string(r) + "]", m));
    rom.map = map_from_json(need(j, "map"));
    if (rom.map.masters != rm.masters) fail("map.masters", "differs from masters");
    return rom;
}

std::string curve_to_csv(const Curve& curve) {
    const int m = curve.points.empty() ? 1 : int(curve.points[0].amplitude.size());
    std::ostringstream os;
    os << "omega";
    for (int r = 0; r < m; ++r) os << ",a_" << r + 1;
    os << ",stable,tag\n";
    for (const auto& p : curve.points) {
        os << format_double(p.omega);
        for (int r = 0; r < m; ++r) os << "," << format_double(p.amplitude(r));
        os << "," << (p.stable ? 1 : 0) << "," << p.tag << "\n";
    }
    return os.str();
}

Curve curve_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail("header", "empty curve file");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    auto head = split(line);
    if (head.size() < 4 || head.front() != "omega" || head[head.size() - 2] != "stable" || head.back() != "tag")
        fail("header", "expected omega,a_1..a_m,stable,tag");
    const int m = int(head.size()) - 3;
    Curve c;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto cells = split(line);
        const std::string f = "row " + std::to_string(row);
        if (int(cells.size()) != m + 3) fail(f, "wrong column count");
        CurvePoint p;
        try {
            p.omega = std::stod(cells[0]);
            p.amplitude.resize(m);
            for (int r = 0; r < m; ++r) p.amplitude(r) = std::stod(cells[1 + r]);
        } catch (const std::exception&) {
            fail(f, "malformed number");
        }
        if (cells[m + 1] != "0" && cells[m + 1] != "1") fail(f, "stable must be 0 or 1");
        p.stable = cells[m + 1] == "1";
        p.tag = cells[m + 2];
        if (p.tag != "none" && p.tag != "SN" && p.tag != "PF" && p.tag != "NS-candidate") fail(f, "unknown tag");
        c.points.push_back(p);
    }
    return c;
}

}  // namespace nlrom
