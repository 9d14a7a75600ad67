#include "cdnozzle/config.hpp"

#include "cdnozzle/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace cdnozzle {

using nlohmann::json;

const char* mode_name(Mode m)
{
    switch (m) {
    case Mode::solve: return "solve";
    case Mode::refine: return "refine";
    case Mode::sweep: return "sweep";
    }
    return "?";
}

namespace {

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw ConfigError((path.empty() ? std::string("config") : path) + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key()))
            throw ConfigError("unknown key '" + join(path, it.key()) + "'");
}

const json* find(const json& j, const char* key)
{
    const auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number())
        throw ConfigError(path + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw ConfigError(path + " must be finite");
    return v;
}

double number_or(const json& j, const char* key, const std::string& path, double fallback)
{
    const json* v = find(j, key);
    return v ? number(*v, join(path, key)) : fallback;
}

double required(const json& j, const char* key, const std::string& path)
{
    const json* v = find(j, key);
    if (!v)
        throw ConfigError("missing key '" + join(path, key) + "'");
    return number(*v, join(path, key));
}

int integer_or(const json& j, const char* key, const std::string& path, int fallback)
{
    const json* v = find(j, key);
    if (!v)
        return fallback;
    if (!v->is_number_integer())
        throw ConfigError(join(path, key) + " must be an integer");
    return v->get<int>();
}

double positive(double v, const std::string& path)
{
    if (!(v > 0.0)) {
        std::ostringstream os;
        os << path << " must be > 0 (got " << v << ")";
        throw ConfigError(os.str());
    }
    return v;
}

std::vector<double> number_list(const json& j, const std::string& path)
{
    if (!j.is_array())
        throw ConfigError(path + " must be a list of numbers");
    std::vector<double> v;
    for (size_t k = 0; k < j.size(); ++k)
        v.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
    return v;
}

// deviation profile: a coefficient list, or {coeffs, origin, scale}; absent means zero
Profile deviation(const json& parent, const char* key, const std::string& path)
{
    const json* j = find(parent, key);
    if (!j)
        return Profile();
    const std::string p = join(path, key);
    if (j->is_array()) {
        std::vector<double> c = number_list(*j, p);
        if (c.empty())
            throw ConfigError(p + " needs at least one coefficient");
        return Profile(std::move(c));
    }
    check_object(*j, p, {"coeffs", "origin", "scale"});
    const json* c = find(*j, "coeffs");
    if (!c)
        throw ConfigError("missing key '" + p + ".coeffs'");
    std::vector<double> coeffs = number_list(*c, p + ".coeffs");
    if (coeffs.empty())
        throw ConfigError(p + ".coeffs needs at least one coefficient");
    const double origin = number_or(*j, "origin", p, 0.0);
    const double scale = positive(number_or(*j, "scale", p, 1.0), p + ".scale");
    return Profile(std::move(coeffs), origin, scale);
}

Profile around(double base, const Profile& dev)
{
    return Profile::constant(base, dev.origin(), dev.scale()) + dev;
}

ThermoState layer_state(const json& bg, const char* key, double pressure, double gamma)
{
    const json* j = find(bg, key);
    const std::string p = join("background", key);
    if (!j)
        throw ConfigError("missing key '" + p + "'");
    check_object(*j, p, {"rho", "u"});
    const double rho = positive(required(*j, "rho", p), p + ".rho");
    const double u = positive(required(*j, "u", p), p + ".u");
    return ThermoState::from_primitive(rho, u, 0.0, pressure, gamma);
}

EntranceProfiles entrance(const json* j, const std::string& path, const BackgroundLayer& b)
{
    static const json empty = json::object();
    const json& e = j ? *j : empty;
    check_object(e, path, {"a", "b", "j"});
    return {around(b.state.entropy_a, deviation(e, "a", path)), around(b.state.bernoulli_b, deviation(e, "b", path)),
            around(b.mass_flux, deviation(e, "j", path))};
}

}  // namespace

void validate_amplitudes(const std::vector<double>& amps)
{
    if (amps.empty())
        throw ConfigError("experiment.amplitudes must not be empty");
    for (size_t k = 0; k < amps.size(); ++k) {
        if (!(amps[k] >= 0.0) || !std::isfinite(amps[k]))
            throw ConfigError("experiment.amplitudes must be finite and >= 0");
        if (k > 0 && !(amps[k] < amps[k - 1]))
            throw ConfigError("experiment.amplitudes must be strictly descending");
    }
}

void validate_grids(const std::vector<int>& grids)
{
    if (grids.empty())
        throw ConfigError("experiment.grids must not be empty");
    for (size_t k = 0; k < grids.size(); ++k) {
        if (grids[k] < 5)
            throw ConfigError("experiment.grids: need at least 5 nodes per direction");
        if (k > 0 && !(grids[k] > grids[k - 1]))
            throw ConfigError("experiment.grids must be strictly ascending");
    }
}

ProblemConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_object(root, "", {"gas", "background", "geometry", "perturbation", "numerics", "experiment"});
    static const json empty = json::object();
    auto block = [&](const char* key) -> const json& {
        const json* j = find(root, key);
        return j ? *j : empty;
    };

    ProblemConfig c;
    PhysicalProblem& p = c.shape;

    const json& gas = block("gas");
    check_object(gas, "gas", {"gamma", "r_gas"});
    p.gas.gamma = required(gas, "gamma", "gas");
    p.gas.r_gas = number_or(gas, "r_gas", "gas", 1.0);
    p.gas.validate();

    const json& bg = block("background");
    check_object(bg, "background", {"upper", "lower", "pressure"});
    const double pressure = positive(required(bg, "pressure", "background"), "background.pressure");
    p.background = build_background(layer_state(bg, "upper", pressure, p.gas.gamma),
                                    layer_state(bg, "lower", pressure, p.gas.gamma), p.gas.gamma);

    const json& geo = block("geometry");
    check_object(geo, "geometry", {"length", "wall_upper", "wall_lower"});
    const double length = positive(number_or(geo, "length", "geometry", 1.0), "geometry.length");
    p.geometry = straight_nozzle(length);
    p.geometry.wall_upper = around(1.0, deviation(geo, "wall_upper", "geometry"));
    p.geometry.wall_lower = around(-1.0, deviation(geo, "wall_lower", "geometry"));

    const json& pert = block("perturbation");
    check_object(pert, "perturbation", {"upper", "lower", "exit_angle", "scale_to_sigma"});
    p.data.upper = entrance(find(pert, "upper"), "perturbation.upper", p.background.upper);
    p.data.lower = entrance(find(pert, "lower"), "perturbation.lower", p.background.lower);
    p.data.exit_angle = deviation(pert, "exit_angle", "perturbation");
    if (const json* s = find(pert, "scale_to_sigma")) {
        c.scale_to_sigma = number(*s, "perturbation.scale_to_sigma");
        if (c.scale_to_sigma < 0.0)
            throw ConfigError("perturbation.scale_to_sigma must be >= 0");
    }

    const json& num = block("numerics");
    check_object(num, "numerics",
                 {"n1", "n2", "alpha", "grading", "picard_tol", "picard_max_iters", "damping", "blowup_factor",
                  "tol_q_rel", "newton_max_iters", "newton_theta", "max_halvings", "stagnation_factor",
                  "stagnation_window", "forcing", "closure_tol", "closure_max_iters", "sonic_guard",
                  "residual_tol", "iterative_tol", "direct_limit", "force_iterative"});
    c.domain.n1 = integer_or(num, "n1", "numerics", 65);
    c.domain.n2 = integer_or(num, "n2", "numerics", 65);
    c.domain.alpha = number_or(num, "alpha", "numerics", 0.5);
    if (const json* g = find(num, "grading")) {
        c.domain.grading = number(*g, "numerics.grading");
        if (c.domain.grading < 0.0)
            throw ConfigError("numerics.grading must be >= 0");
    }
    c.domain.closure.tol = positive(number_or(num, "closure_tol", "numerics", 1e-13), "numerics.closure_tol");
    c.domain.closure.max_iters = integer_or(num, "closure_max_iters", "numerics", 50);
    c.domain.closure.sonic_guard = positive(number_or(num, "sonic_guard", "numerics", 1e-6), "numerics.sonic_guard");
    if (c.domain.closure.max_iters < 1)
        throw ConfigError("numerics.closure_max_iters must be >= 1");

    FixedPointSettings& fp = c.solver.layer;
    fp.tol_update = positive(number_or(num, "picard_tol", "numerics", 1e-10), "numerics.picard_tol");
    fp.max_iters = integer_or(num, "picard_max_iters", "numerics", 60);
    fp.damping = number_or(num, "damping", "numerics", 1.0);
    fp.blowup_factor = number_or(num, "blowup_factor", "numerics", 10.0);
    fp.solver.residual_tol = positive(number_or(num, "residual_tol", "numerics", 1e-11), "numerics.residual_tol");
    fp.solver.iterative_tol = positive(number_or(num, "iterative_tol", "numerics", 1e-14), "numerics.iterative_tol");
    fp.solver.direct_limit = integer_or(num, "direct_limit", "numerics", 100000);
    if (const json* f = find(num, "force_iterative")) {
        if (!f->is_boolean())
            throw ConfigError("numerics.force_iterative must be true or false");
        fp.solver.force_iterative = f->get<bool>();
    }
    c.solver.tol_q_rel = positive(number_or(num, "tol_q_rel", "numerics", 1e-9), "numerics.tol_q_rel");
    c.solver.max_iters = integer_or(num, "newton_max_iters", "numerics", 30);
    c.solver.theta = number_or(num, "newton_theta", "numerics", 1.0);
    c.solver.max_halvings = integer_or(num, "max_halvings", "numerics", 4);
    c.solver.stagnation_factor =
        positive(number_or(num, "stagnation_factor", "numerics", 0.95), "numerics.stagnation_factor");
    c.solver.stagnation_window = integer_or(num, "stagnation_window", "numerics", 5);
    if (const json* f = find(num, "forcing")) {
        if (!f->is_boolean())
            throw ConfigError("numerics.forcing must be true or false");
        c.solver.forcing = f->get<bool>();
    }
    try {
        c.solver.validate();
    } catch (const ConfigError& e) {
        // the solver's own names map one to one onto the numerics block
        throw ConfigError(std::string("numerics: ") + e.what());
    }

    const json& ex = block("experiment");
    check_object(ex, "experiment", {"mode", "amplitudes", "grids"});
    if (const json* m = find(ex, "mode")) {
        const std::string s = m->is_string() ? m->get<std::string>() : "";
        if (s == "solve")
            c.mode = Mode::solve;
        else if (s == "refine")
            c.mode = Mode::refine;
        else if (s == "sweep")
            c.mode = Mode::sweep;
        else
            throw ConfigError("experiment.mode must be one of solve, refine, sweep");
    }
    c.amplitudes = {1e-2, 5e-3, 2.5e-3};
    if (const json* a = find(ex, "amplitudes"))
        c.amplitudes = number_list(*a, "experiment.amplitudes");
    validate_amplitudes(c.amplitudes);
    c.grids = {33, 65, 129};
    if (const json* g = find(ex, "grids")) {
        if (!g->is_array())
            throw ConfigError("experiment.grids must be a list of integers");
        c.grids.clear();
        for (const json& v : *g) {
            if (!v.is_number_integer())
                throw ConfigError("experiment.grids must be a list of integers");
            c.grids.push_back(v.get<int>());
        }
    }
    validate_grids(c.grids);

    p.validate();
    c.problem = c.scale_to_sigma >= 0.0 ? problem_at_sigma(c, c.scale_to_sigma) : p;
    return c;
}

ProblemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

PhysicalProblem problem_at_sigma(const ProblemConfig& c, double sigma)
{
    if (sigma == 0.0)
        return scale_perturbation(c.shape, 0.0);
    const double s0 = perturbation_size(c.shape, c.domain.alpha).total;
    if (!(s0 > 0.0))
        throw ConfigError("perturbation is zero, cannot rescale it to sigma = " + std::to_string(sigma));
    return scale_perturbation(c.shape, sigma / s0);
}

}  // namespace cdnozzle
