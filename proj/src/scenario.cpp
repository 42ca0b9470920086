#include "loss/scenario.hpp"

#include "loss/error.hpp"

#include <algorithm>

namespace loss {

namespace {

const std::vector<std::string> kFields2D{"v1", "v3", "sigma"};
const std::vector<std::string> kFields3D{"v1", "v2", "v3", "e11", "e22", "e33", "e12", "e13", "e23"};

std::array<double, 3> triple(const Config& c, const std::string& key, std::array<double, 3> fallback)
{
    const auto v = c.get_reals(key, {fallback[0], fallback[1], fallback[2]});
    require(v.size() == 3, ErrorCode::config, "'" + key + "' needs three values");
    return {v[0], v[1], v[2]};
}

} // namespace

std::vector<std::string> Scenario::field_names() const { return dim() == 2 ? kFields2D : kFields3D; }

const std::vector<KeySpec>& scenario_schema()
{
    static const std::vector<KeySpec> s = {
        {"model", ValueType::word, {"acoustic2d", "elastic3d"}},
        {"units", ValueType::word, {}},
        {"grid.nx", ValueType::integer, {}},
        {"grid.ny", ValueType::integer, {}},
        {"grid.nz", ValueType::integer, {}},
        {"grid.x_min", ValueType::real, {}},
        {"grid.x_max", ValueType::real, {}},
        {"grid.y_min", ValueType::real, {}},
        {"grid.y_max", ValueType::real, {}},
        {"grid.z_min", ValueType::real, {}},
        {"grid.z_max", ValueType::real, {}},
        {"decomposition.px", ValueType::integer, {}},
        {"decomposition.py", ValueType::integer, {}},
        {"decomposition.pz", ValueType::integer, {}},
        {"decomposition.n_nb", ValueType::integer, {}},
        {"material.rho", ValueType::real, {}},
        {"material.cp", ValueType::real, {}},
        {"material.cs", ValueType::real, {}},
        {"material.box.*.lo", ValueType::real_list, {}},
        {"material.box.*.hi", ValueType::real_list, {}},
        {"material.box.*.rho", ValueType::real, {}},
        {"material.box.*.cp", ValueType::real, {}},
        {"material.box.*.cs", ValueType::real, {}},
        {"source.enabled", ValueType::boolean, {}},
        {"source.center", ValueType::real_list, {}},
        {"source.fp", ValueType::real, {}},
        {"source.delay", ValueType::real, {}},
        {"source.targets", ValueType::word_list, {"v1", "v2", "v3"}},
        {"initial.enabled", ValueType::boolean, {}},
        {"initial.amplitude", ValueType::real, {}},
        {"initial.a", ValueType::real, {}},
        {"initial.center", ValueType::real_list, {}},
        {"pml.enabled", ValueType::boolean, {}},
        {"pml.cells", ValueType::integer, {}},
        {"pml.r", ValueType::real, {}},
        {"pml.k_max", ValueType::real, {}},
        {"pml.f0", ValueType::real, {}},
        {"pml.m", ValueType::real, {}},
        {"pml.p_exp", ValueType::real, {}},
        {"runtime.update", ValueType::word, {"pml", "plain"}},
        {"runtime.nan_check_every", ValueType::integer, {}},
        {"time.dt", ValueType::real, {}},
        {"time.t_end", ValueType::real, {}},
        {"output.times", ValueType::real_list, {}},
        {"output.fields", ValueType::word_list, {"v1", "v2", "v3", "sigma", "e11", "e22", "e33", "e12", "e13", "e23"}},
        {"oracle.extent", ValueType::real, {}},
        {"oracle.n", ValueType::integer, {}},
    };
    return s;
}

Config parse_scenario_config(const std::string& text, const std::string& source)
{
    return Config::parse(text, scenario_schema(), source);
}

Config load_scenario_config(const std::string& path) { return Config::load(path, scenario_schema()); }

Scenario scenario_from_config(const Config& c)
{
    Scenario s;
    require(c.has("model"), ErrorCode::config, "missing key 'model'");
    s.model = c.get_word("model", "") == "elastic3d" ? Model::elastic3d : Model::acoustic2d;
    const bool three = s.model == Model::elastic3d;
    s.units = c.get_word("units", three ? "km,s" : "m,s");

    const char* ax = "xyz";
    for (int a = 0; a < 3; ++a) {
        const std::string n = std::string("grid.n") + ax[a];
        if (!three && a == 1) {
            require(!c.has(n) || c.get_int(n, 0) == 0, ErrorCode::config, "acoustic2d has no y axis");
            s.intervals[a] = 0;
            s.lo[a] = s.hi[a] = 0.0;
            s.patches[a] = 1;
            continue;
        }
        require(c.has(n), ErrorCode::config, "missing key '" + n + "'");
        s.intervals[a] = static_cast<int>(c.get_int(n, 0));
        require(s.intervals[a] >= 4, ErrorCode::config, "'" + n + "' must be >= 4");
        s.lo[a] = c.get_real(std::string("grid.") + ax[a] + "_min", three ? -40.0 : -5.0);
        s.hi[a] = c.get_real(std::string("grid.") + ax[a] + "_max", three ? 40.0 : 5.0);
        require(s.hi[a] > s.lo[a], ErrorCode::config, std::string("grid: ") + ax[a] + "_max must exceed " + ax[a] + "_min");
        s.patches[a] = static_cast<int>(c.get_int(std::string("decomposition.p") + ax[a], 1));
    }
    s.n_nb = static_cast<int>(c.get_int("decomposition.n_nb", 20));
    require(s.n_nb >= 1, ErrorCode::config, "decomposition.n_nb must be >= 1");

    s.material.rho = c.get_real("material.rho", 1.0);
    s.material.cp = c.get_real("material.cp", 1.0);
    s.material.cs = c.get_real("material.cs", 0.0);
    std::vector<int> boxes;
    for (const auto& [k, v] : c.values()) {
        (void)v;
        if (k.rfind("material.box.", 0) == 0) {
            const auto rest = k.substr(13);
            const int id = std::stoi(rest.substr(0, rest.find('.')));
            if (std::find(boxes.begin(), boxes.end(), id) == boxes.end())
                boxes.push_back(id);
        }
    }
    std::sort(boxes.begin(), boxes.end());
    for (int id : boxes) {
        const std::string p = "material.box." + std::to_string(id) + ".";
        for (const char* f : {"lo", "hi", "rho", "cp"})
            require(c.has(p + f), ErrorCode::config, "missing key '" + p + f + "'");
        MaterialBox b;
        b.lo = triple(c, p + "lo", {});
        b.hi = triple(c, p + "hi", {});
        b.rho = c.get_real(p + "rho", 1.0);
        b.cp = c.get_real(p + "cp", 1.0);
        b.cs = c.get_real(p + "cs", 0.0);
        s.material.boxes.push_back(b);
    }
    s.material.validate(three);

    s.source.enabled = c.get_bool("source.enabled", false);
    s.source.center = triple(c, "source.center", {0, 0, 0});
    s.source.fp = c.get_real("source.fp", 1.0);
    s.source.delay = c.get_real("source.delay", 0.0);
    const auto targets = c.get_words("source.targets", {"v3"});
    s.source.targets = {false, false, false};
    for (const auto& t : targets)
        s.source.targets[static_cast<std::size_t>(t[1] - '1')] = true;
    require(!s.source.enabled || three, ErrorCode::config, "sources are only supported for elastic3d");
    require(s.source.fp > 0, ErrorCode::config, "source.fp must be positive");

    s.initial.enabled = c.get_bool("initial.enabled", false);
    s.initial.amplitude = c.get_real("initial.amplitude", 1.0);
    s.initial.a = c.get_real("initial.a", 5.0);
    s.initial.center = triple(c, "initial.center", {0, 0, 0});
    require(!s.initial.enabled || !three, ErrorCode::config, "initial pressure pulse is only defined for acoustic2d");
    require(s.initial.a > 0, ErrorCode::config, "initial.a must be positive");

    s.pml_enabled = c.get_bool("pml.enabled", false);
    require(!s.pml_enabled || !three, ErrorCode::config, "pml is only supported for acoustic2d");
    s.pml.cells = static_cast<int>(c.get_int("pml.cells", 50));
    s.pml.r = c.get_real("pml.r", 1e-6);
    s.pml.k_max = c.get_real("pml.k_max", 1.0);
    s.pml.f0 = c.get_real("pml.f0", 1.0);
    s.pml.m = c.get_real("pml.m", 1.0);
    s.pml.p_exp = c.get_real("pml.p_exp", 1.0);
    if (s.pml_enabled) {
        require(s.pml.cells >= 1, ErrorCode::config, "pml.cells must be >= 1");
        require(s.pml.r > 0 && s.pml.r < 1, ErrorCode::config, "pml.r must lie in (0, 1)");
        require(s.pml.k_max >= 1, ErrorCode::config, "pml.k_max must be >= 1");
        require(s.pml.f0 > 0, ErrorCode::config, "pml.f0 must be positive");
    }
    s.update = c.get_word("runtime.update", "pml") == "plain" ? UpdateMode::plain : UpdateMode::pml_aware;
    s.nan_check_every = static_cast<int>(c.get_int("runtime.nan_check_every", 10));
    require(s.nan_check_every >= 1, ErrorCode::config, "runtime.nan_check_every must be >= 1");

    require(c.has("time.dt"), ErrorCode::config, "missing key 'time.dt'");
    s.dt = c.get_real("time.dt", 0.0);
    s.t_end = c.get_real("time.t_end", 0.0);
    const TimeGrid tg = TimeGrid::make(s.dt, s.t_end);
    s.output_times = c.get_reals("output.times", {s.t_end});
    for (double t : s.output_times)
        (void)tg.step_of(t);
    s.output_fields = c.get_words("output.fields", {"v3"});
    const auto names = s.field_names();
    for (const auto& f : s.output_fields)
        require(std::find(names.begin(), names.end(), f) != names.end(), ErrorCode::config,
                "field '" + f + "' does not exist in this model");

    s.oracle_extent = c.get_real("oracle.extent", 0.0);
    s.oracle_n = static_cast<int>(c.get_int("oracle.n", 64));
    require(s.oracle_extent >= 0, ErrorCode::config, "oracle.extent must be >= 0");
    require(s.oracle_n >= 4, ErrorCode::config, "oracle.n must be >= 4");
    return s;
}

} // namespace loss
