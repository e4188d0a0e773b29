#include "vspike/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vspike/io.hpp"

namespace vspike {

using nlohmann::json;

std::string RunConfig::canonical_json() const {
    json j;
    j["p"] = p;
    j["g"] = g;
    j["alpha"] = alpha;
    j["delta"] = delta;
    j["delta_list"] = delta_list;
    j["Lx"] = Lx;
    j["Nx"] = Nx;
    j["Ny"] = Ny;
    j["tol_shoot"] = tol_shoot;
    j["tol_solve"] = tol_solve;
    j["tol_eigen"] = tol_eigen;
    j["tol_fixed_point"] = tol_fixed_point;
    j["tol_tau"] = tol_tau;
    j["rescale_C"] = rescale_C;
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    j["eigen_hy_target"] = eigen_hy_target;
    return j.dump();  // object keys are emitted sorted
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical_json()); }

RunConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    static const std::set<std::string> known = {
        "p",         "g",         "alpha",     "delta",     "delta_list",
        "Lx",        "Nx",        "Ny",        "tol_shoot", "tol_solve",
        "tol_eigen", "tol_fixed_point", "tol_tau", "rescale_C", "out_dir",
        "threads",   "eigen_hy_target"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");

    RunConfig c;
    auto get = [&](const char* k, auto& target) {
        if (j.contains(k)) target = j.at(k).get<std::decay_t<decltype(target)>>();
    };
    get("p", c.p);
    get("g", c.g);
    get("alpha", c.alpha);
    get("delta", c.delta);
    get("delta_list", c.delta_list);
    get("Lx", c.Lx);
    get("Nx", c.Nx);
    get("Ny", c.Ny);
    get("tol_shoot", c.tol_shoot);
    get("tol_solve", c.tol_solve);
    get("tol_eigen", c.tol_eigen);
    get("tol_fixed_point", c.tol_fixed_point);
    get("tol_tau", c.tol_tau);
    get("rescale_C", c.rescale_C);
    get("out_dir", c.out_dir);
    get("threads", c.threads);
    get("eigen_hy_target", c.eigen_hy_target);
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(RunConfig& cfg) {
    if (cfg.p < 1) throw std::invalid_argument("config: p must be >= 1");
    if (!(cfg.g > 0) || !(cfg.alpha > 0))
        throw std::invalid_argument("config: g and alpha must be positive");
    for (double t : {cfg.tol_shoot, cfg.tol_solve, cfg.tol_eigen, cfg.tol_fixed_point, cfg.tol_tau})
        if (!(t > 0)) throw std::invalid_argument("config: tolerances must be positive");
    if (cfg.Nx < 8 || cfg.Nx % 2 != 0) throw std::invalid_argument("config: Nx must be even, >= 8");
    if (cfg.Ny < 4) throw std::invalid_argument("config: Ny must be >= 4");
    if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (!(cfg.rescale_C > 0)) throw std::invalid_argument("config: rescale_C must be positive");

    auto check_delta = [&](double d) {
        if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("config: delta must be in (0,1)");
        if (d < 0.2 || d > 0.6) {
            std::ostringstream os;
            os << "delta = " << d
               << " is outside [0.2, 0.6]; the exponentially small scales fall below solver"
                  " tolerances near delta = 0.15";
            cfg.warnings.push_back(os.str());
        }
    };
    check_delta(cfg.delta);
    for (double d : cfg.delta_list) check_delta(d);
}

} // namespace vspike
