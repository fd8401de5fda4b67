#include "abcx/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace abcx {

namespace {

using nlohmann::json;

std::vector<std::vector<double>> parse_matrix(const json& j, const std::string& what,
                                              bool stochastic) {
    if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a non-empty matrix");
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    for (const auto& jr : j) {
        if (!jr.is_array() || jr.empty()) throw ConfigError(what + ": ragged or empty row");
        std::vector<double> row;
        for (const auto& v : jr) {
            if (!v.is_number()) throw ConfigError(what + ": non-numeric entry");
            const double d = v.get<double>();
            if (!std::isfinite(d) || d < 0.0) throw ConfigError(what + ": entries must be >= 0");
            row.push_back(d);
        }
        if (width == 0) width = row.size();
        if (row.size() != width) throw ConfigError(what + ": ragged matrix");
        rows.push_back(std::move(row));
    }
    if (stochastic) {
        for (auto& row : rows) {
            double sum = 0.0;
            for (double v : row) sum += v;
            if (std::abs(sum - 1.0) > 1e-9) {
                throw ConfigError(what + ": row must sum to 1 within 1e-9, got " +
                                  std::to_string(sum));
            }
            for (double& v : row) v /= sum;
        }
    }
    return rows;
}

Channel channel_from(const json& j, const std::string& what) {
    auto rows = parse_matrix(j, what, /*stochastic=*/true);
    const std::size_t in = rows.size();
    const std::size_t out = rows.front().size();
    return Channel(Alphabet(in), Alphabet(out), std::move(rows));
}

UxDist ux_from(const json& j) {
    auto rows = parse_matrix(j, "input.p_ux", /*stochastic=*/false);
    double sum = 0.0;
    for (const auto& row : rows) {
        for (double v : row) sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("input.p_ux: entries must sum to 1 within 1e-9, got " +
                          std::to_string(sum));
    }
    for (auto& row : rows) {
        for (double& v : row) v /= sum;
    }
    return UxDist::from_matrix(rows);
}

double need_number(const json& j, const char* section, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string(section) + "." + key + ": missing or non-numeric");
    }
    return j.at(key).get<double>();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    try {
        if (!j.contains("channel") || !j.at("channel").contains("w_y")) {
            throw ConfigError("channel.w_y: missing");
        }
        Channel w_y = channel_from(j.at("channel").at("w_y"), "channel.w_y");
        std::optional<Channel> w_z;
        if (j.at("channel").contains("w_z")) {
            w_z = channel_from(j.at("channel").at("w_z"), "channel.w_z");
            if (w_z->in_size() != w_y.in_size()) {
                throw ConfigError("channel.w_z: input alphabet differs from w_y");
            }
        }
        if (!j.contains("input") || !j.at("input").contains("p_ux")) {
            throw ConfigError("input.p_ux: missing");
        }
        UxDist p_ux = ux_from(j.at("input").at("p_ux"));
        if (p_ux.x_size() != w_y.in_size()) {
            throw ConfigError("input.p_ux: X alphabet differs from the channel input");
        }

        if (!j.contains("rates")) throw ConfigError("rates: missing");
        const json& jr = j.at("rates");
        RateConfig rates = [&] {
            try {
                return RateConfig(need_number(jr, "rates", "r1"), need_number(jr, "rates", "r2"),
                                  need_number(jr, "rates", "r1_tilde"),
                                  need_number(jr, "rates", "r2_tilde"),
                                  need_number(jr, "rates", "lambda12"),
                                  need_number(jr, "rates", "lambda2"));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("rates: ") + e.what());
            }
        }();

        SolverSettings solver;
        if (j.contains("solver")) {
            const json& js = j.at("solver");
            solver.grid_k = get_or<int>(js, "grid_k", solver.grid_k);
            solver.descent_steps = get_or<int>(js, "descent_steps", solver.descent_steps);
            solver.shrink = get_or<double>(js, "shrink", solver.shrink);
            solver.tolerance = get_or<double>(js, "tolerance_bits", solver.tolerance);
            solver.starts = get_or<int>(js, "starts", solver.starts);
            if (solver.grid_k < 2) throw ConfigError("solver.grid_k: must be >= 2");
            if (solver.tolerance <= 0.0) throw ConfigError("solver.tolerance_bits: must be > 0");
            if (solver.shrink <= 0.0 || solver.shrink >= 1.0) {
                throw ConfigError("solver.shrink: must be in (0, 1)");
            }
        }

        std::optional<SimulationSettings> simulation;
        if (j.contains("simulation")) {
            const json& js = j.at("simulation");
            SimulationSettings sim;
            if (!js.contains("blocklengths") || !js.at("blocklengths").is_array() ||
                js.at("blocklengths").empty()) {
                throw ConfigError("simulation.blocklengths: expected a non-empty array");
            }
            for (const auto& v : js.at("blocklengths")) {
                const std::int64_t n = v.get<std::int64_t>();
                if (n < 1) throw ConfigError("simulation.blocklengths: entries must be >= 1");
                sim.blocklengths.push_back(static_cast<std::size_t>(n));
            }
            for (std::size_t i = 1; i < sim.blocklengths.size(); ++i) {
                if (sim.blocklengths[i] <= sim.blocklengths[i - 1]) {
                    throw ConfigError("simulation.blocklengths: must be strictly increasing");
                }
            }
            sim.trials = get_or<std::int64_t>(js, "trials", sim.trials);
            if (sim.trials < 1) throw ConfigError("simulation.trials: must be >= 1");
            sim.seed = get_or<std::uint64_t>(js, "seed", sim.seed);
            const std::string policy = get_or<std::string>(js, "codebook_policy", "fresh");
            if (policy == "fresh") {
                sim.policy = CodebookPolicy::FreshPerTrial;
            } else if (policy == "fixed") {
                sim.policy = CodebookPolicy::Fixed;
            } else {
                throw ConfigError("simulation.codebook_policy: expected \"fresh\" or \"fixed\"");
            }
            simulation = std::move(sim);
        }

        OracleSettings oracle;
        if (j.contains("oracle")) {
            const json& jo = j.at("oracle");
            oracle.max_outputs = get_or<std::int64_t>(jo, "max_outputs", oracle.max_outputs);
            oracle.max_grid_points =
                get_or<std::int64_t>(jo, "max_grid_points", oracle.max_grid_points);
            oracle.grid_k = get_or<std::int64_t>(jo, "grid_k", oracle.grid_k);
            oracle.solver_tolerance_bits =
                get_or<double>(jo, "solver_tolerance_bits", oracle.solver_tolerance_bits);
            if (oracle.max_outputs < 1 || oracle.max_grid_points < 1 || oracle.grid_k < 1) {
                throw ConfigError("oracle: budgets and grid_k must be >= 1");
            }
            if (oracle.solver_tolerance_bits <= 0.0) {
                throw ConfigError("oracle.solver_tolerance_bits: must be > 0");
            }
        }

        std::optional<SweepSettings> sweep;
        if (j.contains("sweep")) {
            const json& jw = j.at("sweep");
            SweepSettings sw;
            sw.axis = get_or<std::string>(jw, "axis", "");
            static const char* axes[] = {"r1", "r2", "r1_tilde", "r2_tilde", "lambda12", "lambda2"};
            bool ok = false;
            for (const char* a : axes) ok = ok || sw.axis == a;
            if (!ok) throw ConfigError("sweep.axis: unknown rate field \"" + sw.axis + "\"");
            if (!jw.contains("grid") || !jw.at("grid").is_array() || jw.at("grid").empty()) {
                throw ConfigError("sweep.grid: expected a non-empty array");
            }
            for (const auto& v : jw.at("grid")) sw.grid.push_back(v.get<double>());
            for (std::size_t i = 1; i < sw.grid.size(); ++i) {
                if (sw.grid[i] <= sw.grid[i - 1]) {
                    throw ConfigError("sweep.grid: must be strictly increasing");
                }
            }
            sweep = std::move(sw);
        }

        std::string out_dir = "out";
        if (j.contains("output")) out_dir = get_or<std::string>(j.at("output"), "dir", out_dir);

        return RunConfig{std::move(w_y), std::move(w_z),     std::move(p_ux), rates,
                         solver,         std::move(simulation), oracle,       std::move(sweep),
                         std::move(out_dir)};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

json matrix_json(const Channel& ch) {
    json rows = json::array();
    for (std::size_t u = 0; u < ch.in_size(); ++u) {
        json row = json::array();
        for (std::size_t y = 0; y < ch.out_size(); ++y) row.push_back(ch(u, y));
        rows.push_back(std::move(row));
    }
    return rows;
}

json ux_json(const UxDist& p) {
    json rows = json::array();
    for (std::size_t u = 0; u < p.u_size(); ++u) {
        json row = json::array();
        for (std::size_t x = 0; x < p.x_size(); ++x) row.push_back(p.p(u, x));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string serialize_config(const RunConfig& config) {
    json j;
    j["channel"]["w_y"] = matrix_json(config.w_y);
    if (config.w_z) j["channel"]["w_z"] = matrix_json(*config.w_z);
    j["input"]["p_ux"] = ux_json(config.p_ux);
    j["rates"] = {{"r1", config.rates.r1()},
                  {"r2", config.rates.r2()},
                  {"r1_tilde", config.rates.r1_tilde()},
                  {"r2_tilde", config.rates.r2_tilde()},
                  {"lambda12", config.rates.lambda12()},
                  {"lambda2", config.rates.lambda2()}};
    j["solver"] = {{"grid_k", config.solver.grid_k},
                   {"descent_steps", config.solver.descent_steps},
                   {"shrink", config.solver.shrink},
                   {"tolerance_bits", config.solver.tolerance},
                   {"starts", config.solver.starts}};
    if (config.simulation) {
        j["simulation"] = {
            {"blocklengths", config.simulation->blocklengths},
            {"trials", config.simulation->trials},
            {"seed", config.simulation->seed},
            {"codebook_policy",
             config.simulation->policy == CodebookPolicy::FreshPerTrial ? "fresh" : "fixed"}};
    }
    j["oracle"] = {{"max_outputs", config.oracle.max_outputs},
                   {"max_grid_points", config.oracle.max_grid_points},
                   {"grid_k", config.oracle.grid_k},
                   {"solver_tolerance_bits", config.oracle.solver_tolerance_bits}};
    if (config.sweep) {
        j["sweep"] = {{"axis", config.sweep->axis}, {"grid", config.sweep->grid}};
    }
    j["output"] = {{"dir", config.out_dir}};
    return j.dump(2) + "\n";
}

namespace {

bool same_channel(const Channel& a, const Channel& b) {
    if (a.in_size() != b.in_size() || a.out_size() != b.out_size()) return false;
    for (std::size_t i = 0; i < a.flat().size(); ++i) {
        if (a.flat()[i] != b.flat()[i]) return false;
    }
    return true;
}

}  // namespace

bool config_equivalent(const RunConfig& a, const RunConfig& b) {
    if (!same_channel(a.w_y, b.w_y)) return false;
    if (a.w_z.has_value() != b.w_z.has_value()) return false;
    if (a.w_z && !same_channel(*a.w_z, *b.w_z)) return false;
    if (a.p_ux.u_size() != b.p_ux.u_size() || a.p_ux.x_size() != b.p_ux.x_size()) return false;
    for (std::size_t i = 0; i < a.p_ux.joint().size(); ++i) {
        if (a.p_ux.joint()[i] != b.p_ux.joint()[i]) return false;
    }
    if (a.rates.r1() != b.rates.r1() || a.rates.r2() != b.rates.r2() ||
        a.rates.r1_tilde() != b.rates.r1_tilde() || a.rates.r2_tilde() != b.rates.r2_tilde() ||
        a.rates.lambda12() != b.rates.lambda12() || a.rates.lambda2() != b.rates.lambda2()) {
        return false;
    }
    if (a.solver.grid_k != b.solver.grid_k || a.solver.descent_steps != b.solver.descent_steps ||
        a.solver.shrink != b.solver.shrink || a.solver.tolerance != b.solver.tolerance ||
        a.solver.starts != b.solver.starts) {
        return false;
    }
    if (a.simulation.has_value() != b.simulation.has_value()) return false;
    if (a.simulation) {
        if (a.simulation->blocklengths != b.simulation->blocklengths ||
            a.simulation->trials != b.simulation->trials ||
            a.simulation->seed != b.simulation->seed ||
            a.simulation->policy != b.simulation->policy) {
            return false;
        }
    }
    if (a.oracle.max_outputs != b.oracle.max_outputs ||
        a.oracle.max_grid_points != b.oracle.max_grid_points ||
        a.oracle.grid_k != b.oracle.grid_k ||
        a.oracle.solver_tolerance_bits != b.oracle.solver_tolerance_bits) {
        return false;
    }
    if (a.sweep.has_value() != b.sweep.has_value()) return false;
    if (a.sweep && (a.sweep->axis != b.sweep->axis || a.sweep->grid != b.sweep->grid)) return false;
    return a.out_dir == b.out_dir;
}

}  // namespace abcx
