#include "occorbit/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace occorbit {

namespace {

using nlohmann::json;

Vec2 vec2_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw InputError("expected a point [x, y]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json vec2_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

std::string header_line(const char* kind, const std::string& hash) {
    std::ostringstream os;
    os << "# occorbit-" << kind << " v" << kFormatVersion << " scenario=" << hash;
    return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, sep)) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad number '" + s + "'");
    return v;
}

template <typename F>
auto wrap_json_errors(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InputError(e.what());
    }
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Convert the byte offset into a line and column.
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << path.string() << ":" << line << ":" << col << ": parse error: " << e.what();
        throw InputError(os.str());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot write file");
    out << text;
}

Environment environment_from_json(const nlohmann::json& j) {
    return wrap_json_errors([&] {
        Environment env;
        env.h_feasible = j.at("h_feasible").get<double>();
        for (const auto& o : j.at("obstacles")) {
            Obstacle ob;
            for (const auto& p : o.at("base")) ob.base.vertices.push_back(vec2_from_json(p));
            ob.height = o.at("height").get<double>();
            env.obstacles.push_back(std::move(ob));
        }
        return env;
    });
}

nlohmann::json environment_to_json(const Environment& env) {
    json obstacles = json::array();
    for (const auto& ob : env.obstacles) {
        json base = json::array();
        for (const auto& p : ob.base.vertices) base.push_back(vec2_to_json(p));
        obstacles.push_back({{"base", base}, {"height", ob.height}});
    }
    return {{"obstacles", obstacles}, {"h_feasible", env.h_feasible}};
}

RoadGraph road_graph_from_json(const nlohmann::json& j) {
    return wrap_json_errors([&] {
        RoadGraph g;
        for (const auto& n : j.at("nodes")) g.nodes.push_back(vec2_from_json(n));
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw InputError("edge must be a pair [i, j]");
            g.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
        }
        return g;
    });
}

nlohmann::json road_graph_to_json(const RoadGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) nodes.push_back(vec2_to_json(n));
    json edges = json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    return {{"nodes", nodes}, {"edges", edges}};
}

nlohmann::ordered_json schedule_to_json(const OrbitSchedule& s, const std::string& scenario_hash) {
    nlohmann::ordered_json j;
    j["header"] = {{"format", "occorbit-schedule"},
                   {"version", kFormatVersion},
                   {"scenario_hash", scenario_hash}};
    j["direction"] = to_string(s.direction);
    j["v"] = s.v;
    j["v_g"] = s.v_g;
    j["h_UAV"] = s.h_uav;
    auto knots = nlohmann::ordered_json::array();
    for (const auto& k : s.knots) {
        nlohmann::ordered_json kj;
        kj["t"] = k.t;
        kj["g"] = {k.g.x, k.g.y};
        kj["R"] = k.R;
        knots.push_back(kj);
    }
    j["knots"] = knots;
    return j;
}

OrbitSchedule schedule_from_json(const nlohmann::json& j) {
    OrbitSchedule s = wrap_json_errors([&] {
        OrbitSchedule out;
        out.direction = direction_from_string(j.at("direction").get<std::string>());
        out.v = j.at("v").get<double>();
        out.v_g = j.at("v_g").get<double>();
        out.h_uav = j.at("h_UAV").get<double>();
        for (const auto& k : j.at("knots")) {
            out.knots.push_back({k.at("t").get<double>(), vec2_from_json(k.at("g")),
                                 k.at("R").get<double>()});
        }
        return out;
    });
    try {
        check_schedule(s);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("invalid orbit schedule: ") + e.what());
    }
    return s;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace, const std::string& scenario_hash) {
    os << header_line("trace", scenario_hash) << '\n';
    os << "t,x,y,psi,u_psi_raw,u_psi,r_err,psi_err,visible\n";
    for (const auto& r : trace.rows) {
        os << format_double(r.t) << ',' << format_double(r.q.x) << ',' << format_double(r.q.y)
           << ',' << format_double(r.q.psi) << ',' << format_double(r.u_psi_raw) << ','
           << format_double(r.u_psi) << ',' << format_double(r.r_err) << ','
           << format_double(r.psi_err) << ',';
        if (r.visible) os << (*r.visible ? 1 : 0);
        os << '\n';
    }
}

SimTrace read_trace_csv(std::istream& is) {
    SimTrace trace;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
        auto cells = split(line, ',');
        if (cells.size() == 8) cells.emplace_back();
        if (cells.size() != 9) throw InputError("trace row has wrong column count: " + line);
        SimRow r;
        r.t = parse_double(cells[0]);
        r.q = {parse_double(cells[1]), parse_double(cells[2]), parse_double(cells[3])};
        r.u_psi_raw = parse_double(cells[4]);
        r.u_psi = parse_double(cells[5]);
        r.r_err = parse_double(cells[6]);
        r.psi_err = parse_double(cells[7]);
        if (!cells[8].empty()) r.visible = cells[8] == "1";
        trace.rows.push_back(r);
    }
    if (trace.rows.size() >= 2) trace.dt = trace.rows[1].t - trace.rows[0].t;
    return trace;
}

void write_discretization_csv(std::ostream& os, const DiscretizationResult& d,
                              const std::string& scenario_hash) {
    os << header_line("discretization", scenario_hash) << '\n';
    os << "s_along_path,t,x,y,metric_to_next\n";
    for (std::size_t i = 0; i < d.points.size(); ++i) {
        os << format_double(d.arc[i]) << ',' << format_double(d.times[i]) << ','
           << format_double(d.points[i].x) << ',' << format_double(d.points[i].y) << ',';
        if (i < d.metrics.size()) os << format_double(d.metrics[i]);
        os << '\n';
    }
}

void write_field_csv_header(std::ostream& os, const std::string& scenario_hash) {
    os << header_line("field", scenario_hash) << '\n';
    os << "x,y,u_x,u_y,psi_d,psi_d_dot\n";
}

void write_field_csv_row(std::ostream& os, const Vec2& xi, const FieldSample& f) {
    os << format_double(xi.x) << ',' << format_double(xi.y) << ',' << format_double(f.u.x) << ','
       << format_double(f.u.y) << ',' << format_double(f.psi_d) << ','
       << format_double(f.psi_d_dot) << '\n';
}

void write_vv_grid(std::ostream& os, const VisibilityVolumeGrid& grid) {
    os << "# occorbit-vv v" << kFormatVersion << '\n';
    os << "target " << format_double(grid.target.x) << ' ' << format_double(grid.target.y) << '\n';
    const Vec2 o = grid.origin();
    os << "origin " << format_double(o.x) << ' ' << format_double(o.y) << ' '
       << format_double(grid.base_altitude()) << '\n';
    os << "lattice " << grid.lattice_x << ' ' << grid.lattice_y << ' ' << grid.lattice_z << '\n';
    os << "cell " << format_double(grid.cell) << '\n';
    os << "dims " << grid.nx << ' ' << grid.ny << ' ' << grid.nz << '\n';
    os << "occupancy";
    std::size_t i = 0;
    while (i < grid.occupancy.size()) {
        std::size_t j = i;
        while (j < grid.occupancy.size() && grid.occupancy[j] == grid.occupancy[i]) ++j;
        os << ' ' << int(grid.occupancy[i]) << ':' << (j - i);
        i = j;
    }
    os << '\n';
}

VisibilityVolumeGrid read_vv_grid(std::istream& is) {
    VisibilityVolumeGrid g;
    std::string line;
    bool have_dims = false;
    bool have_occ = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "target") {
            ls >> g.target.x >> g.target.y;
        } else if (key == "origin") {
            // Derived from lattice and cell; kept for human readers.
        } else if (key == "lattice") {
            ls >> g.lattice_x >> g.lattice_y >> g.lattice_z;
        } else if (key == "cell") {
            ls >> g.cell;
        } else if (key == "dims") {
            ls >> g.nx >> g.ny >> g.nz;
            have_dims = true;
        } else if (key == "occupancy") {
            std::string tok;
            while (ls >> tok) {
                const auto colon = tok.find(':');
                if (colon == std::string::npos) throw InputError("bad run token '" + tok + "'");
                const int value = std::stoi(tok.substr(0, colon));
                const auto count = std::stoull(tok.substr(colon + 1));
                g.occupancy.insert(g.occupancy.end(), count, static_cast<std::uint8_t>(value != 0));
            }
            have_occ = true;
            continue;  // the token loop always ends with the stream failed
        } else {
            throw InputError("unknown grid key '" + key + "'");
        }
        if (ls.fail()) throw InputError("malformed grid line: " + line);
    }
    if (!have_dims || !have_occ) throw InputError("grid file missing dims or occupancy");
    if (g.occupancy.size() != static_cast<std::size_t>(g.nx * g.ny * g.nz)) {
        throw InputError("grid occupancy length does not match dims");
    }
    return g;
}

nlohmann::ordered_json metrics_to_json(const Metrics& m, const std::string& scenario_hash) {
    nlohmann::ordered_json j;
    j["header"] = {{"format", "occorbit-metrics"},
                   {"version", kFormatVersion},
                   {"scenario_hash", scenario_hash}};
    j["converged"] = m.converged;
    j["convergence_time"] = m.convergence_time;
    j["r_err_mean"] = m.r_err_mean;
    j["r_err_max"] = m.r_err_max;
    j["r_err_min"] = m.r_err_min;
    j["visibility_fraction"] = m.visibility_fraction;
    j["visibility_fraction_converged"] = m.visibility_fraction_converged;
    j["saturation_fraction"] = m.saturation_fraction;
    return j;
}

}  // namespace occorbit
