#include "richards/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace richards {

std::string to_string(CaseKind kind) { return kind == CaseKind::Filling ? "filling" : "drainage"; }

CaseKind case_kind_from_string(const std::string& tag)
{
    if (tag == "filling")
        return CaseKind::Filling;
    if (tag == "drainage")
        return CaseKind::Drainage;
    throw std::invalid_argument("unknown case '" + tag + "' (expected filling or drainage)");
}

void CaseConfig::validate() const
{
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("config: nx and ny must be positive");
    if (!(dt > 0.0))
        throw std::invalid_argument("config: dt must be positive");
    if (!(t_end >= 0.0))
        throw std::invalid_argument("config: t_end must be non-negative");
    if (method == Method::A && !(delta > 0.0))
        throw std::invalid_argument("config: method A needs delta > 0");
    if (rocks.size() != 2)
        throw std::invalid_argument("config: exactly two rock types expected");
    for (const auto& r : rocks)
        r.validate();
}

std::vector<RockType> default_rocks(CapillaryModel model)
{
    if (model == CapillaryModel::BrooksCorey)
        return {rock_preset("RT0-BC"), rock_preset("RT1-BC")};
    return {rock_preset("RT0-VG"), rock_preset("RT1-VG")};
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end)
        throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v)
{
    int x = 0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc() || ptr != end)
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty())
            out.push_back(to_double(key, item));
    }
    return out;
}

const std::set<std::string> kTopKeys = {"case", "model", "nx", "ny", "method", "delta",
                                        "dt", "t_end", "out", "output_times"};
const std::set<std::string> kRockKeys = {"name", "porosity", "permeability", "residual_water", "residual_air",
                                         "entry_pressure", "exponent", "alpha", "viscosity"};

std::vector<double> default_output_times(CaseKind kind, CapillaryModel model, double t_end)
{
    if (kind == CaseKind::Filling)
        return {0.0, 20e3, 40e3, 60e3, t_end};
    if (model == CapillaryModel::BrooksCorey)
        return {0.0, 262e3, 524e3, 786e3, t_end};
    return {0.0, 261.6e3, 524e3, 785.6e3, t_end};
}

} // namespace

ConfigValues parse_config(std::istream& in)
{
    ConfigValues out;
    std::string line, section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(number) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
        out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
    }
    return out;
}

ConfigValues read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file '" + path + "'");
    return parse_config(in);
}

CaseConfig resolve_config(const ConfigValues& values)
{
    std::vector<std::string> unknown;
    for (const auto& [key, value] : values) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            if (!kTopKeys.count(key))
                unknown.push_back(key);
        } else {
            const std::string sec = key.substr(0, dot);
            if ((sec != "rock0" && sec != "rock1") || !kRockKeys.count(key.substr(dot + 1)))
                unknown.push_back(key);
        }
    }
    if (!unknown.empty()) {
        std::string msg = "config: unknown keys:";
        for (const auto& k : unknown)
            msg += " " + k;
        throw std::invalid_argument(msg);
    }

    auto get = [&](const std::string& k) -> const std::string* {
        auto it = values.find(k);
        return it == values.end() ? nullptr : &it->second;
    };

    CaseConfig c;
    if (auto v = get("case"))
        c.kind = case_kind_from_string(*v);
    if (auto v = get("model"))
        c.model = capillary_model_from_string(*v);
    const bool bc = c.model == CapillaryModel::BrooksCorey;
    if (c.kind == CaseKind::Filling) {
        c.dt = bc ? 1000.0 : 500.0;
        c.t_end = 86400.0;
    } else {
        c.dt = bc ? 2000.0 : 800.0;
        c.t_end = 1.05e6;
    }
    c.rocks = default_rocks(c.model);

    if (auto v = get("nx"))
        c.nx = to_int("nx", *v);
    if (auto v = get("ny"))
        c.ny = to_int("ny", *v);
    if (auto v = get("method"))
        c.method = method_from_string(*v);
    if (auto v = get("delta"))
        c.delta = to_double("delta", *v);
    if (auto v = get("dt"))
        c.dt = to_double("dt", *v);
    if (auto v = get("t_end"))
        c.t_end = to_double("t_end", *v);
    if (auto v = get("out"))
        c.out_dir = *v;
    if (auto v = get("output_times"))
        c.output_times = to_list("output_times", *v);
    else
        c.output_times = default_output_times(c.kind, c.model, c.t_end);

    for (std::size_t i = 0; i < 2; ++i) {
        RockType& r = c.rocks[i];
        const std::string sec = "rock" + std::to_string(i) + ".";
        if (auto v = get(sec + "name"))
            r.name = *v;
        auto num = [&](const char* field, double& target) {
            if (auto v = get(sec + field))
                target = to_double(sec + field, *v);
        };
        num("porosity", r.porosity);
        num("permeability", r.permeability);
        num("residual_water", r.residual_water);
        num("residual_air", r.residual_air);
        num("entry_pressure", r.entry_pressure);
        num("exponent", r.exponent);
        num("alpha", r.alpha);
        num("viscosity", r.viscosity);
    }
    c.validate();
    return c;
}

void write_config(std::ostream& os, const CaseConfig& c)
{
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);
    os << "case = " << to_string(c.kind) << '\n'
       << "model = " << to_string(c.model) << '\n'
       << "nx = " << c.nx << '\n'
       << "ny = " << c.ny << '\n'
       << "method = " << to_string(c.method) << '\n'
       << "delta = " << c.delta << '\n'
       << "dt = " << c.dt << '\n'
       << "t_end = " << c.t_end << '\n'
       << "out = " << c.out_dir << '\n'
       << "output_times = ";
    for (std::size_t i = 0; i < c.output_times.size(); ++i)
        os << (i ? ", " : "") << c.output_times[i];
    os << '\n';
    for (std::size_t i = 0; i < c.rocks.size(); ++i) {
        const RockType& r = c.rocks[i];
        os << "\n[rock" << i << "]\n"
           << "name = " << r.name << '\n'
           << "porosity = " << r.porosity << '\n'
           << "permeability = " << r.permeability << '\n'
           << "residual_water = " << r.residual_water << '\n'
           << "residual_air = " << r.residual_air << '\n'
           << "entry_pressure = " << r.entry_pressure << '\n'
           << "exponent = " << r.exponent << '\n'
           << "alpha = " << r.alpha << '\n'
           << "viscosity = " << r.viscosity << '\n';
    }
    os.flags(flags);
    os.precision(prec);
}

} // namespace richards
