/**
 * @file config.hpp
 * @brief Case configuration: flat key = value text with one section per rock type.
 *
 *   case = drainage          # filling | drainage
 *   model = brooks-corey     # brooks-corey | van-genuchten
 *   nx = 50
 *   ny = 30
 *   method = A               # A | B
 *   delta = 1e-6
 *   dt = 2000
 *   t_end = 1.05e6
 *   out = results
 *   output_times = 0, 262000, 524000
 *
 *   [rock0]
 *   permeability = 1e-11
 *
 * Keys left out take the defaults of the chosen case and model. Rock sections
 * override single fields of the preset rock (rock0: sand, rock1: clay).
 */
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "richards/mesh.hpp"
#include "richards/petrophysics.hpp"

namespace richards {

enum class CaseKind { Filling, Drainage };
std::string to_string(CaseKind kind);
CaseKind case_kind_from_string(const std::string& tag);

struct CaseConfig {
    CaseKind kind = CaseKind::Drainage;
    CapillaryModel model = CapillaryModel::BrooksCorey;
    int nx = 50;
    int ny = 30;
    Method method = Method::A;
    double delta = 1e-6;
    double dt = 2000.0;
    double t_end = 1.05e6;
    std::vector<RockType> rocks; ///< [sand, clay]
    std::string out_dir = "out";
    std::vector<double> output_times;

    /// Throws std::invalid_argument on non-positive mesh or time parameters.
    void validate() const;
    bool operator==(const CaseConfig&) const = default;
};

/// Flat "key" or "section.key" -> raw value.
using ConfigValues = std::map<std::string, std::string>;

/// Parses config text; throws std::invalid_argument with the offending line.
ConfigValues parse_config(std::istream& in);
ConfigValues read_config_file(const std::string& path);

/// Applies case/model defaults, then the given values. Unknown keys are
/// rejected with the full list of offenders.
CaseConfig resolve_config(const ConfigValues& values);

/// Emits every field; resolve_config(parse_config(...)) gives back an equal config.
void write_config(std::ostream& os, const CaseConfig& config);

/// The two preset rocks (sand, clay) for a capillary model.
std::vector<RockType> default_rocks(CapillaryModel model);

} // namespace richards
