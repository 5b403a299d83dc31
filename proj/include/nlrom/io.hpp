#ifndef NLROM_IO_HPP
#define NLROM_IO_HPP

#include "nlrom/dynamics.hpp"
#include "nlrom/model.hpp"
#include "nlrom/rom.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace nlrom {

using json = nlohmann::ordered_json;

/// Malformed input file; the message names the offending field.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Serialises with every double at 17 significant digits.
std::string dump_json(const json& j);
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

json model_to_json(const PhysicalModel& model);
PhysicalModel model_from_json(const json& j);

json modal_to_json(const ModalModel& mm);
ModalModel modal_from_json(const json& j);

json map_to_json(const ManifoldMap& map);
ManifoldMap map_from_json(const json& j);

json rom_to_json(const Rom& rom);
Rom rom_from_json(const json& j);

std::string curve_to_csv(const Curve& curve);
Curve curve_from_csv(const std::string& text);

/// "%.17g"
std::string format_double(double v);

}  // namespace nlrom

#endif
