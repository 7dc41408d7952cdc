#pragma once

#include <json.hpp>

#include <string>

#include "evcrp/instance.hpp"
#include "evcrp/solution.hpp"

namespace evcrp {

nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

// Serialized as {"user_id": station-or-null}; users of the instance that
// are unassigned appear with null so the document is self-contained.
nlohmann::json schedule_to_json(const Schedule& schedule,
                                const Instance& instance);
Schedule schedule_from_json(const nlohmann::json& j);

nlohmann::json solution_to_json(const Solution& solution,
                                const Instance& instance);

// File helpers; throw evcrp::io_error on unreadable or malformed content.
// Loading validates the instance.
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);
Schedule load_schedule(const std::string& path);
void save_schedule(const Schedule& schedule, const Instance& instance,
                   const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace evcrp
