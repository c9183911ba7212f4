// SPDX-License-Identifier: Apache-2.0
#include "harness/core/suite.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"

namespace harness {

std::vector<TaskInstance> load_suite(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot read suite file {}", path.string()));
    const fs::path base = fs::absolute(path).parent_path();

    std::vector<TaskInstance> suite;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(fmt::format("{}:{}: invalid JSON: {}", path.string(), line_no, e.what()));
        }
        TaskInstance instance = task_instance_from_json(record);
        if (instance.repo_source.is_relative()) instance.repo_source = (base / instance.repo_source).lexically_normal();
        validate(instance);
        if (!seen.insert(instance.id).second) {
            throw ValidationError(fmt::format("{}:{}: duplicate instance id '{}'", path.string(), line_no, instance.id));
        }
        suite.push_back(std::move(instance));
    }
    return suite;
}

}  // namespace harness
