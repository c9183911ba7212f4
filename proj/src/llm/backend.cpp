// SPDX-License-Identifier: Apache-2.0
#include "harness/llm/backend.hpp"

#include <fstream>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/util.hpp"
#include "harness/llm/http_backend.hpp"
#include "harness/llm/replay_backend.hpp"
#include "harness/llm/scripted_backend.hpp"

namespace harness {

using nlohmann::json;

RequestAudit::RequestAudit(fs::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
}

void RequestAudit::record(const json& request, const json& response) {
    const std::string line = json{{"request", request}, {"response", response}}.dump();
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << line << '\n';
    if (!out) throw InfraError(fmt::format("cannot append to request log {}", path_.string()));
}

std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor) {
    if (descriptor.kind == "http") {
        return std::make_shared<HttpBackend>(http_options_from_json(descriptor.options));
    }
    if (descriptor.kind == "scripted") {
        return std::make_shared<ScriptedBackend>(ScriptedBackend::from_json(descriptor.options));
    }
    if (descriptor.kind == "replay") {
        auto it = descriptor.options.find("log");
        if (it == descriptor.options.end() || !it->is_string()) throw ConfigError("replay backend needs a 'log' path");
        return std::make_shared<ReplayBackend>(fs::path(it->get<std::string>()));
    }
    throw ConfigError(fmt::format("unknown backend kind '{}' (expected http, scripted or replay)", descriptor.kind));
}

BackendDescriptor parse_backend_descriptor(std::string_view text) {
    auto from_object = [](const json& j) {
        if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
            throw ConfigError("backend descriptor must be an object with a string 'kind'");
        }
        BackendDescriptor d{j.at("kind").get<std::string>(), j};
        d.options.erase("kind");
        return d;
    };
    if (!text.empty() && text.front() == '{') {
        try {
            return from_object(json::parse(text));
        } catch (const json::parse_error& e) {
            throw ConfigError(fmt::format("backend descriptor is not valid JSON: {}", e.what()));
        }
    }
    auto colon = text.find(':');
    const std::string_view kind = colon == std::string_view::npos ? std::string_view{} : text.substr(0, colon);
    const std::string value(colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1));
    if (kind == "scripted") return BackendDescriptor{"scripted", json{{"script_file", value}}};
    if (kind == "replay") return BackendDescriptor{"replay", json{{"log", value}}};
    if (kind == "http") {
        auto at = value.find('@');
        if (at == std::string::npos || at == 0) throw ConfigError("http shorthand is http:<model>@<base_url>");
        return BackendDescriptor{"http", json{{"model", value.substr(0, at)}, {"base_url", value.substr(at + 1)}}};
    }
    const fs::path path{std::string(text)};
    std::error_code ec;
    if (fs::is_regular_file(path, ec)) {
        try {
            return from_object(json::parse(read_file(path)));
        } catch (const json::parse_error& e) {
            throw ConfigError(fmt::format("backend descriptor file {} is not valid JSON: {}", path.string(), e.what()));
        }
    }
    throw ConfigError(fmt::format("cannot interpret backend descriptor '{}'", text));
}

BackendDescriptor pin_backend_descriptor(const BackendDescriptor& descriptor) {
    BackendDescriptor pinned = descriptor;
    if (descriptor.kind == "scripted") {
        if (auto it = descriptor.options.find("script_file"); it != descriptor.options.end()) {
            const fs::path file = it->get<std::string>();
            json content;
            try {
                content = json::parse(read_file(file));
            } catch (const json::parse_error& e) {
                throw ConfigError(fmt::format("script file {} is not valid JSON: {}", file.string(), e.what()));
            } catch (const InfraError& e) {
                throw ConfigError(e.what());
            }
            pinned.options.erase("script_file");
            if (content.is_array()) {
                pinned.options["queue"] = content;
            } else {
                for (auto& [key, value] : content.items()) {
                    if (key != "kind") pinned.options[key] = value;
                }
            }
        }
    } else if (descriptor.kind == "replay") {
        if (auto it = descriptor.options.find("log"); it != descriptor.options.end()) {
            pinned.options["log"] = fs::absolute(it->get<std::string>()).lexically_normal().string();
        }
    }
    return pinned;
}

}  // namespace harness
