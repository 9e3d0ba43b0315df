/*
 * Copyright (C) 2026 The Fluoro Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include "fluoro/basis.hpp"
#include "fluoro/illuminants.hpp"
#include "fluoro/material.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

namespace httplib {
class Server;
}

namespace fluoro {

std::string library_version();

/// In-memory material store with a revision counter per material.
class MaterialStore {
public:
    struct Entry {
        FluorescentMaterial material;
        std::uint64_t revision = 0;
    };

    /// Returns the new id ("m1", "m2", ...) with revision 1.
    std::string create(const FluorescentMaterial& m);
    std::optional<Entry> get(const std::string& id) const;

    enum class Status { ok, not_found, conflict, invalid };
    struct UpdateResult {
        Status status = Status::ok;
        Entry entry;
        std::vector<FieldError> errors;
    };

    /// Applies `patch` (a partial material JSON) atomically. When
    /// `expected_revision` is set and differs from the current one, nothing
    /// changes and the status is `conflict`.
    UpdateResult patch(const std::string& id, const nlohmann::json& patch,
                       std::optional<std::uint64_t> expected_revision = std::nullopt);

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, Entry> items_;
    std::uint64_t next_id_ = 1;
};

/// Merges a partial material JSON into `m`: top-level keys replace, and
/// `gaussians` entries merge field by field by index (extra entries append).
/// Throws DataError on malformed values.
FluorescentMaterial apply_patch(FluorescentMaterial m, const nlohmann::json& patch);

struct ServiceConfig {
    WavelengthGrid grid = default_grid();
    std::filesystem::path data = data_dir();
};

/// JSON-over-HTTP front end for interactive editing:
///
///   GET  /illuminants
///   POST /materials                 create, 201 {id, revision, material}
///   GET  /materials/{id}
///   PATCH /materials/{id}           partial update; If-Match: <revision> -> 409 when stale
///   POST /materials/{id}/export     material JSON file body
///   GET  /palette?material=&mu_a=&sigma_a=&illuminant=&res=&format=ppm|json
///   GET  /preview?material=&illuminant=&right=&size=
///   GET  /reduced?material=&basis=xyz|xyzu
///
/// Every response carries X-Fluoro-Version and X-Fluoro-Basis-Hash. GETs on
/// a material carry an ETag of (query, revision).
class EditService {
public:
    explicit EditService(const ServiceConfig& config = {});
    ~EditService();

    EditService(const EditService&) = delete;
    EditService& operator=(const EditService&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it (for tests), -1 on failure.
    int bind_any(const std::string& host);
    /// Serves on a port obtained from bind_any(); blocks until stop().
    bool serve_bound();
    void stop();
    void wait_until_ready() const;

    MaterialStore& store() { return store_; }
    const IlluminantRegistry& registry() const { return registry_; }

private:
    void routes();

    ServiceConfig config_;
    IlluminantRegistry registry_;
    SensitivityBasis xyz_;
    SensitivityBasis xyzu_;
    MaterialStore store_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace fluoro
