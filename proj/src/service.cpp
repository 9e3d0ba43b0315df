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


#include "fluoro/service.hpp"

#include "fluoro/error.hpp"
#include "fluoro/palette.hpp"
#include "fluoro/render.hpp"

#include <httplib.h>

#include <regex>
#include <sstream>

#ifndef FLUORO_VERSION
#define FLUORO_VERSION "0.0.0"
#endif

namespace fluoro {

using nlohmann::json;

std::string library_version() { return FLUORO_VERSION; }

namespace {

struct HttpError {
    int status;
    json body;
};

[[noreturn]] void fail(int status, const std::string& message) { throw HttpError{status, {{"error", message}}}; }

[[noreturn]] void fail_fields(const std::vector<FieldError>& errs) {
    json list = json::array();
    for (const auto& e : errs) {
        list.push_back({{"field", e.field}, {"message", e.message}});
    }
    throw HttpError{422, {{"error", "invalid parameters"}, {"errors", list}}};
}

double number_param(const httplib::Request& req, const std::string& name, double fallback) {
    if (!req.has_param(name)) {
        return fallback;
    }
    const std::string v = req.get_param_value(name);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d)) {
            throw std::invalid_argument(v);
        }
        return d;
    } catch (const std::exception&) {
        fail(400, "query parameter '" + name + "' is not a number: " + v);
    }
}

std::string string_param(const httplib::Request& req, const std::string& name, const std::string& fallback) {
    return req.has_param(name) ? req.get_param_value(name) : fallback;
}

std::string fnv_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

json entry_json(const std::string& id, const MaterialStore::Entry& e) {
    return {{"id", id}, {"revision", e.revision}, {"material", to_json(e.material)}};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

bool local_origin(const std::string& origin) {
    static const std::regex re(R"(^https?://(localhost|127\.0\.0\.1|\[::1\])(:\d+)?$)");
    return std::regex_match(origin, re);
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        fail(400, std::string("malformed JSON body: ") + e.what());
    }
}

} // namespace

std::string MaterialStore::create(const FluorescentMaterial& m) {
    std::unique_lock lock(mutex_);
    const std::string id = "m" + std::to_string(next_id_++);
    items_[id] = Entry{m, 1};
    return id;
}

std::optional<MaterialStore::Entry> MaterialStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = items_.find(id);
    if (it == items_.end()) {
        return std::nullopt;
    }
    return it->second;
}

MaterialStore::UpdateResult MaterialStore::patch(const std::string& id, const json& patch,
                                                 std::optional<std::uint64_t> expected_revision) {
    std::unique_lock lock(mutex_);
    UpdateResult out;
    const auto it = items_.find(id);
    if (it == items_.end()) {
        out.status = Status::not_found;
        return out;
    }
    if (expected_revision && *expected_revision != it->second.revision) {
        out.status = Status::conflict;
        out.entry = it->second;
        return out;
    }
    FluorescentMaterial next;
    try {
        next = apply_patch(it->second.material, patch);
    } catch (const DataError& e) {
        out.status = Status::invalid;
        out.errors.push_back({"body", e.what()});
        return out;
    }
    out.errors = validate(next);
    if (!out.errors.empty()) {
        out.status = Status::invalid;
        out.entry = it->second;
        return out;
    }
    it->second.material = std::move(next);
    ++it->second.revision;
    out.entry = it->second;
    return out;
}

FluorescentMaterial apply_patch(FluorescentMaterial m, const json& patch) {
    if (!patch.is_object()) {
        throw DataError("patch must be a JSON object");
    }
    try {
        if (patch.contains("albedo_xyz")) {
            const auto& a = patch.at("albedo_xyz");
            if (!a.is_array() || a.size() != 3) {
                throw DataError("albedo_xyz must have 3 entries");
            }
            for (int c = 0; c < 3; ++c) {
                m.albedo_xyz(c) = a.at(static_cast<std::size_t>(c)).get<double>();
            }
        }
        if (patch.contains("notes")) {
            m.notes = patch.at("notes").get<std::string>();
        }
        if (patch.contains("gaussians")) {
            const auto& g = patch.at("gaussians");
            if (!g.is_array()) {
                throw DataError("gaussians must be an array");
            }
            if (g.size() < m.lobes.size() && patch.value("replace_gaussians", false)) {
                m.lobes.resize(g.size());
            }
            for (std::size_t q = 0; q < g.size(); ++q) {
                if (q >= m.lobes.size()) {
                    m.lobes.push_back(m.lobes.empty() ? FluoLobe{} : m.lobes.back());
                }
                auto& l = m.lobes[q];
                const auto& p = g[q];
                l.alpha_bar = p.value("alpha_bar", l.alpha_bar);
                l.mu_a = p.value("mu_a_nm", l.mu_a);
                l.sigma_a = p.value("sigma_a_nm", l.sigma_a);
                l.mu_e = p.value("mu_e_nm", l.mu_e);
                l.sigma_e = p.value("sigma_e_nm", l.sigma_e);
            }
        }
    } catch (const json::exception& e) {
        throw DataError(e.what());
    }
    return m;
}

EditService::EditService(const ServiceConfig& config)
    : config_(config), registry_(config.grid, config.data), xyz_(xyz_basis(config.grid)),
      xyzu_(xyzu_basis(config.grid)), server_(std::make_unique<httplib::Server>()) {
    routes();
}

EditService::~EditService() { stop(); }

bool EditService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int EditService::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }

bool EditService::serve_bound() { return server_->listen_after_bind(); }

void EditService::stop() {
    if (server_) {
        server_->stop();
    }
}

void EditService::wait_until_ready() const { server_->wait_until_ready(); }

void EditService::routes() {
    auto& srv = *server_;

    // Shared wrapper: common headers, error mapping.
    auto handle = [this](auto fn) {
        return [this, fn](const httplib::Request& req, httplib::Response& res) {
            res.set_header("X-Fluoro-Version", library_version());
            res.set_header("X-Fluoro-Basis-Hash", xyzu_.hash());
            const std::string origin = req.get_header_value("Origin");
            if (!origin.empty() && local_origin(origin)) {
                res.set_header("Access-Control-Allow-Origin", origin);
                res.set_header("Vary", "Origin");
                res.set_header("Access-Control-Expose-Headers", "ETag, X-Fluoro-Version, X-Fluoro-Basis-Hash, X-Fluoro-Revision");
            }
            try {
                fn(req, res);
            } catch (const HttpError& e) {
                send_json(res, e.body, e.status);
            } catch (const DataError& e) {
                send_json(res, {{"error", e.what()}}, 422);
            } catch (const std::invalid_argument& e) {
                send_json(res, {{"error", e.what()}}, 400);
            } catch (const std::out_of_range& e) {
                send_json(res, {{"error", e.what()}}, 400);
            } catch (const std::exception& e) {
                send_json(res, {{"error", e.what()}}, 500);
            }
        };
    };

    auto lookup = [this](const std::string& id) {
        auto e = store_.get(id);
        if (!e) {
            fail(404, "unknown material '" + id + "'");
        }
        return *e;
    };

    // ETag over the request target and the material revision; 304 on match.
    auto cacheable = [](const httplib::Request& req, httplib::Response& res, std::uint64_t revision) {
        std::string key = req.path;
        for (const auto& [k, v] : req.params) {
            key += "&" + k + "=" + v;
        }
        const std::string tag = "\"" + fnv_hex(key + "#" + std::to_string(revision)) + "\"";
        res.set_header("ETag", tag);
        res.set_header("Cache-Control", "no-cache");
        res.set_header("X-Fluoro-Revision", std::to_string(revision));
        if (req.get_header_value("If-None-Match") == tag) {
            res.status = 304;
            return true;
        }
        return false;
    };

    srv.Options(R"(/.*)", handle([](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type, If-Match, If-None-Match");
        res.status = 204;
    }));

    srv.Get("/illuminants", handle([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, {{"illuminants", registry_.names()}});
    }));

    srv.Post("/materials", handle([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        FluorescentMaterial m = apply_patch(FluorescentMaterial{}, body);
        if (body.contains("gaussians") && body.at("gaussians").is_array() && !body.at("gaussians").empty()) {
            m.lobes.resize(body.at("gaussians").size());
        }
        if (const auto errs = validate(m); !errs.empty()) {
            fail_fields(errs);
        }
        const std::string id = store_.create(m);
        res.set_header("Location", "/materials/" + id);
        send_json(res, entry_json(id, *store_.get(id)), 201);
    }));

    srv.Get(R"(/materials/([^/]+))", handle([lookup, cacheable](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto e = lookup(id);
        if (!cacheable(req, res, e.revision)) {
            send_json(res, entry_json(id, e));
        }
    }));

    srv.Patch(R"(/materials/([^/]+))", handle([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const json body = parse_body(req);
        std::optional<std::uint64_t> expected;
        if (req.has_header("If-Match")) {
            std::string v = req.get_header_value("If-Match");
            v.erase(std::remove(v.begin(), v.end(), '"'), v.end());
            try {
                expected = std::stoull(v);
            } catch (const std::exception&) {
                fail(400, "If-Match must carry a revision number");
            }
        }
        const auto r = store_.patch(id, body, expected);
        switch (r.status) {
        case MaterialStore::Status::not_found:
            fail(404, "unknown material '" + id + "'");
        case MaterialStore::Status::conflict:
            send_json(res, {{"error", "stale revision"}, {"revision", r.entry.revision}}, 409);
            return;
        case MaterialStore::Status::invalid:
            fail_fields(r.errors);
        case MaterialStore::Status::ok:
            send_json(res, entry_json(id, r.entry));
            return;
        }
    }));

    srv.Post(R"(/materials/([^/]+)/export)", handle([lookup](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        const auto e = lookup(id);
        res.set_header("Content-Disposition", "attachment; filename=\"" + id + ".json\"");
        res.set_header("X-Fluoro-Revision", std::to_string(e.revision));
        res.set_content(to_json(e.material).dump(2) + "\n", "application/json");
    }));

    srv.Get("/palette", handle([this, lookup, cacheable](const httplib::Request& req, httplib::Response& res) {
        PaletteContext ctx;
        std::uint64_t revision = 0;
        if (req.has_param("material")) {
            const auto e = lookup(req.get_param_value("material"));
            revision = e.revision;
            ctx.albedo_xyz = e.material.albedo_xyz;
            ctx.mu_a = e.material.lobes.front().mu_a;
            ctx.sigma_a = e.material.lobes.front().sigma_a;
        }
        ctx.mu_a = number_param(req, "mu_a", ctx.mu_a);
        ctx.sigma_a = number_param(req, "sigma_a", ctx.sigma_a);
        ctx.illuminant = string_param(req, "illuminant", ctx.illuminant);
        ctx.fluorescent_only = string_param(req, "component", "total") == "fluorescent";
        ctx.exposure = number_param(req, "exposure", ctx.exposure);
        std::vector<FieldError> errs;
        if (ctx.mu_a < kMinMeanNm || ctx.mu_a > kMaxMeanNm) {
            errs.push_back({"mu_a", "must lie in [300, 800]"});
        }
        if (ctx.sigma_a < kMinSpreadNm || ctx.sigma_a > kMaxSpreadNm) {
            errs.push_back({"sigma_a", "must lie in [1, 1000]"});
        }
        const double res_cells = number_param(req, "res", 64.0);
        if (res_cells < 1.0 || res_cells > 512.0 || res_cells != std::floor(res_cells)) {
            errs.push_back({"res", "must be an integer in [1, 512]"});
        }
        if (!registry_.contains(ctx.illuminant)) {
            errs.push_back({"illuminant", "unknown illuminant"});
        }
        if (!errs.empty()) {
            fail_fields(errs);
        }
        if (cacheable(req, res, revision)) {
            return;
        }
        PaletteAxes axes;
        axes.mu_steps = axes.sigma_steps = static_cast<std::size_t>(res_cells);
        const Palette p = generate_palette(ctx, axes, xyzu_, registry_);
        if (string_param(req, "format", "ppm") == "json") {
            send_json(res, palette_json(p));
        } else {
            res.set_content(encode_ppm(p.image), "image/x-portable-pixmap");
        }
    }));

    srv.Get("/preview", handle([this, lookup, cacheable](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("material")) {
            fail(400, "missing query parameter 'material'");
        }
        const auto e = lookup(req.get_param_value("material"));
        PreviewScene scene;
        scene.material = e.material;
        scene.illuminant = string_param(req, "illuminant", "D65");
        if (req.has_param("right")) {
            scene.right_illuminant = req.get_param_value("right");
        }
        scene.exposure = number_param(req, "exposure", 1.0);
        const double size = number_param(req, "size", 256.0);
        std::vector<FieldError> errs;
        if (size < 1.0 || size > 1024.0 || size != std::floor(size)) {
            errs.push_back({"size", "must be an integer in [1, 1024]"});
        }
        for (const auto& name : {scene.illuminant, scene.right_illuminant.value_or(scene.illuminant)}) {
            if (!registry_.contains(name)) {
                errs.push_back({"illuminant", "unknown illuminant '" + name + "'"});
            }
        }
        if (!errs.empty()) {
            fail_fields(errs);
        }
        if (cacheable(req, res, e.revision)) {
            return;
        }
        scene.width = scene.height = static_cast<std::size_t>(size);
        const RenderResult r = render_sphere(scene, xyzu_, registry_);
        res.set_content(encode_ppm(r.display), "image/x-portable-pixmap");
    }));

    srv.Get("/reduced", handle([this, lookup, cacheable](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("material")) {
            fail(400, "missing query parameter 'material'");
        }
        const auto e = lookup(req.get_param_value("material"));
        const std::string name = string_param(req, "basis", "xyzu");
        if (name != "xyz" && name != "xyzu") {
            fail_fields({{"basis", "must be xyz or xyzu"}});
        }
        if (cacheable(req, res, e.revision)) {
            return;
        }
        const SensitivityBasis& basis = name == "xyz" ? xyz_ : xyzu_;
        const MaterialReduction r = reduce_material(e.material, basis);
        send_json(res, {{"basis", name},
                        {"basis_hash", basis.hash()},
                        {"revision", e.revision},
                        {"labels", basis.labels()},
                        {"R", to_json(r.reflectance)["matrix"]},
                        {"F", to_json(r.fluorescence)["matrix"]},
                        {"P", to_json(r.total)["matrix"]}});
    }));
}

} // namespace fluoro
