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


#include "fluoro/material.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Dir {
    fs::path path;
    Dir() {
        path = fs::temp_directory_path() / ("fluoro_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~Dir() { fs::remove_all(path); }
};

const Dir& tmp() {
    static const Dir d;
    return d;
}

fs::path at(const std::string& name) { return tmp().path / name; }

int run(const std::string& args) {
    const std::string cmd = std::string(FLUORO_CLI_PATH) + " " + args + " > " + at("stdout.txt").string() + " 2> " +
                            at("stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* kMaterial = R"({"albedo_xyz": [0.3, 0.3, 0.3],
  "gaussians": [{"alpha_bar": 0.6, "mu_a_nm": 400, "sigma_a_nm": 30, "mu_e_nm": 560, "sigma_e_nm": 25}]})";

const char* kOther = R"({"albedo_xyz": [0.5, 0.1, 0.3],
  "gaussians": [{"alpha_bar": 0.2, "mu_a_nm": 440, "sigma_a_nm": 50, "mu_e_nm": 620, "sigma_e_nm": 35}]})";

} // namespace

TEST_CASE("exit codes") {
    CHECK(run("--help") == 0);
    CHECK(slurp(at("stdout.txt")).find("palette") != std::string::npos);
    CHECK(run("--version") == 0);
    CHECK(run("") == 1);
    CHECK(run("palette --bogus") == 1);
    CHECK(run("palette --mu-a 5") == 1);
    CHECK(run("reduce --material " + at("missing.json").string()) == 2);
    write_text(at("bad.json"), R"({"albedo_xyz": [2, 0, 0], "gaussians": []})");
    CHECK(run("reduce --material " + at("bad.json").string()) == 2);
    CHECK(slurp(at("stderr.txt")).find("albedo_xyz") != std::string::npos);
}

TEST_CASE("reduce writes the K x K matrices") {
    write_text(at("m.json"), kMaterial);
    REQUIRE(run("reduce --material " + at("m.json").string() + " --out " + at("r.json").string()) == 0);
    const json r = json::parse(slurp(at("r.json")));
    CHECK(r.at("labels").size() == 4);
    CHECK(r.at("P").size() == 4);
    CHECK(r.at("P")[0].size() == 4);
    REQUIRE(run("reduce --material " + at("m.json").string() + " --basis xyz --path brute --out " +
                at("b.json").string()) == 0);
    const json b = json::parse(slurp(at("b.json")));
    CHECK(b.at("P").size() == 3);
    CHECK(b.at("path") == "brute");
    CHECK(run("reduce --material " + at("m.json").string() + " --input " + at("m.json").string()) == 1);
}

TEST_CASE("interp midpoint") {
    write_text(at("a.json"), kMaterial);
    write_text(at("b.json"), kOther);
    REQUIRE(run("interp --a " + at("a.json").string() + " --b " + at("b.json").string() + " --t 0.5 --out " +
                at("mid.json").string()) == 0);
    const fluoro::FluorescentMaterial m = fluoro::read_material(at("mid.json"));
    CHECK(m.albedo_xyz(0) == 0.3);
    CHECK(m.lobes[0].mu_e == doctest::Approx(590));
    CHECK(m.lobes[0].alpha_bar == doctest::Approx(0.4));
}

TEST_CASE("palette output is deterministic and honours a config file") {
    REQUIRE(run("palette --res 16 --mu-a 410 --out " + at("p1.ppm").string()) == 0);
    REQUIRE(run("palette --res 16 --mu-a 410 --out " + at("p2.ppm").string() + " --params " +
                at("p.json").string()) == 0);
    CHECK(slurp(at("p1.ppm")) == slurp(at("p2.ppm")));
    CHECK(slurp(at("p1.ppm")).substr(0, 9) == "P6\n16 16\n");
    CHECK(json::parse(slurp(at("p.json"))).at("cells").size() == 256);

    write_text(at("cfg.json"), R"({"palette": {"res": 16, "mu_a": 410}})");
    REQUIRE(run("--config " + at("cfg.json").string() + " palette --out " + at("p3.ppm").string()) == 0);
    CHECK(slurp(at("p3.ppm")) == slurp(at("p1.ppm")));
}

TEST_CASE("render and heatmap") {
    write_text(at("m.json"), kMaterial);
    REQUIRE(run("render --material " + at("m.json").string() + " --size 24 --right-illuminant UV --out " +
                at("r.ppm").string() + " --pfm " + at("r.pfm").string()) == 0);
    CHECK(slurp(at("r.ppm")).substr(0, 9) == "P6\n24 24\n");
    CHECK(slurp(at("r.pfm")).substr(0, 2) == "PF");
    CHECK(run("render --material " + at("m.json").string() + " --illuminant nowhere") == 2);
    REQUIRE(run("heatmap --material " + at("m.json").string() + " --out " + at("h.ppm").string()) == 0);
    CHECK(slurp(at("h.ppm")).substr(0, 11) == "P6\n501 501\n");
    REQUIRE(run("heatmap --material " + at("m.json").string() + " --basis xyzu --cell 8 --out " +
                at("hr.ppm").string()) == 0);
    CHECK(slurp(at("hr.ppm")).substr(0, 9) == "P6\n32 32\n");
}

TEST_CASE("synth, reduce and eval on a generated dataset") {
    const fs::path data = at("data");
    REQUIRE(run("synth --out " + data.string() + " --count 3 --seed 4 --step 10") == 0);
    CHECK(fs::exists(data / "m000.bispec"));
    CHECK(fs::exists(data / "m002.json"));
    REQUIRE(run("reduce --input " + (data / "m000.bispec").string() + " --out " + at("rin.json").string()) == 0);
    CHECK(json::parse(slurp(at("rin.json"))).at("P").size() == 4);
    REQUIRE(run("eval --dataset " + data.string() + " --paths brute --illuminants D65,A --report " +
                at("rep.json").string()) == 0);
    const std::string table = slurp(at("stdout.txt"));
    CHECK(table.find("reduced-brute") != std::string::npos);
    const json rep = json::parse(slurp(at("rep.json")));
    CHECK(rep.at("paths")[0].at("illuminants").size() == 2);
    CHECK(run("eval --dataset " + data.string() + " --paths fast") == 1);
}
