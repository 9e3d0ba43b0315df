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


#include "fluoro/cli.hpp"

#include "fluoro/basis.hpp"
#include "fluoro/error.hpp"
#include "fluoro/evaluate.hpp"
#include "fluoro/fitting.hpp"
#include "fluoro/illuminants.hpp"
#include "fluoro/image.hpp"
#include "fluoro/material.hpp"
#include "fluoro/palette.hpp"
#include "fluoro/render.hpp"
#include "fluoro/rerad.hpp"
#include "fluoro/service.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace fluoro {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// JSON config files: nested objects select subcommands, e.g.
// {"palette": {"res": 32, "mu-range": [380, 720]}}.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        return dump(app, default_also).dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file: ") + e.what());
        }
        if (!j.is_object()) {
            throw CLI::ConversionError("config file must hold a JSON object");
        }
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static json dump(const CLI::App* app, bool default_also) {
        json j = json::object();
        for (const CLI::Option* opt : app->get_options()) {
            if (!opt->get_configurable() || opt->get_lnames().empty()) {
                continue;
            }
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0) {
                const auto& r = opt->results();
                j[name] = r.size() == 1 ? json(r.front()) : json(r);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            json s = dump(sub, default_also);
            if (!s.empty()) {
                j[sub->get_name()] = std::move(s);
            }
        }
        return j;
    }

    static std::string scalar(const json& v) {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_boolean()) {
            return v.get<bool>() ? "true" : "false";
        }
        return v.dump();
    }

    static void flatten(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : j.items()) {
            std::string name = key;
            std::replace(name.begin(), name.end(), '_', '-');
            if (value.is_object()) {
                auto p = parents;
                p.push_back(name);
                flatten(value, p, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = name;
            if (value.is_array()) {
                for (const auto& v : value) {
                    item.inputs.push_back(scalar(v));
                }
            } else {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }
};

void write_json(const std::string& path, const json& j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out << j.dump(2) << "\n";
}

void write_binary(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path);
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

json reduced_json(const MaterialReduction& r, const std::string& basis_name, const SensitivityBasis& basis,
                  const std::string& path) {
    return {{"basis", basis_name},
            {"basis_hash", basis.hash()},
            {"path", path},
            {"labels", basis.labels()},
            {"R", to_json(r.reflectance)["matrix"]},
            {"F", to_json(r.fluorescence)["matrix"]},
            {"P", to_json(r.total)["matrix"]}};
}

Eigen::MatrixXd square(std::span<const double> entries, std::size_t n) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t o = 0; o < n; ++o) {
        for (std::size_t i = 0; i < n; ++i) {
            m(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) = entries[o * n + i];
        }
    }
    return m;
}

std::vector<SpectralReradMatrix> load_dataset(const fs::path& dir, std::vector<std::string>& names) {
    if (!fs::is_directory(dir)) {
        throw DataError("dataset directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".bispec" || ext == ".csv")) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        throw DataError("no .bispec or .csv matrices in " + dir.string());
    }
    std::vector<SpectralReradMatrix> out;
    for (const auto& f : files) {
        LoadedRerad l = read_rerad(f);
        if (!out.empty() && !(l.matrix.grid() == out.front().grid())) {
            throw DataError(f.string() + ": grid differs from the rest of the dataset");
        }
        if (l.zeroed_below_diagonal + l.clamped_negative > 0) {
            std::cerr << f.filename().string() << ": zeroed " << l.zeroed_below_diagonal << " anti-Stokes and clamped "
                      << l.clamped_negative << " negative entries\n";
        }
        names.push_back(f.stem().string());
        out.push_back(std::move(l.matrix));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

FluorescentMaterial random_material(std::mt19937_64& rng, std::size_t lobes) {
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    FluorescentMaterial m;
    const double gray = uni(0.05, 0.4);
    m.albedo_xyz = Eigen::Vector3d::Constant(gray);
    m.lobes.clear();
    for (std::size_t q = 0; q < lobes; ++q) {
        FluoLobe l;
        l.alpha_bar = uni(0.2, 0.8);
        l.mu_a = uni(380.0, 460.0);
        l.sigma_a = uni(8.0, 16.0);
        l.sigma_e = uni(8.0, 30.0);
        const double lo = l.mu_a + 4.0 * std::hypot(l.sigma_a, l.sigma_e);
        l.mu_e = uni(lo, std::max(lo, 800.0 - 5.0 * l.sigma_e));
        m.lobes.push_back(l);
    }
    return m;
}

struct Options {
    std::string data;

    struct {
        std::string input, out;
        std::size_t q = 1, starts = 3;
        std::uint64_t seed = 1;
    } fit;

    struct {
        std::string material, input, basis = "xyzu", out, path = "analytic";
    } reduce;

    struct {
        std::string dataset, paths = "analytic,brute", illuminants, report, basis = "xyzu";
        std::size_t q = 1;
        std::uint64_t seed = 1;
    } eval;

    struct {
        std::string material, illuminant = "D65", out, params, basis = "xyzu";
        std::vector<double> albedo, mu_range{380.0, 720.0}, sigma_range{5.0, 120.0};
        double mu_a = 420.0, sigma_a = 100.0, alpha_bar = 1.0, exposure = 1.0;
        std::size_t res = 64;
        bool fluorescent_only = false;
    } palette;

    struct {
        std::string material, illuminant = "D65", right, out, pfm, fluorescent_pfm, basis = "xyzu";
        std::string albedo_map, strength_map, mu_a_map, hsv_map;
        std::vector<double> mu_a_range{350.0, 500.0};
        std::size_t size = 256;
        double exposure = 1.0;
    } render;

    struct {
        std::string material, input, basis, component = "total", out;
        std::size_t cell = 1;
        bool log = false;
    } heatmap;

    struct {
        std::string a, b, out;
        double t = 0.5;
    } interp;

    struct {
        std::string out;
        std::size_t count = 10, lobes = 1;
        std::uint64_t seed = 1;
        double step = 5.0;
    } synth;

    struct {
        std::string host = "127.0.0.1";
        int port = 8080;
    } serve;
};

int run_fit(const Options& o) {
    const LoadedRerad l = read_rerad(o.fit.input);
    FitConfig cfg;
    cfg.q = o.fit.q;
    cfg.seed = o.fit.seed;
    cfg.starts = o.fit.starts;
    const MaterialFit f = fit_material(l.matrix, cfg);
    std::cerr << "fluorescence rms " << f.fluorescence.rms << ", diagonal rms " << f.diagonal.rms << ", clamped lobes "
              << f.clamped_lobes << "\n";
    write_json(o.fit.out, to_json(f.material));
    return 0;
}

int run_reduce(const Options& o) {
    const SensitivityBasis basis = basis_by_name(o.reduce.basis);
    if (!o.reduce.material.empty()) {
        const FluorescentMaterial m = read_material(o.reduce.material);
        MaterialReduction r;
        if (o.reduce.path == "analytic") {
            r = reduce_material(m, basis);
        } else if (o.reduce.path == "brute") {
            const SpectralReradMatrix p = material_spectral(m, basis.grid());
            const DecomposedRerad d = decompose(p);
            r.total = reduce_matrix(p, basis);
            r.fluorescence = reduce_matrix(d.fbar, basis.grid(), basis);
            r.reflectance = reduce_matrix(recompose({d.rho, std::vector<double>(d.fbar.size(), 0.0), 0}), basis);
        } else {
            throw std::invalid_argument("--path must be analytic or brute");
        }
        write_json(o.reduce.out, reduced_json(r, o.reduce.basis, basis, o.reduce.path));
        return 0;
    }
    if (o.reduce.path != "brute" && o.reduce.path != "analytic") {
        throw std::invalid_argument("--path must be analytic or brute");
    }
    const LoadedRerad l = read_rerad(o.reduce.input);
    const SensitivityBasis on_grid = basis_by_name(o.reduce.basis, l.matrix.grid());
    const DecomposedRerad d = decompose(l.matrix);
    MaterialReduction r;
    r.total = reduce_matrix(l.matrix, on_grid);
    r.fluorescence = reduce_matrix(d.fbar, on_grid.grid(), on_grid);
    r.reflectance = reduce_matrix(recompose({d.rho, std::vector<double>(d.fbar.size(), 0.0), 0}), on_grid);
    write_json(o.reduce.out, reduced_json(r, o.reduce.basis, on_grid, "brute"));
    return 0;
}

int run_eval(const Options& o) {
    std::vector<std::string> names;
    const std::vector<SpectralReradMatrix> dataset = load_dataset(o.eval.dataset, names);
    const WavelengthGrid grid = dataset.front().grid();
    const IlluminantRegistry registry(grid, o.data);
    const SensitivityBasis sensors = xyz_basis(grid);
    const SensitivityBasis basis = basis_by_name(o.eval.basis, grid);

    EvalSetup setup;
    setup.registry = &registry;
    setup.illuminants = o.eval.illuminants.empty() ? evaluation_illuminants() : split_list(o.eval.illuminants);
    for (const auto& l : setup.illuminants) {
        registry.get(l);
    }
    setup.sensors = &sensors;
    setup.basis = &basis;

    std::vector<EvalPath> paths;
    for (const auto& p : split_list(o.eval.paths)) {
        paths.push_back(parse_eval_path(p));
    }
    const bool need_fit = std::any_of(paths.begin(), paths.end(), [](EvalPath p) { return p != EvalPath::reduced_brute; });
    std::vector<FluorescentMaterial> models;
    if (need_fit) {
        FitConfig cfg;
        cfg.q = o.eval.q;
        cfg.seed = o.eval.seed;
        for (std::size_t m = 0; m < dataset.size(); ++m) {
            models.push_back(fit_material(dataset[m], cfg).material);
        }
    }

    json report = {{"materials", names}, {"basis", o.eval.basis}, {"q", o.eval.q}, {"paths", json::array()}};
    std::cout << std::left << std::setw(18) << "path" << std::setw(8) << "light" << std::right << std::setw(9)
              << "mean" << std::setw(9) << "median" << std::setw(9) << "max" << "\n";
    std::cout << std::fixed << std::setprecision(4);
    for (EvalPath p : paths) {
        const EvalReport r = evaluate_dE(dataset, models, setup, p);
        for (const auto& l : r.illuminants) {
            const BoxStats& s = r.per_illuminant.at(l);
            std::cout << std::left << std::setw(18) << r.path << std::setw(8) << l << std::right << std::setw(9)
                      << s.mean << std::setw(9) << s.median << std::setw(9) << s.max << "\n";
        }
        std::cout << std::left << std::setw(18) << r.path << std::setw(8) << "all" << std::right << std::setw(9)
                  << r.overall.mean << std::setw(9) << r.overall.median << std::setw(9) << r.overall.max << "\n";
        report["paths"].push_back(to_json(r));
    }
    if (!o.eval.report.empty()) {
        write_json(o.eval.report, report);
    }
    return 0;
}

int run_palette(const Options& o) {
    const IlluminantRegistry registry(default_grid(), o.data);
    const SensitivityBasis basis = basis_by_name(o.palette.basis);
    PaletteContext ctx;
    ctx.illuminant = o.palette.illuminant;
    ctx.mu_a = o.palette.mu_a;
    ctx.sigma_a = o.palette.sigma_a;
    if (!o.palette.material.empty()) {
        const FluorescentMaterial m = read_material(o.palette.material);
        ctx.albedo_xyz = m.albedo_xyz;
        ctx.mu_a = m.lobes.front().mu_a;
        ctx.sigma_a = m.lobes.front().sigma_a;
    }
    if (!o.palette.albedo.empty()) {
        ctx.albedo_xyz = Eigen::Vector3d(o.palette.albedo[0], o.palette.albedo[1], o.palette.albedo[2]);
    }
    ctx.alpha_bar = o.palette.alpha_bar;
    ctx.fluorescent_only = o.palette.fluorescent_only;
    ctx.exposure = o.palette.exposure;
    registry.get(ctx.illuminant);

    PaletteAxes axes;
    axes.mu_lo = o.palette.mu_range[0];
    axes.mu_hi = o.palette.mu_range[1];
    axes.sigma_lo = o.palette.sigma_range[0];
    axes.sigma_hi = o.palette.sigma_range[1];
    axes.mu_steps = axes.sigma_steps = o.palette.res;
    const Palette p = generate_palette(ctx, axes, basis, registry);
    if (p.clipped > 0) {
        std::cerr << p.clipped << " of " << p.cells.size() << " swatches clipped to the sRGB gamut\n";
    }
    write_binary(o.palette.out, encode_ppm(p.image));
    if (!o.palette.params.empty()) {
        write_json(o.palette.params, palette_json(p));
    }
    return 0;
}

int run_render(const Options& o) {
    const IlluminantRegistry registry(default_grid(), o.data);
    const SensitivityBasis basis = basis_by_name(o.render.basis);
    PreviewScene scene;
    scene.material = read_material(o.render.material);
    scene.illuminant = o.render.illuminant;
    registry.get(scene.illuminant);
    if (!o.render.right.empty()) {
        registry.get(o.render.right);
        scene.right_illuminant = o.render.right;
    }
    scene.width = scene.height = o.render.size;
    scene.exposure = o.render.exposure;
    scene.mu_a_lo = o.render.mu_a_range[0];
    scene.mu_a_hi = o.render.mu_a_range[1];
    if (!o.render.albedo_map.empty()) {
        scene.albedo_map = read_texture(o.render.albedo_map);
    }
    if (!o.render.strength_map.empty()) {
        scene.strength_map = read_texture(o.render.strength_map);
    }
    if (!o.render.mu_a_map.empty()) {
        scene.mu_a_map = read_texture(o.render.mu_a_map);
    }
    if (!o.render.hsv_map.empty()) {
        scene.hsv_map = read_texture(o.render.hsv_map);
    }
    const RenderResult r = render_sphere(scene, basis, registry);
    if (r.invalid_texels > 0) {
        std::cerr << r.invalid_texels << " texels mapped outside the valid parameter range (clamped)\n";
    }
    write_binary(o.render.out, encode_ppm(r.display));
    if (!o.render.pfm.empty()) {
        write_pfm(fs::path(o.render.pfm), r.xyz);
    }
    if (!o.render.fluorescent_pfm.empty()) {
        write_pfm(fs::path(o.render.fluorescent_pfm), r.fluorescent);
    }
    return 0;
}

int run_heatmap(const Options& o) {
    const auto& h = o.heatmap;
    if (h.component != "total" && h.component != "reflectance" && h.component != "fluorescence") {
        throw std::invalid_argument("--component must be total, reflectance or fluorescence");
    }
    Eigen::MatrixXd mat;
    HeatmapConfig cfg;
    cfg.cell = h.cell;
    cfg.log_scale = h.log;
    if (!h.basis.empty()) {
        const SensitivityBasis basis = basis_by_name(h.basis);
        MaterialReduction r;
        if (!h.material.empty()) {
            r = reduce_material(read_material(h.material), basis);
        } else {
            const LoadedRerad l = read_rerad(h.input);
            const SensitivityBasis on_grid = basis_by_name(h.basis, l.matrix.grid());
            const DecomposedRerad d = decompose(l.matrix);
            r.total = reduce_matrix(l.matrix, on_grid);
            r.fluorescence = reduce_matrix(d.fbar, on_grid.grid(), on_grid);
            r.reflectance = reduce_matrix(recompose({d.rho, std::vector<double>(d.fbar.size(), 0.0), 0}), on_grid);
        }
        mat = h.component == "total" ? r.total.m : h.component == "reflectance" ? r.reflectance.m : r.fluorescence.m;
        cfg.signed_map = true;
    } else {
        const SpectralReradMatrix p = !h.material.empty() ? material_spectral(read_material(h.material), default_grid())
                                                          : read_rerad(h.input).matrix;
        const DecomposedRerad d = decompose(p);
        const std::size_t n = p.size();
        if (h.component == "total") {
            mat = square(p.entries(), n);
        } else if (h.component == "fluorescence") {
            mat = square(d.fbar, n);
        } else {
            mat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (std::size_t k = 0; k < n; ++k) {
                mat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = d.rho[k];
            }
        }
    }
    write_binary(h.out, encode_ppm(heatmap(mat, cfg)));
    return 0;
}

int run_interp(const Options& o) {
    const FluorescentMaterial a = read_material(o.interp.a);
    const FluorescentMaterial b = read_material(o.interp.b);
    write_json(o.interp.out, to_json(interpolate_materials(a, b, o.interp.t)));
    return 0;
}

int run_synth(const Options& o) {
    const fs::path dir = o.synth.out;
    fs::create_directories(dir);
    const WavelengthGrid grid = make_grid(300.0, 800.0, o.synth.step);
    std::mt19937_64 rng(o.synth.seed);
    for (std::size_t k = 0; k < o.synth.count; ++k) {
        const FluorescentMaterial m = random_material(rng, o.synth.lobes);
        std::ostringstream stem;
        stem << "m" << std::setw(3) << std::setfill('0') << k;
        std::ofstream out(dir / (stem.str() + ".bispec"));
        if (!out) {
            throw DataError("cannot write into " + dir.string());
        }
        write_bispec(out, material_spectral(m, grid));
        write_material(dir / (stem.str() + ".json"), m);
    }
    std::cerr << "wrote " << o.synth.count << " materials to " << dir.string() << "\n";
    return 0;
}

int run_serve(const Options& o) {
    ServiceConfig cfg;
    cfg.data = o.data;
    EditService service(cfg);
    std::cerr << "serving on http://" << o.serve.host << ":" << o.serve.port << "\n";
    if (!service.listen(o.serve.host, o.serve.port)) {
        throw DataError("cannot listen on " + o.serve.host + ":" + std::to_string(o.serve.port));
    }
    return 0;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Fluorescent material toolkit: fitting, reduction, palettes and previews", "fluoro"};
    app.set_version_flag("--version", library_version());
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file mirroring the command-line flags");
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    o.data = data_dir().string();
    app.add_option("--data-dir", o.data, "Illuminant and CMF asset directory");

    auto* fit = app.add_subcommand("fit", "Fit a Gaussian material to a measured reradiation matrix");
    fit->add_option("--input", o.fit.input, "Matrix file (.bispec or .csv)")->required();
    fit->add_option("--q", o.fit.q, "Number of fluorescence Gaussians")->check(CLI::Range(1, 4));
    fit->add_option("--seed", o.fit.seed, "Multi-start seed");
    fit->add_option("--starts", o.fit.starts, "Multi-start count")->check(CLI::Range(1, 64));
    fit->add_option("--out", o.fit.out, "Material JSON (stdout if omitted)");

    auto* reduce = app.add_subcommand("reduce", "Reduce a material or matrix to a KxK colour matrix");
    auto* rm = reduce->add_option("--material", o.reduce.material, "Material JSON");
    auto* ri = reduce->add_option("--input", o.reduce.input, "Matrix file (.bispec or .csv)");
    rm->excludes(ri);
    reduce->add_option("--basis", o.reduce.basis, "xyz or xyzu");
    reduce->add_option("--path", o.reduce.path, "analytic or brute")->check(CLI::IsMember({"analytic", "brute"}));
    reduce->add_option("--out", o.reduce.out, "Output JSON (stdout if omitted)");

    auto* eval = app.add_subcommand("eval", "CIEDE2000 of reduced or fitted paths against spectral rendering");
    eval->add_option("--dataset", o.eval.dataset, "Directory of .bispec/.csv matrices")->required();
    eval->add_option("--paths", o.eval.paths, "Comma list of analytic, brute, spectral");
    eval->add_option("--illuminants", o.eval.illuminants, "Comma list (default: the eight evaluation lights)");
    eval->add_option("--basis", o.eval.basis, "xyz or xyzu")->check(CLI::IsMember({"xyz", "xyzu"}));
    eval->add_option("--q", o.eval.q, "Gaussians per fitted material")->check(CLI::Range(1, 4));
    eval->add_option("--seed", o.eval.seed, "Fit seed");
    eval->add_option("--report", o.eval.report, "JSON report path");

    auto* pal = app.add_subcommand("palette", "Emission palette over (mu_e, sigma_e)");
    pal->add_option("--material", o.palette.material, "Take albedo and absorption from this material");
    pal->add_option("--albedo", o.palette.albedo, "XYZ albedo")->expected(3)->delimiter(',');
    pal->add_option("--illuminant", o.palette.illuminant, "Illuminant name");
    pal->add_option("--mu-a", o.palette.mu_a, "Absorption mean (nm)")->check(CLI::Range(kMinMeanNm, kMaxMeanNm));
    pal->add_option("--sigma-a", o.palette.sigma_a, "Absorption spread (nm)")->check(CLI::Range(kMinSpreadNm, kMaxSpreadNm));
    pal->add_option("--alpha-bar", o.palette.alpha_bar, "Fluorescence strength")->check(CLI::Range(0.0, 1.0));
    pal->add_option("--res", o.palette.res, "Cells per axis")->check(CLI::Range(1, 1024));
    pal->add_option("--mu-range", o.palette.mu_range, "Emission mean range")->expected(2)->delimiter(',');
    pal->add_option("--sigma-range", o.palette.sigma_range, "Emission spread range")->expected(2)->delimiter(',');
    pal->add_flag("--fluorescent-only", o.palette.fluorescent_only, "Show only the fluorescent component");
    pal->add_option("--exposure", o.palette.exposure, "Display exposure")->check(CLI::PositiveNumber);
    pal->add_option("--basis", o.palette.basis, "xyz or xyzu")->check(CLI::IsMember({"xyz", "xyzu"}));
    pal->add_option("--out", o.palette.out, "PPM output (stdout if omitted)");
    pal->add_option("--params", o.palette.params, "JSON parameter grid");

    auto* ren = app.add_subcommand("render", "Lambertian sphere preview");
    ren->add_option("--material", o.render.material, "Material JSON")->required();
    ren->add_option("--illuminant", o.render.illuminant, "Illuminant name");
    ren->add_option("--right-illuminant", o.render.right, "Light the right half with this illuminant");
    ren->add_option("--size", o.render.size, "Image width and height")->check(CLI::Range(1, 4096));
    ren->add_option("--exposure", o.render.exposure, "Display exposure")->check(CLI::PositiveNumber);
    ren->add_option("--basis", o.render.basis, "xyz or xyzu")->check(CLI::IsMember({"xyz", "xyzu"}));
    ren->add_option("--albedo-map", o.render.albedo_map, "PPM/PFM texture: XYZ albedo");
    ren->add_option("--strength-map", o.render.strength_map, "PPM/PFM texture: alpha_bar");
    ren->add_option("--mu-a-map", o.render.mu_a_map, "PPM/PFM texture: absorption mean");
    ren->add_option("--mu-a-range", o.render.mu_a_range, "Absorption mean range of --mu-a-map")->expected(2)->delimiter(',');
    ren->add_option("--hsv-map", o.render.hsv_map, "PPM/PFM texture: HSV-driven emission");
    ren->add_option("--out", o.render.out, "PPM output (stdout if omitted)");
    ren->add_option("--pfm", o.render.pfm, "Float XYZ output");
    ren->add_option("--fluorescent-pfm", o.render.fluorescent_pfm, "Float XYZ of the fluorescent component");

    auto* heat = app.add_subcommand("heatmap", "Image of a spectral or reduced matrix");
    auto* hm = heat->add_option("--material", o.heatmap.material, "Material JSON");
    auto* hi = heat->add_option("--input", o.heatmap.input, "Matrix file");
    hm->excludes(hi);
    heat->add_option("--basis", o.heatmap.basis, "Reduce first (signed KxK map)");
    heat->add_option("--component", o.heatmap.component, "total, reflectance or fluorescence");
    heat->add_option("--cell", o.heatmap.cell, "Pixels per entry")->check(CLI::Range(1, 256));
    heat->add_flag("--log", o.heatmap.log, "Logarithmic scale");
    heat->add_option("--out", o.heatmap.out, "PPM output (stdout if omitted)");

    auto* interp = app.add_subcommand("interp", "Blend the parameters of two materials");
    interp->add_option("--a", o.interp.a, "First material")->required();
    interp->add_option("--b", o.interp.b, "Second material")->required();
    interp->add_option("--t", o.interp.t, "Blend weight")->check(CLI::Range(0.0, 1.0));
    interp->add_option("--out", o.interp.out, "Material JSON (stdout if omitted)");

    auto* synth = app.add_subcommand("synth", "Write random Gaussian materials as matrices");
    synth->add_option("--out", o.synth.out, "Output directory")->required();
    synth->add_option("--count", o.synth.count, "Number of materials")->check(CLI::Range(1, 10000));
    synth->add_option("--lobes", o.synth.lobes, "Gaussians per material")->check(CLI::Range(1, 4));
    synth->add_option("--seed", o.synth.seed, "Random seed");
    synth->add_option("--step", o.synth.step, "Grid step (nm)")->check(CLI::Range(0.5, 50.0));

    auto* serve = app.add_subcommand("serve", "HTTP editing service");
    serve->add_option("--host", o.serve.host, "Bind address");
    serve->add_option("--port", o.serve.port, "Port")->check(CLI::Range(1, 65535));

    for (auto* sub : app.get_subcommands({})) {
        sub->configurable();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (reduce->parsed() && o.reduce.material.empty() && o.reduce.input.empty()) {
            throw CLI::RequiredError("--material or --input");
        }
        if (heat->parsed() && o.heatmap.material.empty() && o.heatmap.input.empty()) {
            throw CLI::RequiredError("--material or --input");
        }
        if (fit->parsed()) return run_fit(o);
        if (reduce->parsed()) return run_reduce(o);
        if (eval->parsed()) return run_eval(o);
        if (pal->parsed()) return run_palette(o);
        if (ren->parsed()) return run_render(o);
        if (heat->parsed()) return run_heatmap(o);
        if (interp->parsed()) return run_interp(o);
        if (synth->parsed()) return run_synth(o);
        if (serve->parsed()) return run_serve(o);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const DataError& e) {
        std::cerr << "fluoro: data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fluoro: " << e.what() << "\n";
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "fluoro: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "fluoro: error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int cli_main(const std::vector<std::string>& args) {
    std::vector<std::string> copy = args;
    std::vector<char*> argv;
    for (auto& a : copy) {
        argv.push_back(a.data());
    }
    argv.push_back(nullptr);
    return cli_main(static_cast<int>(copy.size()), argv.data());
}

} // namespace fluoro
