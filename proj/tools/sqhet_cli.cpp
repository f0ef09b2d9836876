// Command-line front end: run presets or config files, list presets,
// validate configs.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "sqhet/config.hpp"
#include "sqhet/errors.hpp"
#include "sqhet/presets.hpp"
#include "sqhet/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// A config file alone must be complete; combined with a preset it is a
// merge patch over the preset.
sqhet::ExperimentConfig resolve(const std::string& preset, const std::string& config_file) {
    if (preset.empty() && config_file.empty()) throw sqhet::ConfigError("config", "need --preset or --config");
    if (config_file.empty()) return sqhet::make_preset(preset);
    const auto j = sqhet::read_json_file(config_file);
    if (preset.empty()) return sqhet::config_from_json(j);
    return sqhet::merge_config(sqhet::make_preset(preset), j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Squeezed-light heterodyne interferometer simulator"};
    app.require_subcommand(1);

    std::string preset, config_file, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> frames;

    auto* run = app.add_subcommand("run", "Run an experiment and write its outputs");
    run->add_option("--preset", preset, "Preset name (see list-presets)");
    run->add_option("--config", config_file, "JSON config; a merge patch when --preset is given");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--frames", frames, "Number of frames")->check(CLI::PositiveNumber);
    run->add_option("--out", out_dir, "Output directory");

    auto* list = app.add_subcommand("list-presets", "List preset names and descriptions");

    auto* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("--config", config_file, "JSON config")->required();
    validate->add_option("--preset", preset, "Base preset the config patches");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*list) {
            for (const auto& p : sqhet::list_presets()) std::cout << p.name << "\t" << p.description << "\n";
            return 0;
        }
        sqhet::ExperimentConfig c = resolve(preset, config_file);
        if (*validate) {
            std::cout << "ok " << c.name << " config_hash=" << sqhet::config_hash(c) << "\n";
            return 0;
        }
        if (seed) c.seed = *seed;
        if (frames) c.frames = *frames;
        if (!out_dir.empty()) c.output_dir = out_dir;
        c.validate();

        const auto result = sqhet::run_experiment(c);
        sqhet::write_outputs(result, c, c.output_dir);
        std::cout << sqhet::format_summary(result.summary);
        std::printf("wall_time_s=%.3f\n", result.summary.wall_time_s);
        std::cout << "outputs written to " << c.output_dir << "\n";
        return 0;
    } catch (const sqhet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const sqhet::DegenerateSubtraction& e) {
        std::cerr << "degenerate subtraction: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
