// qw4 command-line driver.
//
//   qw4 --preset fig_grover_localized --format csv --output grover.csv
//   qw4 --config run.json --steps 8
//   qw4 --coin hadamard4 --initial phi3 --shifts 1 -1 2 -2 --format json
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qw4/io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qw4::io::IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    namespace io = qw4::io;

    CLI::App app{"Discrete-time quantum walk with a four-state (polarization x OAM) coin"};
    app.set_version_flag("--version", std::string(io::kSchemaVersion));

    std::string config_path, preset, output, format, coin, mode;
    std::vector<std::string> initial;
    std::vector<long long> shifts;
    int steps = -1;
    long long n_segment = 0;
    bool recenter = false, sagnac_swap = false, list_presets = false;

    app.add_option("--config", config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "Named figure preset (see --list-presets)");
    app.add_option("--output", output, "Output file (default: stdout, or <preset>.<format> for presets)");
    app.add_option("--format", format, "csv | json | svg");
    app.add_option("--steps", steps, "Number of walk steps");
    app.add_option("--coin", coin, "hadamard4 | grover4 | sagnac_swap | file:<path>");
    app.add_option("--initial", initial, "phi1 | phi2 | phi3 | basis:<i> | 8 numbers re0 im0 ... re3 im3")
        ->expected(1, 8)
        ->allow_extra_args(false);
    app.add_option("--shifts", shifts, "Four integer shifts for H+, H-, V+, V-")->expected(4);
    app.add_option("--mode", mode, "walk1d | walk2d");
    app.add_option("--N", n_segment, "Segment length for walk2d (odd)");
    app.add_flag("--recenter", recenter, "Remove the midpoint drift after every step");
    app.add_flag("--sagnac-swap", sagnac_swap, "Include the Sagnac swap in every step");
    app.add_flag("--list-presets", list_presets, "Print preset names and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (list_presets) {
        for (auto name : io::kPresetNames) std::cout << name << '\n';
        return 0;
    }

    try {
        io::json cfg_json = io::json::object();
        if (!preset.empty()) {
            if (!config_path.empty()) throw io::ConfigError(io::ErrorCode::malformed, "--preset and --config are exclusive");
            cfg_json = io::preset_json(preset);
        } else if (!config_path.empty()) {
            try {
                cfg_json = io::json::parse(read_file(config_path));
            } catch (const io::json::parse_error& e) {
                throw io::ConfigError(io::ErrorCode::malformed, std::string("config is not valid JSON: ") + e.what());
            }
            if (!cfg_json.is_object()) throw io::ConfigError(io::ErrorCode::malformed, "config must be a JSON object");
        }

        if (!coin.empty()) cfg_json["coin"] = coin;
        if (!mode.empty()) cfg_json["mode"] = mode;
        if (n_segment != 0) cfg_json["N"] = n_segment;
        if (app.count("--steps")) cfg_json["steps"] = steps;
        if (!format.empty()) cfg_json["format"] = format;
        if (!output.empty()) cfg_json["output"] = output;
        if (recenter) cfg_json["recenter"] = true;
        if (sagnac_swap) cfg_json["apply_sagnac_swap"] = true;
        if (!shifts.empty()) cfg_json["shifts"] = shifts;
        if (initial.size() == 1) {
            cfg_json["initial"] = initial.front();
        } else if (initial.size() == 8) {
            io::json arr = io::json::array();
            for (const auto& tok : initial) {
                try {
                    arr.push_back(io::parse_double(tok));
                } catch (const io::IoError&) {
                    throw io::ConfigError(io::ErrorCode::bad_initial, "initial component '" + tok + "' is not a number");
                }
            }
            cfg_json["initial"] = arr;
        } else if (!initial.empty()) {
            throw io::ConfigError(io::ErrorCode::bad_initial, "--initial takes a name or exactly 8 numbers");
        }

        const io::ExperimentConfig cfg = io::parse_config(cfg_json);
        const io::ExperimentResult result = io::run_experiment(cfg, preset);
        const std::string bytes = io::emit(result, cfg.format);

        std::string target = cfg.output;
        if (target.empty() && !preset.empty()) target = preset + "." + std::string(io::to_string(cfg.format));
        if (target.empty() || target == "-") {
            std::cout << bytes;
        } else {
            io::write_atomic(target, bytes);
            std::cerr << "wrote " << target << '\n';
        }
    } catch (const io::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const io::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
