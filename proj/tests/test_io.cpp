#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qw4/io.hpp"
#include "support/helpers.hpp"

using namespace qw4;
namespace fs = std::filesystem;

namespace {

io::ErrorCode code_of(std::string_view text) {
    try {
        io::parse_config_text(text);
    } catch (const io::ConfigError& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error for " << text;
    return io::ErrorCode::malformed;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("qw4_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QW4_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsFilled) {
    const auto cfg = io::parse_config_text(R"({"coin":"grover4","initial":"phi1"})");
    EXPECT_EQ(cfg.steps, 12);
    EXPECT_EQ(cfg.shifts, (ShiftVector{{1, -1, 2, -2}}));
    EXPECT_FALSE(cfg.recenter);
    EXPECT_FALSE(cfg.apply_sagnac_swap);
    EXPECT_EQ(cfg.mode, io::Mode::walk1d);
    EXPECT_EQ(cfg.coin.matrix(), grover4().matrix());
    EXPECT_EQ(max_abs_diff(cfg.initial, CoinVec{{0.5, 0.5, -0.5, -0.5}}), 0.0);
}

TEST(Config, HadamardPhi3MatchesPreset) {
    const auto a = io::parse_config_text(R"({"coin":"hadamard4","initial":"phi3","steps":12})");
    const auto b = io::preset_config("fig_hadamard_phi3");
    EXPECT_EQ(io::emit_csv(io::run_experiment(a)), io::emit_csv(io::run_experiment(b)));
}

TEST(Config, NumericInitialState) {
    const auto cfg = io::parse_config_text(R"({"initial":[1,0,0,0,0,0,0,0], "coin":"grover4"})");
    EXPECT_EQ(max_abs_diff(cfg.initial, CoinVec::basis(0)), 0.0);
    const auto scaled = io::parse_config_text(R"({"initial":[0,3,0,0,0,0,4,0]})");
    EXPECT_NEAR(scaled.initial.norm2(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(scaled.initial[0] - cplx{0.0, 0.6}), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(scaled.initial[3] - cplx{0.8, 0.0}), 0.0, 1e-15);
}

TEST(Config, Walk2dDefaultsToFullBudget) {
    const auto cfg = io::parse_config_text(R"({"mode":"walk2d","N":7})");
    EXPECT_EQ(cfg.steps, 3);
    EXPECT_EQ(cfg.shifts, (ShiftVector{{1, -1, 7, -7}}));
}

TEST(Config, DistinctErrorCodes) {
    using io::ErrorCode;
    EXPECT_EQ(code_of(R"({"coin":"pauli"})"), ErrorCode::unknown_coin);
    EXPECT_EQ(code_of(R"({"initial":[0,0,0,0,0,0,0,0]})"), ErrorCode::bad_initial);
    EXPECT_EQ(code_of(R"({"initial":"phi9"})"), ErrorCode::bad_initial);
    EXPECT_EQ(code_of(R"({"steps":-1})"), ErrorCode::negative_steps);
    EXPECT_EQ(code_of(R"({"mode":"walk2d","N":20})"), ErrorCode::even_n);
    EXPECT_EQ(code_of(R"({"mode":"walk2d","N":21,"steps":11})"), ErrorCode::step_budget);
    EXPECT_EQ(code_of(R"({"mode":"walk2d","shifts":[1,-1,2,-2]})"), ErrorCode::bad_shifts);
    EXPECT_EQ(code_of(R"({"shifts":[1,-1,2]})"), ErrorCode::malformed);
    EXPECT_EQ(code_of(R"({"colour":"red"})"), ErrorCode::unknown_field);
    EXPECT_EQ(code_of(R"({"mode":"walk3d"})"), ErrorCode::bad_mode);
    EXPECT_EQ(code_of(R"({"format":"png"})"), ErrorCode::bad_format);
    EXPECT_EQ(code_of(R"({"coin":[[1,0],[1,0]]})"), ErrorCode::bad_coin_file);
    EXPECT_EQ(code_of("[1,2]"), ErrorCode::malformed);
    EXPECT_EQ(code_of("{not json"), ErrorCode::malformed);
    EXPECT_THROW(io::preset_config("fig_nope"), io::ConfigError);
}

TEST(Config, CoinFromFile) {
    const fs::path p = scratch("swap_coin.json");
    std::ofstream(p) << io::matrix_to_json(modified_coin(grover4()).matrix()).dump();
    const auto cfg = io::parse_config_text(R"({"coin":"file:)" + p.string() + R"("})");
    EXPECT_EQ(cfg.coin.matrix(), modified_coin(grover4()).matrix());

    const fs::path bad = scratch("bad_coin.json");
    Matrix4 m = Matrix4::identity();
    m(0, 0) = 2.0;
    std::ofstream(bad) << io::matrix_to_json(m).dump();
    EXPECT_EQ(code_of(R"({"coin":"file:)" + bad.string() + R"("})"), io::ErrorCode::non_unitary_coin);
    EXPECT_EQ(code_of(R"({"coin":"file:/nonexistent/coin.json"})"), io::ErrorCode::bad_coin_file);
}

TEST(Config, NestedMatrixLayout) {
    const auto flat = io::matrix_to_json(hadamard4().matrix());
    io::json nested = io::json::array();
    for (std::size_t r = 0; r < 4; ++r) {
        io::json row = io::json::array();
        for (std::size_t c = 0; c < 4; ++c) row.push_back(flat[4 * r + c]);
        nested.push_back(row);
    }
    EXPECT_EQ(io::matrix_from_json(nested), hadamard4().matrix());
    EXPECT_EQ(io::matrix_from_json(flat), hadamard4().matrix());
}

TEST(Emit, SingleRecordCsv) {
    io::ExperimentResult r;
    r.records.push_back({0, 0, {1.0, 0.0, 0.0, 0.0}, 1.0});
    const std::string csv = io::emit_csv(r);
    EXPECT_EQ(csv, "step,position,p_Hp,p_Hm,p_Vp,p_Vm,p_total\n0,0,1,0,0,0,1\n");
}

TEST(Emit, EmptyRecordsRejected) {
    io::ExperimentResult r;
    EXPECT_THROW(io::emit_csv(r), io::IoError);
    EXPECT_THROW(io::emit_json(r), io::IoError);
    EXPECT_THROW(io::emit_svg(r), io::IoError);
}

TEST(Emit, RecordsSortedAndConsistent) {
    const auto r = io::run_preset("fig_grover_localized");
    for (std::size_t i = 1; i < r.records.size(); ++i) {
        const auto& a = r.records[i - 1];
        const auto& b = r.records[i];
        ASSERT_TRUE(std::pair(a.step, a.position) < std::pair(b.step, b.position));
    }
    for (const auto& rec : r.records) EXPECT_NEAR(rec.p[0] + rec.p[1] + rec.p[2] + rec.p[3], rec.p_total, 1e-12);
}

TEST(Emit, CsvRoundTripIsExact) {
    for (auto name : io::kPresetNames) {
        const auto r = io::run_preset(name);
        const auto back = io::parse_csv(io::emit_csv(r));
        EXPECT_EQ(back.records, r.records) << name;
        EXPECT_EQ(back.cells, r.cells) << name;
        EXPECT_EQ(back.metadata, r.metadata) << name;
    }
}

TEST(Emit, JsonRoundTripIsExact) {
    for (auto name : io::kPresetNames) {
        const auto r = io::run_preset(name);
        const auto back = io::parse_json(io::emit_json(r));
        EXPECT_EQ(back.records, r.records) << name;
        EXPECT_EQ(back.cells, r.cells) << name;
    }
}

TEST(Emit, FinalStepSumsToOne) {
    for (auto name : io::kPresetNames) {
        const auto r = io::run_preset(name);
        const auto parsed = io::parse_csv(io::emit_csv(r));
        double total = 0.0;
        if (!parsed.cells.empty()) {
            for (const auto& c : parsed.cells) total += c.p;
        } else {
            const int last = parsed.records.back().step;
            for (const auto& rec : parsed.records)
                if (rec.step == last) total += rec.p_total;
        }
        EXPECT_NEAR(total, 1.0, 1e-9) << name;
    }
}

TEST(Emit, MetadataRecordsConvention) {
    const auto r = io::run_preset("fig_2d_grover");
    const auto csv = io::emit_csv(r);
    EXPECT_NE(csv.find("# schema=qw4.distribution/1\n"), std::string::npos);
    EXPECT_NE(csv.find("# shifts=+1,-1,+21,-21\n"), std::string::npos);
    EXPECT_NE(csv.find("# basis=H+,H-,V+,V-\n"), std::string::npos);
    EXPECT_NE(csv.find("x,y,p\n"), std::string::npos);
}

TEST(Emit, DeterministicAcrossRuns) {
    for (auto name : io::kPresetNames)
        for (auto f : {io::Format::csv, io::Format::json, io::Format::svg})
            EXPECT_EQ(io::emit(io::run_preset(name), f), io::emit(io::run_preset(name), f)) << name;
}

TEST(Emit, SvgHasOneBarPerFinalPosition) {
    const auto r = io::run_preset("fig_hadamard_phi3");
    const auto svg = io::emit_svg(r);
    std::size_t bars = 0;
    for (auto pos = svg.find("fill=\"steelblue\""); pos != std::string::npos; pos = svg.find("fill=\"steelblue\"", pos + 1))
        ++bars;
    EXPECT_EQ(bars, r.trajectory.back().amplitudes.size());
    EXPECT_TRUE(svg.starts_with("<svg"));
}

TEST(Emit, WriteAtomicReplacesFile) {
    const fs::path p = scratch("atomic.txt");
    io::write_atomic(p, "first");
    io::write_atomic(p, "second");
    EXPECT_EQ(slurp(p), "second");
    EXPECT_FALSE(fs::exists(fs::path(p.string() + ".tmp")));
    EXPECT_THROW(io::write_atomic("/nonexistent_dir/x.csv", "x"), io::IoError);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("--list-presets"), 0);
    EXPECT_EQ(run_cli("--preset fig_nope"), 2);
    EXPECT_EQ(run_cli("--coin pauli"), 2);
    EXPECT_EQ(run_cli("--steps -3"), 2);
    EXPECT_EQ(run_cli("--mode walk2d --N 20"), 2);
    EXPECT_EQ(run_cli("--initial phi1 phi2"), 2);
    EXPECT_EQ(run_cli("--bogus"), 2);
    EXPECT_EQ(run_cli("--coin grover4 --output /nonexistent_dir/out.csv"), 3);
}

TEST(Cli, PresetOutputMatchesLibraryAndIsStable) {
    for (auto name : io::kPresetNames) {
        const fs::path a = scratch(std::string(name) + "_a.json");
        const fs::path b = scratch(std::string(name) + "_b.json");
        ASSERT_EQ(run_cli("--preset " + std::string(name) + " --format json --output " + a.string()), 0);
        ASSERT_EQ(run_cli("--preset " + std::string(name) + " --format json --output " + b.string()), 0);
        EXPECT_EQ(slurp(a), slurp(b)) << name;
        auto cfg = io::preset_config(name);
        cfg.format = io::Format::json;
        EXPECT_EQ(slurp(a), io::emit_json(io::run_experiment(cfg, name))) << name;
    }
}

TEST(Cli, FlagsOverrideConfig) {
    const fs::path cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"coin":"grover4","initial":"phi2","steps":12})";
    const fs::path out = scratch("override.csv");
    ASSERT_EQ(run_cli("--config " + cfg.string() + " --steps 3 --initial 0 0 1 0 0 0 0 0 --output " + out.string()), 0);
    const auto parsed = io::parse_csv(slurp(out));
    EXPECT_EQ(parsed.records.back().step, 3);
    const auto expected = io::parse_config_text(R"({"coin":"grover4","initial":"basis:1","steps":3})");
    EXPECT_EQ(parsed.records, io::run_experiment(expected).records);
}
