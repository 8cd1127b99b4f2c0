#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BCP_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

fs::path work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "bcp_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const std::string cmd = kCli + " " + args + " > " + out_file.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(out_file);
    std::stringstream buf;
    buf << in.rdbuf();
    r.stdout_text = buf.str();
    return r;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << body;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// CSV body with the wall_time_seconds column (the last one) removed.
std::string strip_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto cut = line.rfind(',');
        out << (cut == std::string::npos ? line : line.substr(0, cut)) << '\n';
    }
    return out.str();
}

size_t count_lines(const std::string& text) {
    size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("missing subcommand and missing config fail with usage errors") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("survival").exit_code != 0);
    CHECK(run_cli("survival --config /nonexistent.json").exit_code == 2);
}

TEST_CASE("negative rate is a config error and writes nothing") {
    const auto out = work_dir() / "neg.csv";
    const auto cfg = write_config("neg.json", R"({
        "command": "survival",
        "rule": {"kind": "classical", "lambda": -0.5},
        "horizon": 50.0, "replicas": 100, "seed": 7,
        "out": ")" + out.string() + R"("
    })");
    CHECK(run_cli("survival --config " + cfg.string()).exit_code == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown config fields are rejected") {
    const auto cfg = write_config("typo.json", R"({
        "command": "survival",
        "rule": {"kind": "classical", "lambda": 0.5},
        "horizon": 50.0, "replicas": 100, "seed": 7, "horizn": 10.0,
        "out": "typo.csv"
    })");
    const auto r = run_cli("survival --config " + cfg.string());
    CHECK(r.exit_code == 2);
    CHECK(r.stdout_text.find("horizn") != std::string::npos);
}

TEST_CASE("command field must match the subcommand") {
    const auto cfg = write_config("mismatch.json", R"({
        "command": "speed",
        "rule": {"kind": "classical", "lambda": 0.5},
        "horizon": 50.0, "replicas": 10, "seed": 7, "out": "x.csv"
    })");
    CHECK(run_cli("survival --config " + cfg.string()).exit_code == 2);
}

TEST_CASE("pure-death survival run succeeds with zero estimate") {
    const auto out = work_dir() / "dead.csv";
    const auto cfg = write_config("dead.json", R"({
        "command": "survival",
        "rule": {"kind": "classical", "lambda": 0.0},
        "horizon": 50.0, "replicas": 100, "seed": 11,
        "out": ")" + out.string() + R"("
    })");
    const auto r = run_cli("survival --config " + cfg.string());
    CHECK(r.exit_code == 0);
    const auto body = read_file(out);
    CHECK(body.find("schema_version,experiment,command,rule,") == 0);
    CHECK(body.find("1,survival-0,survival,classical,0,0,50,0,0,0,100,11,0,0,") != std::string::npos);
}

TEST_CASE("same seed reproduces byte-identical bodies; workers do not matter") {
    const auto out1 = work_dir() / "rep1.csv";
    const auto out2 = work_dir() / "rep2.csv";
    const auto out3 = work_dir() / "rep3.csv";
    const std::string base = R"({
        "command": "survival",
        "rule": {"kind": "standard", "lambda_i": 1.2, "lambda_e": 1.8},
        "horizon": 30.0, "replicas": 400, "seed": 90913
    })";
    const auto cfg = write_config("rep.json", base);
    CHECK(run_cli("survival --config " + cfg.string() + " --workers 1 --out " + out1.string()).exit_code == 0);
    CHECK(run_cli("survival --config " + cfg.string() + " --workers 1 --out " + out2.string()).exit_code == 0);
    CHECK(run_cli("survival --config " + cfg.string() + " --workers 8 --out " + out3.string()).exit_code == 0);

    const auto b1 = strip_wall_time(read_file(out1));
    CHECK(b1 == strip_wall_time(read_file(out2)));
    CHECK(b1 == strip_wall_time(read_file(out3)));

    const auto other = work_dir() / "rep4.csv";
    CHECK(run_cli("survival --config " + cfg.string() + " --seed 90914 --out " + other.string()).exit_code == 0);
    CHECK(b1 != strip_wall_time(read_file(other)));
}

TEST_CASE("json format emits schema-tagged objects") {
    const auto out = work_dir() / "row.jsonl";
    const auto cfg = write_config("json.json", R"({
        "command": "survival",
        "rule": {"kind": "classical", "lambda": 0.3},
        "horizon": 20.0, "replicas": 50, "seed": 3,
        "format": "json",
        "out": ")" + out.string() + R"("
    })");
    CHECK(run_cli("survival --config " + cfg.string()).exit_code == 0);
    const auto body = read_file(out);
    CHECK(body.find("\"schema_version\":1") != std::string::npos);
    CHECK(body.find("\"command\":\"survival\"") != std::string::npos);
}

TEST_CASE("phase sweep emits one complete row per grid cell") {
    const auto out = work_dir() / "phase.csv";
    const auto cfg = write_config("phase.json", R"({
        "command": "phase",
        "lambda_i_min": 0.5, "lambda_i_max": 1.5, "lambda_i_step": 0.5,
        "lambda_e_min": 0.0, "lambda_e_max": 1.0, "lambda_e_step": 0.5,
        "horizon": 10.0, "replicas": 50, "seed": 5,
        "out": ")" + out.string() + R"("
    })");
    CHECK(run_cli("phase --config " + cfg.string()).exit_code == 0);
    const auto body = read_file(out);
    CHECK(count_lines(body) == 10);  // header + 3x3 grid
    CHECK(body.find("phase-8") != std::string::npos);
    // every data row is complete (16 columns)
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) CHECK(std::count(line.begin(), line.end(), ',') == 15);
}

TEST_CASE("measure histogram counts sum to the replica count") {
    const auto out = work_dir() / "meas.csv";
    const auto cfg = write_config("meas.json", R"({
        "command": "measure",
        "rule": {"kind": "standard", "lambda_i": 1.5, "lambda_e": 2.0},
        "depth_w": 24, "depth_l": 3, "sample_time": 6.0, "gap_depth": 4,
        "replicas": 300, "seed": 17,
        "out": ")" + out.string() + R"("
    })");
    CHECK(run_cli("measure --config " + cfg.string()).exit_code == 0);
    std::istringstream in(read_file(out));
    std::string line;
    std::getline(in, line);
    CHECK(line == "pattern,count");
    int64_t total = 0;
    while (std::getline(in, line)) {
        const auto cut = line.find(',');
        REQUIRE(cut != std::string::npos);
        CHECK(line.substr(0, cut).size() == 3);
        total += std::stoll(line.substr(cut + 1));
    }
    CHECK(total == 300);
}

TEST_CASE("speed writes per-replica values on request") {
    const auto out = work_dir() / "speed.csv";
    const auto per = work_dir() / "speed_replicas.csv";
    const auto cfg = write_config("speed.json", R"({
        "command": "speed",
        "rule": {"kind": "classical", "lambda": 0.0},
        "horizon": 10.0, "burn_in": 0.0, "depth_w": 10,
        "replicas": 25, "seed": 23,
        "out": ")" + out.string() + R"(",
        "replica_out": ")" + per.string() + R"("
    })");
    CHECK(run_cli("speed --config " + cfg.string()).exit_code == 0);
    CHECK(count_lines(read_file(per)) == 26);  // header + one row per replica
}

TEST_CASE("renewal emits a rate row and optional raw times") {
    const auto out = work_dir() / "renewal.csv";
    const auto dump = work_dir() / "taus.csv";
    const auto cfg = write_config("renewal.json", R"({
        "command": "renewal",
        "rule": {"kind": "classical", "lambda": 0.0},
        "horizon": 50.0, "replicas": 20, "seed": 29,
        "out": ")" + out.string() + R"(",
        "dump_times": ")" + dump.string() + R"("
    })");
    CHECK(run_cli("renewal --config " + cfg.string()).exit_code == 0);
    // rate-1 deaths from a single site: about one renewal per unit time
    const auto body = read_file(out);
    CHECK(count_lines(body) == 2);
    const auto taus = read_file(dump);
    CHECK(taus.find("replica,index,tau") == 0);
    CHECK(count_lines(taus) > 20 * 30);
}

TEST_CASE("oracle-check validates replicas and matches the one-site law") {
    const auto bad = write_config("oracle_bad.json", R"({
        "command": "oracle-check", "replicas": 0, "seed": 1, "out": "x.csv"
    })");
    CHECK(run_cli("oracle-check --config " + bad.string()).exit_code == 2);

    const auto out = work_dir() / "oracle.csv";
    const auto cfg = write_config("oracle.json", R"({
        "command": "oracle-check",
        "min_sites": 1, "max_sites": 1,
        "horizons": [2.0],
        "rules": [{"kind": "classical", "lambda": 1.3}],
        "replicas": 1000000, "seed": 37, "workers": 2,
        "out": ")" + out.string() + R"("
    })");
    const auto r = run_cli("oracle-check --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("all cells pass") != std::string::npos);

    std::istringstream in(read_file(out));
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::vector<std::string> cells;
    std::istringstream rowstream(row);
    std::string cell;
    while (std::getline(rowstream, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 9);
    const double mc_ext = std::stod(cells[5]);
    const double exact_ext = std::stod(cells[6]);
    CHECK(std::abs(exact_ext - (1.0 - std::exp(-2.0))) < 1e-9);
    CHECK(std::abs(mc_ext - exact_ext) < 1e-3);
    CHECK(cells[8] == "1");
}

TEST_CASE("killing a phase sweep mid-grid leaves only complete rows") {
    const auto out = work_dir() / "killed_phase.csv";
    const auto cfg = write_config("killed_phase.json", R"({
        "command": "phase",
        "lambda_i_min": 0.5, "lambda_i_max": 5.0, "lambda_i_step": 0.25,
        "lambda_e_min": 0.5, "lambda_e_max": 5.0, "lambda_e_step": 0.25,
        "horizon": 100.0, "replicas": 4000, "seed": 61, "workers": 1,
        "out": ")" + out.string() + R"("
    })");
    const int rc = std::system(("sh -c '" + kCli + " phase --config " + cfg.string() +
                                " > /dev/null 2>&1 & pid=$!; sleep 3; kill -9 $pid; wait $pid' "
                                "2>/dev/null")
                                   .c_str());
    (void)rc;  // the interrupted child's status is irrelevant; the file is the check
    const auto body = read_file(out);
    REQUIRE_FALSE(body.empty());
    CHECK(body.back() == '\n');  // no torn final row
    std::istringstream in(body);
    std::string line;
    std::getline(in, line);
    CHECK(line.find("schema_version,") == 0);
    size_t rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 15);
        ++rows;
    }
    CHECK(rows >= 1);
    CHECK(rows < 19 * 19);  // it really was interrupted
}

TEST_CASE("calibrate writes a consumable calibration file") {
    const auto cal = work_dir() / "cal.json";
    const auto cfg = write_config("cal_cfg.json", R"({
        "command": "calibrate", "precision": 0.5, "horizon": 30.0,
        "replicas": 200, "seed": 41, "workers": 2,
        "out": ")" + cal.string() + R"("
    })");
    CHECK(run_cli("calibrate --config " + cfg.string()).exit_code == 0);
    const auto body = read_file(cal);
    CHECK(body.find("\"lambda_hat\"") != std::string::npos);

    const auto out = work_dir() / "rel.csv";
    const auto rel = write_config("rel.json", R"({
        "command": "survival",
        "calibration_file": ")" + cal.string() + R"(",
        "rule": {"kind": "standard", "lambda_i": {"rel": 0.0}, "lambda_e": {"rel": 1.0}},
        "horizon": 10.0, "replicas": 50, "seed": 43,
        "out": ")" + out.string() + R"("
    })");
    CHECK(run_cli("survival --config " + rel.string()).exit_code == 0);
    CHECK(fs::exists(out));

    const auto norel = write_config("norel.json", R"({
        "command": "survival",
        "rule": {"kind": "standard", "lambda_i": {"rel": 0.0}, "lambda_e": 1.0},
        "horizon": 10.0, "replicas": 50, "seed": 43, "out": "x.csv"
    })");
    CHECK(run_cli("survival --config " + norel.string()).exit_code == 2);
}
