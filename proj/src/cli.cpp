#include "easytime/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "easytime/code_text.hpp"
#include "easytime/parser.hpp"
#include "easytime/printer.hpp"
#include "easytime/runtime.hpp"
#include "easytime/semantics.hpp"
#include "easytime/service.hpp"
#include "easytime/simulator.hpp"
#include "easytime/store.hpp"

namespace easytime::cli {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> gStop{false};

extern "C" void on_signal(int) { gStop = true; }

struct ExitError {
  int code;
  std::string message;
};

std::string read_source(const fs::path& path) {
  try {
    return read_file(path);
  } catch (const StoreError& e) {
    throw ExitError{kExitIo, e.what()};
  }
}

AgentRuntime::LogSink make_sink(std::ostream& err, int verbosity) {
  return [&err, verbosity](const std::string& line) {
    if (verbosity < 0) return;
    const bool warning = line.rfind("warning:", 0) == 0;
    const bool skipped = line.find(" skipped(") != std::string::npos;
    if (verbosity >= 1 || warning || skipped) err << line << '\n';
  };
}

void print_diagnostics(const std::vector<Diagnostic>& diags, const fs::path& file, std::ostream& err) {
  for (const auto& d : diags) err << format_diagnostic(d, file.string()) << '\n';
}

int cmd_check(const fs::path& file, std::ostream& out, std::ostream& err) {
  const auto result = compile_source(read_source(file));
  print_diagnostics(result.diagnostics, file, err);
  out << (result.ok() ? "OK" : "ERROR") << '\n';
  return result.ok() ? kExitOk : kExitCompile;
}

int cmd_compile(const fs::path& file, const fs::path& output, bool strict, std::ostream& out, std::ostream& err) {
  CodegenOptions opts;
  opts.foldTrueGuards = !strict;
  const auto result = compile_source(read_source(file), opts);
  print_diagnostics(result.diagnostics, file, err);
  if (!result.ok()) {
    out << result.program_code() << '\n';
    return kExitCompile;
  }
  if (output.empty()) {
    out << serialize_code(*result.unit) << '\n';
  } else {
    save_code(output, *result.unit);
  }
  return kExitOk;
}

int cmd_fmt(const fs::path& file, std::ostream& out, std::ostream& err) {
  const auto parsed = parse(read_source(file));
  print_diagnostics(parsed.diagnostics, file, err);
  if (!parsed.program) return kExitCompile;
  out << pretty_print(*parsed.program) << '\n';
  return kExitOk;
}

int cmd_init_db(const fs::path& file, const fs::path& runnersFile, const CliConfig& cfg, std::ostream& out,
                std::ostream& err) {
  const auto result = compile_source(read_source(file));
  print_diagnostics(result.diagnostics, file, err);
  if (!result.ok()) {
    out << result.program_code() << '\n';
    return kExitCompile;
  }
  const auto runners = load_runners(runnersFile);
  const auto db = create_db(result.state, runners);
  const DataDir dir{cfg.dataDir};
  dir.ensure();
  save_code(dir.pgm(), *result.unit);
  save_runners(dir.runners(), runners);
  save_results(dir.results(), db);
  if (cfg.porcelain)
    out << "competitors;" << runners.size() << "\nmeasuring_places;" << result.unit->units.size() << '\n';
  else
    out << "initialized " << dir.root.string() << ": " << runners.size() << " competitors, "
        << result.unit->units.size() << " measuring places, columns " << db.variables().size() << '\n';
  return kExitOk;
}

int cmd_run_batch(const fs::path& events, const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const DataDir dir{cfg.dataDir};
  auto rt = load_runtime(dir);
  rt.set_log_sink(make_sink(err, cfg.verbosity));
  const auto summary = process_batch(rt, events, dir.archive());
  save_results(dir.results(), rt.database());
  if (cfg.porcelain)
    out << "applied;" << summary.applied << "\nskipped;" << summary.skipped << "\narchived;"
        << summary.archivedTo.string() << '\n';
  else
    out << "applied " << summary.applied << ", skipped " << summary.skipped << ", archived to "
        << summary.archivedTo.string() << '\n';
  return kExitOk;
}

int cmd_serve(const CliConfig& cfg, const std::string& bind, std::ostream& out, std::ostream& err) {
  if (!cfg.tcpPort && !cfg.httpPort) throw ExitError{kExitUsage, "serve needs --tcp and/or --http"};
  const DataDir dir{cfg.dataDir};
  auto rt = load_runtime(dir);
  rt.set_log_sink(make_sink(err, cfg.verbosity));
  ApplyQueue queue(std::move(rt), [dir](const AgentRuntime& r) { save_results(dir.results(), r.database()); });

  std::unique_ptr<TcpLineServer> tcp;
  std::unique_ptr<HttpApi> http;
  try {
    if (cfg.tcpPort) {
      tcp = std::make_unique<TcpLineServer>(queue, *cfg.tcpPort, bind);
      tcp->start();
      out << "tcp listening on " << bind << ':' << tcp->port() << '\n';
    }
    if (cfg.httpPort) {
      http = std::make_unique<HttpApi>(queue);
      http->start(*cfg.httpPort, bind);
      out << "http listening on " << bind << ':' << http->port() << '\n';
    }
  } catch (const std::runtime_error& e) {
    throw ExitError{kExitIo, e.what()};
  }
  out.flush();

  gStop = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!gStop) std::this_thread::sleep_for(std::chrono::milliseconds(100));

  if (tcp) tcp->stop();
  if (http) http->stop();
  queue.stop();
  queue.read([&](const AgentRuntime& r) {
    save_results(dir.results(), r.database());
    return 0;
  });
  out << "stopped\n";
  return kExitOk;
}

struct SimulateArgs {
  std::uint64_t seed = 42;
  std::int64_t competitors = 1;
  fs::path output;
  fs::path runners;
  bool autoMode = false;
  std::string live;
  double speedup = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto scenario = Scenario::double_triathlon(a.competitors, a.seed);
  std::vector<TimingEvent> events;
  try {
    events = simulate(scenario);
  } catch (const std::invalid_argument& e) {
    throw ExitError{kExitUsage, e.what()};
  }
  if (!a.runners.empty()) save_runners(a.runners, synthetic_runners(a.competitors));

  if (!a.live.empty()) {
    const auto colon = a.live.rfind(':');
    if (colon == std::string::npos) throw ExitError{kExitUsage, "--live expects host:port"};
    std::vector<std::string> lines;
    std::vector<std::int64_t> times;
    for (const auto& e : events) {
      lines.push_back(simulated_line(e, EventMode::Auto));
      times.push_back(e.time);
    }
    try {
      stream_lines_tcp(a.live.substr(0, colon), static_cast<std::uint16_t>(std::stoi(a.live.substr(colon + 1))), lines,
                       times, a.speedup);
    } catch (const std::runtime_error& e) {
      throw ExitError{kExitIo, e.what()};
    }
    out << "streamed " << lines.size() << " events to " << a.live << '\n';
    return kExitOk;
  }

  const auto text = render_event_file(scenario, events, a.autoMode ? EventMode::Auto : EventMode::Manual);
  if (a.output.empty())
    out << text;
  else
    write_file(a.output, text);
  return kExitOk;
}

int cmd_results(const std::string& sort, bool dnfZero, const std::string& diffSpec, const CliConfig& cfg,
                std::ostream& out) {
  const DataDir dir{cfg.dataDir};
  std::optional<ColumnDiff> diff;
  if (!diffSpec.empty()) {
    diff = parse_column_diff(diffSpec);
    if (!diff) throw ExitError{kExitUsage, "--diff expects COLUMN-COLUMN, got '" + diffSpec + "'"};
  }
  const auto db = load_results(dir.results());
  RunnerRegistry registry;
  if (fs::exists(dir.runners())) registry = RunnerRegistry(load_runners(dir.runners()));

  std::vector<RankedResult> ranked;
  try {
    ranked = rank_results(db, registry, sort, dnfZero);
    if (diff) diff_value(db, 0, *diff, dnfZero);  // validates the column names
  } catch (const StoreError& e) {
    throw ExitError{kExitUsage, e.what()};
  }

  auto fmt_opt = [](const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : std::string("-"); };
  if (cfg.porcelain) {
    for (const auto& r : ranked) {
      out << (r.rank ? std::to_string(*r.rank) : "DNF") << ';' << r.id << ';' << r.lastName << ';' << r.firstName
          << ';' << fmt_opt(r.sortKey);
      if (diff) out << ';' << fmt_opt(diff_value(db, r.id, *diff, dnfZero));
      out << '\n';
    }
    return kExitOk;
  }

  out << std::left << std::setw(6) << "Rank" << std::setw(8) << "Id" << std::setw(28) << "Name" << std::setw(14)
      << sort;
  if (diff) out << diff->label();
  out << '\n';
  for (const auto& r : ranked) {
    const std::string name = r.lastName + (r.firstName.empty() ? "" : ", " + r.firstName);
    out << std::left << std::setw(6) << (r.rank ? std::to_string(*r.rank) : "DNF") << std::setw(8) << r.id
        << std::setw(28) << name << std::setw(14) << fmt_opt(r.sortKey);
    if (diff) out << fmt_opt(diff_value(db, r.id, *diff, dnfZero));
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"EasyTime: compile timing programs and process race events", "easytime"};
  app.require_subcommand(1);

  CliConfig cfg;
  if (const char* env = std::getenv("EASYTIME_DATA_DIR")) cfg.dataDir = env;
  std::string dataDir = cfg.dataDir.string();
  int verbose = 0;
  bool quiet = false;
  app.add_option("--data-dir", dataDir, "Data directory (runners.csv, results.csv, pgm.txt, archive/)");
  app.add_flag("-v,--verbose", verbose, "Log every event to stderr");
  app.add_flag("-q,--quiet", quiet, "Log nothing");
  app.add_flag("--porcelain", cfg.porcelain, "Machine-readable output, one record per line");

  fs::path program;
  fs::path output;
  fs::path runnersFile;
  fs::path eventsFile;
  bool strict = false;

  auto* check = app.add_subcommand("check", "Report diagnostics for a program");
  check->add_option("program", program)->required();

  auto* compile = app.add_subcommand("compile", "Compile a program to canonical VM code");
  compile->add_option("program", program)->required();
  compile->add_option("-o,--output", output, "Write code here instead of stdout");
  compile->add_flag("--strict-guards", strict, "Keep TRUE BRANCH for (true) guards");

  auto* fmt = app.add_subcommand("fmt", "Print a program in canonical layout");
  fmt->add_option("program", program)->required();

  auto* initDb = app.add_subcommand("init-db", "Compile a program and create the data directory");
  initDb->add_option("program", program)->required();
  initDb->add_option("--runners", runnersFile, "Competitor registry CSV")->required();

  auto* runBatch = app.add_subcommand("run-batch", "Apply an event file, then archive it");
  runBatch->add_option("events", eventsFile)->required();

  std::string bind = "0.0.0.0";
  auto* serve = app.add_subcommand("serve", "Accept live events over TCP and HTTP");
  serve->add_option("--tcp", cfg.tcpPort, "TCP port for device line protocol");
  serve->add_option("--http", cfg.httpPort, "HTTP port for the JSON API");
  serve->add_option("--bind", bind, "Address to listen on");

  SimulateArgs sim;
  auto* simulateCmd = app.add_subcommand("simulate", "Generate a double-triathlon event stream");
  simulateCmd->add_option("--seed", sim.seed);
  simulateCmd->add_option("--competitors", sim.competitors);
  simulateCmd->add_option("-o,--output", sim.output);
  simulateCmd->add_option("--runners", sim.runners, "Also write a matching runners.csv");
  simulateCmd->add_flag("--auto", sim.autoMode, "Emit <#>;<RFID>;<MP>;<TIME> quadruples");
  simulateCmd->add_option("--live", sim.live, "Stream to host:port instead of writing a file");
  simulateCmd->add_option("--speedup", sim.speedup, "Replay speed factor for --live (0 = no pacing)");

  std::string sort;
  std::string diffSpec;
  bool dnfZero = false;
  auto* results = app.add_subcommand("results", "Print ranked results");
  results->add_option("--sort", sort, "Column to rank by")->required();
  results->add_flag("--dnf-zero", dnfZero, "Treat 0 as did-not-finish");
  results->add_option("--diff", diffSpec, "Extra column A-B computed at report time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  cfg.dataDir = dataDir;
  cfg.verbosity = quiet ? -1 : verbose;

  try {
    if (*check) return cmd_check(program, out, err);
    if (*compile) return cmd_compile(program, output, strict, out, err);
    if (*fmt) return cmd_fmt(program, out, err);
    if (*initDb) return cmd_init_db(program, runnersFile, cfg, out, err);
    if (*runBatch) return cmd_run_batch(eventsFile, cfg, out, err);
    if (*serve) return cmd_serve(cfg, bind, out, err);
    if (*simulateCmd) return cmd_simulate(sim, out);
    if (*results) return cmd_results(sort, dnfZero, diffSpec, cfg, out);
  } catch (const ExitError& e) {
    err << "easytime: " << e.message << '\n';
    return e.code;
  } catch (const StoreError& e) {
    err << "easytime: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace easytime::cli
