// Acceptance runner: `easytime_acceptance <criterion>|all` prints one
// PASS/FAIL line per criterion and exits non-zero if any failed.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "easytime/cli.hpp"
#include "easytime/code_text.hpp"
#include "easytime/oracle.hpp"
#include "easytime/parser.hpp"
#include "easytime/printer.hpp"
#include "easytime/semantics.hpp"
#include "easytime/simulator.hpp"
#include "easytime/store.hpp"
#include "support/equivalence.hpp"
#include "support/generators.hpp"
#include "support/temp_dir.hpp"
#include "support/triathlon.hpp"
#include "support/vm_rules.hpp"

extern char** environ;

using namespace easytime;
using testgen::TempDir;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "easytime");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture_path(const std::string& name) { return std::string(EASYTIME_FIXTURES) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream o;
  o.precision(3);
  o << std::fixed << s << "s";
  return o.str();
}

// Blocks are separated by blank lines in both the golden file and compiler output.
std::vector<std::string> blocks_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (normalize_whitespace(line).empty()) {
      if (!cur.empty()) out.push_back(normalize_whitespace(cur));
      cur.clear();
    } else {
      cur += line + "\n";
    }
  }
  if (!cur.empty()) out.push_back(normalize_whitespace(cur));
  return out;
}

Verdict golden() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = invoke({"compile", fixture_path("triathlon.et")});
  const double took = seconds_since(t0);
  if (r.code != 0) {
    v.fail("compile exited " + std::to_string(r.code) + ": " + r.err);
    return v;
  }
  const auto want = blocks_of(testgen::fixture("triathlon.pgm.golden"));
  const auto got = blocks_of(r.out);
  if (got.size() != want.size())
    v.fail("block count " + std::to_string(got.size()) + " != " + std::to_string(want.size()));
  for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
    if (got[i] == want[i]) {
      v.note("block " + std::to_string(i + 1) + " ok");
      continue;
    }
    std::istringstream a(got[i]), b(want[i]);
    std::multiset<std::string> ta{std::istream_iterator<std::string>(a), {}};
    std::multiset<std::string> tb{std::istream_iterator<std::string>(b), {}};
    v.fail("block " + std::to_string(i + 1) + " token sequence differs (" +
           (ta == tb ? "same tokens, different order" : "different tokens") + "): got [" + got[i] + "] want [" +
           want[i] + "]");
  }
  if (normalize_whitespace(r.out) != normalize_whitespace(testgen::fixture("triathlon.pgm.golden")))
    v.fail("whole program differs");
  if (took >= 1.0) v.fail("took " + fmt_seconds(took));
  v.note(fmt_seconds(took));
  return v;
}

Verdict vm_rules() {
  Verdict v;
  std::set<std::string> names;
  for (const auto& rc : testgen::vm_rule_cases()) {
    names.insert(rc.name);
    const auto r = testgen::run_rule(rc);
    if (!r.ok) v.fail(rc.name + ": " + r.detail);
  }
  if (names.size() != 13) v.fail(std::to_string(names.size()) + " distinct rules covered, want 13");
  v.note(std::to_string(names.size()) + " rules, " + std::to_string(testgen::vm_rule_cases().size()) + " cases");
  return v;
}

Verdict oracle() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  testgen::Gen g(20241019);
  const auto agents = testgen::two_agents();
  int checked = 0, mismatches = 0, maxDepth = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto vars = testgen::var_names(static_cast<int>(g.range(1, 6)));
    const auto s = testgen::gen_stmt(g, vars, 5);
    maxDepth = std::max(maxDepth, depth(s));
    if (depth(s) > 5) {
      v.fail("generator produced depth " + std::to_string(depth(s)));
      continue;
    }
    const auto row = testgen::gen_row(g, vars);
    const auto t = g.range(0, 200000);
    const auto agent = g.range(1, 2);
    for (bool fold : {true, false}) {
      CodegenOptions opts;
      opts.foldTrueGuards = fold;
      const auto want = oracle_exec(s, agents, agent, row, t);
      const auto got = testgen::vm_exec(s, agents, agent, row, t, opts);
      ++checked;
      if (want != got) {
        if (++mismatches <= 3)
          v.fail("case " + std::to_string(i) + ": oracle " + testgen::describe(want) + " vm " + testgen::describe(got));
      }
    }
  }
  const double took = seconds_since(t0);
  if (mismatches) v.fail(std::to_string(mismatches) + " mismatches");
  if (took >= 30.0) v.fail("took " + fmt_seconds(took));
  v.note(std::to_string(checked) + " runs over 2000 statements, max depth " + std::to_string(maxDepth) + ", " +
         fmt_seconds(took));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

Verdict e2e() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 50;
  TempDir tmp;
  const auto data = (tmp / "data").string();
  const auto events = (tmp / "events.txt").string();
  const auto runners = (tmp / "runners.csv").string();
  auto step = [&](std::vector<std::string> args) {
    const auto r = invoke(args);
    if (r.code != 0) v.fail(args[args[0] == "--data-dir" ? 2 : 0] + " exited " + std::to_string(r.code) + ": " + r.err);
    return r;
  };
  step({"simulate", "--competitors", std::to_string(n), "--seed", "42", "-o", events, "--runners", runners});
  step({"--data-dir", data, "init-db", fixture_path("triathlon.et"), "--runners", runners});
  step({"--data-dir", data, "-q", "run-batch", events});
  const auto res = step({"--data-dir", data, "--porcelain", "results", "--sort", "RUN", "--dnf-zero"});
  if (!v.pass) return v;

  const auto db = load_results(DataDir{data}.results());
  if (db.rows().size() != static_cast<std::size_t>(n)) v.fail(std::to_string(db.rows().size()) + " rows");
  for (const auto& row : db.rows()) {
    const auto id = std::to_string(row.id);
    for (const char* c : {"ROUND1", "ROUND2", "ROUND3"})
      if (db.get(row.id, c) != 0) v.fail("competitor " + id + " " + c + "=" + std::to_string(*db.get(row.id, c)));
    std::int64_t prev = 0;
    for (const char* c : {"SWIM", "TRANS1", "BIKE", "TRANS2", "RUN"}) {
      const auto x = *db.get(row.id, c);
      if (x <= 0) v.fail("competitor " + id + " " + c + " not positive");
      if (x < prev) v.fail("competitor " + id + " " + c + " out of order");
      prev = x;
    }
  }

  std::vector<std::pair<std::string, std::int64_t>> ranked;
  for (const auto& line : split(res.out, '\n')) {
    const auto f = split(line, ';');
    if (f.size() != 5) {
      v.fail("bad results line '" + line + "'");
      continue;
    }
    ranked.emplace_back(f[0], f[4] == "-" ? -1 : std::stoll(f[4]));
  }
  if (ranked.size() != static_cast<std::size_t>(n)) v.fail(std::to_string(ranked.size()) + " ranked lines");
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& [rank, value] = ranked[i];
    if (i && value < ranked[i - 1].second) v.fail("results not ascending at line " + std::to_string(i + 1));
    std::size_t better = 0;
    for (const auto& other : ranked) better += other.second < value;
    if (rank != std::to_string(better + 1)) v.fail("line " + std::to_string(i + 1) + " rank " + rank);
  }
  const double took = seconds_since(t0);
  if (took >= 10.0) v.fail("took " + fmt_seconds(took));
  v.note(std::to_string(n) + " competitors, " + fmt_seconds(took));
  return v;
}

// Runs the easytime binary with stdout/stderr redirected to files.
pid_t spawn_easytime(const std::vector<std::string>& args, const fs::path& out, const fs::path& err) {
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, 1, out.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_addopen(&fa, 2, err.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  std::vector<std::string> all{EASYTIME_BINARY};
  all.insert(all.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : all) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = -1;
  if (posix_spawn(&pid, EASYTIME_BINARY, &fa, nullptr, argv.data(), environ) != 0) pid = -1;
  posix_spawn_file_actions_destroy(&fa);
  return pid;
}

std::size_t count_event_log_lines(const std::string& log) {
  std::size_t n = 0;
  for (const auto& line : split(log, '\n')) n += !line.empty() && std::isdigit(static_cast<unsigned char>(line[0]));
  return n;
}

Verdict channels() {
  Verdict v;
  TempDir tmp;
  save_runners(tmp / "runners.csv", synthetic_runners(1));
  const auto batchDir = (tmp / "batch").string();
  const auto tcpDir = (tmp / "tcp").string();
  for (const auto& d : {batchDir, tcpDir}) {
    const auto r = invoke({"--data-dir", d, "init-db", fixture_path("triathlon.et"), "--runners",
                           (tmp / "runners.csv").string()});
    if (r.code) v.fail("init-db: " + r.err);
  }

  const auto events = (tmp / "events.txt").string();
  invoke({"simulate", "--competitors", "1", "--seed", "42", "-o", events});
  const auto batch = invoke({"--data-dir", batchDir, "--porcelain", "run-batch", events});
  if (batch.code || batch.out.rfind("applied;181\n", 0) != 0) v.fail("batch: " + batch.out + batch.err);

  const auto out = tmp / "serve.out";
  const auto err = tmp / "serve.err";
  const pid_t pid = spawn_easytime({"--data-dir", tcpDir, "-v", "serve", "--tcp", "0", "--bind", "127.0.0.1"}, out, err);
  if (pid < 0) {
    v.fail("could not start easytime serve");
    return v;
  }
  std::string port;
  for (int i = 0; i < 200 && port.empty(); ++i) {
    const auto text = slurp(out);
    const auto at = text.find("tcp listening on 127.0.0.1:");
    if (at != std::string::npos && text.find('\n', at) != std::string::npos)
      port = text.substr(at + 27, text.find('\n', at) - at - 27);
    else
      std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  if (port.empty()) {
    v.fail("serve did not report a port: " + slurp(err));
  } else {
    const auto sent = invoke({"simulate", "--competitors", "1", "--seed", "42", "--live", "127.0.0.1:" + port});
    if (sent.code) v.fail("live stream: " + sent.err);
    for (int i = 0; i < 400 && count_event_log_lines(slurp(err)) < 181; ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) v.fail("serve did not exit cleanly");
  const auto logged = count_event_log_lines(slurp(err));
  if (logged != 181) v.fail("tcp channel logged " + std::to_string(logged) + " events");

  const auto a = slurp(DataDir{batchDir}.results());
  const auto b = slurp(DataDir{tcpDir}.results());
  if (a != b) v.fail("results.csv differs:\n" + a + "--- vs ---\n" + b);
  v.note("181 events, results.csv " + std::to_string(a.size()) + " bytes identical");
  return v;
}

Verdict errors() {
  Verdict v;
  TempDir tmp;
  const std::string undeclared =
      "1 manual \"abc.res\";\nvar SWIM := 0;\nmp[1] -> agnt[1] {\n  (true) -> upd SWIM;\n  (true) -> dec LAPS;\n}\n";
  const std::string duplicate = "1 manual \"abc.res\";\nvar SWIM := 0;\nvar SWIM := 1;\nmp[1] -> agnt[1] {\n  upd SWIM;\n}\n";
  std::ofstream(tmp / "undeclared.et") << undeclared;
  std::ofstream(tmp / "duplicate.et") << duplicate;

  auto expect_failure = [&](const std::string& file, const std::string& name, const std::string& label) {
    const auto r = invoke({"compile", (tmp / file).string(), "-o", (tmp / (file + ".pgm")).string()});
    if (r.code != 1) v.fail(label + " exit " + std::to_string(r.code));
    if (r.out != "ERROR\n") v.fail(label + " status '" + r.out + "'");
    if (r.err.find(name) == std::string::npos) v.fail(label + " diagnostic does not name " + name + ": " + r.err);
    if (fs::exists(tmp / (file + ".pgm"))) v.fail(label + " wrote code");
  };
  expect_failure("undeclared.et", "LAPS", "undeclared");
  expect_failure("duplicate.et", "SWIM", "duplicate");
  v.note("undeclared and duplicate variables rejected with exit 1 and status ERROR");
  return v;
}

Verdict roundtrips() {
  Verdict v;
  TempDir tmp;
  testgen::Gen g(500500);
  int printed = 0, coded = 0;
  for (int i = 0; i < 500; ++i) {
    const auto p = testgen::gen_program(g);
    const auto text = pretty_print(p);
    const auto parsed = parse(text);
    if (!parsed.ok() || !structurally_equal(p, *parsed.program)) {
      v.fail("parse(pretty_print(p)) differs for program " + std::to_string(i));
      continue;
    }
    ++printed;
    const auto compiled = compile(p);
    if (!compiled.ok()) {
      v.fail("program " + std::to_string(i) + " does not compile");
      continue;
    }
    const auto& unit = *compiled.unit;
    const auto code = serialize_code(unit);
    bool ok = false;
    try {
      ok = parse_code(code) == unit;
    } catch (const CodeFormatError& e) {
      v.fail("program " + std::to_string(i) + ": " + e.what());
    }
    save_code(tmp / "pgm.txt", unit);
    ok = ok && load_code(tmp / "pgm.txt") == unit;
    if (!ok) v.fail("code round-trip differs for program " + std::to_string(i));
    coded += ok;

    std::vector<Runner> runners;
    const auto count = g.range(0, 6);
    for (std::int64_t id = 1; id <= count; ++id)
      runners.push_back({id * 3, "TAG" + std::to_string(id), "Last" + std::to_string(id),
                         "First " + std::to_string(g.range(0, 99))});
    save_runners(tmp / "runners.csv", runners);
    if (load_runners(tmp / "runners.csv") != runners) v.fail("runners.csv differs for program " + std::to_string(i));

    auto db = create_db(compiled.state, runners);
    for (const auto& row : std::vector<ResultsDatabase::Row>(db.rows()))
      for (const auto& name : db.variables()) db.set(row.id, name, g.range(-5, 100000));
    save_results(tmp / "results.csv", db);
    if (load_results(tmp / "results.csv") != db) v.fail("results.csv differs for program " + std::to_string(i));
  }
  v.note(std::to_string(printed) + " print/parse, " + std::to_string(coded) + " code/persist round-trips");
  return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Verdict()>>> all{
      {"golden", golden}, {"vm-rules", vm_rules}, {"oracle", oracle},        {"e2e", e2e},
      {"channels", channels}, {"errors", errors}, {"roundtrips", roundtrips}};
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string which = argc > 1 ? argv[1] : "all";
  bool known = false, allPass = true;
  for (const auto& [name, check] : criteria()) {
    if (which != "all" && which != name) continue;
    known = true;
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    allPass = allPass && v.pass;
  }
  if (!known) {
    std::cerr << "unknown criterion '" << which << "'\n";
    return 2;
  }
  return allPass ? 0 : 1;
}
