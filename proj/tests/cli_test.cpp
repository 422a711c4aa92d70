// Integration tests driving the installed binary end to end.
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "smoothrep/serialize.hpp"

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + SMOOTHREP_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    result.out.append(buf.data(), got);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string::npos) end = s.size();
    if (end > start) lines.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

TEST_CASE("verify emits one JSON line per prime with the exceptional classes") {
  CmdResult r = run_cmd("verify --from 2 --to 10");
  CHECK(r.exit_code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == R"({"p":"2","method":"brute","outcome":"pass"})");
  CHECK(lines[1] == R"({"p":"3","method":"brute","outcome":"pass"})");
  CHECK(lines[2] ==
        R"({"p":"5","method":"brute","outcome":"exception","unrepresentable":["4"]})");
  CHECK(lines[3] ==
        R"({"p":"7","method":"brute","outcome":"exception","unrepresentable":["4"]})");
}

TEST_CASE("verify output is independent of thread count") {
  CmdResult one = run_cmd("verify --from 2 --to 500 --threads 1");
  CmdResult four = run_cmd("verify --from 2 --to 500 --threads 4");
  CHECK(one.exit_code == 0);
  CHECK(one.out == four.out);
}

TEST_CASE("identical invocations are byte-identical") {
  const std::string cmd = "gen dnd --steps 9 --seed 7";
  CmdResult a = run_cmd(cmd);
  CmdResult b = run_cmd(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("represent handles the exceptional class with exit code 1") {
  CmdResult r = run_cmd("represent -p 5 -a 4");
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("\"error\":\"NotRepresentable\"") != std::string::npos);

  CmdResult ok = run_cmd("represent -p 11 -a 4");
  CHECK(ok.exit_code == 0);
  CHECK(lines_of(ok.out)[0] == R"({"p":"11","a":"4","primes":["3","5"]})");

  CmdResult big = run_cmd("represent -p 10007 -a 4");
  CHECK(big.exit_code == 0);
  smoothrep::json j = smoothrep::json::parse(lines_of(big.out)[0]);
  mpz_class prod = 1;
  for (const auto& q : j["primes"]) prod *= mpz_class(q.get<std::string>());
  CHECK(prod % 10007 == 4);
}

TEST_CASE("gen d1 emits the ordered terms") {
  CmdResult r = run_cmd("gen d1 --steps 10");
  CHECK(r.exit_code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 10);
  std::vector<std::string> terms;
  for (const auto& line : lines)
    terms.push_back(smoothrep::json::parse(line)["prime"].get<std::string>());
  CHECK(terms == std::vector<std::string>{"2", "3", "7", "5", "11", "13", "17", "19",
                                          "23", "29"});
}

TEST_CASE("gen mullin respects the factoring budget with exit code 3") {
  CmdResult r = run_cmd("gen mullin --steps 5",
                        "SMOOTHREP_TRIAL_LIMIT=10 SMOOTHREP_RHO_ITERS=0");
  CHECK(r.exit_code == 3);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 5);  // four steps then the stop record
  smoothrep::json stop = smoothrep::json::parse(lines.back());
  CHECK(stop["status"] == "stopped");
  CHECK(stop["reason"].get<std::string>().find("1807") != std::string::npos);
}

TEST_CASE("gen checkpoint resumes and revalidates") {
  namespace fs = std::filesystem;
  std::string path = (fs::temp_directory_path() / "smoothrep_ckpt_test.jsonl").string();
  std::remove(path.c_str());

  CmdResult first = run_cmd("gen dnd --steps 5 --checkpoint " + path);
  CHECK(first.exit_code == 0);
  CHECK(lines_of(first.out).size() == 5);

  CmdResult second = run_cmd("gen dnd --steps 8 --checkpoint " + path);
  CHECK(second.exit_code == 0);
  auto lines = lines_of(second.out);
  REQUIRE(lines.size() == 8);  // five replayed + three new

  std::ifstream in(path);
  std::string file_content((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
  CHECK(lines_of(file_content).size() == 8);

  // the resumed output begins with the original five steps verbatim
  CHECK(second.out.substr(0, first.out.size()) == first.out);

  // a corrupted checkpoint is rejected
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"rule":"d_plus_n_over_d","prime":"997","certificate":{"branch":"bootstrap","target":"0","a":"0","subset":[],"d":"1","value":"2"}})"
        << '\n';
  }
  CmdResult third = run_cmd("gen dnd --steps 9 --checkpoint " + path);
  CHECK(third.exit_code == 1);
  std::remove(path.c_str());
}

TEST_CASE("mp and yp emit rows in both formats") {
  CmdResult j = run_cmd("mp -p 11");
  CHECK(j.exit_code == 0);
  CHECK(lines_of(j.out)[0] == R"({"p":"11","M":"42","ratio":"3.818182"})");

  CmdResult c = run_cmd("mp --from 2 --to 20 --csv");
  CHECK(c.exit_code == 0);
  auto rows = lines_of(c.out);
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "p,M,ratio");
  // 5 and 7 have no M(p); they are skipped in CSV
  CHECK(rows.size() == 1 + 6);
  CHECK(rows[3] == "11,42,3.818182");

  CmdResult y = run_cmd("yp --from 2 --to 12 --csv");
  CHECK(y.exit_code == 0);
  auto yrows = lines_of(y.out);
  CHECK(yrows[0] == "p,y");
  CHECK(std::find(yrows.begin(), yrows.end(), "5,7") != yrows.end());
  CHECK(std::find(yrows.begin(), yrows.end(), "11,7") != yrows.end());

  CmdResult exceptional = run_cmd("mp -p 5");
  CHECK(exceptional.exit_code == 1);
  CHECK(exceptional.out.find("NotRepresentable") != std::string::npos);
}

TEST_CASE("check subcommands run clean") {
  CmdResult density = run_cmd("check density --limit 100000");
  CHECK(density.exit_code == 0);
  CHECK(density.out.find("\"violations\":[]") != std::string::npos);

  CmdResult omega = run_cmd("check omega --limit 100000");
  CHECK(omega.exit_code == 0);
  CHECK(omega.out.find("\"six_is_witness\":true") != std::string::npos);

  CmdResult pv = run_cmd("check pv -p 13 -d 3");
  CHECK(pv.exit_code == 0);
  CHECK(pv.out.find("\"pass\":true") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cmd("frobnicate").exit_code == 2);
  CHECK(run_cmd("verify --to 100 --method nonsense").exit_code == 2);
  CHECK(run_cmd("represent -p 10 -a 1").exit_code == 2);  // composite modulus
  CHECK(run_cmd("").exit_code == 2);
}

TEST_CASE("chain subcommand emits the certificate schema") {
  CmdResult r = run_cmd("chain -p 10007");
  CHECK(r.exit_code == 0);
  smoothrep::json j = smoothrep::json::parse(lines_of(r.out)[0]);
  CHECK(j["p"] == "10007");
  REQUIRE(j["pairs"].is_array());
  CHECK(j["pairs"].size() == 14);
  // exhaustion of the tiny regime maps to exit code 3
  CHECK(run_cmd("chain -p 11").exit_code == 3);
}
