#include <actsem/cli.hpp>
#include <actsem/clause.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace actsem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "actsem");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("actsem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    return {std::istreambuf_iterator<char>(in), {}};
  }
  void write(const std::string& name, const std::string& body) const { std::ofstream(path(name)) << body; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SimulateWritesTraceWithHeader) {
  Result r = run({"simulate", "--scenario", "two-obstacles", "--steps", "200", "--seed", "42", "--out", path("t.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("snapshots: 201"), std::string::npos);
  EXPECT_NE(r.out.find("actions: 200"), std::string::npos);
  std::string body = slurp("t.txt");
  EXPECT_EQ(body.rfind("# actsem-trace tool_version=0.1.0 scenario=two-obstacles seed=42", 0), 0u);
  Sample s = cli::read_any_trace(body);
  EXPECT_EQ(s.snapshots().size(), 201u);
  EXPECT_EQ(s.actions().size(), 200u);
  EXPECT_EQ(cli::trace_header_field(body, "seed"), std::optional<std::string>("42"));
}

TEST_F(CliTest, SimulateEdgeCases) {
  Result zero = run({"simulate", "--scenario", "two-obstacles", "--steps", "0", "--out", path("z.txt")});
  ASSERT_EQ(zero.code, 0);
  EXPECT_EQ(cli::read_any_trace(slurp("z.txt")).snapshots().size(), 1u);

  Result missing = run({"simulate", "--scenario", "atlantis"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("atlantis"), std::string::npos);

  Result usage = run({"simulate"});
  EXPECT_EQ(usage.code, 1);
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({"--version"}).code, 0);

  Result clause = run({"simulate", "--scenario", "open-desk", "--steps", "20", "--dialect", "clause", "--out",
                       path("c.pl")});
  ASSERT_EQ(clause.code, 0);
  EXPECT_EQ(cli::read_any_trace(slurp("c.pl")).actions().size(), 20u);
}

TEST_F(CliTest, LearnAndInspect) {
  ASSERT_EQ(run({"simulate", "--scenario", "two-obstacles", "--steps", "300", "--seed", "42", "--out", path("t.txt")})
                .code,
            0);
  Result a = run({"learn", "--trace", path("t.txt"), "--out", path("a.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  Result b = run({"learn", "--trace", path("t.txt"), "--out", path("b.json")});
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(slurp("a.json"), slurp("b.json"));

  TheoryDocument doc = read_theory_document(slurp("a.json"));
  EXPECT_EQ(doc.seed, 42u);
  ASSERT_TRUE(doc.theories.contains("turn_left"));
  EXPECT_TRUE(doc.theories.at("turn_left").candidates.at("r_dir").contains(CandidateKey{"change_in_orientation", 0}));

  Result text = run({"inspect", "--theory", path("a.json"), "--action", "move_forward"});
  ASSERT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("action move_forward(D:dist)"), std::string::npos) << text.out;
  EXPECT_NE(text.out.find("has_new_position"), std::string::npos);

  Result clauses = run({"inspect", "--theory", path("a.json"), "--format", "clause"});
  ASSERT_EQ(clauses.code, 0);
  auto imported = clause::import_theories(clauses.out);
  EXPECT_EQ(imported.size(), doc.theories.size());

  Result unknown = run({"inspect", "--theory", path("a.json"), "--action", "teleport"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("no such action: teleport"), std::string::npos);

  Result verbose = run({"learn", "--trace", path("t.txt"), "--out", path("v.json"), "--verbose"});
  EXPECT_NE(verbose.err.find("candidates"), std::string::npos);
}

TEST_F(CliTest, LearnErrorsAndExtras) {
  write("idle.txt", "state t=1 x=num:1\nstate t=3 x=num:2\n");
  Result idle = run({"learn", "--trace", path("idle.txt"), "--out", path("idle.json")});
  EXPECT_EQ(idle.code, 0);
  EXPECT_TRUE(read_theory_document(slurp("idle.json")).theories.empty());

  write("bad.txt", "state t=3 x=num:1\nstate t=1 x=num:2\n");
  EXPECT_EQ(run({"learn", "--trace", path("bad.txt")}).code, 2);
  EXPECT_EQ(run({"learn", "--trace", path("absent.txt")}).code, 1);
  write("garbage.json", "{ not json");
  EXPECT_EQ(run({"inspect", "--theory", path("garbage.json")}).code, 2);

  write("scale.txt", "state t=1 x=num:3\naction t=2 name=scale params=[num:2]\nstate t=3 x=num:6\n");
  write("rel.json", R"({"relations": [{"name": "scaled_by", "signature": "num x num -> num", "template": "linear"}]})");
  Result extra = run({"learn", "--trace", path("scale.txt"), "--relations", path("rel.json"), "--out", path("s.json")});
  ASSERT_EQ(extra.code, 0) << extra.err;
  EXPECT_TRUE(read_theory_document(slurp("s.json")).theories.at("scale").candidates.at("x").contains(
      CandidateKey{"scaled_by", 0}));
}
