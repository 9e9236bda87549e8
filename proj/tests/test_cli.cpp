#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

using namespace specshadow;

namespace {

const std::string kData = SPECSHADOW_DATA_DIR;

std::string data(const std::string& name) { return kData + "/" + name; }

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    rows.push_back(cli::detail::split(line, ','));
  }
  return rows;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("specshadow_" + name)).string();
}

}  // namespace

TEST(Cli, LasserreMemberExamples) {
  const auto in = run({"lasserre-member", "--set", data("counterexample.json"), "--degree", "1", "--point", "1/3,0"});
  EXPECT_EQ(in.code, 0) << in.err;
  const auto out = run({"lasserre-member", "--set", data("counterexample.json"), "--degree", "1", "--point", "2/5,0"});
  EXPECT_EQ(out.code, 1) << out.err;
  EXPECT_NE(out.out.find("separator:"), std::string::npos);
}

TEST(Cli, QmMemberWritesCertificate) {
  const std::string path = temp_path("qm_cert.json");
  std::filesystem::remove(path);
  const auto r = run({"qm-member", "--set", data("counterexample.json"), "--degree", "1", "--poly", "Y-3X+2", "--out",
                      path, "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(r.out);
  EXPECT_EQ(report["status"], "feasible");
  EXPECT_EQ(report["certificate_file"], path);
  std::ifstream f(path);
  const json cert = json::parse(f);
  // The certificate document replays on reload.
  GramCertificate c = certificate_from_json(cert);
  EXPECT_LE(replay(c), 1e-6);
}

TEST(Cli, ExitCodesForInputErrors) {
  EXPECT_EQ(run({"no-such-command"}).code, 3);
  EXPECT_EQ(run({"lasserre-member", "--set", data("missing.json"), "--degree", "1", "--point", "0,0"}).code, 3);
  EXPECT_EQ(run({"lasserre-member", "--set", data("counterexample.json"), "--degree", "1", "--point", "0,x"}).code, 3);
  EXPECT_EQ(run({"lasserre-member", "--set", data("counterexample.json"), "--degree", "1"}).code, 3);
  EXPECT_EQ(run({"lasserre-member", "--set", data("counterexample.json"), "--ideal", data("circle.json"), "--degree",
                 "1", "--point", "0,0"})
                .code,
            3);
  EXPECT_EQ(run({"qm-member", "--set", data("counterexample.json"), "--degree", "1", "--poly", "Y-3Q+2"}).code, 3);
  EXPECT_EQ(run({"lasserre-member", "--bogus-flag"}).code, 3);
  EXPECT_EQ(run({"verify-paper", "--format", "yaml"}).code, 3);
}

TEST(Cli, InaccurateNeverMapsToTrueOrFalse) {
  EXPECT_EQ(cli::detail::code_for(VerdictKind::Inaccurate), 2);
  EXPECT_EQ(cli::detail::code_for(VerdictKind::NotApplicable), 2);
  EXPECT_EQ(cli::detail::code_for(Feasibility::Inaccurate), 2);
  EXPECT_EQ(cli::detail::code_for(PencilFeasibility::Inaccurate), 2);
  EXPECT_EQ(cli::detail::code_for(PencilFeasibility::NotApplicable), 2);
  EXPECT_EQ(cli::detail::code_for(SupportResult::Status::Inaccurate), 2);
  EXPECT_EQ(cli::detail::code_for(ObstructionVerdict::NotApplicable), 2);
}

TEST(Cli, PencilCommands) {
  const std::string pencil = data("twodisks_pencil.json");
  EXPECT_EQ(run({"projection-member", "--pencil", pencil, "--point", "1.5,0.5"}).code, 0);
  EXPECT_EQ(run({"projection-member", "--pencil", pencil, "--point", "2.05,0"}).code, 1);
  EXPECT_EQ(run({"closure-member", "--pencil", pencil, "--point", "2,0"}).code, 0);
  EXPECT_EQ(run({"pencil-qm-member", "--pencil", pencil, "--degree", "0", "--poly", "2+X"}).code, 0);
  EXPECT_EQ(run({"polar-member", "--pencil", data("disk_pencil.json"), "--poly", "1-2X"}).code, 1);
  EXPECT_EQ(run({"pencil-member", "--pencil", pencil, "--point", "1,0,0"}).code, 0);
}

TEST(Cli, ObstructionCommands) {
  EXPECT_EQ(run({"obstruct-singular", "--set", data("cusp.json"), "--point", "0,0"}).code, 0);
  EXPECT_EQ(run({"obstruct-line", "--set", data("cusp.json"), "--point", "0,0", "--dir", "1,0"}).code, 0);
  EXPECT_EQ(run({"obstruct-nonexposed", "--set", data("square.json"), "--point", "1,1", "--witness", "1,0"}).code, 1);
  for (const char* mode : {"exact", "float"}) {
    EXPECT_EQ(run({"obstruct-nonexposed", "--set", data("nonexposed.json"), "--point", "0,0", "--witness", "-1/2,0",
                   "--mode", mode})
                  .code,
              0);
  }
  EXPECT_EQ(run({"convex-singular", "--ideal", data("zitrus.json"), "--point", "0,1,0", "--witness", "0,0,0"}).code, 0);
  EXPECT_EQ(run({"convex-singular", "--ideal", data("sphere_cylinder.json"), "--point", "2,0,0", "--witness",
                 "0,0,0", "--real-radical"})
                .code,
            1);
  EXPECT_EQ(run({"obstruct-singular", "--set", data("cusp.json"), "--point", "-1,0"}).code, 3);
}

TEST(Cli, SupportCommands) {
  const auto r = run({"lasserre-support", "--set", data("counterexample.json"), "--degree", "1", "--dir", "0,-1",
                      "--format", "json"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json::parse(r.out)["support"].get<double>(), 0.0, 1e-6);
  const auto t = run({"theta-support", "--ideal", data("circle.json"), "--degree", "1", "--dir", "0,1", "--format",
                      "json"});
  ASSERT_EQ(t.code, 0);
  EXPECT_NEAR(json::parse(t.out)["support"].get<double>(), 1.0, 1e-5);
  // Pushforward of the square under (X², Y): support 1 in direction (1,0).
  const auto p = run({"pushforward-support", "--set", data("square.json"), "--degree", "1", "--map", "X^2;Y", "--dir",
                      "1,0", "--format", "json"});
  ASSERT_EQ(p.code, 0);
  EXPECT_NEAR(json::parse(p.out)["support"].get<double>(), 1.0, 1e-5);
}

TEST(SampleBoundary, EmptyDirectionListGivesHeader) {
  const auto r = run({"sample-boundary", "--set", data("cusp.json"), "--degree", "1", "--dirs", "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "theta,ux,uy,support\n");
}

TEST(SampleBoundary, TwoDiskSupportAlongFirstAxis) {
  const auto r = run({"sample-boundary", "--set", data("twodisks.json"), "--degree", "2", "--dirs", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_NEAR(std::stod(rows[1][3]), 2.0, 1e-4);
}

TEST(SampleBoundary, NonPlanarIsInputError) {
  EXPECT_EQ(run({"sample-boundary", "--ideal", data("zitrus.json"), "--degree", "1", "--dirs", "4"}).code, 3);
}

TEST(SampleBoundary, CuspEnvelopesNestAndOutputIsDeterministic) {
  const std::vector<std::string> base{"sample-boundary", "--set", data("cusp.json"), "--dirs", "360", "--degree"};
  auto with = [&](const char* d) {
    auto a = base;
    a.push_back(d);
    return run(a);
  };
  const auto d1 = with("1"), d2 = with("2");
  ASSERT_EQ(d1.code, 0);
  ASSERT_EQ(d2.code, 0);
  EXPECT_EQ(with("2").out, d2.out);
  const auto r1 = csv_rows(d1.out), r2 = csv_rows(d2.out);
  ASSERT_EQ(r1.size(), 361u);
  ASSERT_EQ(r2.size(), 361u);
  for (std::size_t k = 1; k < r1.size(); ++k) {
    EXPECT_EQ(r1[k][0], r2[k][0]);
    EXPECT_LE(std::stod(r2[k][3]), std::stod(r1[k][3]) + 1e-6) << "row " << k;
  }
}

TEST(VerifyCommand, AllChecksPass) {
  const auto r = run({"verify-paper"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS tangent line identity a=3/4"), std::string::npos);
  EXPECT_EQ(run({"verify-paper", "--set", data("cusp.json")}).code, 3);
}

TEST(BundledData, DocumentsRoundTrip) {
  for (const char* name : {"counterexample.json", "cusp.json", "twodisks.json", "nonexposed.json", "square.json"}) {
    const json doc = cli::detail::load_document(data(name));
    const json once = set_to_json(set_from_json(doc));
    EXPECT_EQ(set_to_json(set_from_json(once)), once) << name;
  }
  for (const char* name : {"zitrus.json", "sphere_cylinder.json", "circle.json"}) {
    const json doc = cli::detail::load_document(data(name));
    const json once = ideal_to_json(ideal_from_json(doc));
    EXPECT_EQ(ideal_to_json(ideal_from_json(once)), once) << name;
  }
  for (const char* name : {"twodisks_pencil.json", "disk_pencil.json"}) {
    const json doc = cli::detail::load_document(data(name));
    const json once = pencil_to_json(pencil_from_json(doc));
    EXPECT_EQ(pencil_to_json(pencil_from_json(once)), once) << name;
  }
}
