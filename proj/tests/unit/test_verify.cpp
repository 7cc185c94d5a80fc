#include <gtest/gtest.h>

#include <set>

#include <nlohmann/json.hpp>

#include <fractal_hodge/errors.hpp>
#include <fractal_hodge/verify.hpp>

using namespace fractal_hodge;

namespace {

void expect_well_formed(const VerificationReport& report) {
  const auto doc = nlohmann::json::parse(report_json(report));
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["checks"].size(), report.checks.size());
  std::set<std::string> ids;
  for (const auto& c : doc["checks"]) {
    EXPECT_TRUE(ids.insert(c["id"].get<std::string>()).second) << c["id"];
    const auto status = c["status"].get<std::string>();
    EXPECT_TRUE(status == "pass" || status == "fail" || status == "erratum");
    if (status == "erratum") EXPECT_TRUE(c.contains("citation"));
  }
  EXPECT_EQ(doc["summary"]["failures"], report.failures());
}

}  // namespace

TEST(Verify, CountingSuite) {
  const auto r = run_suite("counting");
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.errata(), 0u);
  EXPECT_GE(r.checks.size(), 25u);
  expect_well_formed(r);
}

TEST(Verify, ComplexSuite) {
  const auto r = run_suite("complex");
  EXPECT_TRUE(r.passed());
  expect_well_formed(r);
}

TEST(Verify, HarmonicSuite) {
  const auto r = run_suite("harmonic");
  EXPECT_TRUE(r.passed());
  expect_well_formed(r);
}

TEST(Verify, KusuokaSuiteRecordsErrata) {
  VerifyOptions options;
  options.identity_depth = 6;
  const auto r = run_suite("kusuoka", options);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.errata(), 0u);
  for (const auto& c : r.checks)
    if (c.status == CheckStatus::erratum) EXPECT_EQ(c.id.rfind("kusuoka.printed.", 0), 0u) << c.id;
  expect_well_formed(r);
}

TEST(Verify, DeterministicWithoutTiming) {
  EXPECT_EQ(report_json(run_suite("counting"), false), report_json(run_suite("counting"), false));
}

TEST(Verify, UnknownSuite) { EXPECT_THROW(run_suite("nope"), DomainError); }

TEST(Verify, DuplicateIdsRejected) {
  VerificationReport r;
  r.add({"a", "", CheckStatus::pass, "", "", 0, {}});
  EXPECT_THROW(r.add({"a", "", CheckStatus::pass, "", "", 0, {}}), DomainError);
}
