#include <gtest/gtest.h>

#include "madtn/fluency.hpp"
#include "madtn/io.hpp"
#include "test_support.hpp"

using namespace madtn;
using madtn::testing::load_packaging;

namespace {

io::Json fixture_json() { return io::Json::parse(io::read_file(madtn::testing::fixture_path())); }

std::vector<io::DocumentIssue> issues_of(const std::string& text, ErrorCode expected) {
  try {
    io::parse_daisy(text);
  } catch (const io::DocumentError& e) {
    EXPECT_EQ(e.code(), expected) << e.what();
    return e.issues();
  }
  ADD_FAILURE() << "document parsed";
  return {};
}

bool has_path(const std::vector<io::DocumentIssue>& issues, const std::string& path) {
  for (const auto& i : issues) {
    if (i.path == path) return true;
  }
  return false;
}

Trace fixture_trace(std::uint64_t seed) {
  const auto doc = load_packaging();
  Assignment a;
  for (std::size_t p = 0; p < doc.daisy.petals().size(); ++p) a[p] = *doc.daisy.petal(p).owner;
  BehaviorProfile r;
  r.max_reaction = 1.0;
  r.anticipation_probability = 0.3;
  r.anticipation_offset = 0.5;
  return simulate(doc.daisy, *doc.ordering, a, {{"robot", r}}, seed);
}

}  // namespace

TEST(ParseDaisy, Fixture) {
  const auto doc = load_packaging();
  EXPECT_EQ(doc.name, "packaging");
  const std::vector<std::string> expected{"Retrieve Object A", "Prepare and Pack Object B", "Pack Object A",
                                          "Pack Object C",     "Seal Package",              "Deliver Package"};
  std::vector<std::string> names;
  for (const auto& p : doc.daisy.petals()) names.push_back(p.name);
  EXPECT_EQ(names, expected);
  EXPECT_EQ(doc.daisy.external().size(), 6u);  // five declared plus makespan
  ASSERT_TRUE(doc.daisy.makespan());
  EXPECT_EQ(doc.daisy.makespan()->upper, ExtendedReal(120.0));
  ASSERT_TRUE(doc.capabilities);
  EXPECT_FALSE(doc.capabilities->score("robot", 3).has_value());
  ASSERT_TRUE(doc.ordering);
  EXPECT_EQ(doc.ordering->at("human").size(), 3u);
}

TEST(ParseDaisy, RoundTrip) {
  const auto doc = load_packaging();
  const std::string text = io::serialize_daisy(doc);
  const auto again = io::parse_daisy(text);
  EXPECT_EQ(again, doc);
  EXPECT_EQ(io::serialize_daisy(again), text);
}

TEST(ParseDaisy, InvertedActionBoundsNamePath) {
  auto j = fixture_json();
  j["petals"][0]["actions"][1]["bounds"] = {3, 0.5};
  const auto issues = issues_of(j.dump(), ErrorCode::SchemaViolation);
  EXPECT_TRUE(has_path(issues, "/petals/0/actions/1/bounds"));
}

TEST(ParseDaisy, UnknownFieldsRejected) {
  auto j = fixture_json();
  j["colour"] = "blue";
  j["petals"][2]["actions"][0]["speed"] = 3;
  const auto issues = issues_of(j.dump(), ErrorCode::SchemaViolation);
  EXPECT_TRUE(has_path(issues, "/colour"));
  EXPECT_TRUE(has_path(issues, "/petals/2/actions/0/speed"));
}

TEST(ParseDaisy, SchemaProblems) {
  auto j = fixture_json();
  j["agents"][0]["kind"] = "cyborg";
  j["external"][0]["from"] = "Retrieve Object A.Fly.end";
  j["external"][1]["kind"] = "sync";
  j["capabilities"]["Pack Object C"]["human"] = -1;
  j["ordering"]["robot"][0] = "Nope";
  const auto issues = issues_of(j.dump(), ErrorCode::SchemaViolation);
  EXPECT_TRUE(has_path(issues, "/agents/0/kind"));
  EXPECT_TRUE(has_path(issues, "/external/0/from"));
  EXPECT_TRUE(has_path(issues, "/external/1/kind"));
  EXPECT_TRUE(has_path(issues, "/capabilities/Pack Object C/human"));
  EXPECT_TRUE(has_path(issues, "/ordering/robot/0"));
}

TEST(ParseDaisy, SyntaxError) {
  issues_of("{\"agents\": [", ErrorCode::SyntaxError);
  issues_of("[]", ErrorCode::SchemaViolation);
}

TEST(ParseDaisy, ValidatorViolationsSurface) {
  auto j = fixture_json();
  j["external"][0]["bounds"] = {1, nullptr};  // handoff with a positive lower bound
  issues_of(j.dump(), ErrorCode::InvalidDaisy);
}

TEST(ParseDaisy, NullBoundsAreInfinite) {
  auto j = fixture_json();
  j["makespan"] = {nullptr, nullptr};
  const auto doc = io::parse_daisy(j.dump());
  EXPECT_FALSE(doc.daisy.makespan()->lower.is_finite());
  EXPECT_FALSE(doc.daisy.makespan()->upper.is_finite());
  EXPECT_EQ(io::parse_daisy(io::serialize_daisy(doc)), doc);
}

TEST(Trace, RoundTrip) {
  for (std::uint64_t seed : {1u, 7u, 42u}) {
    const Trace t = fixture_trace(seed);
    const std::string text = io::serialize_trace(t, "packaging");
    const auto back = io::parse_trace(text);
    EXPECT_EQ(back.trace, t);
    EXPECT_EQ(back.daisy, "packaging");
    EXPECT_EQ(io::serialize_trace(back.trace, back.daisy), text);
  }
}

TEST(Trace, SchemaProblems) {
  EXPECT_THROW(io::parse_trace("{\"events\": [{\"agent\": \"h\", \"petal\": \"p\", \"action\": \"a\", "
                               "\"start\": 2, \"end\": 1}], \"daisy_start\": 0, \"daisy_end\": 2}"),
               io::DocumentError);
  EXPECT_THROW(io::parse_trace("{\"daisy_start\": 0, \"daisy_end\": 2}"), io::DocumentError);
  EXPECT_THROW(io::parse_trace("{\"events\": [], \"daisy_start\": 0, \"daisy_end\": 2, \"x\": 1}"),
               io::DocumentError);
}

TEST(Report, RoundTrip) {
  const auto doc = load_packaging();
  for (std::uint64_t seed : {3u, 42u}) {
    const FluencyReport r = fluency_report(fixture_trace(seed), doc.daisy);
    const io::Json j = io::report_to_json(r);
    EXPECT_EQ(io::report_from_json(io::Json::parse(j.dump())), r);
  }
}
