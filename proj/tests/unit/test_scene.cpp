#include <doctest.h>

#include <string>

#include <json.hpp>

#include "schlafli/error.hpp"
#include "schlafli/scene.hpp"

using namespace schlafli;

namespace {

// Returns "line:col" of the SceneError thrown for `text`.
std::string error_at(const std::string& text) {
  try {
    Scene::parse(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SceneError);
    return std::to_string(e.line()) + ":" + std::to_string(e.column());
  }
  FAIL("scene parsed");
  return "";
}

// "line:col" of the first occurrence of `marker` in `text`.
std::string where(const std::string& text, const std::string& marker) {
  const std::size_t at = text.find(marker);
  REQUIRE(at != std::string::npos);
  int line = 1, col = 1;
  for (std::size_t i = 0; i < at; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

// Checks that `text` is rejected at the first occurrence of `marker`.
void rejected_at(const std::string& text, const std::string& marker) { CHECK(error_at(text) == where(text, marker)); }

const char* kHeader = "{\"schema\": 1, \"space\": \"E3\",\n";

}  // namespace

TEST_CASE("scene errors carry positions") {
  // syntax errors are reported at the end of the offending token
  CHECK(error_at("{\"schema\": 1,\n \"space\": \"E3\"\n \"tasks\": []}") == "3:8");
  rejected_at("{\"schema\": 2, \"space\": \"E3\", \"tasks\": []}", "2,");
  rejected_at("{\"schema\": 1, \"space\": \"X5\", \"tasks\": []}", "\"X5\"");
  rejected_at(std::string(kHeader) +
                  " \"objects\": [{\"id\": \"a\", \"type\": \"sphere\", \"radius\": 1}],\n"
                  " \"tasks\": [{\"type\": \"volume\", \"object\": \"b\"}]}",
              "\"b\"");
  rejected_at(std::string(kHeader) +
                  " \"objects\": [{\"id\": \"a\", \"type\": \"sphere\", \"radius\": 1},\n"
                  "              {\"id\": \"a\", \"type\": \"cube\"}],\n"
                  " \"tasks\": []}",
              "\"a\", \"type\": \"cube");
  rejected_at(std::string(kHeader) + " \"objects\": [{\"id\": \"a\", \"type\": \"sphere\", \"radius\": -1}],\n"
                                     " \"tasks\": []}",
              "-1");
  rejected_at(std::string(kHeader) +
                  " \"objects\": [{\"id\": \"a\", \"type\": \"sphere\", \"radius\": 1, \"radios\": 2}],\n"
                  " \"tasks\": []}",
              "2}");
}

TEST_CASE("scene validation") {
  const std::string ball = " \"objects\": [{\"id\": \"b\", \"type\": \"sphere\", \"radius\": 1},"
                           " {\"id\": \"w\", \"type\": \"warp\", \"name\": \"cone\"}],\n";
  const std::string head = std::string(kHeader) + ball;
  // stochastic tasks need a seed
  rejected_at(head + " \"tasks\": [{\"type\": \"crofton\", \"object\": \"b\"}]}", "{\"type\": \"crofton");
  // kind mismatch
  rejected_at(head + " \"tasks\": [{\"type\": \"flex\", \"object\": \"b\"}]}", "\"b\"}]");
  rejected_at(head + " \"tasks\": [{\"type\": \"warped\", \"object\": \"b\"}]}", "\"b\"}]");
  // objects not available in the declared space
  rejected_at("{\"schema\": 1, \"space\": \"H3\", \"objects\": [{\"id\": \"s\", \"type\": \"steffen\"}], \"tasks\": []}",
              "\"steffen\"");
  // program errors point at the program string
  rejected_at(std::string(kHeader) + " \"objects\": [{\"id\": \"e\", \"type\": \"expr\", \"program\": \"sin(u\"}],\n"
                                     " \"tasks\": []}",
              "\"sin(u\"");

  const Scene s = Scene::parse(head +
                               " \"tasks\": [{\"type\": \"volume\", \"object\": \"b\"},"
                               " {\"id\": \"einstein\", \"type\": \"warped\", \"object\": \"w\"}]}");
  CHECK(s.space().name() == "E3");
  CHECK(s.object_ids() == std::vector<std::string>{"b", "w"});
  CHECK(s.task_ids() == std::vector<std::string>{"volume-1", "einstein"});
  const SceneResult r = s.run();
  CHECK(r.report.passed());
  REQUIRE(r.report.rows.size() == 3);
  CHECK(r.report.rows[0].oracle == doctest::Approx(4.18879020478639098));
  CHECK(r.report.rows[1].task == "einstein");
}

TEST_CASE("seed override and MC tolerance in standard errors") {
  const std::string text = std::string(kHeader) +
                           " \"objects\": [{\"id\": \"b\", \"type\": \"sphere\", \"radius\": 1}],\n"
                           " \"tasks\": [{\"type\": \"volume\", \"object\": \"b\", \"method\": \"mc\","
                           " \"samples\": 2000, \"seed\": 5, \"tolerance\": 6}]}";
  const Scene s = Scene::parse(text);
  const SceneResult a = s.run();
  REQUIRE(a.report.rows.size() == 1);
  const ReportRow& row = a.report.rows[0];
  CHECK(row.seed == 5u);
  CHECK(row.tolerance > 0);
  CHECK(row.tolerance < 6 * 4.2);  // six standard errors, not six volume units
  CHECK(row.pass);

  SceneOptions o;
  o.seed_override = 99;
  const SceneResult b = s.run(o);
  CHECK(b.report.rows[0].seed == 99u);
  CHECK(b.report.rows[0].computed != row.computed);
  CHECK(s.run().report.csv() == a.report.csv());
}

TEST_CASE("catalog") {
  const std::string text = catalog_text();
  for (const char* name : {"sphere", "ellipsoid-radial", "cube", "steffen", "full-battery"})
    CHECK(text.find(name) != std::string::npos);
  const auto j = nlohmann::json::parse(catalog_json());
  CHECK(j["schema"] == 1);
  bool found = false;
  for (const auto& o : j["objects"])
    if (o["type"] == "ellipsoid-radial") found = o["params"].size() == 4;
  CHECK(found);
}
