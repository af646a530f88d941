#include "common.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace hjc;

namespace {

std::string json_for(const std::string& name, const std::optional<std::string>& tr = std::nullopt) {
  return report_to_json(testing::pipeline(name, tr).make_report());
}

}  // namespace

TEST_CASE("JSON reports round-trip") {
  for (const auto& [name, tr] : std::vector<std::pair<std::string, std::optional<std::string>>>{
           {"first_class", std::nullopt}, {"second_class", std::nullopt}, {"radial", std::nullopt},
           {"radial", std::string("radial")}}) {
    CAPTURE(name);
    const std::string text = json_for(name, tr);
    const AnalysisReport back = report_from_json(text);
    CHECK(report_to_json(back) == text);
    CHECK(report_to_text(back) == report_to_text(testing::pipeline(name, tr).make_report()));
  }
}

TEST_CASE("reports are byte-identical across runs") {
  CHECK(json_for("second_class") == json_for("second_class"));
  CHECK(json_for("radial", "radial") == json_for("radial", "radial"));
}

TEST_CASE("report contents") {
  const auto j = nlohmann::json::parse(json_for("second_class"));
  CHECK(j["format"] == "hjcanon-report");
  CHECK(j["version"] == 1);
  CHECK(j["analysis"]["verdict"] == "integrable-after-determination");
  CHECK(j["analysis"]["determinations"].size() == 1);
  CHECK(j["rank"] == 2);
  CHECK(j["parameters"] == nlohmann::json::array({"q2"}));

  const auto r = nlohmann::json::parse(json_for("radial", "radial"));
  CHECK(r["transformation"]["canonical"] == true);
  CHECK(r["transformation"]["domain_restrictions"][0] == "R^2 - y^2 - z^2 > 0");
  CHECK(r["transformation"]["analysis"]["constraints"][0]["expr"] == "1/2*P_R^2 + p0 + V(R^2)");
}

TEST_CASE("warnings come from known categories only") {
  const std::vector<std::string> known{"principal branch", "probabilistic", "constant factor",
                                       "constraint surface only"};
  CHECK(testing::pipeline("first_class").make_report().warnings.empty());
  for (const auto& name : {"second_class", "radial"}) {
    for (const auto& w : testing::pipeline(name, std::string(name) == "radial" ? std::optional<std::string>("radial")
                                                                              : std::nullopt)
                             .make_report()
                             .warnings) {
      bool ok = false;
      for (const auto& k : known) ok = ok || w.find(k) != std::string::npos;
      CHECK_MESSAGE(ok, w);
    }
  }
}

TEST_CASE("malformed report JSON") {
  CHECK_THROWS_AS(report_from_json("{"), Error);
  CHECK_THROWS_AS(report_from_json("{\"format\": \"other\"}"), Error);
}
