#include <gtest/gtest.h>

#include "pkghallu/date.hpp"
#include "pkghallu/language.hpp"
#include "pkghallu/model_profile.hpp"
#include "test_support.hpp"

using namespace pkghallu;

TEST(Date, ParsesStrictIsoDates) {
  EXPECT_EQ(Date::parse("2023-08-30"), Date(2023, 8, 30));
  EXPECT_EQ(Date::parse("2024-02-29").to_string(), "2024-02-29");
  for (auto bad : {"2023-02-30", "2023-2-01", "2023/02/01", "20230201", "", "2023-13-01", "2023-01-0a"})
    EXPECT_FALSE(Date::try_parse(bad).has_value()) << bad;
  EXPECT_THROW(Date::parse("2023-02-30"), InputError);
}

TEST(Date, TimestampsKeepTheDatePart) {
  EXPECT_EQ(Date::try_parse_timestamp("2019-05-05T12:00:00Z"), Date(2019, 5, 5));
  EXPECT_EQ(Date::try_parse_timestamp("2019-05-05 12:00:00"), Date(2019, 5, 5));
  EXPECT_EQ(Date::try_parse_timestamp("2019-05-05"), Date(2019, 5, 5));
  EXPECT_FALSE(Date::try_parse_timestamp("2019-05-05X").has_value());
}

TEST(Date, RoundTripsOverManyDays) {
  Date d(1999, 12, 1);
  for (int i = 0; i < 3000; ++i, d = d + std::chrono::days(1)) EXPECT_EQ(Date::parse(d.to_string()), d);
}

TEST(Language, RegistryMapping) {
  EXPECT_EQ(registry_for(SourceLanguage::python), RegistryId::pypi);
  EXPECT_EQ(registry_for(SourceLanguage::javascript), RegistryId::npm);
  EXPECT_EQ(registry_for(SourceLanguage::rust), RegistryId::crates);
  for (auto lang : kAllLanguages) {
    EXPECT_EQ(language_for(registry_for(lang)), lang);
    EXPECT_EQ(parse_language(to_string(lang)), lang);
  }
  EXPECT_THROW(parse_language("go"), InputError);
  EXPECT_THROW(parse_registry("maven"), InputError);
}

TEST(ModelProfile, FallsBackToPublicationMinusNinetyDays) {
  ModelProfile p;
  p.name = "m";
  p.params_billions = 7;
  p.first_publication = Date(2024, 7, 23);
  EXPECT_EQ(effective_cutoff(p), Date(2024, 4, 24));
  p.knowledge_cutoff = Date(2023, 12, 1);
  EXPECT_EQ(effective_cutoff(p), Date(2023, 12, 1));
}

TEST(ModelProfile, NoDatesIsAConfigError) {
  ModelProfile p;
  p.name = "m";
  p.params_billions = 7;
  EXPECT_THROW(effective_cutoff(p), ConfigError);
}

TEST(ModelProfile, JsonRoundTrip) {
  auto j = nlohmann::json::parse(R"({"name":"x","params_billions":7.5,"is_coding":true,
    "knowledge_cutoff":"2023-09-01","humaneval":55.0,
    "endpoint":{"base_url":"http://h/v1","model_id":"x-7b","api_key_env":"KEY"}})");
  auto p = profile_from_json(j);
  EXPECT_EQ(p.endpoint.model_id, "x-7b");
  EXPECT_FALSE(p.mbpp.has_value());
  EXPECT_EQ(profile_from_json(profile_to_json(p)), p);
}

TEST(ModelProfile, Validation) {
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"name":"x","params_billions":0,"is_coding":true})")),
               ConfigError);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"name":"x","params_billions":1})")), ConfigError);
  EXPECT_THROW(
      profile_from_json(nlohmann::json::parse(R"({"name":"x","params_billions":1,"is_coding":false,"mbpp":120})")),
      ConfigError);
  EXPECT_THROW(profiles_from_json(nlohmann::json::parse(
                   R"([{"name":"a","params_billions":1,"is_coding":false},{"name":"a","params_billions":2,"is_coding":true}])")),
               ConfigError);
}

TEST(ModelProfile, ReferenceSetHasElevenModels) {
  auto profiles = reference_profiles();
  ASSERT_EQ(profiles.size(), 11u);
  int coding = 0;
  for (const auto& p : profiles) coding += p.is_coding;
  EXPECT_EQ(coding, 6);
}
