// Copyright 2026 The ctxclean Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctxclean/table.h"

#include <gtest/gtest.h>

#include "ctxclean/pipeline.h"
#include "test_util.h"

namespace ctxclean {
namespace {

using testing::column_table;
using testing::make_table;

DatasetConfig typed(std::map<std::string, ColumnType> types) {
  DatasetConfig config;
  config.column_types = std::move(types);
  return config;
}

TEST(LoadCsv, EmptyFieldBecomesNull) {
  const auto table = load_csv("a,b\n1,\n", typed({{"a", ColumnType::kNumber}}));
  ASSERT_EQ(table.num_rows(), 1u);
  EXPECT_EQ(table.at(0, 0), "1");
  EXPECT_FALSE(table.at(0, 1).has_value());
}

TEST(LoadCsv, IotFixtureShape) {
  const auto settings = Settings::parse(read_file(testing::data_path("iot/readings.conf")), testing::data_path("iot"));
  const auto config = make_run_config(settings);
  const auto table = load_csv(read_file(config.data_path), dataset_config(config, TripleGraph{}));
  EXPECT_EQ(table.num_rows(), 1000u);
  EXPECT_EQ(table.num_columns(), 7u);
}

TEST(LoadCsv, RaggedRow) {
  try {
    load_csv("a,b\nx\n", DatasetConfig{});
    FAIL() << "expected a data error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row"), std::string::npos);
  }
}

TEST(LoadCsv, UnparseableTypedCellNamesTheCell) {
  try {
    load_csv("a,b\n1,2\nx,3\n", typed({{"a", ColumnType::kNumber}}));
    FAIL() << "expected a data error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1, column 'a'"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, TimestampFormat) {
  EXPECT_NO_THROW(load_csv("t\n2026-03-01T10:00:00\n", typed({{"t", ColumnType::kTimestamp}})));
  EXPECT_THROW(load_csv("t\n2026-03-01 10:00\n", typed({{"t", ColumnType::kTimestamp}})), DataError);
}

TEST(LoadCsv, QuotingAndCrlf) {
  const auto table = load_csv("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n", DatasetConfig{});
  EXPECT_EQ(table.at(0, 0), "x, y");
  EXPECT_EQ(table.at(0, 1), "say \"hi\"");
}

TEST(LoadCsv, DuplicateHeaderRejected) { EXPECT_THROW(load_csv("a,a\n1,2\n", DatasetConfig{}), DataError); }

TEST(WriteCsv, NullIsEmptyField) {
  const auto table = make_table({{"a", ColumnType::kText}, {"b", ColumnType::kText}}, {{"x", std::nullopt}});
  EXPECT_EQ(write_csv(table), "a,b\nx,\n");
}

TEST(WriteCsv, CommaIsQuoted) {
  const auto table = column_table("a", ColumnType::kText, {"x,y"});
  EXPECT_EQ(write_csv(table), "a\n\"x,y\"\n");
}

TEST(WriteCsv, RoundTripFixtures) {
  for (const char* conf : {"iot/readings.conf", "hospital/hospital.conf"}) {
    const auto path = testing::data_path(conf);
    const auto config = make_run_config(Settings::parse(read_file(path), path.parent_path()));
    const auto dataset = dataset_config(config, TripleGraph{});
    const auto table = load_csv(read_file(config.data_path), dataset);
    EXPECT_EQ(load_csv(write_csv(table), dataset), table) << conf;
  }
}

TEST(WriteCsv, RoundTripSingleNullColumn) {
  const auto table = column_table("a", ColumnType::kText, {std::nullopt, "x", std::nullopt});
  EXPECT_EQ(load_csv(write_csv(table), DatasetConfig{}), table);
}

TEST(ColumnStats, MostFrequent) {
  const auto stats = column_stats(column_table("c", ColumnType::kText, {"a", "a", "b"}), "c");
  ASSERT_TRUE(stats);
  EXPECT_EQ(stats->most_frequent, "a");
}

TEST(ColumnStats, TieBreaksLexicographically) {
  const auto stats = column_stats(column_table("c", ColumnType::kText, {"b", "a"}), "c");
  ASSERT_TRUE(stats);
  EXPECT_EQ(stats->most_frequent, "a");
}

TEST(ColumnStats, MedianIsLowerMiddle) {
  const auto stats = column_stats(column_table("c", ColumnType::kNumber, {"3", "1", "2", "4"}), "c");
  ASSERT_TRUE(stats);
  EXPECT_EQ(stats->median, 2.0);
  EXPECT_EQ(stats->median_text, "2");
  EXPECT_EQ(stats->min, 1.0);
  EXPECT_EQ(stats->max, 4.0);
}

TEST(ColumnStats, AllNullIsUnavailable) {
  EXPECT_FALSE(column_stats(column_table("c", ColumnType::kNumber, {std::nullopt, std::nullopt}), "c"));
}

TEST(ColumnStats, RowFilter) {
  const auto table = column_table("c", ColumnType::kNumber, {"1", "100", "3"});
  const auto stats = column_stats(table, "c", [](std::size_t row) { return row != 1; });
  ASSERT_TRUE(stats);
  EXPECT_EQ(stats->median, 1.0);
  EXPECT_EQ(stats->max, 3.0);
}

TEST(ColumnStats, MissingColumnIsConfigError) {
  EXPECT_THROW(column_stats(column_table("c", ColumnType::kText, {"a"}), "d"), ConfigError);
}

TEST(Table, AddressingIsTotal) {
  const auto table = make_table({{"a", ColumnType::kText}, {"b", ColumnType::kNumber}}, {{"x", "1"}, {"y", "2"}});
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (const auto& column : table.schema()) EXPECT_TRUE(table.contains({r, column.name}));
  }
  EXPECT_FALSE(table.contains({2, "a"}));
  EXPECT_FALSE(table.contains({0, "z"}));
}

TEST(Table, SetValidatesType) {
  auto table = column_table("n", ColumnType::kNumber, {"1"});
  EXPECT_THROW(table.set(0, 0, "abc"), DataError);
  table.set(0, 0, "2.5");
  EXPECT_EQ(table.number(0, 0), 2.5);
}

TEST(Values, NumericEqualityUsesTolerance) {
  EXPECT_TRUE(values_equal(ColumnType::kNumber, "1.0", "1"));
  EXPECT_TRUE(values_equal(ColumnType::kNumber, "0.3", "0.30000000001"));
  EXPECT_FALSE(values_equal(ColumnType::kNumber, "0.3", "0.3001"));
  EXPECT_FALSE(values_equal(ColumnType::kText, "1.0", "1"));
}

TEST(DatasetConfig, BindingToMissingColumnIsConfigError) {
  const auto table = column_table("a", ColumnType::kText, {"x"});
  DatasetConfig config;
  config.column_bindings["http://ex#s"] = "nope";
  EXPECT_THROW(config.validate(table), ConfigError);
}

}  // namespace
}  // namespace ctxclean
