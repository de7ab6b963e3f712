#include <doctest.h>

#include <string>
#include <vector>

#include "confsched/core.hpp"
#include "confsched/csv.hpp"
#include "confsched/rng.hpp"

using confsched::csv::Row;

TEST_CASE("csv parses plain and quoted fields") {
  const auto rows = confsched::csv::parse("a,b,c\n1,\"x, y\",3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == Row{"a", "b", "c"});
  CHECK(rows[1] == Row{"1", "x, y", "3"});
}

TEST_CASE("csv handles doubled quotes, CRLF and embedded newlines") {
  const auto rows = confsched::csv::parse("\"say \"\"hi\"\"\",ok\r\n\"line\nbreak\",2\r\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == Row{"say \"hi\"", "ok"});
  CHECK(rows[1] == Row{"line\nbreak", "2"});
}

TEST_CASE("csv trailing newline produces no empty record") {
  CHECK(confsched::csv::parse("a,b\n").size() == 1);
  CHECK(confsched::csv::parse("a,b").size() == 1);
  CHECK(confsched::csv::parse("").empty());
}

TEST_CASE("csv rejects an unterminated quoted field") {
  CHECK_THROWS_AS(confsched::csv::parse("\"open,field\n"), confsched::Error);
}

TEST_CASE("csv escape and format round-trip arbitrary fields") {
  confsched::SeededRng rng(99);
  const std::string alphabet = "ab\",\n \r;x";
  for (int round = 0; round < 200; ++round) {
    Row row;
    const std::size_t fields = 1 + rng.next_index(4);
    for (std::size_t f = 0; f < fields; ++f) {
      std::string field;
      const std::size_t length = rng.next_index(8);
      for (std::size_t c = 0; c < length; ++c)
        field += alphabet[rng.next_index(alphabet.size())];
      row.push_back(field);
    }
    const auto parsed = confsched::csv::parse(confsched::csv::format_row(row));
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == row);
  }
}
