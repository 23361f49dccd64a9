#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "commands.hpp"

using namespace qes::cli;
using Catch::Approx;

namespace {

std::string csv_of(const Output& out) {
    std::ostringstream os;
    write_output(os, out, Format::csv);
    return os.str();
}

ordered_json json_of(const Output& out) {
    std::ostringstream os;
    write_output(os, out, Format::json);
    return ordered_json::parse(os.str());
}

RunConfig config(const std::string& command) {
    RunConfig c;
    c.command = command;
    return c;
}

}  // namespace

TEST_CASE("format_double keeps 12 significant digits") {
    CHECK(format_double(1.0 / 3.0) == "0.333333333333");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(1e-20) == "1e-20");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv_quote follows RFC 4180") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("empty table still writes a header") {
    Table t;
    t.columns = {"N", "xi_c"};
    std::ostringstream os;
    write_csv(os, t);
    CHECK(os.str() == "N,xi_c\n");
    std::ostringstream js;
    write_json(js, t, ordered_json::object());
    const auto doc = ordered_json::parse(js.str());
    CHECK(doc["rows"].is_array());
    CHECK(doc["rows"].empty());
}

TEST_CASE("table rejects ragged rows") {
    Table t;
    t.columns = {"a", "b"};
    CHECK_THROWS_AS(t.add({1.0}), std::logic_error);
}

TEST_CASE("json numbers are rounded to 12 digits and non-finite becomes null") {
    CHECK(json_number(0.1 + 0.2).get<double>() == 0.3);
    CHECK(json_number(INFINITY).is_null());
}

TEST_CASE("spectrum N=3 xi=0.2 gives three real rows") {
    auto c = config("spectrum");
    c.big_n = 3;
    c.xi = 0.2;
    const auto out = run_command(c);
    REQUIRE(out.table.rows.size() == 3);
    const auto doc = json_of(out);
    for (const auto& row : doc["rows"]) {
        CHECK(row["is_real"].get<bool>());
        CHECK(row["eigenvalue_im"].get<double>() == 0.0);
    }
    CHECK(doc["rows"][2]["eigenvalue_re"].get<double>() == Approx(-4.96));
    CHECK(doc["config"]["N"] == 3);
}

TEST_CASE("spectrum over a range emits N rows per grid point") {
    auto c = config("spectrum");
    c.big_n = 4;
    c.xi_lo = 0.0;
    c.xi_hi = 1.0;
    c.xi_step = 0.25;
    CHECK(run_command(c).table.rows.size() == 5 * 4);
}

TEST_CASE("spectrum usage errors") {
    auto c = config("spectrum");
    c.big_n = 3;
    CHECK_THROWS_AS(run_command(c), UsageError);  // no xi at all
    c.xi = 0.1;
    c.xi_lo = 0.0;
    c.xi_hi = 1.0;
    CHECK_THROWS_AS(run_command(c), UsageError);  // both forms
    c.xi.reset();
    c.xi_step = -1.0;
    CHECK_THROWS_AS(run_command(c), UsageError);
    c.xi_step = 0.1;
    c.big_n = 0;
    CHECK_THROWS_AS(run_command(c), UsageError);
}

TEST_CASE("ep N=5 gives two rows, N=1 none") {
    auto c = config("ep");
    c.big_n = 5;
    const auto out = run_command(c);
    REQUIRE(out.table.rows.size() == 2);
    const auto doc = json_of(out);
    CHECK(doc["rows"][0]["xi_c"].get<double>() == Approx(0.295925899852).margin(1e-9));
    CHECK(doc["rows"][1]["xi_c"].get<double>() == Approx(1.5).margin(1e-9));
    c.big_n = 1;
    const auto none = run_command(c);
    CHECK(none.table.rows.empty());
    CHECK(csv_of(none) == "N,xi_c,E_re,E_im,gap,method\n");
}

TEST_CASE("ep rejects even N") {
    auto c = config("ep");
    c.big_n = 4;
    CHECK_THROWS_AS(run_command(c), UsageError);
}

TEST_CASE("scaling odd-up-to 7") {
    auto c = config("scaling");
    c.odd_up_to = 7;
    const auto out = run_command(c);
    REQUIRE(out.table.rows.size() == 3);
    CHECK(std::get<double>(out.table.rows[0][2]) == Approx(1.5).margin(1e-9));
    CHECK(std::get<double>(out.table.rows[1][2]) == Approx(1.4797).margin(5e-4));
    REQUIRE(out.notes.size() == 1);
    CHECK(out.notes[0].find("yes") != std::string::npos);
}

TEST_CASE("scaling rejects even entries") {
    auto c = config("scaling");
    c.n_list = {3, 4};
    CHECK_THROWS_AS(run_command(c), UsageError);
}

TEST_CASE("mathieu-gc default bracket") {
    const auto out = run_command(config("mathieu-gc"));
    REQUIRE(out.table.rows.size() == 1);
    CHECK(std::get<double>(out.table.rows[0][0]) == Approx(1.4687).margin(1e-3));
    CHECK(std::get<bool>(out.table.rows[0][2]));
}

TEST_CASE("mathieu-gc bracket without the transition is a numerical failure") {
    auto c = config("mathieu-gc");
    c.g_lo = 0.1;
    c.g_hi = 0.5;
    CHECK_THROWS_AS(run_command(c), qes::NoBracket);
}

TEST_CASE("compare lists k levels for each N") {
    auto c = config("compare");
    c.n_list = {11, 25};
    c.k = 2;
    const auto out = run_command(c);
    REQUIRE(out.table.rows.size() == 4);
    const double dev11 = std::get<double>(out.table.rows[0][6]);
    const double dev25 = std::get<double>(out.table.rows[2][6]);
    CHECK(dev25 < dev11);
    c.k = 12;
    CHECK_THROWS_AS(run_command(c), UsageError);
}

TEST_CASE("unknown command") { CHECK_THROWS_AS(run_command(config("nope")), UsageError); }

TEST_CASE("repeated runs give identical bytes") {
    auto c = config("ep");
    c.big_n = 7;
    CHECK(csv_of(run_command(c)) == csv_of(run_command(c)));
    auto s = config("spectrum");
    s.big_n = 6;
    s.xi_lo = -1.0;
    s.xi_hi = 1.0;
    s.xi_step = 0.05;
    std::ostringstream a, b;
    write_output(a, run_command(s), Format::json);
    write_output(b, run_command(s), Format::json);
    CHECK(a.str() == b.str());
}
