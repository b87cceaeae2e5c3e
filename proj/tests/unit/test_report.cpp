#include <doctest.h>

#include <cstdlib>
#include <string>

#include "synmix/error.h"
#include "synmix/experiment/analysis.h"
#include "synmix/experiment/report.h"

using namespace synmix::experiment;

TEST_CASE("doubles survive a text round trip")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 123456789.123456789}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("csv quoting only where needed")
{
    Table t("t", {"name", "value"});
    t.add_row({std::string("plain"), std::int64_t{3}});
    t.add_row({std::string("a,b"), 0.5});
    t.add_row({std::string("say \"hi\""), 2.0});
    CHECK(t.to_csv() == "name,value\nplain,3\n\"a,b\",0.5\n\"say \"\"hi\"\"\",2\n");
    CHECK_THROWS(t.add_row({std::int64_t{1}}));
    CHECK_THROWS((void)t.column_index("missing"));
}

TEST_CASE("series extraction filters rows and the svg names its series")
{
    TableSet tables;
    Table& t = tables.emplace_back("tv", std::vector<std::string>{"m", "c", "tv"});
    for (std::int64_t m : {10, 50}) {
        for (double c : {1.0, 2.0, 4.0}) {
            t.add_row({m, c, 1.0 / (static_cast<double>(m) * c)});
        }
    }
    const Series s{"m=50", "tv", "c", "tv", {{"m", std::int64_t{50}}}};
    const auto d = extract_series(s, tables);
    CHECK(d.x == std::vector<double>{1.0, 2.0, 4.0});
    CHECK(d.y[2] == doctest::Approx(1.0 / 200.0));

    Plot p{"tv", {Panel{"grid", "c", "TV", {s}, {2.0}, false, true}}, 1};
    const auto svg = render_svg(p, tables);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("m=50") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    const Series bad{"x", "nope", "c", "tv", {}};
    CHECK_THROWS(extract_series(bad, tables));
}

TEST_CASE("rate fit recovers an exact power law")
{
    const std::vector<double> n = {100, 1000, 10000};
    std::vector<double> tv;
    for (double v : n) {
        tv.push_back(3.0 / std::sqrt(v));
    }
    const auto f = rate_fit(n, tv);
    CHECK(f.slope == doctest::Approx(-0.5));
    CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)));

    const std::vector<double> flat = {0.2, 0.2, 0.2};
    CHECK(rate_fit(n, flat).slope == doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<double> two = {1, 2};
    CHECK_THROWS(rate_fit(two, two));
    const std::vector<double> zero = {0.1, 0.0, 0.1};
    CHECK_THROWS(rate_fit(n, zero));
}

TEST_CASE("coverage report counts hits and averages widths")
{
    using synmix::Interval;
    // 4 repetitions, 1 level, 2 coefficients.
    std::vector<std::vector<std::vector<Interval>>> iv = {
        {{{-1, 1}, {0, 2}}},
        {{{0.5, 1}, {0, 2}}},
        {{{-2, 2}, {3, 4}}},
        {{{-1, 0}, {0, 1}}},
    };
    const std::vector<double> truth = {0.0, 1.0};
    const std::vector<double> levels = {0.9};
    const auto rows = coverage_width_report(iv, truth, levels);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].coefficient == 0);
    CHECK(rows[0].coverage == doctest::Approx(0.75));
    CHECK(rows[0].mean_width == doctest::Approx((2 + 0.5 + 4 + 1) / 4.0));
    CHECK(rows[1].coverage == doctest::Approx(0.75));
    CHECK(rows[1].repetitions == 4);
}
