#include "panelkt/errors.hpp"
#include "panelkt/panel_ingest.hpp"
#include "panelkt/panel_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace panelkt;

namespace {

RawPanel parse(const std::string& text, const IngestSchema& schema = {}) {
    std::istringstream in(text);
    return load_csv(in, schema);
}

// entities e0..e{E-1}, years 2000.., one or more indicators, values smooth in
// (entity, year) so imputation has meaningful neighbours.
RawPanel synthetic(std::size_t E, std::size_t Y, const std::vector<std::string>& indicators, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    RawPanel p;
    for (std::size_t e = 0; e < E; ++e) p.entities.push_back("e" + std::to_string(e));
    for (std::size_t y = 0; y < Y; ++y) p.years.push_back(2000 + static_cast<int>(y));
    for (std::size_t k = 0; k < indicators.size(); ++k) {
        IndicatorTable t(E, Y);
        for (std::size_t e = 0; e < E; ++e) {
            const double level = nd(rng);
            for (std::size_t y = 0; y < Y; ++y)
                t.at(e, y) = level + 0.1 * static_cast<double>(y) * static_cast<double>(k + 1) + 0.05 * nd(rng);
        }
        p.indicators.emplace(indicators[k], std::move(t));
    }
    return p;
}

void knock_out(RawPanel& p, double fraction, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution drop(fraction);
    for (auto& [name, t] : p.indicators)
        for (std::size_t e = 0; e < t.entities(); ++e)
            for (std::size_t y = 0; y < t.years(); ++y)
                if (drop(rng)) t.at(e, y).reset();
}

}  // namespace

TEST(LoadCsv, LongLayoutWithMissingCell) {
    const auto p = parse(
        "entity,year,indicator,value\n"
        "FR,2001,gdp,2.5\n"
        "FR,2000,gdp,1.5\n"
        "DE,2000,gdp,\n"
        "DE,2001,gdp,3\n"
        "DE,2000,co2,7\n");
    EXPECT_EQ(p.entities, (std::vector<std::string>{"FR", "DE"}));
    EXPECT_EQ(p.years, (std::vector<int>{2000, 2001}));
    ASSERT_EQ(p.indicators.size(), 2u);
    const auto& gdp = p.indicators.at("gdp");
    EXPECT_EQ(gdp.at(0, 0), 1.5);
    EXPECT_EQ(gdp.at(0, 1), 2.5);
    EXPECT_FALSE(gdp.at(1, 0).has_value());
    EXPECT_EQ(gdp.at(1, 1), 3.0);
    // co2 only reported for DE in 2000: three absent cells.
    EXPECT_EQ(p.indicators.at("co2").missing(), 3u);
    EXPECT_EQ(p.missing(), 4u);
}

TEST(LoadCsv, WideLayoutMatchesLong) {
    IngestSchema wide;
    wide.layout = CsvLayout::Wide;
    const auto w = parse(
        "entity,indicator,2000,2001\n"
        "FR,gdp,1.5,2.5\n"
        "DE,gdp,,3\n",
        wide);
    const auto l = parse(
        "entity,year,indicator,value\n"
        "FR,2000,gdp,1.5\n"
        "FR,2001,gdp,2.5\n"
        "DE,2000,gdp,\n"
        "DE,2001,gdp,3\n");
    EXPECT_EQ(w, l);
}

TEST(LoadCsv, CustomColumnNamesAndQuoting) {
    IngestSchema s;
    s.entity_column = "country";
    s.value_column = "v";
    const auto p = parse(
        "v,indicator,year,country\n"
        "1,gdp,2000,\"Korea, Rep.\"\n",
        s);
    EXPECT_EQ(p.entities.front(), "Korea, Rep.");
    EXPECT_EQ(p.indicators.at("gdp").at(0, 0), 1.0);
}

TEST(LoadCsv, DuplicateCellIsAConflict) {
    try {
        (void)parse(
            "entity,year,indicator,value\n"
            "FR,2000,gdp,1\n"
            "FR,2000,gdp,2\n");
        FAIL() << "expected ConflictError";
    } catch (const ConflictError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadCsv, MalformedInputReportsLine) {
    auto line_of = [](const std::string& text) -> std::size_t {
        try {
            (void)parse(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("entity,year,indicator,value\nFR,2000,gdp,1\nFR,20x1,gdp,1\n"), 3u);
    EXPECT_EQ(line_of("entity,year,indicator,value\nFR,2000,gdp,abc\n"), 2u);
    EXPECT_EQ(line_of("entity,year,indicator,value\nFR,2000,gdp\n"), 2u);
    EXPECT_EQ(line_of("entity,year,indicator,value\nFR,2000,gdp,\"1\n"), 2u);
    EXPECT_EQ(line_of("entity,indicator,value\nFR,gdp,1\n"), 1u);
    EXPECT_EQ(line_of("entity,year,indicator,value\n"), 1u);
    EXPECT_THROW((void)parse(""), ParseError);
}

TEST(LoadCsv, LongRoundTrip) {
    auto p = synthetic(6, 5, {"a", "b"}, 1);
    knock_out(p, 0.2, 2);
    std::ostringstream out;
    write_long_csv(out, p);
    EXPECT_EQ(parse(out.str()), p);
}

TEST(Imputation, TwoDonorWorkedExample) {
    EXPECT_DOUBLE_EQ(inverse_distance_fill({{0.0, 1.0}, {10.0, 3.0}}), 2.5);
}

TEST(Imputation, DonorRules) {
    EXPECT_DOUBLE_EQ(inverse_distance_fill({{4.0, 7.0}}), 4.0);
    EXPECT_DOUBLE_EQ(inverse_distance_fill({{4.0, 0.0}, {8.0, 0.0}, {100.0, 1.0}}), 6.0);
    EXPECT_THROW((void)inverse_distance_fill({}), DegenerateError);
}

TEST(Imputation, WorkedExampleThroughThePanel) {
    // Entity A is missing in 2001. B is at distance 1, C at distance 3 over
    // the 2000 coordinate (no standardisation).
    const auto p = parse(
        "entity,year,indicator,value\n"
        "A,2000,v,0\n"
        "A,2001,v,\n"
        "B,2000,v,1\n"
        "B,2001,v,0\n"
        "C,2000,v,3\n"
        "C,2001,v,10\n");
    ImputeOptions raw;
    raw.standardise = false;
    const Matrix d = entity_distances(p, raw);
    EXPECT_DOUBLE_EQ(d(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(d(0, 2), 3.0);
    ImputeReport report;
    const auto filled = impute(p, raw, &report);
    EXPECT_DOUBLE_EQ(*filled.indicators.at("v").at(0, 1), 2.5);
    EXPECT_EQ(report.cells_filled, 1u);
    EXPECT_EQ(report.donors_per_cell, (std::vector<std::size_t>{2}));
}

TEST(Imputation, ObservedCellsUnchangedAndIdempotent) {
    auto p = synthetic(10, 12, {"a", "b", "c"}, 5);
    knock_out(p, 0.2, 6);
    ASSERT_GT(p.missing(), 0u);
    const auto once = impute(p);
    EXPECT_EQ(once.missing(), 0u);
    for (const auto& [name, t] : p.indicators)
        for (std::size_t e = 0; e < t.entities(); ++e)
            for (std::size_t y = 0; y < t.years(); ++y)
                if (t.at(e, y)) EXPECT_EQ(once.indicators.at(name).at(e, y), t.at(e, y));
    ImputeReport report;
    EXPECT_EQ(impute(once, {}, &report), once);
    EXPECT_EQ(report.cells_filled, 0u);
}

TEST(Imputation, FillsStayWithinDonorRange) {
    auto p = synthetic(10, 8, {"a"}, 7);
    knock_out(p, 0.2, 8);
    const auto filled = impute(p);
    const auto& t = p.indicators.at("a");
    for (std::size_t y = 0; y < t.years(); ++y) {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t e = 0; e < t.entities(); ++e)
            if (t.at(e, y)) {
                lo = std::min(lo, *t.at(e, y));
                hi = std::max(hi, *t.at(e, y));
            }
        for (std::size_t e = 0; e < t.entities(); ++e) {
            const double v = *filled.indicators.at("a").at(e, y);
            EXPECT_GE(v, lo);
            EXPECT_LE(v, hi);
        }
    }
}

TEST(Imputation, UnobservedCoordinateIsAnError) {
    const auto p = parse(
        "entity,year,indicator,value\n"
        "A,2000,v,1\n"
        "A,2001,v,\n"
        "B,2000,v,2\n"
        "B,2001,v,\n");
    try {
        (void)impute(p);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("2001"), std::string::npos);
    }
}

TEST(Aggregation, MeanOverTargetIndicators) {
    IngestSchema s;
    s.targets = {{"a", "T"}, {"b", "T"}, {"c", "U"}};
    const auto p = parse(
        "entity,year,indicator,value\n"
        "X,2000,a,1\n"
        "X,2000,b,3\n"
        "X,2000,c,5\n"
        "Y,2000,a,\n"
        "Y,2000,b,4\n"
        "Y,2000,c,\n",
        s);
    const auto agg = aggregate_to_targets(p);
    ASSERT_EQ(agg.indicators.size(), 2u);
    EXPECT_EQ(agg.indicators.at("T").at(0, 0), 2.0);
    EXPECT_EQ(agg.indicators.at("T").at(1, 0), 4.0);
    EXPECT_EQ(agg.indicators.at("U").at(0, 0), 5.0);
    EXPECT_FALSE(agg.indicators.at("U").at(1, 0).has_value());
}

TEST(Aggregation, InvariantToIndicatorOrder) {
    IngestSchema s;
    s.targets = {{"a", "T"}, {"b", "T"}, {"c", "T"}};
    const std::string rows[] = {"E,2000,a,1.25\n", "E,2000,b,-3.5\n", "E,2000,c,9\n"};
    const auto forward = parse("entity,year,indicator,value\n" + rows[0] + rows[1] + rows[2], s);
    const auto backward = parse("entity,year,indicator,value\n" + rows[2] + rows[1] + rows[0], s);
    EXPECT_EQ(aggregate_to_targets(forward), aggregate_to_targets(backward));
}

TEST(Aggregation, UnmappedIndicatorIsAConfigError) {
    IngestSchema s;
    s.targets = {{"a", "T"}};
    const auto p = parse("entity,year,indicator,value\nE,2000,a,1\nE,2000,b,2\n", s);
    EXPECT_THROW((void)aggregate_to_targets(p), ConfigError);
}

namespace {

RawPanel grouped(std::size_t in_a, std::size_t in_b, std::size_t years) {
    auto p = synthetic(in_a + in_b, years, {"i1", "i2", "i3"}, 11);
    p.indicator_target = {{"i1", "T1"}, {"i2", "T1"}, {"i3", "T2"}};
    for (std::size_t e = 0; e < in_a + in_b; ++e) p.entity_group[p.entities[e]] = e < in_a ? "A" : "B";
    return p;
}

}  // namespace

TEST(Panels, TwoSampleShapes) {
    const auto agg = aggregate_to_targets(grouped(30, 55, 20));
    const auto sel = to_two_sample_panels(agg, "T1", "A", "B");
    EXPECT_EQ(sel.x.realisations(), 30u);
    EXPECT_EQ(sel.y.realisations(), 55u);
    EXPECT_EQ(sel.x.time_points(), 20u);
    EXPECT_EQ(sel.y.time_points(), 20u);
    EXPECT_EQ(sel.x.grid().front(), 2000.0);
    EXPECT_EQ(sel.x_entities.front(), "e0");
    EXPECT_EQ(sel.y_entities.front(), "e30");
}

TEST(Panels, IndependenceRowsAreAligned) {
    const auto agg = aggregate_to_targets(grouped(20, 29, 20));
    const auto sel = to_independence_panels(agg, "T1", "T2");
    EXPECT_EQ(sel.x.realisations(), 49u);
    EXPECT_EQ(sel.y.realisations(), 49u);
    EXPECT_EQ(sel.x.time_points(), 20u);
    EXPECT_EQ(sel.x_entities, sel.y_entities);
    for (std::size_t e = 0; e < 49; ++e)
        EXPECT_EQ(sel.y.values()(static_cast<Eigen::Index>(e), 3), *agg.indicators.at("T2").at(e, 3));
}

TEST(Panels, GroupsNeedTwoEntities) {
    const auto agg = aggregate_to_targets(grouped(1, 5, 4));
    EXPECT_THROW((void)to_two_sample_panels(agg, "T1", "A", "B"), SampleSizeError);
    EXPECT_THROW((void)to_two_sample_panels(agg, "T1", "B", "missing"), SampleSizeError);
}

TEST(Panels, IncompletePanelMustBeImputedFirst) {
    auto p = grouped(4, 4, 5);
    p.indicators.at("i3").at(2, 2).reset();
    const auto agg = aggregate_to_targets(p);
    EXPECT_THROW((void)to_independence_panels(agg, "T1", "T2"), InputError);
    EXPECT_THROW((void)to_two_sample_panels(agg, "nope", "A", "B"), InputError);
}

TEST(Panels, AggregationCommutesWithGroupSelection) {
    auto p = grouped(6, 7, 5);
    knock_out(p, 0.15, 3);
    std::vector<std::string> group_b;
    for (const auto& [entity, g] : p.entity_group)
        if (g == "B") group_b.push_back(entity);
    EXPECT_EQ(aggregate_to_targets(p).select_entities(group_b), aggregate_to_targets(p.select_entities(group_b)));
}

TEST(PanelCsv, RoundTripWithLabels) {
    Matrix v(2, 3);
    v << 0.1, 1.0 / 3.0, -2e-300, 5.0, 6.0, 1e300;
    const SamplePanel panel(v, {2000.0, 2001.0, 2002.0});
    std::ostringstream out;
    write_panel_csv(out, panel, {"a", "b"});
    std::istringstream in(out.str());
    const auto back = read_panel_csv(in);
    EXPECT_EQ(back.panel.values(), v);
    EXPECT_EQ(back.panel.grid(), panel.grid());
    EXPECT_EQ(back.labels, (std::vector<std::string>{"a", "b"}));
}
