#include <doctest.h>

#include <sstream>

#include "plugcast/error.hpp"
#include "plugcast/ingest.hpp"
#include "support.hpp"

using namespace plugcast;
using plugcast::test::make_event;

namespace {

const char* kHeader =
    "event_id,charge_point_id,connector,start_date,start_time,end_date,end_time,energy,organization\n";

ParsedEvents parse(const std::string& text, const ColumnMapping& m = {}) {
    std::istringstream in(text);
    return parse_events(in, m);
}

ChargingEvent with_duration(std::int64_t minutes) {
    const Timestamp s = make_timestamp(2017, 5, 1, 8, 0);
    return make_event("x", s, s + std::chrono::minutes{minutes});
}

}  // namespace

TEST_CASE("header-only file gives no events and zero counts") {
    const auto r = parse(kHeader);
    CHECK(r.events.empty());
    CHECK(r.report == IngestReport{});
}

TEST_CASE("blank connector defaults to 1") {
    const auto r = parse(std::string(kHeader) + "e1,cp1,,2017-03-01,09:00,2017-03-01,10:00,4.5,org\n"
                                                "e2,cp1,NaN,2017-03-01,09:00,2017-03-01,10:00,4.5,org\n");
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].connector == 1);
    CHECK(r.events[1].connector == 1);
    CHECK(r.report.connector_defaulted == 2);
}

TEST_CASE("duration is end minus start") {
    const auto r = parse(std::string(kHeader) + "e1,cp1,2,2017-03-01,09:00,2017-03-01,10:30,1.0,org\n");
    REQUIRE(r.events.size() == 1);
    const auto& e = r.events[0];
    CHECK(e.duration_minutes == 90);
    CHECK(e.connector == 2);
    CHECK(e.start == make_timestamp(2017, 3, 1, 9, 0));
    CHECK(e.charge_point_id == std::optional<std::string>("cp1"));
    CHECK(e.energy_kwh == doctest::Approx(1.0));
    CHECK(e.organization == "org");
}

TEST_CASE("malformed rows are counted and dropped, order preserved") {
    const auto r = parse(std::string(kHeader) +
                         "a,cp,1,2017-03-01,09:00,2017-03-01,10:00,1,o\n"
                         "b,cp,1,2017-13-01,09:00,2017-03-01,10:00,1,o\n"  // bad month
                         "c,cp,1,2017-03-01,09:00,2017-03-01,08:00,1,o\n"  // end before start
                         "d,cp,0,2017-03-01,09:00,2017-03-01,10:00,1,o\n"  // connector < 1
                         "e,cp,1,2017-03-01,09:00,2017-03-01,10:00,-1,o\n" // negative energy
                         "f,cp,1,2017-03-01\n"                              // short row
                         "g,,1,2017-03-02,09:00,2017-03-02,09:00,,o\n");
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].event_id == "a");
    CHECK(r.events[1].event_id == "g");
    CHECK_FALSE(r.events[1].charge_point_id.has_value());
    CHECK(r.events[1].duration_minutes == 0);
    CHECK(r.report.malformed == 5);
    CHECK(r.report.accepted == 2);
}

TEST_CASE("missing mapped column names the column") {
    try {
        (void)parse("event_id,connector,start_date,start_time,end_date\n");
        FAIL("expected schema error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::schema);
        CHECK(std::string(e.what()).find("end_time") != std::string::npos);
    }
}

TEST_CASE("custom column mapping and date format") {
    ColumnMapping m;
    m.event_id = "Session";
    m.charge_point_id = "";
    m.connector = "Plug";
    m.start_date = "Start Date";
    m.start_time = "Start Time";
    m.end_date = "End Date";
    m.end_time = "End Time";
    m.energy = "";
    m.organization = "";
    m.date_format = "DD/MM/YYYY";
    const auto r = parse("Session,Plug,Start Date,Start Time,End Date,End Time\n"
                         "s1,1,31/12/2017,23:30,01/01/2018,00:15\n",
                         m);
    REQUIRE(r.events.size() == 1);
    CHECK(r.events[0].duration_minutes == 45);
    CHECK_FALSE(r.events[0].charge_point_id.has_value());
}

TEST_CASE("unreadable stream is an io error") {
    std::istringstream in;
    in.setstate(std::ios::badbit);
    try {
        (void)parse_events(in, {});
        FAIL("expected io error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::io);
    }
}

TEST_CASE("parse is deterministic") {
    const std::string text = std::string(kHeader) + "a,cp,,2017-03-01,09:00,2017-03-01,10:00,1,o\n"
                                                    "b,cp,1,bad,09:00,2017-03-01,10:00,1,o\n";
    const auto a = parse(text);
    const auto b = parse(text);
    CHECK(a.events == b.events);
    CHECK(a.report == b.report);
}

TEST_CASE("overlong cutoff is strict") {
    const std::vector<ChargingEvent> events{with_duration(10080), with_duration(10081)};
    const auto f = filter_overlong(events);
    REQUIRE(f.events.size() == 1);
    CHECK(f.events[0].duration_minutes == 10080);
    CHECK(f.removed == 1);

    const auto none = filter_overlong(std::vector<ChargingEvent>{});
    CHECK(none.events.empty());
    CHECK(none.removed == 0);
}

TEST_CASE("filter is idempotent and conserves counts") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ChargingEvent> events;
        const auto n = rng.below(40);
        for (std::uint64_t i = 0; i < n; ++i)
            events.push_back(with_duration(static_cast<std::int64_t>(rng.below(20000))));
        const std::int64_t cutoff = static_cast<std::int64_t>(rng.below(15000));
        const auto once = filter_overlong(events, cutoff);
        const auto twice = filter_overlong(once.events, cutoff);
        CHECK(twice.events == once.events);
        CHECK(twice.removed == 0);
        CHECK(events.size() == once.events.size() + once.removed);
    }
}

TEST_CASE("ingest report adds up to the data rows") {
    std::istringstream in(std::string(kHeader) +
                          "a,cp,1,2017-03-01,09:00,2017-03-01,10:00,1,o\n"
                          "b,cp,1,2017-03-01,09:00,2017-03-09,10:00,1,o\n"
                          "c,cp,1,2017-03-01,09:00,2017-03-08,09:00,1,o\n"
                          "d,cp,x,2017-03-01,09:00,2017-03-01,10:00,1,o\n");
    const auto r = ingest(in, {});
    CHECK(r.report.accepted == 2);
    CHECK(r.report.rejected_overlong == 1);
    CHECK(r.report.malformed == 1);
    CHECK(r.report.total() == 4);
}

TEST_CASE("written events parse back identically") {
    std::vector<ChargingEvent> events{make_event("a,1", make_timestamp(2017, 1, 2, 3, 4), make_timestamp(2017, 1, 3, 0, 0)),
                                      make_event("b", make_timestamp(2017, 6, 30, 23, 59), make_timestamp(2017, 7, 1, 0, 1))};
    events[0].energy_kwh = 12.25;
    events[1].charge_point_id.reset();
    events[1].connector = 3;
    std::ostringstream out;
    write_events_csv(out, events);
    const auto back = parse(out.str());
    CHECK(back.events == events);
}
