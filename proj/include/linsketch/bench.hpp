#pragma once

#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linsketch/apps.hpp"
#include "linsketch/deamortize.hpp"
#include "linsketch/sketch.hpp"
#include "linsketch/stream.hpp"

namespace linsketch {

struct EngineStats {
    std::string name;
    std::uint64_t max_update_steps = 0;
    double mean_update_steps = 0;
    std::uint64_t flush_steps = 0;
    std::uint64_t wall_ns = 0;
};

struct BenchReport {
    std::vector<EngineStats> engines;
    bool counters_match = true;
    std::size_t queries = 0;
    std::size_t query_mismatches = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["counters_match"] = counters_match;
        j["queries"] = queries;
        j["query_mismatches"] = query_mismatches;
        j["engines"] = nlohmann::json::array();
        for (const auto& e : engines) {
            j["engines"].push_back({{"name", e.name},
                                    {"max_update_steps", e.max_update_steps},
                                    {"mean_update_steps", e.mean_update_steps},
                                    {"flush_steps", e.flush_steps},
                                    {"wall_ns", e.wall_ns}});
        }
        return j;
    }
};

struct BenchOptions {
    bool run_naive = true;
    bool run_buffered = true;
    std::size_t query_every = 0;  // 0: no interleaved queries
    FlushPlan plan;
};

/// Runs the requested engines over the stream, cross-checks final counters,
/// and optionally interleaves counter-snapshot queries. Step counts come from
/// the word-operation instrumentation; wall clock is secondary.
inline BenchReport run_bench(const std::vector<UpdateRecord>& stream,
                             const SketchConfig& cfg,
                             const BenchOptions& opt = {}) {
    BenchReport rep;
    std::vector<std::uint64_t> naive_final, buffered_final;

    SketchState oracle(cfg);  // maintained for interleaved query checks
    bool need_oracle = opt.query_every > 0 && opt.run_buffered;

    if (opt.run_naive) {
        SketchState st(cfg);
        EngineStats es;
        es.name = "naive";
        auto t0 = std::chrono::steady_clock::now();
        std::uint64_t total = 0;
        for (const auto& upd : stream) {
            OpCounter oc;
            st.naive_update(upd, &oc);
            std::uint64_t c = oc.total();
            total += c;
            es.max_update_steps = std::max(es.max_update_steps, c);
        }
        auto t1 = std::chrono::steady_clock::now();
        es.mean_update_steps = stream.empty() ? 0 : double(total) / stream.size();
        es.wall_ns = std::uint64_t(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count());
        rep.engines.push_back(es);
        naive_final = st.counters_snapshot();
    }

    if (opt.run_buffered) {
        BufferedSketch bs(cfg, opt.plan);
        EngineStats es;
        es.name = "buffered";
        auto t0 = std::chrono::steady_clock::now();
        std::size_t i = 0;
        for (const auto& upd : stream) {
            bs.buffered_update(upd);
            if (need_oracle) {
                oracle.naive_update(upd);
                if (++i % opt.query_every == 0) {
                    ++rep.queries;
                    auto snap = bs.buffered_query(
                        [](const SketchState& s) {
                            return s.counters_snapshot();
                        });
                    if (snap != oracle.counters_snapshot())
                        ++rep.query_mismatches;
                }
            }
        }
        auto final_snap = bs.buffered_query(
            [](const SketchState& s) { return s.counters_snapshot(); });
        auto t1 = std::chrono::steady_clock::now();
        auto acct = bs.step_accounting();
        es.max_update_steps = acct.max_steps_per_update;
        es.flush_steps = acct.flush_total_steps;
        es.mean_update_steps =
            stream.empty() ? 0 : double(acct.flush_total_steps) / stream.size();
        es.wall_ns = std::uint64_t(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)
                .count());
        rep.engines.push_back(es);
        buffered_final = std::move(final_snap);
    }

    if (opt.run_naive && opt.run_buffered)
        rep.counters_match = naive_final == buffered_final;
    rep.counters_match = rep.counters_match && rep.query_mismatches == 0;
    return rep;
}

/// Report emission; bit-stable for identical reports.
inline void emit_report(const BenchReport& rep, const std::string& format,
                        std::ostream& os) {
    if (format == "json") {
        os << rep.to_json().dump(2) << '\n';
    } else if (format == "csv") {
        os << "engine,max_steps,mean_steps,wall_ns,match\n";
        for (const auto& e : rep.engines) {
            os << e.name << ',' << e.max_update_steps << ','
               << e.mean_update_steps << ',' << e.wall_ns << ','
               << (rep.counters_match ? "true" : "false") << '\n';
        }
    } else {
        throw std::invalid_argument("emit_report: unknown format " + format);
    }
}

}  // namespace linsketch
