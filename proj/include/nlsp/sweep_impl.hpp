#pragma once

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "nlsp/scenario.hpp"

namespace nlsp {

namespace detail {

inline std::size_t sweep_pool_size(std::size_t cells) {
    std::size_t cap = std::thread::hardware_concurrency();
    if (cap == 0) cap = 1;
    if (const char* env = std::getenv("NLSP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) cap = static_cast<std::size_t>(v);
    }
    return std::min(cap, std::max<std::size_t>(cells, 1));
}

}  // namespace detail

// Runs one independent cell per value; a throwing cell is recorded, not fatal.
inline std::vector<ExperimentReport> sweep(const ScenarioSpec& base, const std::string& key,
                                           const std::vector<double>& values,
                                           const std::string& out_dir) {
    std::vector<ExperimentReport> reports(values.size());
    if (values.empty()) return reports;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            ScenarioSpec cell = base;
            try {
                set_sweep_parameter(cell, key, values[i]);
                cell.output.prefix = base.output.prefix + "_cell" + std::to_string(i);
                reports[i] = run_scenario(cell, out_dir);
            } catch (const std::exception& e) {
                reports[i].spec = cell;
                reports[i].error = e.what();
            }
        }
    };

    const std::size_t pool = detail::sweep_pool_size(values.size());
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (std::size_t p = 0; p < pool; ++p) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream out(out_dir + "/" + base.output.prefix + "_sweep.csv");
        out << "cell,param,value,status,t_final,bracket_lo,bracket_hi,error\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            const ExperimentReport& r = reports[i];
            out << i << ',' << key << ',' << detail::fmt17(values[i]) << ','
                << (r.ran ? to_string(r.outcome.status) : "error") << ','
                << (r.ran ? detail::fmt17(r.outcome.t_final) : "") << ','
                << (r.ran && r.outcome.status == RunStatus::blow_up_detected
                        ? detail::fmt17(r.outcome.bracket_lo)
                        : "")
                << ','
                << (r.ran && r.outcome.status == RunStatus::blow_up_detected
                        ? detail::fmt17(r.outcome.bracket_hi)
                        : "")
                << ',' << r.error << '\n';
        }
    }
    return reports;
}

}  // namespace nlsp
