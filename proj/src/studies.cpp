#include <dampwave/studies.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

namespace dampwave {

namespace {

struct FinalField {
    WaveState state;
    double dt = 0.0;
};

FinalField final_field(const Scenario& sc, double dx) {
    SolverConfig config = sc.solver;
    config.dx = dx;
    config.mode = sc.mode;
    config.record_stride = std::max<std::size_t>(1, config.step_count());
    auto trace = run(sc.initial_data(), sc.profile(), config, std::nullopt);
    return {std::move(trace.final_state), trace.dt};
}

// Value of the field at physical position x, zero outside the stored grid.
double value_at(const WaveState& s, double x) {
    const double pos = static_cast<double>(s.origin) + x / s.dx;
    const long i = std::lround(pos);
    if (i < 0 || static_cast<std::size_t>(i) >= s.u_curr.size()) return 0.0;
    return s.u_curr[static_cast<std::size_t>(i)];
}

} // namespace

ConvergenceTable convergence_study(const Scenario& sc, std::size_t levels) {
    if (levels < 3) throw std::invalid_argument("a convergence study needs at least 3 levels");
    ConvergenceTable table;
    table.checkpoint = sc.solver.t_final;
    const double finest = sc.solver.dx / std::ldexp(1.0, static_cast<int>(levels - 1));
    table.reference_dx = finest / 4.0;
    const auto reference = final_field(sc, table.reference_dx);

    for (std::size_t k = 0; k < levels; ++k) {
        const double dx = sc.solver.dx / std::ldexp(1.0, static_cast<int>(k));
        const auto level = final_field(sc, dx);
        const auto& s = level.state;
        // Every node that either grid can reach; beyond both the fields vanish.
        const std::size_t last = s.u_curr.size() - 1;
        double sum = 0.0;
        for (std::size_t j = 0; j <= last; ++j) {
            const double x = s.x(j);
            const double d = s.u_curr[j] - value_at(reference.state, x);
            sum += d * d;
        }
        ConvergenceLevel row;
        row.dx = dx;
        row.dt = level.dt;
        row.error = std::sqrt(sum * dx);
        if (!table.levels.empty() && row.error > 0.0)
            row.order = std::log2(table.levels.back().error / row.error);
        table.levels.push_back(row);
    }
    return table;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter, const std::vector<double>& values,
                            unsigned threads) {
    {
        Scenario probe = base;
        set_parameter(probe, parameter, 1.0); // rejects unknown names before any work
    }
    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            SweepRow& row = rows[i];
            row.value = values[i];
            try {
                Scenario sc = base;
                set_parameter(sc, parameter, values[i]);
                sc.name = base.name + "[" + parameter + "=" + nlohmann::json(values[i]).dump() + "]";
                auto result = run_scenario(sc);
                row.ok = true;
                row.checks_pass = result.checks_pass;
                const auto& fit = result.summary["rate_fit"];
                if (fit.is_object()) row.alpha = fit["alpha"].get<double>();
                row.summary = std::move(result.summary);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
    std::string out = "parameter,value,status,alpha,checks_pass,error\n";
    char buf[64];
    for (const auto& r : rows) {
        out += parameter;
        std::snprintf(buf, sizeof buf, ",%.17g,", r.value);
        out += buf;
        out += r.ok ? "ok," : "failed,";
        if (r.alpha) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.alpha);
            out += buf;
        } else {
            out += "nan";
        }
        out += r.checks_pass ? ",true," : ",false,";
        std::string msg = r.error;
        for (char& c : msg)
            if (c == ',' || c == '\n') c = ';';
        out += msg;
        out += '\n';
    }
    return out;
}

} // namespace dampwave
