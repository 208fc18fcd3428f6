#include "cnls/acceptance.hpp"
#include "cnls/errors.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"acceptance criteria 1-15"};
    std::string config, out;
    int jobs = 0;
    app.add_option("--config", config, "config file (default: built-in reference problem)");
    app.add_option("--out", out, "artifact directory");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    try {
        cnls::RunConfig cfg = config.empty() ? cnls::default_config() : cnls::load_config(config);
        if (jobs > 0) cfg.jobs = jobs;
        cnls::AcceptanceRun run = cnls::run_acceptance(cfg, out, &std::cerr);
        for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
        cnls::write_acceptance_summary(std::cout, run);
        for (const auto& c : run.criteria)
            if (!c.pass()) {
                std::cout << "\ncriterion " << c.id << " checks:\n";
                std::vector<cnls::CheckReport> all = c.reports;
                all.insert(all.end(), c.runtime.begin(), c.runtime.end());
                cnls::write_reports_table(std::cout, all);
            }
        return run.all_pass() ? 0 : 1;
    } catch (const cnls::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}
