// bandlab: run one Monte-Carlo experiment and write its CSV (and plot).
//
//   bandlab circlaw --n 256 --w 16 --profile block --dist rademacher --out circ.csv --plot circ.png
//
// The run summary (config echo, aggregates, check pass fractions) goes to
// stdout as JSON.

#include "bandlab/experiments.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args.front() == "--help" || args.front() == "-h") {
        std::cerr << "usage: bandlab <circlaw|locallaw|singcount|leastsing|replacement|normcond|mc>\n"
                     "         --n INT --w INT --profile {block|circulant|explicit} [--f {indicator|gauss}]\n"
                     "         [--profile-csv PATH] --dist {gaussian|cgaussian|uniform|rademacher}\n"
                     "         --z-re F --z-im F --trials INT --seed INT\n"
                     "         [--eta-min F --eta-max F --eta-points INT] [--gamma0 F --kappa F --radius F]\n"
                     "         [--epsilon F --eps-report F --grid-points INT --spot-pairs INT --serial]\n"
                     "         [--config PATH.json] --out PATH.csv [--plot PATH.png]\n";
        return args.empty() ? 2 : 0;
    }
    try {
        const auto cfg = bandlab::parse_cli(args);
        const auto report = bandlab::run(cfg);
        if (!cfg.out.empty()) bandlab::emit_csv(report, cfg.out);
        if (!cfg.plot.empty()) bandlab::emit_plot(report, cfg.plot);
        std::cout << report.summary_json().dump(2) << '\n';
    } catch (const bandlab::UsageError& e) {
        std::cerr << "bandlab: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "bandlab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
