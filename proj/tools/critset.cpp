// Command-line front-end: run scenarios, validate them, or compute a single
// criticality score.  Exit codes: 0 success, 2 invalid input, 3 numerical
// failure.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "critset/scenario.hpp"

namespace {

critset::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw critset::validation_error("cannot open scenario file '" + path + "'");
    critset::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw critset::validation_error(std::string("scenario is not valid JSON: ") + e.what());
    }
    return doc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critset: projective-cocycle experiments for plane diffeomorphisms"};
    app.require_subcommand(1);

    std::string scenario_path;
    auto* run = app.add_subcommand("run", "run a scenario and write its outputs");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "validate a scenario without running it");
    validate->add_option("scenario", validate_path, "scenario JSON file")->required();

    std::string family = "henon";
    double a = 1.4, b = 0.3, x = 0.0, y = 0.0;
    long long window = 10;
    auto* score = app.add_subcommand("score", "criticality score at a single point");
    score->add_option("--map", family, "map family (only 'henon')");
    score->add_option("--a", a, "Henon a parameter")->required();
    score->add_option("--b", b, "Henon b parameter")->required();
    score->add_option("--x", x, "point x")->required();
    score->add_option("--y", y, "point y")->required();
    score->add_option("--window", window, "symmetric iterate window")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*validate) {
            critset::parse_scenario(load_json(validate_path));
            std::cout << "ok\n";
            return 0;
        }
        if (*run) {
            const critset::Scenario sc = critset::parse_scenario(load_json(scenario_path));
            const critset::RunOutcome out = critset::run_scenario(sc);
            for (const auto& f : out.files) std::cout << f.string() << "\n";
            for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
            return out.exit_code;
        }
        if (*score) {
            if (family != "henon") throw critset::validation_error("unsupported map family");
            if (b == 0.0) throw critset::validation_error("b must be nonzero");
            const critset::MapDef map = critset::MapDef::henon(a, b);
            const critset::CriticalityReport rep =
                critset::criticality_score(map, {x, y}, window);
            std::cout << "score " << critset::detail::fmt_double(rep.score) << "\n"
                      << "theta " << critset::detail::fmt_double(rep.best_direction.theta) << "\n";
            return 0;
        }
    } catch (const critset::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const critset::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
