#ifndef CRITSET_SCENARIO_HPP
#define CRITSET_SCENARIO_HPP

// Scenario-driven experiment runner: JSON scenario in, CSV + JSON reports
// and a run manifest out.  Byte-identical CSV bodies for identical scenario
// and seed are the reproducibility contract, so all numeric formatting uses
// shortest round-trip decimals and all reductions are ordered by item index.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "critset/critset.hpp"

namespace critset {

using nlohmann::json;

inline constexpr const char* kArtifactVersion = "0.1.0";

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

inline void require_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw validation_error("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return obj.at(key).get<T>();
}

inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Deterministic data-parallel map: item i writes slot i, so the merged
// result is independent of the number of workers and completion order.
template <class F>
void parallel_for(size_t n, int threads, F&& f) {
    if (threads <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            f(i);
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(threads, static_cast<int>(n));
    pool.reserve(static_cast<size_t>(count));
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline MapDef parse_map(const json& spec) {
    if (!spec.is_object()) throw validation_error("map spec must be an object");
    detail::require_keys(spec, {"family", "a", "b", "matrix", "parts", "escape_radius"}, "map");
    if (!spec.contains("family")) throw validation_error("map spec missing 'family'");
    const std::string family = spec.at("family").get<std::string>();
    const double radius = detail::get_or(spec, "escape_radius", 1e6);
    if (!(radius > 0)) throw validation_error("escape_radius must be positive");
    if (family == "henon") {
        if (!spec.contains("a") || !spec.contains("b"))
            throw validation_error("henon map requires 'a' and 'b'");
        const double b = spec.at("b").get<double>();
        if (b == 0.0) throw validation_error("henon map requires b != 0 (no inverse)");
        return MapDef::henon(spec.at("a").get<double>(), b, radius);
    }
    if (family == "linear") {
        if (!spec.contains("matrix")) throw validation_error("linear map requires 'matrix'");
        const json& m = spec.at("matrix");
        if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 ||
            !m[1].is_array() || m[1].size() != 2)
            throw validation_error("'matrix' must be a 2x2 row-major array");
        const Mat2 mat{m[0][0].get<double>(), m[0][1].get<double>(), m[1][0].get<double>(),
                       m[1][1].get<double>()};
        if (std::abs(mat.det()) < kDetFloor)
            throw validation_error("linear map matrix is not invertible");
        return MapDef::linear(mat, radius);
    }
    if (family == "composed") {
        if (!spec.contains("parts") || !spec.at("parts").is_array() || spec.at("parts").empty())
            throw validation_error("composed map requires a non-empty 'parts' array");
        std::vector<MapDef> parts;
        for (const json& part : spec.at("parts")) parts.push_back(parse_map(part));
        return MapDef::composed(std::move(parts), radius);
    }
    throw validation_error("unknown map family '" + family + "'");
}

enum class Experiment { Score, Scan, FarFromHomothety, Domination, Manifolds, FirstTangency, Pliss };

struct Scenario {
    json raw;
    Experiment experiment = Experiment::Score;
    json map_spec;  // absent for pliss / first_tangency
    json params;
    std::filesystem::path output_dir;
    bool write_csv = true;
    bool write_json = true;
    long long seed = 0;
    int threads = 0;  // 0 = Auto
};

inline Experiment parse_experiment(const std::string& name) {
    if (name == "score") return Experiment::Score;
    if (name == "scan") return Experiment::Scan;
    if (name == "far_from_homothety") return Experiment::FarFromHomothety;
    if (name == "domination") return Experiment::Domination;
    if (name == "manifolds") return Experiment::Manifolds;
    if (name == "first_tangency") return Experiment::FirstTangency;
    if (name == "pliss") return Experiment::Pliss;
    throw validation_error("unknown experiment '" + name + "'");
}

// Full validation before any computation.
inline Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw validation_error("scenario must be a JSON object");
    detail::require_keys(doc, {"map", "experiment", "params", "output", "seed", "threads"},
                         "scenario");
    Scenario sc;
    sc.raw = doc;
    if (!doc.contains("experiment")) throw validation_error("scenario missing 'experiment'");
    sc.experiment = parse_experiment(doc.at("experiment").get<std::string>());
    const bool needs_map =
        sc.experiment != Experiment::Pliss && sc.experiment != Experiment::FirstTangency;
    if (needs_map) {
        if (!doc.contains("map")) throw validation_error("scenario missing 'map'");
        sc.map_spec = doc.at("map");
        parse_map(sc.map_spec);  // validate now
    }
    sc.params = detail::get_or(doc, "params", json::object());
    if (!sc.params.is_object()) throw validation_error("'params' must be an object");
    const json out = detail::get_or(doc, "output", json::object());
    detail::require_keys(out, {"directory", "csv", "json"}, "output");
    sc.output_dir = detail::get_or<std::string>(out, "directory", "critset-out");
    sc.write_csv = detail::get_or(out, "csv", true);
    sc.write_json = detail::get_or(out, "json", true);
    sc.seed = detail::get_or<long long>(doc, "seed", 0);
    if (doc.contains("threads")) {
        const json& t = doc.at("threads");
        if (t.is_string()) {
            if (t.get<std::string>() != "auto")
                throw validation_error("'threads' must be an integer or \"auto\"");
            sc.threads = 0;
        } else {
            sc.threads = t.get<int>();
            if (sc.threads < 0) throw validation_error("'threads' must be non-negative");
        }
    }

    // per-experiment parameter validation
    const auto& p = sc.params;
    switch (sc.experiment) {
        case Experiment::Score:
            detail::require_keys(p, {"x", "y", "window", "grid", "refine_tol"}, "params");
            for (const char* k : {"x", "y", "window"})
                if (!p.contains(k)) throw validation_error(std::string("score params missing '") + k + "'");
            break;
        case Experiment::Scan:
            detail::require_keys(p, {"region", "grid", "window", "threshold", "direction_grid"},
                                 "params");
            for (const char* k : {"region", "grid", "window", "threshold"})
                if (!p.contains(k)) throw validation_error(std::string("scan params missing '") + k + "'");
            if (!p.at("region").is_array() || p.at("region").size() != 4)
                throw validation_error("'region' must be [x_lo, x_hi, y_lo, y_hi]");
            break;
        case Experiment::FarFromHomothety:
            detail::require_keys(p, {"x", "y", "delta", "horizon"}, "params");
            for (const char* k : {"x", "y", "delta", "horizon"})
                if (!p.contains(k))
                    throw validation_error(std::string("far_from_homothety params missing '") + k + "'");
            break;
        case Experiment::Domination:
            detail::require_keys(
                p, {"region", "grid", "window", "N", "delta", "m_horizon", "transport_horizon"},
                "params");
            for (const char* k : {"region", "grid", "N", "delta", "m_horizon"})
                if (!p.contains(k))
                    throw validation_error(std::string("domination params missing '") + k + "'");
            break;
        case Experiment::Manifolds:
            detail::require_keys(p,
                                 {"budget_unstable", "budget_stable", "max_gap", "curvature_tol",
                                  "domain", "period", "region", "grid"},
                                 "params");
            break;
        case Experiment::FirstTangency:
            detail::require_keys(
                p, {"b", "a_lo", "a_hi", "tol", "budget_unstable", "budget_stable", "max_gap"},
                "params");
            for (const char* k : {"b", "a_lo", "a_hi", "tol"})
                if (!p.contains(k))
                    throw validation_error(std::string("first_tangency params missing '") + k + "'");
            if (p.at("b").get<double>() == 0.0)
                throw validation_error("first_tangency requires b != 0 (no inverse)");
            break;
        case Experiment::Pliss:
            detail::require_keys(p, {"sequence", "gamma0", "gamma1", "bound_a"}, "params");
            for (const char* k : {"sequence", "gamma0", "gamma1", "bound_a"})
                if (!p.contains(k)) throw validation_error(std::string("pliss params missing '") + k + "'");
            if (!p.at("sequence").is_array() || p.at("sequence").empty())
                throw validation_error("'sequence' must be a non-empty array");
            break;
    }
    return sc;
}

struct RunOutcome {
    int exit_code = 0;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

namespace detail {

struct StageTimer {
    json& stages;
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    StageTimer(json& stages, std::string name) : stages(stages), name(std::move(name)) {}
    ~StageTimer() {
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        stages[name] = s;
    }
};

inline int resolve_threads(const Scenario& sc) {
    if (const char* env = std::getenv("CRITSET_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    if (sc.threads > 0) return sc.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

inline json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

}  // namespace detail

// Runs a validated scenario and writes results.csv, report.json and
// manifest.json into the output directory.  Exit code 0 on success, 3 on
// numerical failure (all samples escaped, invalid bracket); partial outputs
// are removed on failure.
inline RunOutcome run_scenario(const Scenario& sc) {
    namespace fs = std::filesystem;
    RunOutcome out;
    const auto t_start = std::chrono::steady_clock::now();
    json stages = json::object();
    json report = json::object();
    std::string csv;
    const int threads = detail::resolve_threads(sc);
    const auto& p = sc.params;

    auto region_samples = [&](int grid) {
        const auto r = p.at("region");
        const Box box{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                      r[3].get<double>()};
        std::vector<Vec2> samples;
        samples.reserve(static_cast<size_t>(grid) * grid);
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j)
                samples.push_back({box.x_lo + (box.x_hi - box.x_lo) * (i + 0.5) / grid,
                                   box.y_lo + (box.y_hi - box.y_lo) * (j + 0.5) / grid});
        return samples;
    };

    try {
        switch (sc.experiment) {
            case Experiment::Score: {
                detail::StageTimer timer(stages, "score");
                const MapDef map = parse_map(sc.map_spec);
                const Vec2 pt{p.at("x").get<double>(), p.at("y").get<double>()};
                const long long window = p.at("window").get<long long>();
                const int grid = detail::get_or(p, "grid", 720);
                const double refine_tol = detail::get_or(p, "refine_tol", 1e-6);
                const CriticalityReport rep = criticality_score(map, pt, window, grid, refine_tol);
                report = {{"x", rep.base.x},
                          {"y", rep.base.y},
                          {"window", rep.window},
                          {"score", rep.score},
                          {"theta_best", rep.best_direction.theta},
                          {"forward_score", rep.forward_score},
                          {"backward_score", rep.backward_score},
                          {"profile", rep.profile}};
                csv = "x,y,score,theta_best,fwd_score,bwd_score\n";
                csv += detail::fmt_double(rep.base.x) + "," + detail::fmt_double(rep.base.y) + "," +
                       detail::fmt_double(rep.score) + "," +
                       detail::fmt_double(rep.best_direction.theta) + "," +
                       detail::fmt_double(rep.forward_score) + "," +
                       detail::fmt_double(rep.backward_score) + "\n";
                break;
            }
            case Experiment::Scan: {
                detail::StageTimer timer(stages, "scan");
                const MapDef map = parse_map(sc.map_spec);
                const int grid = p.at("grid").get<int>();
                const long long window = p.at("window").get<long long>();
                const double threshold = p.at("threshold").get<double>();
                const int dir_grid = detail::get_or(p, "direction_grid", 720);
                const std::vector<Vec2> samples = region_samples(grid);
                // per-sample reports computed in parallel, merged in index order
                std::vector<int> status(samples.size(), 0);  // 1 = scored, -1 = escaped
                std::vector<CriticalityReport> reps(samples.size());
                detail::parallel_for(samples.size(), threads, [&](size_t i) {
                    try {
                        reps[i] = criticality_score(map, samples[i], window, dir_grid);
                        status[i] = 1;
                    } catch (const escaped&) {
                        status[i] = -1;
                    }
                });
                long long escaped_count = 0;
                csv = "x,y,score,theta_best,fwd_score,bwd_score\n";
                json rows = json::array();
                for (size_t i = 0; i < samples.size(); ++i) {
                    if (status[i] < 0) {
                        ++escaped_count;
                        continue;
                    }
                    const auto& r = reps[i];
                    if (r.score < threshold) continue;
                    csv += detail::fmt_double(r.base.x) + "," + detail::fmt_double(r.base.y) + "," +
                           detail::fmt_double(r.score) + "," +
                           detail::fmt_double(r.best_direction.theta) + "," +
                           detail::fmt_double(r.forward_score) + "," +
                           detail::fmt_double(r.backward_score) + "\n";
                    rows.push_back({{"x", r.base.x},
                                    {"y", r.base.y},
                                    {"score", r.score},
                                    {"theta_best", r.best_direction.theta}});
                }
                if (escaped_count == static_cast<long long>(samples.size()))
                    throw escaped(0);  // every sample escaped: numerical failure
                report = {{"window", window},
                          {"threshold", threshold},
                          {"samples", samples.size()},
                          {"escaped_samples", escaped_count},
                          {"candidates", rows}};
                if (escaped_count > 0)
                    out.warnings.push_back(std::to_string(escaped_count) + " samples escaped");
                break;
            }
            case Experiment::FarFromHomothety: {
                detail::StageTimer timer(stages, "far_from_homothety");
                const MapDef map = parse_map(sc.map_spec);
                const Vec2 pt{p.at("x").get<double>(), p.at("y").get<double>()};
                const FarFromHomothetyReport rep = far_from_homotheties(
                    map, pt, p.at("delta").get<double>(), p.at("horizon").get<long long>());
                const bool witness = rep.verdict == HomothetyVerdict::HomothetyLikeWitnessFound;
                report = {{"x", rep.base.x},
                          {"y", rep.base.y},
                          {"delta", rep.delta},
                          {"horizon", rep.horizon},
                          {"verdict", witness ? "HomothetyLikeWitnessFound" : "FarAtThisHorizon"}};
                if (witness) report["witness_theta"] = rep.witness_direction->theta;
                csv = "x,y,delta,horizon,verdict,witness_theta\n";
                csv += detail::fmt_double(pt.x) + "," + detail::fmt_double(pt.y) + "," +
                       detail::fmt_double(rep.delta) + "," + std::to_string(rep.horizon) + "," +
                       (witness ? "HomothetyLikeWitnessFound" : "FarAtThisHorizon") + "," +
                       (witness ? detail::fmt_double(rep.witness_direction->theta) : "") + "\n";
                break;
            }
            case Experiment::Domination: {
                detail::StageTimer timer(stages, "domination");
                const MapDef map = parse_map(sc.map_spec);
                const int grid = p.at("grid").get<int>();
                const long long window = detail::get_or<long long>(p, "window", 20);
                const long long n = p.at("N").get<long long>();
                const double delta = p.at("delta").get<double>();
                const long long m_horizon = p.at("m_horizon").get<long long>();
                const long long transport = detail::get_or<long long>(p, "transport_horizon", 30);
                // keep only samples whose window survives
                const std::vector<Vec2> all = region_samples(grid);
                std::vector<char> keep(all.size(), 0);
                detail::parallel_for(all.size(), threads, [&](size_t i) {
                    const Orbit o = orbit(map, all[i], window, window);
                    keep[i] = o.escaped_at ? 0 : 1;
                });
                std::vector<Vec2> samples;
                for (size_t i = 0; i < all.size(); ++i)
                    if (keep[i]) samples.push_back(all[i]);
                if (samples.empty()) throw escaped(0);
                const DominationReport rep =
                    condition_star(map, samples, n, delta, m_horizon, transport);
                json viols = json::array();
                for (const auto& v : rep.violations)
                    viols.push_back({{"point", detail::vec_json(v.point)},
                                     {"m", v.m},
                                     {"value", v.value},
                                     {"tag", static_cast<int>(v.tag)}});
                report = {{"samples", rep.samples},
                          {"N", rep.N},
                          {"delta", rep.delta},
                          {"max_ratio", rep.max_ratio},
                          {"condition_star_holds", rep.condition_star_holds},
                          {"violations", viols}};
                csv = "samples,N,delta,max_ratio,condition_star_holds,violations\n";
                csv += std::to_string(rep.samples) + "," + std::to_string(rep.N) + "," +
                       detail::fmt_double(rep.delta) + "," + detail::fmt_double(rep.max_ratio) +
                       "," + (rep.condition_star_holds ? "true" : "false") + "," +
                       std::to_string(rep.violations.size()) + "\n";
                break;
            }
            case Experiment::Manifolds: {
                detail::StageTimer timer(stages, "manifolds");
                const MapDef map = parse_map(sc.map_spec);
                BranchOptions bopt;
                bopt.max_gap = detail::get_or(p, "max_gap", 0.05);
                bopt.curvature_tol = detail::get_or(p, "curvature_tol", 0.2);
                if (p.contains("domain")) {
                    const auto d = p.at("domain");
                    bopt.domain = Box{d[0].get<double>(), d[1].get<double>(), d[2].get<double>(),
                                      d[3].get<double>()};
                }
                const long long period = detail::get_or<long long>(p, "period", 1);
                Box region{-10, 10, -10, 10};
                if (p.contains("region")) {
                    const auto r = p.at("region");
                    region = Box{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                                 r[3].get<double>()};
                }
                const auto saddles =
                    find_periodic_points(map, period, region, detail::get_or(p, "grid", 24));
                const PeriodicPoint* saddle = nullptr;
                for (const auto& pp : saddles)
                    if (pp.cls == LinearClass::HyperbolicSaddle) {
                        saddle = &pp;
                        break;
                    }
                if (!saddle) throw bracket_invalid("no saddle periodic point found in the region");
                const double bu = detail::get_or(p, "budget_unstable", 50.0);
                const double bs = detail::get_or(p, "budget_stable", 50.0);
                csv = "branch,index,x,y\n";
                json branches = json::array();
                std::vector<ManifoldBranch> grown;
                for (BranchKind kind : {BranchKind::Unstable, BranchKind::Stable})
                    for (BranchSide side : {BranchSide::Plus, BranchSide::Minus}) {
                        const ManifoldBranch br = grow_branch(
                            map, *saddle, kind, side, kind == BranchKind::Unstable ? bu : bs, bopt);
                        const std::string name =
                            std::string(kind == BranchKind::Unstable ? "unstable_" : "stable_") +
                            (side == BranchSide::Plus ? "plus" : "minus");
                        for (size_t i = 0; i < br.polyline.size(); ++i)
                            csv += name + "," + std::to_string(i) + "," +
                                   detail::fmt_double(br.polyline[i].x) + "," +
                                   detail::fmt_double(br.polyline[i].y) + "\n";
                        branches.push_back({{"name", name},
                                            {"points", br.polyline.size()},
                                            {"arclength", br.arclength}});
                        grown.push_back(br);
                    }
                json events = json::array();
                double min_angle = std::numeric_limits<double>::infinity();
                for (size_t i = 0; i < 2; ++i)      // unstable branches
                    for (size_t j = 2; j < 4; ++j)  // stable branches
                        for (const auto& ev : find_intersections(grown[i], grown[j])) {
                            events.push_back({{"point", detail::vec_json(ev.point)},
                                              {"angle", ev.angle}});
                            min_angle = std::min(min_angle, ev.angle);
                        }
                report = {{"saddle", detail::vec_json(saddle->location)},
                          {"branches", branches},
                          {"intersections", events}};
                if (!events.empty()) report["min_angle"] = min_angle;
                break;
            }
            case Experiment::FirstTangency: {
                detail::StageTimer timer(stages, "first_tangency");
                TangencyOptions topt;
                topt.budget_unstable = detail::get_or(p, "budget_unstable", 80.0);
                topt.budget_stable = detail::get_or(p, "budget_stable", 80.0);
                topt.branch.max_gap = detail::get_or(p, "max_gap", 0.02);
                const TangencyReport rep = first_tangency(
                    p.at("b").get<double>(),
                    {p.at("a_lo").get<double>(), p.at("a_hi").get<double>()},
                    p.at("tol").get<double>(), topt);
                report = {{"b", rep.family_b},
                          {"a_star", rep.a_star},
                          {"bracket", {rep.bracket.first, rep.bracket.second}},
                          {"tangency_point", detail::vec_json(rep.tangency_point)},
                          {"tangency_theta", rep.tangency_direction.theta},
                          {"min_angle", rep.min_angle},
                          {"critical_iterate", rep.critical_iterate},
                          {"critical_point", detail::vec_json(rep.critical_point_estimate)}};
                csv = "b,a_star,bracket_lo,bracket_hi,tangency_x,tangency_y,critical_iterate\n";
                csv += detail::fmt_double(rep.family_b) + "," + detail::fmt_double(rep.a_star) +
                       "," + detail::fmt_double(rep.bracket.first) + "," +
                       detail::fmt_double(rep.bracket.second) + "," +
                       detail::fmt_double(rep.tangency_point.x) + "," +
                       detail::fmt_double(rep.tangency_point.y) + "," +
                       std::to_string(rep.critical_iterate) + "\n";
                break;
            }
            case Experiment::Pliss: {
                detail::StageTimer timer(stages, "pliss");
                const std::vector<double> seq = p.at("sequence").get<std::vector<double>>();
                const PlissTimes pt = pliss_times(seq, p.at("gamma0").get<double>(),
                                                  p.at("gamma1").get<double>(),
                                                  p.at("bound_a").get<double>());
                report = {{"gamma0", pt.gamma0},
                          {"gamma1", pt.gamma1},
                          {"bound_a", pt.bound_a},
                          {"times", pt.times},
                          {"density", pt.density}};
                csv = "time\n";
                for (long long t : pt.times) csv += std::to_string(t) + "\n";
                break;
            }
        }
    } catch (const validation_error&) {
        throw;  // caller maps to exit code 2
    } catch (const error& e) {
        // numerical failure: no partial outputs were written yet
        out.exit_code = 3;
        out.warnings.push_back(e.what());
        return out;
    }

    fs::create_directories(sc.output_dir);
    try {
        if (sc.write_csv) {
            const fs::path f = sc.output_dir / "results.csv";
            std::ofstream(f, std::ios::binary) << csv;
            out.files.push_back(f);
        }
        if (sc.write_json) {
            const fs::path f = sc.output_dir / "report.json";
            std::ofstream(f) << report.dump(2) << "\n";
            out.files.push_back(f);
        }
        json manifest = {
            {"artifact_version", kArtifactVersion},
            {"scenario_hash", detail::fnv1a(sc.raw.dump())},
            {"seed", sc.seed},
            {"threads", threads},
            {"wall_time_seconds",
             std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count()},
            {"stage_timings", stages},
            {"warnings", out.warnings}};
        const fs::path f = sc.output_dir / "manifest.json";
        std::ofstream(f) << manifest.dump(2) << "\n";
        out.files.push_back(f);
    } catch (...) {
        for (const auto& f : out.files) fs::remove(f);
        throw;
    }
    return out;
}

}  // namespace critset

#endif
