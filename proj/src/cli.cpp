#include "ergolab/cli.hpp"

#include <boost/version.hpp>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ergolab/dynamics.hpp"
#include "ergolab/error.hpp"
#include "ergolab/f2.hpp"
#include "ergolab/involutions.hpp"
#include "ergolab/ledrappier.hpp"
#include "ergolab/mosaics.hpp"
#include "ergolab/rank_one.hpp"
#include "ergolab/recurrence.hpp"
#include "json.hpp"

#ifndef ERGOLAB_VERSION
#define ERGOLAB_VERSION "0.0.0"
#endif

namespace ergolab::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  UsageError(const std::string& flag, const std::string& message) : std::runtime_error(flag + ": " + message) {}
};

// Where the primary output goes, plus what the manifest records about it.
class Sink {
 public:
  Sink(std::string path, std::ostream& fallback) : path_(std::move(path)), fallback_(fallback) {}

  void write(const std::string& bytes) {
    if (path_.empty()) {
      fallback_ << bytes;
      fallback_.flush();
    } else {
      std::ofstream f(path_, std::ios::binary);
      if (!f) throw DomainError("cannot open " + path_ + " for writing");
      f << bytes;
    }
  }
  std::string label() const { return path_.empty() ? "-" : path_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ostream& fallback_;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::function<void(Sink&)> action;
  std::optional<std::uint64_t>* seed = nullptr;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::uint64_t parse_count(const std::string& flag, const std::string& text) {
  try {
    std::size_t used = 0;
    auto v = std::stoull(text, &used);
    if (used != text.size() || text.front() == '-') throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag, "expected a non-negative integer, got '" + text + "'");
  }
}

std::vector<std::uint64_t> parse_counts(const std::string& flag, const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_count(flag, item));
  if (out.empty()) throw UsageError(flag, "expected a comma-separated list of integers");
  return out;
}

std::vector<rank_one::Interval> parse_intervals(const std::string& flag, const std::string& text) {
  std::vector<rank_one::Interval> out;
  for (const auto& item : split(text, ',')) {
    auto parts = split(item, ':');
    if (parts.size() != 2) throw UsageError(flag, "expected lo:hi, got '" + item + "'");
    out.push_back({parse_count(flag, parts[0]), parse_count(flag, parts[1])});
  }
  if (out.empty()) throw UsageError(flag, "no intervals given");
  return out;
}

Rational parse_rational(const std::string& flag, const std::string& text) {
  try {
    return Rational(text);
  } catch (const std::exception&) {
    throw UsageError(flag, "expected a rational p/q, got '" + text + "'");
  }
}

json rational_json(const Rational& r) {
  return {{"num", to_string(numerator_of(r))}, {"den", to_string(denominator_of(r))}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- tower

void add_tower(CLI::App& root, std::vector<Command>& commands) {
  struct Opts {
    std::size_t n = 0, h = 0;
    std::optional<std::uint64_t> seed;
    std::string layout = "underbase";
    std::string roof_target;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("tower", "Rokhlin or Lehrer-Weiss tower on a single cycle");
  app->add_option("--n", o->n, "number of atoms")->required()->check(CLI::PositiveNumber);
  app->add_option("--h", o->h, "tower height")->required()->check(CLI::PositiveNumber);
  app->add_option("--seed", o->seed, "use a random n-cycle drawn from this seed instead of i -> i+1");
  app->add_option("--layout", o->layout, "residual placement")->check(CLI::IsMember({"underbase", "contiguous"}));
  app->add_option("--roof-target", o->roof_target, "comma-separated atoms Y; builds a tower with residual inside Y");
  commands.push_back({"tower", app, [o](Sink& sink) {
                        auto sys = o->seed ? random_single_cycle(o->n, *o->seed) : FinitePermutationSystem::cycle(o->n);
                        Tower tower;
                        std::string method = "rokhlin";
                        if (!o->roof_target.empty()) {
                          std::vector<Atom> y;
                          for (auto v : parse_counts("--roof-target", o->roof_target)) {
                            if (v >= o->n) throw UsageError("--roof-target", "atom " + std::to_string(v) + " out of range");
                            y.push_back(static_cast<Atom>(v));
                          }
                          auto t = lehrer_weiss_tower(sys, o->h, AtomSet(o->n, y));
                          if (!t) throw DomainError("infeasible: no residual inside the roof target cuts the cycle into arcs divisible by h");
                          tower = *t;
                          method = "lehrer_weiss";
                        } else {
                          tower = rokhlin_tower(sys, o->h, o->layout == "underbase" ? RoofLayout::UnderBase : RoofLayout::Contiguous);
                        }
                        json j;
                        j["n"] = o->n;
                        j["h"] = o->h;
                        j["system"] = o->seed ? "random_cycle" : "cycle";
                        j["method"] = method;
                        j["base"] = tower.base.members();
                        j["residual"] = tower.residual.members();
                        j["residual_measure"] = rational_json(tower.residual.measure());
                        j["roof_returns_to_base"] = roof_returns_to_base(sys, tower);
                        j["valid"] = is_valid_tower(sys, tower);
                        sink.write(dump(j));
                      },
                      &o->seed});
}

// ---------------------------------------------------------- involutions

void add_involutions(CLI::App& root, std::vector<Command>& commands) {
  struct Opts {
    std::size_t n = 0, h = 11;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("involutions", "factor a random n-cycle into three involutions");
  app->add_option("--n", o->n, "cycle length")->required()->check(CLI::PositiveNumber);
  app->add_option("--seed", o->seed, "seed of the random cycle")->required();
  app->add_option("--h", o->h, "tower height used by the factorization")->capture_default_str();
  commands.push_back({"involutions", app, [o](Sink& sink) {
                        auto sys = random_single_cycle(o->n, *o->seed);
                        auto f = factor_three_involutions_traced(sys, o->h);
                        const auto& t = f.triple;
                        json j;
                        j["n"] = o->n;
                        j["h"] = o->h;
                        j["seed"] = *o->seed;
                        j["verified"] = is_involution(t.s1) && is_involution(t.s2) && is_involution(t.s3) &&
                                        compose(t.s1, compose(t.s2, t.s3)) == sys.map();
                        j["short_cycles"] = f.short_cycles;
                        j["map"] = sys.map();
                        j["s1"] = t.s1;
                        j["s2"] = t.s2;
                        j["s3"] = t.s3;
                        sink.write(dump(j));
                      },
                      &o->seed});
}

// -------------------------------------------------------------- rankone

struct RankOneOpts {
  rank_one::Height h1 = 1;
  std::string spacers = "auto";
  std::string intervals;
  std::string decades;
  std::size_t squares = 0;
};

void add_rank_one_source(CLI::App* app, RankOneOpts& o) {
  app->add_option("--h1", o.h1, "height of the first tower")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--spacers", o.spacers, "comma-separated s_1, s_2, ... or 'auto' (design from intervals, then s_j = h_j)")
      ->capture_default_str();
  app->add_option("--intervals", o.intervals, "target intervals lo:hi,lo:hi,...");
  app->add_option("--decades", o.decades, "intervals [10^j, 2*10^j] for j = from:to");
  app->add_option("--squares", o.squares, "this many intervals inside the gaps of the squares");
}

std::optional<std::vector<rank_one::Interval>> interval_source(const RankOneOpts& o) {
  int given = !o.intervals.empty() + !o.decades.empty() + (o.squares > 0);
  if (given > 1) throw UsageError("--intervals", "give at most one of --intervals, --decades, --squares");
  if (!o.intervals.empty()) return parse_intervals("--intervals", o.intervals);
  if (!o.decades.empty()) {
    auto parts = split(o.decades, ':');
    if (parts.size() != 2) throw UsageError("--decades", "expected from:to");
    return rank_one::decade_intervals(static_cast<int>(parse_count("--decades", parts[0])),
                                      static_cast<int>(parse_count("--decades", parts[1])));
  }
  if (o.squares > 0) {
    auto next = std::make_shared<rank_one::Height>(0);
    return rank_one::gap_intervals(
        [next]() -> std::optional<rank_one::Height> {
          ++*next;
          return *next * *next;
        },
        o.squares);
  }
  return std::nullopt;
}

rank_one::RankOneSpec build_spec(const RankOneOpts& o) {
  auto intervals = interval_source(o);
  if (o.spacers != "auto") {
    if (intervals) throw UsageError("--spacers", "explicit spacers cannot be combined with target intervals");
    return {o.h1, parse_counts("--spacers", o.spacers)};
  }
  if (intervals) return rank_one::design_spacers(*intervals, o.h1).spec;
  return {o.h1, {}};
}

// "level:5", "levels:0,3,4", optionally followed by "@stage".
rank_one::LevelSet parse_level_set(const std::string& text, const rank_one::RankOneSpec& spec) {
  auto at = text.find('@');
  auto body = text.substr(0, at);
  auto colon = body.find(':');
  if (colon == std::string::npos) throw UsageError("--A", "expected level:L or levels:L1,L2,... [@stage]");
  auto kind = body.substr(0, colon);
  if (kind != "level" && kind != "levels") throw UsageError("--A", "unknown set kind '" + kind + "'");
  rank_one::LevelSet set;
  set.levels = parse_counts("--A", body.substr(colon + 1));
  if (kind == "level" && set.levels.size() != 1) throw UsageError("--A", "level: takes a single index");
  auto top = *std::max_element(set.levels.begin(), set.levels.end());
  if (at != std::string::npos) {
    set.stage = parse_count("--A", text.substr(at + 1));
    if (set.stage == 0) throw UsageError("--A", "stages start at 1");
  } else {
    set.stage = 1;
    for (;;) {
      auto h = rank_one::heights(rank_one::extend_spacers(spec, set.stage), set.stage).back();
      if (top < h) break;
      ++set.stage;
    }
  }
  return set;
}

json heights_json(const rank_one::RankOneSpec& spec, std::size_t stages) {
  auto ext = rank_one::extend_spacers(spec, stages);
  json j;
  j["h1"] = ext.first_height;
  j["spacers"] = std::vector<rank_one::Height>(ext.spacers.begin(), ext.spacers.begin() + (stages - 1));
  j["heights"] = rank_one::heights(ext, stages);
  return j;
}

void add_rank_one(CLI::App& root, std::vector<Command>& commands) {
  auto* group = root.add_subcommand("rankone", "rank-one cutting and stacking");
  group->require_subcommand(1);

  {
    struct Opts : RankOneOpts {
      std::size_t stages = 8;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("heights", "tower heights h_1..h_J");
    add_rank_one_source(app, *o);
    app->add_option("--stages", o->stages, "number of stages J")->capture_default_str()->check(CLI::PositiveNumber);
    commands.push_back({"rankone heights", app, [o](Sink& sink) { sink.write(dump(heights_json(build_spec(*o), o->stages))); }});
  }
  {
    auto o = std::make_shared<RankOneOpts>();
    auto* app = group->add_subcommand("design", "choose spacers so the heights land in target intervals");
    add_rank_one_source(app, *o);
    commands.push_back({"rankone design", app, [o](Sink& sink) {
                          auto intervals = interval_source(*o);
                          if (!intervals) throw UsageError("--intervals", "design needs --intervals, --decades or --squares");
                          auto d = rank_one::design_spacers(*intervals, o->h1);
                          json j;
                          j["intervals"] = json::array();
                          for (const auto& i : *intervals) j["intervals"].push_back({i.lo, i.hi});
                          j["selected_indices"] = d.selected_indices;
                          j["spacers"] = d.spec.spacers;
                          j["heights"] = rank_one::heights(d.spec, d.spec.stages());
                          sink.write(dump(j));
                        }});
  }
  {
    struct Opts : RankOneOpts {
      std::string set;
      rank_one::Height n_max = 0;
      std::size_t stage = 0;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("correlate", "exact mu(T^n A & A) for n = 0..n_max as CSV");
    add_rank_one_source(app, *o);
    app->add_option("--A", o->set, "level:L | levels:L1,L2,... with optional @stage")->required();
    app->add_option("--n-max", o->n_max, "largest time")->required();
    app->add_option("--stage", o->stage, "working stage (default: smallest certifying stage)");
    commands.push_back({"rankone correlate", app, [o](Sink& sink) {
                          auto spec = build_spec(*o);
                          auto set = parse_level_set(o->set, spec);
                          std::size_t stage = o->stage;
                          if (stage == 0)
                            std::tie(spec, stage) = rank_one::certifying_stage(spec, set, o->n_max);
                          else
                            spec = rank_one::extend_spacers(spec, stage);
                          auto series = rank_one::correlation_series(spec, set, o->n_max, stage);
                          if (!series.unstable.empty())
                            throw DomainError("stage " + std::to_string(stage) + " does not certify n = " +
                                              std::to_string(series.unstable.front()));
                          std::ostringstream out;
                          rank_one::write_csv(out, series);
                          sink.write(out.str());
                        }});
  }
  {
    struct Opts : RankOneOpts {
      std::string set;
      rank_one::Height n_max = 0;
      std::string threshold = "mu/4";
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("confine", "classify every non-mixing time up to n_max");
    add_rank_one_source(app, *o);
    app->add_option("--A", o->set, "level:L | levels:L1,L2,... with optional @stage")->required();
    app->add_option("--n-max", o->n_max, "largest time")->required();
    app->add_option("--threshold", o->threshold, "p/q, or mu/4 for a quarter of mu(A)")->capture_default_str();
    commands.push_back({"rankone confine", app, [o](Sink& sink) {
                          auto intervals = interval_source(*o);
                          if (!intervals) throw UsageError("--intervals", "confine needs --intervals, --decades or --squares");
                          auto spec = build_spec(*o);
                          auto set = parse_level_set(o->set, spec);
                          auto mu = rank_one::measure(set);
                          auto threshold = o->threshold == "mu/4" ? mu / 4 : parse_rational("--threshold", o->threshold);
                          auto [ext, stage] = rank_one::certifying_stage(spec, set, o->n_max);
                          auto r = rank_one::confinement_scan(ext, set, o->n_max, stage, *intervals, threshold);
                          json j;
                          j["n_max"] = r.n_max;
                          j["stage"] = stage;
                          j["measure"] = rational_json(mu);
                          j["threshold"] = rational_json(r.threshold);
                          j["nonmixing"] = r.nonmixing;
                          j["inside_intervals"] = r.inside_intervals;
                          j["decomposed"] = r.decomposed;
                          j["unexplained"] = r.unexplained;
                          j["max_remainder_seen"] = r.max_remainder_seen;
                          j["unexplained_times"] = r.unexplained_times;
                          sink.write(dump(j));
                        }});
  }
}

// ----------------------------------------------------------- recurrence

void add_recurrence(CLI::App& root, std::vector<Command>& commands) {
  struct Opts {
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;
    std::string system = "random";
    std::int64_t step = 1;
    double density = 0.3;
    std::size_t horizon = 100;
    std::string mode = "average";
    std::int64_t i_max = 0;
    std::string pairs;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("recurrence", "triple intersections and averages on a finite system");
  app->add_option("--n", o->n, "number of atoms")->required()->check(CLI::PositiveNumber);
  app->add_option("--seed", o->seed, "seed for the system and the three random sets")->required();
  app->add_option("--system", o->system, "random single cycle, i -> i+1, or i -> i+step")
      ->capture_default_str()
      ->check(CLI::IsMember({"random", "cycle", "rotation"}));
  app->add_option("--step", o->step, "rotation step")->capture_default_str();
  app->add_option("--density", o->density, "probability an atom joins each set")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  app->add_option("--horizon", o->horizon, "number of times averaged or listed")->capture_default_str();
  app->add_option("--mode", o->mode, "what to compute")
      ->capture_default_str()
      ->check(CLI::IsMember({"average", "series", "roth", "profile"}));
  app->add_option("--i-max", o->i_max, "search limit for the roth witness (default n)");
  app->add_option("--pairs", o->pairs, "i:j,i:j,... time pairs for the profile");
  commands.push_back({"recurrence", app, [o](Sink& sink) {
                        auto seed = *o->seed;
                        auto sys = o->system == "random" ? random_single_cycle(o->n, seed)
                                   : o->system == "cycle" ? FinitePermutationSystem::cycle(o->n)
                                                          : FinitePermutationSystem::rotation(o->n, o->step);
                        auto a = random_subset(o->n, o->density, seed + 1);
                        auto a1 = random_subset(o->n, o->density, seed + 2);
                        auto a2 = random_subset(o->n, o->density, seed + 3);
                        std::ostringstream out;
                        if (o->mode == "series") {
                          write_series_csv(out, triple_series(sys, a, a1, a2, o->horizon));
                        } else if (o->mode == "profile") {
                          std::vector<TimePair> pairs;
                          for (const auto& item : split(o->pairs, ',')) {
                            auto parts = split(item, ':');
                            if (parts.size() != 2) throw UsageError("--pairs", "expected i:j, got '" + item + "'");
                            pairs.emplace_back(static_cast<std::int64_t>(parse_count("--pairs", parts[0])),
                                               static_cast<std::int64_t>(parse_count("--pairs", parts[1])));
                          }
                          if (pairs.empty()) throw UsageError("--pairs", "profile needs at least one pair");
                          write_profile_csv(out, pairs, mix2_profile(sys, a, a1, a2, pairs));
                        } else {
                          json j;
                          j["n"] = o->n;
                          j["seed"] = seed;
                          j["measures"] = {rational_json(a.measure()), rational_json(a1.measure()), rational_json(a2.measure())};
                          if (o->mode == "average") {
                            auto avg = furstenberg_average(sys, a, a1, a2, o->horizon);
                            j["horizon"] = avg.horizon;
                            j["average"] = rational_json(avg.value);
                            j["product"] = rational_json(avg.product);
                          } else {
                            auto limit = o->i_max > 0 ? o->i_max : static_cast<std::int64_t>(o->n);
                            auto w = roth_witness(sys, a, limit);
                            j["i_max"] = limit;
                            j["witness"] = w ? json(*w) : json(nullptr);
                          }
                          out << dump(j);
                        }
                        sink.write(out.str());
                      },
                      &o->seed});
}

// ----------------------------------------------------------- ledrappier

void add_ledrappier(CLI::App& root, std::vector<Command>& commands) {
  auto* group = root.add_subcommand("ledrappier", "harmonic GF(2) fields and their threads");
  group->require_subcommand(1);
  struct Opts {
    std::size_t width = 64, height = 64;
    std::optional<std::uint64_t> seed;
  };
  auto field_options = [](CLI::App* app, Opts& o) {
    app->add_option("--width", o.width, "columns (wrapping)")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--height", o.height, "rows")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    app->add_option("--seed", o.seed, "seed of the two random rows")->required();
  };
  {
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("field", "sample a field and write it as PGM");
    field_options(app, *o);
    commands.push_back({"ledrappier field", app, [o](Sink& sink) {
                          std::ostringstream out;
                          ledrappier::write_pgm(out, ledrappier::sample_field(o->width, o->height, *o->seed));
                          sink.write(out.str());
                        },
                        &o->seed});
  }
  {
    struct StatsOpts : Opts {
      std::size_t samples = 1000;
    };
    auto o = std::make_shared<StatsOpts>();
    auto* app = group->add_subcommand("stats", "harmonicity, power identities and thread statistics as JSON");
    field_options(app, *o);
    app->add_option("--samples", o->samples, "thread starts sampled")->capture_default_str();
    commands.push_back({"ledrappier stats", app, [o](Sink& sink) {
                          auto field = ledrappier::sample_field(o->width, o->height, *o->seed);
                          json j;
                          j["width"] = o->width;
                          j["height"] = o->height;
                          j["seed"] = *o->seed;
                          j["harmonic"] = ledrappier::verify_harmonicity(field);
                          json powers = json::object();
                          for (unsigned k = 0; 2 * (std::size_t{1} << k) < std::min(o->width, o->height); ++k)
                            powers[std::to_string(k)] = ledrappier::power_identity_check(field, k);
                          j["power_identity"] = powers;
                          j["threads"] = json::parse(ledrappier::statistics_json(
                              ledrappier::thread_statistics(field, o->samples, *o->seed)));
                          sink.write(dump(j));
                        },
                        &o->seed});
  }
  {
    struct TraceOpts : Opts {
      std::int64_t x = 0;
      std::int64_t y = 0;
      std::string heading = "up";
    };
    auto o = std::make_shared<TraceOpts>();
    auto* app = group->add_subcommand("trace", "follow one thread and write it as CSV");
    field_options(app, *o);
    app->add_option("--x", o->x, "start column")->capture_default_str();
    app->add_option("--y", o->y, "start row")->capture_default_str();
    app->add_option("--heading", o->heading, "direction of travel")
        ->capture_default_str()
        ->check(CLI::IsMember({"up", "down", "left", "right"}));
    commands.push_back({"ledrappier trace", app, [o](Sink& sink) {
                          auto field = ledrappier::sample_field(o->width, o->height, *o->seed);
                          if (o->y < 0 || static_cast<std::size_t>(o->y) >= o->height)
                            throw UsageError("--y", "start row outside the field");
                          static const std::map<std::string, ledrappier::Heading> headings{
                              {"up", ledrappier::Heading::Up},
                              {"down", ledrappier::Heading::Down},
                              {"left", ledrappier::Heading::Left},
                              {"right", ledrappier::Heading::Right}};
                          std::ostringstream out;
                          ledrappier::write_trace_csv(
                              out, ledrappier::trace_thread(field, {o->x, o->y}, headings.at(o->heading)));
                          sink.write(out.str());
                        },
                        &o->seed});
  }
}

// --------------------------------------------------------------- mosaic

void add_mosaic(CLI::App& root, std::vector<Command>& commands) {
  auto* group = root.add_subcommand("mosaic", "blue cells and red k x k tiles");
  group->require_subcommand(1);
  struct RuleOpts {
    std::size_t k = 3;
    std::string adjacency = "8";
    std::string boundary = "free";
    mosaics::MosaicRules rules() const {
      return {k, adjacency == "8" ? mosaics::Adjacency::Eight : mosaics::Adjacency::Four,
              boundary == "free" ? mosaics::Boundary::Free : mosaics::Boundary::Clipped};
    }
  };
  auto rule_options = [](CLI::App* app, RuleOpts& o) {
    app->add_option("--k", o.k, "red tile side")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--adjacency", o.adjacency, "blue cells may not touch in 8 or 4 directions")
        ->capture_default_str()
        ->check(CLI::IsMember({"8", "4"}));
    app->add_option("--boundary", o.boundary, "free: whole tiles only; clipped: tiles may be cut by the edge")
        ->capture_default_str()
        ->check(CLI::IsMember({"free", "clipped"}));
  };
  {
    struct Opts : RuleOpts {
      std::size_t width = 0, height = 0;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("count", "exact number of mosaics on a board");
    rule_options(app, *o);
    app->add_option("--width", o->width, "columns")->required()->check(CLI::PositiveNumber);
    app->add_option("--height", o->height, "rows")->required()->check(CLI::PositiveNumber);
    commands.push_back({"mosaic count", app, [o](Sink& sink) {
                          json j;
                          j["width"] = o->width;
                          j["height"] = o->height;
                          j["k"] = o->k;
                          j["adjacency"] = o->adjacency;
                          j["boundary"] = o->boundary;
                          j["count"] = to_string(mosaics::count_mosaics(o->width, o->height, o->rules()));
                          sink.write(dump(j));
                        }});
  }
  {
    struct Opts : RuleOpts {
      std::string sides;
      std::string widths;
      std::size_t height = 0;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("entropy", "per-site entropy log(count)/(w h) as CSV");
    rule_options(app, *o);
    app->add_option("--sides", o->sides, "square boards of these sides");
    app->add_option("--widths", o->widths, "boards of these widths and the given --height");
    app->add_option("--height", o->height, "row count for --widths");
    commands.push_back({"mosaic entropy", app, [o](Sink& sink) {
                          std::vector<mosaics::EntropyEntry> entries;
                          auto as_sizes = [](const std::vector<std::uint64_t>& v) {
                            return std::vector<std::size_t>(v.begin(), v.end());
                          };
                          if (!o->sides.empty() == !o->widths.empty())
                            throw UsageError("--sides", "give exactly one of --sides and --widths");
                          if (!o->sides.empty()) {
                            entries = mosaics::square_entropy_profile(as_sizes(parse_counts("--sides", o->sides)), o->rules());
                          } else {
                            if (o->height == 0) throw UsageError("--height", "required with --widths");
                            entries = mosaics::entropy_profile(as_sizes(parse_counts("--widths", o->widths)), o->height,
                                                               o->rules());
                          }
                          std::ostringstream out;
                          mosaics::write_entropy_csv(out, entries);
                          sink.write(out.str());
                        }});
  }
  {
    struct Opts : RuleOpts {
      std::size_t width = 0, height = 0;
      std::optional<std::uint64_t> seed;
      std::uint64_t budget = 50'000'000;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("generate", "sample a mosaic and write it as PPM");
    rule_options(app, *o);
    app->add_option("--width", o->width, "columns")->required()->check(CLI::PositiveNumber);
    app->add_option("--height", o->height, "rows")->required()->check(CLI::PositiveNumber);
    app->add_option("--seed", o->seed, "sampling seed")->required();
    app->add_option("--budget", o->budget, "search steps for boards beyond the exact sampler")->capture_default_str();
    commands.push_back({"mosaic generate", app, [o](Sink& sink) {
                          auto m = mosaics::generate_mosaic(o->width, o->height, o->rules(), *o->seed, o->budget);
                          if (!m) throw DomainError("no mosaic exists on this board");
                          std::ostringstream out;
                          mosaics::write_ppm(out, *m);
                          sink.write(out.str());
                        },
                        &o->seed});
  }
}

// ------------------------------------------------------------------- f2

f2::PatternSet read_base(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--base", "cannot read " + path);
  json j;
  try {
    j = json::parse(in);
    if (j.contains("certificate")) j = j["certificate"];
    std::vector<f2::Word> window;
    for (const auto& w : j.at("window")) window.push_back(f2::Word::parse(w.get<std::string>()));
    if (j.contains("assignments")) return f2::PatternSet::from_assignments(window, j["assignments"].get<std::vector<std::uint64_t>>());
    std::vector<f2::Cylinder> terms;
    for (const auto& c : j.at("cylinders")) terms.push_back({c.at("care").get<std::uint64_t>(), c.at("value").get<std::uint64_t>()});
    return f2::PatternSet(window, terms);
  } catch (const json::exception& e) {
    throw UsageError("--base", std::string("malformed certificate: ") + e.what());
  }
}

void add_f2(CLI::App& root, std::vector<Command>& commands) {
  auto* group = root.add_subcommand("f2", "Rokhlin families for the Bernoulli shift of the free group");
  group->require_subcommand(1);
  {
    struct Opts {
      std::size_t peak = 2;
      std::string base;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("verify", "check that the cross translates of a base are disjoint");
    app->add_option("--peak", o->peak, "verify the local peak of this radius")->capture_default_str();
    app->add_option("--base", o->base, "verify the base stored in a certificate JSON file");
    commands.push_back({"f2 verify", app, [o](Sink& sink) {
                          auto base = o->base.empty() ? f2::local_peak(o->peak) : read_base(o->base);
                          sink.write(dump(json::parse(f2::certificate_json(f2::verify_rokhlin_family(base)))));
                        }});
  }
  {
    struct Opts {
      std::optional<std::uint64_t> seed;
      f2::SearchOptions search;
    };
    auto o = std::make_shared<Opts>();
    auto* app = group->add_subcommand("search", "search radius-L predicates for a large verified base");
    app->add_option("--radius", o->search.radius, "window radius")->capture_default_str();
    app->add_option("--budget", o->search.budget, "candidate steps per restart (0: baseline only)")->capture_default_str();
    app->add_option("--seed", o->seed, "search seed")->required();
    app->add_option("--restarts", o->search.restarts, "independent restarts")->capture_default_str();
    app->add_option("--threads", o->search.threads, "workers (0: ERGOLAB_THREADS or hardware)")->capture_default_str();
    commands.push_back({"f2 search", app, [o](Sink& sink) {
                          auto opts = o->search;
                          opts.seed = *o->seed;
                          sink.write(dump(json::parse(f2::search_json(f2::search_best(opts)))));
                        },
                        &o->seed});
  }
}

json parameters_of(const CLI::App* app) {
  json j = json::object();
  for (const auto* opt : app->get_options()) {
    auto name = opt->get_single_name();
    if (name == "help") continue;
    if (opt->count() > 0) {
      auto results = opt->results();
      j[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  CLI::App root{"Finite models of measure-preserving dynamics", "ergolab"};
  root.set_help_flag("--help", "Print this help message and exit");
  root.require_subcommand(1);
  root.set_version_flag("--version", ERGOLAB_VERSION);

  std::vector<Command> commands;
  add_tower(root, commands);
  add_involutions(root, commands);
  add_rank_one(root, commands);
  add_recurrence(root, commands);
  add_ledrappier(root, commands);
  add_mosaic(root, commands);
  add_f2(root, commands);

  std::map<CLI::App*, std::pair<std::string, std::string>> paths;
  for (auto& c : commands) {
    auto& p = paths[c.app];
    c.app->add_option("--out", p.first, "primary output file (default: stdout)");
    c.app->add_option("--manifest", p.second, "run manifest file (default: <out>.manifest.json, or stderr)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    root.parse(reversed);
  } catch (const CLI::ParseError& e) {
    auto code = root.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Command* chosen = nullptr;
  for (auto& c : commands)
    if (c.app->parsed()) chosen = &c;
  if (!chosen) {
    err << "error: no command selected\n";
    return 2;
  }
  const auto& [out_path, manifest_path] = paths[chosen->app];
  Sink sink(out_path, out);

  int status = 0;
  std::string failure;
  try {
    chosen->action(sink);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    failure = e.what();
    status = 1;
  } catch (const std::invalid_argument& e) {
    failure = e.what();
    status = 1;
  }
  if (status) err << "error: " << failure << "\n";

  json manifest;
  manifest["subcommand"] = chosen->name;
  manifest["parameters"] = parameters_of(chosen->app);
  manifest["seed"] = chosen->seed && *chosen->seed ? json(**chosen->seed) : json(nullptr);
  manifest["versions"] = {{"ergolab", ERGOLAB_VERSION},
                          {"compiler", __VERSION__},
                          {"boost", BOOST_LIB_VERSION},
                          {"cli11", CLI11_VERSION}};
  manifest["outputs"] = status ? json::array() : json::array({sink.label()});
  manifest["exit_code"] = status;
  if (status) manifest["error"] = failure;
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  auto target = !manifest_path.empty() ? manifest_path : !out_path.empty() ? out_path + ".manifest.json" : "";
  if (target.empty()) {
    err << manifest.dump() << "\n";
  } else {
    std::ofstream f(target);
    if (!f) {
      err << "error: cannot write manifest " << target << "\n";
      return 1;
    }
    f << manifest.dump(2) << "\n";
  }
  return status;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ergolab::cli
