#include "ergolab/ledrappier.hpp"

#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace ergolab::ledrappier {

HarmonicField::HarmonicField(std::size_t width, std::size_t height)
    : width_(width), height_(height), cells_(width * height, 0) {
  if (width == 0 || height == 0) throw std::invalid_argument("HarmonicField: empty grid");
}

std::size_t HarmonicField::white_count() const {
  std::size_t count = 0;
  for (auto c : cells_) count += c;
  return count;
}

void propagate(HarmonicField& field) {
  for (std::size_t y = 1; y + 1 < field.height(); ++y)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(field.width()); ++x)
      field.set(x, y + 1, field.at(x, y) ^ field.at(x - 1, y) ^ field.at(x + 1, y) ^ field.at(x, y - 1));
}

HarmonicField sample_field(std::size_t width, std::size_t height, std::uint64_t seed) {
  if (width < 3) throw std::invalid_argument("sample_field: width must be at least 3");
  if (height < 2) throw std::invalid_argument("sample_field: height must be at least 2");
  HarmonicField field(width, height);
  std::mt19937_64 rng(seed);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < width; ++x) field.set(static_cast<std::int64_t>(x), y, static_cast<std::uint8_t>(rng() >> 63));
  propagate(field);
  return field;
}

bool verify_harmonicity(const HarmonicField& field) {
  for (std::size_t y = 1; y + 1 < field.height(); ++y)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(field.width()); ++x)
      if (field.at(x, y) != (field.at(x + 1, y) ^ field.at(x - 1, y) ^ field.at(x, y + 1) ^ field.at(x, y - 1)))
        return false;
  return true;
}

bool power_identity_check(const HarmonicField& field, unsigned k) {
  if (k >= 62) throw std::invalid_argument("power_identity_check: exponent too large");
  const std::size_t step = std::size_t{1} << k;
  const auto side = std::min(field.width(), field.height());
  if (2 * step >= side)
    throw std::invalid_argument("power_identity_check: 2^" + std::to_string(k) + " must be below half of " +
                                std::to_string(side));
  const auto d = static_cast<std::int64_t>(step);
  for (std::size_t y = step; y + step < field.height(); ++y)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(field.width()); ++x)
      if (field.at(x, y) != (field.at(x + d, y) ^ field.at(x - d, y) ^ field.at(x, y + step) ^ field.at(x, y - step)))
        return false;
  return true;
}

HarmonicField xor_fields(const HarmonicField& a, const HarmonicField& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw std::invalid_argument("xor_fields: size mismatch");
  HarmonicField out(a.width(), a.height());
  for (std::size_t y = 0; y < a.height(); ++y)
    for (std::int64_t x = 0; x < static_cast<std::int64_t>(a.width()); ++x) out.set(x, y, a.at(x, y) ^ b.at(x, y));
  return out;
}

namespace {

struct Step {
  std::int64_t dx, dy;
};

// Ahead, ahead-right, ahead-left (the order of preference) with their symbols.
struct Candidates {
  Step ahead, right, left;
};

Candidates candidates_for(Heading heading) {
  switch (heading) {
    case Heading::Up: return {{0, 1}, {1, 1}, {-1, 1}};
    case Heading::Down: return {{0, -1}, {-1, -1}, {1, -1}};
    case Heading::Right: return {{1, 0}, {1, -1}, {1, 1}};
    case Heading::Left: return {{-1, 0}, {-1, 1}, {-1, -1}};
  }
  throw std::invalid_argument("unknown heading");
}

}  // namespace

ThreadTrace trace_thread(const HarmonicField& field, Cell start, Heading heading) {
  const auto w = static_cast<std::int64_t>(field.width());
  const auto h = static_cast<std::int64_t>(field.height());
  if (start.y < 0 || start.y >= h) throw std::invalid_argument("trace_thread: start row outside the field");
  start.x = ((start.x % w) + w) % w;
  if (!field.at(start.x, static_cast<std::size_t>(start.y)))
    throw std::invalid_argument("trace_thread: start cell is not white");

  ThreadTrace trace{start, heading, {}, {start}};
  std::vector<char> visited(field.cells().size(), 0);
  auto index = [&](Cell c) { return static_cast<std::size_t>(c.y * w + c.x); };
  visited[index(start)] = 1;

  const auto options = candidates_for(heading);
  const std::pair<Step, int> ordered[] = {{options.ahead, 0}, {options.right, 1}, {options.left, -1}};
  Cell cur = start;
  for (;;) {
    bool moved = false;
    for (const auto& [step, symbol] : ordered) {
      Cell next{((cur.x + step.dx) % w + w) % w, cur.y + step.dy};
      if (next.y < 0 || next.y >= h || !field.at(next.x, static_cast<std::size_t>(next.y))) continue;
      if (visited[index(next)]) return trace;
      visited[index(next)] = 1;
      trace.symbols.push_back(symbol);
      trace.path.push_back(next);
      cur = next;
      moved = true;
      break;
    }
    if (!moved) return trace;
  }
}

ThreadStatistics thread_statistics(const HarmonicField& field, std::size_t samples, std::uint64_t seed) {
  ThreadStatistics stats;
  stats.samples = samples;
  stats.seed = seed;
  std::vector<Cell> whites;
  for (std::size_t y = 0; y < field.height(); ++y)
    for (std::size_t x = 0; x < field.width(); ++x)
      if (field.at(static_cast<std::int64_t>(x), y)) whites.push_back({static_cast<std::int64_t>(x), static_cast<std::int64_t>(y)});
  if (whites.empty()) return stats;

  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    auto start = whites[rng() % whites.size()];
    stats.max_len = std::max(stats.max_len, trace_thread(field, start, Heading::Up).length());
  }
  if (samples > 0) stats.coverage_fraction = static_cast<double>(stats.max_len + 1) / static_cast<double>(whites.size());
  return stats;
}

std::string statistics_json(const ThreadStatistics& stats) {
  nlohmann::ordered_json j;
  j["max_len"] = stats.max_len;
  j["coverage_fraction"] = stats.coverage_fraction;
  j["seed"] = stats.seed;
  j["samples"] = stats.samples;
  return j.dump();
}

void write_trace_csv(std::ostream& out, const ThreadTrace& trace) {
  out << "step,x,y,symbol\n";
  for (std::size_t i = 0; i < trace.symbols.size(); ++i)
    out << i + 1 << ',' << trace.path[i + 1].x << ',' << trace.path[i + 1].y << ',' << trace.symbols[i] << '\n';
}

void write_pgm(std::ostream& out, const HarmonicField& field) {
  out << "P5\n" << field.width() << ' ' << field.height() << "\n255\n";
  std::vector<char> row(field.width());
  for (std::size_t y = field.height(); y-- > 0;) {
    for (std::size_t x = 0; x < field.width(); ++x)
      row[x] = field.at(static_cast<std::int64_t>(x), y) ? static_cast<char>(255) : 0;
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void render_pgm(const HarmonicField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_pgm: cannot open " + path);
  write_pgm(out, field);
  if (!out) throw std::runtime_error("render_pgm: write failed for " + path);
}

}  // namespace ergolab::ledrappier
