#pragma once

/**
 * @file audio.hpp
 * @brief From lambda lengths to sound: temperings, the frequency law,
 *        frets, note events, arpeggios and the hyperfan melody compiler.
 *
 * The frequency of lambda length L with octave shift N is 440 * xi^(L - 12N),
 * xi = 2^(1/12); N = 4 puts L = 0 on A0 = 27.5 Hz. Other temperings anchor
 * their root at its equal-tempered pitch and repeat their ratio table every
 * octave.
 */

#include "farey.hpp"
#include "tessellation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hormonica {

/// Twelve ratios r0 = 1 < r1 < ... < r11 < 2 over a root placed `root`
/// hemitones above A0.
struct Tempering {
  std::string name;
  std::array<double, 12> ratios{};
  std::optional<std::array<Rational, 12>> exact;
  int root = 0;
  bool equal_tempered = false;

  void validate() const {
    if (ratios[0] != 1.0) throw std::invalid_argument("tempering '" + name + "': first ratio must be 1");
    for (std::size_t i = 0; i < 12; ++i) {
      if (!(ratios[i] > 0) || !(ratios[i] < 2.0))
        throw std::invalid_argument("tempering '" + name + "': ratios must lie in [1, 2)");
      if (i > 0 && !(ratios[i] > ratios[i - 1]))
        throw std::invalid_argument("tempering '" + name + "': ratios must increase strictly");
    }
  }
};

inline Tempering equal_tempering() {
  Tempering t{"equal", {}, std::nullopt, 0, true};
  for (int i = 0; i < 12; ++i) t.ratios[i] = std::exp2(i / 12.0);
  return t;
}

inline Tempering exact_tempering(std::string name, const std::array<Rational, 12>& ratios, int root) {
  Tempering t{std::move(name), {}, ratios, root, false};
  for (std::size_t i = 0; i < 12; ++i) t.ratios[i] = to_double(ratios[i]);
  t.validate();
  return t;
}

// Chain of fifths (3/2)^k, k = -5..6, folded into [1, 2). Root C = 3.
inline Tempering pythagorean_tempering(int root = 3) {
  std::array<Rational, 12> r;
  for (int k = -5; k <= 6; ++k) {
    Rational v = 1;
    for (int i = 0; i < std::abs(k); ++i) v *= k > 0 ? Rational(3, 2) : Rational(2, 3);
    while (v >= 2) v /= 2;
    while (v < 1) v *= 2;
    r[static_cast<std::size_t>(((7 * k) % 12 + 12) % 12)] = v;
  }
  return exact_tempering("pythagorean", r, root);
}

// Five-limit just intonation.
inline Tempering just_tempering(int root = 3) {
  const std::array<std::pair<int, int>, 12> table{{{1, 1}, {16, 15}, {9, 8}, {6, 5}, {5, 4}, {4, 3},
                                                    {45, 32}, {3, 2}, {8, 5}, {5, 3}, {9, 5}, {15, 8}}};
  std::array<Rational, 12> r;
  for (std::size_t i = 0; i < 12; ++i) r[i] = Rational(table[i].first, table[i].second);
  return exact_tempering("just", r, root);
}

inline Tempering tempering_by_name(const std::string& name, int root = 3) {
  if (name == "equal") return equal_tempering();
  if (name == "pythagorean") return pythagorean_tempering(root);
  if (name == "just") return just_tempering(root);
  throw std::invalid_argument("unknown tempering '" + name + "'");
}

struct Tuning {
  Tempering tempering = equal_tempering();
  int octave_shift = 4;
  // Treat every edge of a never-tuned instrument as sounding 27.5 Hz.
  bool untuned_convention = false;
};

// Frequency of an integer number of hemitones above 440 * 2^-N (no range checks).
inline double pitch_frequency(long long hemitones, int octave_shift, const Tempering& temp) {
  if (temp.equal_tempered) return 440.0 * std::exp2(static_cast<double>(hemitones - 12LL * octave_shift) / 12.0);
  long long degree = hemitones - temp.root;
  long long octave = degree >= 0 ? degree / 12 : -((-degree + 11) / 12);
  auto step = static_cast<std::size_t>(degree - 12 * octave);
  double root_freq = 440.0 * std::exp2(static_cast<double>(temp.root) / 12.0 - octave_shift);
  return std::ldexp(root_freq * temp.ratios[step], static_cast<int>(octave));
}

inline double freq_of_lambda(long long lambda, int octave_shift = 4, const Tempering& temp = equal_tempering()) {
  if (lambda < 1) throw std::invalid_argument("lambda length must be >= 1");
  if (octave_shift < 0) throw std::invalid_argument("octave shift must be >= 0");
  return pitch_frequency(lambda, octave_shift, temp);
}

inline double freq_of_lambda(long long lambda, const Tuning& t) {
  return freq_of_lambda(lambda, t.octave_shift, t.tempering);
}

// Hyperbolic distance between neighboring frets.
inline double fret_spacing() { return 0.5 * std::exp(0.5); }

inline double fret_frequency(long long lambda, long long fret, const Tuning& t) {
  if (lambda + fret < 1) throw std::invalid_argument("fret lies below lambda 1");
  return freq_of_lambda(lambda + fret, t);
}

// Continuous pitch at signed distance d from the distinguished fret. Exact at
// every fret; between frets equal tempering is exponential in d and other
// temperings interpolate geometrically between neighboring frets.
inline double hold_frequency_from(long long base, double d, const Tuning& t) {
  double steps = d / fret_spacing();
  if (t.tempering.equal_tempered)
    return 440.0 * std::exp2((static_cast<double>(base) + steps - 12.0 * t.octave_shift) / 12.0);
  double below = std::floor(steps);
  double frac = steps - below;
  auto lo = base + static_cast<long long>(below);
  double f0 = pitch_frequency(lo, t.octave_shift, t.tempering);
  if (frac == 0) return f0;
  double f1 = pitch_frequency(lo + 1, t.octave_shift, t.tempering);
  return f0 * std::pow(f1 / f0, frac);
}

inline double hold_frequency(long long lambda, double d, const Tuning& t) { return hold_frequency_from(lambda, d, t); }

/// Fret positions on an oriented edge, in disk coordinates. The
/// distinguished fret is equidistant from the two Farey horocycles.
struct FretSpec {
  EdgeKey edge;
  std::pair<ExtendedRational, ExtendedRational> orientation;
  DiskPoint distinguished;
  std::vector<std::pair<int, DiskPoint>> frets;
};

// Send the tail to infinity: the edge becomes the vertical through m = M(head)
// with lambda = denominator of m, the horocycles sit at heights 1 and 1/L^2,
// and fret j is at height exp(-j * spacing) / L.
inline FretSpec fret_points(const EdgeKey& e, int lo_fret = -3, int hi_fret = 3) {
  auto orient = orient_edge(e.lo, e.hi);
  MoebiusMap to_inf = normalizing_map(orient.first);
  MoebiusMap back = to_inf.inverse();
  ExtendedRational m = to_inf(orient.second);
  double foot = to_double(m.p()) / to_double(m.q());
  double lam = to_double(e.lambda());
  auto at = [&](int j) { return cayley(back(std::complex<double>(foot, std::exp(-j * fret_spacing()) / lam))); };
  FretSpec spec{e, orient, at(0), {}};
  for (int j = lo_fret; j <= hi_fret; ++j) spec.frets.emplace_back(j, at(j));
  return spec;
}

struct NoteEvent {
  double start = 0;
  double duration = 0.3;
  double frequency = 0;
  double velocity = 1.0;
  int channel = 0;

  void validate() const {
    if (!(duration > 0)) throw std::invalid_argument("note duration must be positive");
    if (!(frequency > 0)) throw std::invalid_argument("note frequency must be positive");
    if (!(start >= 0)) throw std::invalid_argument("note start must be non-negative");
    if (velocity < 0 || velocity > 1) throw std::invalid_argument("note velocity must lie in [0, 1]");
  }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct ScoreMeta {
  std::string tempering = "equal";
  int octave_shift = 4;
  std::string session_id;
  friend bool operator==(const ScoreMeta&, const ScoreMeta&) = default;
};

/// Events kept sorted by start time; equal starts keep insertion order.
class Score {
 public:
  ScoreMeta meta;

  void add(NoteEvent ev) {
    ev.validate();
    auto pos = std::upper_bound(events_.begin(), events_.end(), ev.start,
                                [](double t, const NoteEvent& e) { return t < e.start; });
    events_.insert(pos, ev);
  }

  const std::vector<NoteEvent>& events() const { return events_; }
  bool empty() const { return events_.empty(); }

  double end_time() const {
    double end = 0;
    for (const auto& e : events_) end = std::max(end, e.start + e.duration);
    return end;
  }

  friend bool operator==(const Score&, const Score&) = default;

 private:
  std::vector<NoteEvent> events_;
};

constexpr double kTapDuration = 0.3;
constexpr double kArpeggioDuration = 0.25;

inline NoteEvent tap_event(long long lambda, double t, const Tuning& cfg, bool instrument_untuned = false,
                           int channel = 0) {
  if (lambda < 1) throw std::invalid_argument("lambda length must be >= 1");
  double f = (cfg.untuned_convention && instrument_untuned) ? 27.5 : freq_of_lambda(lambda, cfg);
  return {t, kTapDuration, f, 1.0, channel};
}

inline std::array<NoteEvent, 3> triangle_event(const std::array<Integer, 3>& chord, double t, const Tuning& cfg,
                                               bool instrument_untuned = false, int channel = 0) {
  return {tap_event(to_int64(chord[0]), t, cfg, instrument_untuned, channel),
          tap_event(to_int64(chord[1]), t, cfg, instrument_untuned, channel),
          tap_event(to_int64(chord[2]), t, cfg, instrument_untuned, channel)};
}

inline Score arpeggio(const std::vector<Crossing>& crossings, double seconds_per_unit, const Tuning& cfg,
                      int channel = 0) {
  if (!(seconds_per_unit > 0)) throw std::invalid_argument("tempo must be positive");
  Score s;
  s.meta.tempering = cfg.tempering.name;
  s.meta.octave_shift = cfg.octave_shift;
  for (const auto& c : crossings)
    s.add({c.position * seconds_per_unit, kArpeggioDuration, freq_of_lambda(to_int64(c.lambda), cfg), 1.0, channel});
  return s;
}

inline Score arpeggio(const TessellationPatch& t, const ExtendedRational& center, double window,
                      double seconds_per_unit, const Tuning& cfg) {
  return arpeggio(horocycle_crossings(t, center, window), seconds_per_unit, cfg);
}

/// Flips that build the hyperfan deep enough for the melody, and the fan
/// edge tapped for each note: {oo, 1/m} has lambda m.
struct MelodyScript {
  std::vector<EdgeKey> tuning;
  std::vector<EdgeKey> taps;
  unsigned fan_depth = 0;
};

inline EdgeKey fan_edge(long long hemitone) {
  return {ExtendedRational::infinity(), ExtendedRational(Integer(1), Integer(hemitone))};
}

inline MelodyScript compile_melody(const std::vector<long long>& hemitones) {
  MelodyScript out;
  long long top = 0;
  for (long long h : hemitones) {
    if (h < 1) throw std::invalid_argument("melody notes must be >= 1 hemitone");
    top = std::max(top, h);
  }
  out.fan_depth = static_cast<unsigned>(top);
  if (top > 1) out.tuning = hyperfan_flips(static_cast<unsigned>(top - 1));
  for (long long h : hemitones) out.taps.push_back(fan_edge(h));
  return out;
}

}  // namespace hormonica
