#pragma once

// Offline additive synthesis of a Score into 16-bit mono PCM.

#include "audio.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hormonica {

enum class Waveform { sine, square, saw };

inline Waveform waveform_from_name(const std::string& name) {
  if (name == "sine") return Waveform::sine;
  if (name == "square") return Waveform::square;
  if (name == "saw") return Waveform::saw;
  throw std::invalid_argument("unknown waveform '" + name + "'");
}

inline std::string waveform_name(Waveform w) {
  switch (w) {
    case Waveform::sine: return "sine";
    case Waveform::square: return "square";
    case Waveform::saw: return "saw";
  }
  return "sine";
}

struct SynthConfig {
  int sample_rate = 44100;
  int bit_depth = 16;
  std::map<int, Waveform> waveforms;  // per channel, sine when absent
  double attack = 0.010;
  double decay = 0.3;
  double release = 0.020;
  double peak = 0.89;

  void validate() const {
    if (sample_rate < 8000 || sample_rate > 192000) throw std::invalid_argument("sample rate out of range");
    if (bit_depth != 16) throw std::invalid_argument("only 16-bit output is supported");
    if (!(attack > 0) || !(decay > 0) || !(release > 0)) throw std::invalid_argument("envelope times must be positive");
    if (!(peak > 0) || !(peak < 1)) throw std::invalid_argument("peak must lie in (0, 1)");
  }
};

namespace detail {

inline double oscillator(Waveform w, double phase) {
  double frac = phase - std::floor(phase);
  switch (w) {
    case Waveform::sine: return std::sin(2.0 * std::numbers::pi * frac);
    case Waveform::square: return frac < 0.5 ? 1.0 : -1.0;
    case Waveform::saw: return 2.0 * frac - 1.0;
  }
  return 0;
}

// Linear attack, exponential decay while held, linear release afterwards.
inline double envelope(double tau, double duration, const SynthConfig& c) {
  auto held = [&](double t) { return (t < c.attack ? t / c.attack : 1.0) * std::exp(-t / c.decay); };
  if (tau < duration) return held(tau);
  double r = 1.0 - (tau - duration) / c.release;
  return r > 0 ? held(duration) * r : 0.0;
}

inline std::size_t sample_ceil(double seconds, int rate) {
  return static_cast<std::size_t>(std::ceil(seconds * rate - 1e-9));
}

inline void put_le(std::vector<std::uint8_t>& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

}  // namespace detail

/// Mix the score at full precision, then scale so the loudest sample sits at
/// `peak` of full scale. Rounding is half away from zero.
inline std::vector<std::int16_t> render_samples(const Score& score, const SynthConfig& cfg = {}) {
  cfg.validate();
  if (score.empty()) return {};
  const int rate = cfg.sample_rate;
  std::size_t total = detail::sample_ceil(score.end_time() + cfg.release, rate);
  std::vector<double> mix(total, 0.0);
  for (const auto& ev : score.events()) {
    auto it = cfg.waveforms.find(ev.channel);
    Waveform w = it == cfg.waveforms.end() ? Waveform::sine : it->second;
    auto first = static_cast<std::size_t>(std::llround(ev.start * rate));
    std::size_t len = detail::sample_ceil(ev.duration + cfg.release, rate);
    for (std::size_t n = 0; n < len && first + n < total; ++n) {
      double tau = static_cast<double>(n) / rate;
      mix[first + n] += ev.velocity * detail::envelope(tau, ev.duration, cfg) * detail::oscillator(w, ev.frequency * tau);
    }
  }
  double loudest = 0;
  for (double x : mix) loudest = std::max(loudest, std::abs(x));
  double scale = loudest > 0 ? cfg.peak * 32767.0 / loudest : 0.0;
  std::vector<std::int16_t> out(total);
  for (std::size_t i = 0; i < total; ++i) {
    double v = std::round(mix[i] * scale);
    out[i] = static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
  }
  return out;
}

inline std::vector<std::uint8_t> wav_bytes(const std::vector<std::int16_t>& samples, int sample_rate) {
  std::vector<std::uint8_t> out;
  auto data = static_cast<std::uint32_t>(samples.size() * 2);
  out.reserve(44 + data);
  for (char ch : std::string("RIFF")) out.push_back(static_cast<std::uint8_t>(ch));
  detail::put_le(out, 36 + data, 4);
  for (char ch : std::string("WAVEfmt ")) out.push_back(static_cast<std::uint8_t>(ch));
  detail::put_le(out, 16, 4);
  detail::put_le(out, 1, 2);  // PCM
  detail::put_le(out, 1, 2);  // mono
  detail::put_le(out, static_cast<std::uint32_t>(sample_rate), 4);
  detail::put_le(out, static_cast<std::uint32_t>(sample_rate) * 2, 4);
  detail::put_le(out, 2, 2);
  detail::put_le(out, 16, 2);
  for (char ch : std::string("data")) out.push_back(static_cast<std::uint8_t>(ch));
  detail::put_le(out, data, 4);
  for (std::int16_t s : samples) detail::put_le(out, static_cast<std::uint16_t>(s), 2);
  return out;
}

inline std::vector<std::uint8_t> render_wav(const Score& score, const SynthConfig& cfg = {}) {
  return wav_bytes(render_samples(score, cfg), cfg.sample_rate);
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace hormonica
