#pragma once

/**
 * @file session.hpp
 * @brief The instrument as a deterministic state machine over protocol
 *        messages, with persistence and replay.
 *
 * A session is either universal (a TessellationPatch addressed by endpoint
 * pairs) or equivariant (a quotient triangulation of a finite-index subgroup,
 * addressed by edge and triangle ids). Every accepted message is appended to
 * the log; replaying the log from the same config rebuilds the state and the
 * score exactly. Times come from the session clock, never from the client.
 */

#include "audio.hpp"
#include "io.hpp"
#include "surface.hpp"
#include "tessellation.hpp"
#include "wav.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace hormonica {

struct SessionConfig {
  Tuning tuning;
  SynthConfig synth;
  double step = 0.3;  // clock advance per sounding message
  unsigned viewport_gen = 3;
  unsigned develop_depth = 2;
};

namespace detail {

inline void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
    if (!known) throw FormatError(io::at_path(path + "." + it.key(), "unknown field"));
  }
}

inline Tempering tempering_from_json(const Json& j, int root, const std::string& path) {
  if (j.is_string()) {
    try {
      return tempering_by_name(j.get<std::string>(), root);
    } catch (const std::invalid_argument& e) {
      throw FormatError(io::at_path(path, e.what()));
    }
  }
  if (!j.is_object()) throw FormatError(io::at_path(path, "expected a name or {\"name\",\"ratios\",\"root\"}"));
  reject_unknown(j, {"name", "ratios", "root"}, path);
  const Json& ratios = io::require(j, "ratios", path);
  if (!ratios.is_array() || ratios.size() != 12) throw FormatError(io::at_path(path + ".ratios", "expected 12 ratios"));
  std::array<Rational, 12> r;
  for (std::size_t i = 0; i < 12; ++i) {
    std::string p = path + ".ratios[" + std::to_string(i) + "]";
    ExtendedRational x = io::as_rational(ratios[i], p);
    if (x.is_infinity()) throw FormatError(io::at_path(p, "ratio must be finite"));
    r[i] = Rational(x.p(), x.q());
  }
  int custom_root = j.contains("root") ? static_cast<int>(io::as_integer(j["root"], path + ".root")) : root;
  try {
    return exact_tempering(j.value("name", std::string("custom")), r, custom_root);
  } catch (const std::invalid_argument& e) {
    throw FormatError(io::at_path(path, e.what()));
  }
}

}  // namespace detail

inline SessionConfig config_from_json(const Json& j) {
  SessionConfig c;
  if (!j.is_object()) throw FormatError("config: expected an object");
  detail::reject_unknown(j, {"tempering", "root", "octave_shift", "untuned_convention", "step", "viewport_gen",
                             "develop_depth", "synth"},
                         "config");
  int root = j.contains("root") ? static_cast<int>(io::as_integer(j["root"], "config.root")) : 3;
  if (j.contains("tempering")) c.tuning.tempering = detail::tempering_from_json(j["tempering"], root, "config.tempering");
  if (j.contains("octave_shift")) {
    c.tuning.octave_shift = static_cast<int>(io::as_integer(j["octave_shift"], "config.octave_shift"));
    if (c.tuning.octave_shift < 0) throw FormatError("config.octave_shift: must be >= 0");
  }
  if (j.contains("untuned_convention")) {
    if (!j["untuned_convention"].is_boolean()) throw FormatError("config.untuned_convention: expected a boolean");
    c.tuning.untuned_convention = j["untuned_convention"].get<bool>();
  }
  if (j.contains("step")) {
    c.step = io::as_number(j["step"], "config.step");
    if (!(c.step > 0)) throw FormatError("config.step: must be positive");
  }
  if (j.contains("viewport_gen")) {
    long long g = io::as_integer(j["viewport_gen"], "config.viewport_gen");
    if (g < 0 || g > 12) throw FormatError("config.viewport_gen: must lie in [0, 12]");
    c.viewport_gen = static_cast<unsigned>(g);
  }
  if (j.contains("develop_depth")) {
    long long d = io::as_integer(j["develop_depth"], "config.develop_depth");
    if (d < 1 || d > 5) throw FormatError("config.develop_depth: must lie in [1, 5]");
    c.develop_depth = static_cast<unsigned>(d);
  }
  if (j.contains("synth")) {
    const Json& s = j["synth"];
    if (!s.is_object()) throw FormatError("config.synth: expected an object");
    detail::reject_unknown(s, {"sample_rate", "attack", "decay", "release", "peak", "waveforms"}, "config.synth");
    if (s.contains("sample_rate")) c.synth.sample_rate = static_cast<int>(io::as_integer(s["sample_rate"], "config.synth.sample_rate"));
    if (s.contains("attack")) c.synth.attack = io::as_number(s["attack"], "config.synth.attack");
    if (s.contains("decay")) c.synth.decay = io::as_number(s["decay"], "config.synth.decay");
    if (s.contains("release")) c.synth.release = io::as_number(s["release"], "config.synth.release");
    if (s.contains("peak")) c.synth.peak = io::as_number(s["peak"], "config.synth.peak");
    if (s.contains("waveforms")) {
      if (!s["waveforms"].is_object()) throw FormatError("config.synth.waveforms: expected {\"channel\": name}");
      for (auto it = s["waveforms"].begin(); it != s["waveforms"].end(); ++it) {
        std::string p = "config.synth.waveforms." + it.key();
        try {
          c.synth.waveforms[std::stoi(it.key())] = waveform_from_name(it.value().get<std::string>());
        } catch (const std::exception& e) {
          throw FormatError(io::at_path(p, e.what()));
        }
      }
    }
    try {
      c.synth.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError(io::at_path("config.synth", e.what()));
    }
  }
  return c;
}

inline Json config_to_json(const SessionConfig& c) {
  Json temp;
  const Tempering& t = c.tuning.tempering;
  if (t.equal_tempered) {
    temp = "equal";
  } else {
    Json ratios = Json::array();
    for (std::size_t i = 0; i < 12; ++i)
      ratios.push_back(t.exact ? Json(ExtendedRational(Integer(boost::multiprecision::numerator((*t.exact)[i])), Integer(boost::multiprecision::denominator((*t.exact)[i]))).str())
                               : Json(t.ratios[i]));
    temp = {{"name", t.name}, {"ratios", ratios}, {"root", t.root}};
  }
  Json waves = Json::object();
  for (const auto& [ch, w] : c.synth.waveforms) waves[std::to_string(ch)] = waveform_name(w);
  return {{"tempering", temp},
          {"octave_shift", c.tuning.octave_shift},
          {"untuned_convention", c.tuning.untuned_convention},
          {"step", c.step},
          {"viewport_gen", c.viewport_gen},
          {"develop_depth", c.develop_depth},
          {"synth",
           {{"sample_rate", c.synth.sample_rate},
            {"attack", c.synth.attack},
            {"decay", c.synth.decay},
            {"release", c.synth.release},
            {"peak", c.synth.peak},
            {"waveforms", waves}}}};
}

// Config from the file named by HOROMONICA_CONFIG, defaults otherwise.
inline SessionConfig config_from_environment() {
  const char* path = std::getenv("HOROMONICA_CONFIG");
  if (path == nullptr || *path == '\0') return {};
  return config_from_json(io::read_file(path));
}

class Session {
 public:
  explicit Session(SessionConfig cfg = {}) : cfg_(std::move(cfg)) {
    score_.meta.tempering = cfg_.tuning.tempering.name;
    score_.meta.octave_shift = cfg_.tuning.octave_shift;
  }

  /// Apply one client message. Errors come back as a single error response
  /// and leave the session untouched.
  std::vector<Json> handle(const Json& msg) {
    State next = state_;
    std::vector<NoteEvent> sounded;
    std::vector<Json> out;
    try {
      out = apply(next, msg, sounded);
    } catch (const std::exception& e) {
      return {Json{{"type", "error"}, {"reason", e.what()}, {"mode", mode_name(state_)}}};
    }
    state_ = std::move(next);
    for (auto& ev : sounded) score_.add(ev);
    log_.push_back(msg);
    for (auto& r : out) r["mode"] = mode_name(state_);
    return out;
  }

  bool equivariant() const { return state_.equivariant; }
  const std::string& group() const { return state_.group; }
  const TessellationPatch& patch() const { return state_.patch; }
  const QuotientTriangulation& quotient() const { return state_.quotient; }
  const CosetTable& table() const { return state_.table; }
  double clock() const { return state_.clock; }
  const std::vector<Json>& log() const { return log_; }
  const Score& score() const { return score_; }
  const SessionConfig& config() const { return cfg_; }

  // Summary compared against the replayed log when a save is loaded.
  Json state_json() const {
    const State& s = state_;
    Json j{{"mode", mode_name(s)}, {"clock", s.clock}, {"view_gen", s.view_gen}, {"score_events", score_.events().size()}};
    Json holds = Json::array();
    for (const auto& [id, h] : s.holds) holds.push_back({{"hold_id", id}, {"t", h.start}, {"freq", h.frequency}});
    j["holds"] = holds;
    if (s.equivariant) {
      j["group"] = s.group;
      Json lams = Json::array(), hist = Json::array(), tris = Json::array();
      for (const auto& l : s.quotient.lambdas()) lams.push_back(integer_json(l));
      for (auto e : s.quotient.history()) hist.push_back(e);
      for (const auto& t : s.quotient.canonical_triangles()) tris.push_back(t);
      j["quotient"] = {{"lambdas", lams}, {"triangles", tris}, {"history", hist}};
    } else {
      Json removed = Json::array(), added = Json::array();
      for (const auto& e : s.patch.removed()) removed.push_back(to_json(e));
      for (const auto& e : s.patch.added()) added.push_back(to_json(e));
      j["patch"] = {{"removed", removed}, {"added", added}, {"flips", s.patch.history().size()}};
    }
    return j;
  }

  std::size_t state_hash() const { return std::hash<std::string>{}(state_json().dump()); }

  friend bool operator==(const Session& a, const Session& b) {
    return a.state_json() == b.state_json() && a.log_ == b.log_ && a.score_ == b.score_;
  }

 private:
  struct Hold {
    double start = 0;
    double frequency = 0;
    int channel = 0;
  };

  struct State {
    bool equivariant = false;
    std::string group;
    TessellationPatch patch;
    CosetTable table;
    QuotientTriangulation quotient;
    double clock = 0;
    unsigned view_gen = 3;
    std::map<long long, Hold> holds;
    long long next_hold = 0;
  };

  static std::string mode_name(const State& s) { return s.equivariant ? "equivariant" : "universal"; }

  static std::string message_type(const Json& msg) {
    if (!msg.is_object()) throw FormatError("message: expected a JSON object");
    const Json& t = io::require(msg, "type", "message");
    if (!t.is_string()) throw FormatError("message.type: expected a string");
    return t.get<std::string>();
  }

  bool untuned(const State& s) const {
    if (!cfg_.tuning.untuned_convention) return false;
    return s.equivariant ? s.quotient.history().empty() : s.patch.history().empty();
  }

  // Lambda of the addressed edge, rejecting addressing that belongs to the other mode.
  static Integer edge_lambda(const State& s, const Json& msg, EdgeKey* universal_edge = nullptr,
                             std::size_t* edge_id = nullptr) {
    if (s.equivariant) {
      if (msg.contains("edge")) throw FormatError("message.edge: equivariant sessions address edges by edge_id");
      long long id = io::as_integer(io::require(msg, "edge_id", "message"), "message.edge_id");
      if (id < 0 || static_cast<std::size_t>(id) >= s.quotient.edge_count())
        throw std::invalid_argument("no quotient edge with id " + std::to_string(id));
      if (edge_id) *edge_id = static_cast<std::size_t>(id);
      return s.quotient.lambda(static_cast<std::size_t>(id));
    }
    if (msg.contains("edge_id")) throw FormatError("message.edge_id: universal sessions address edges by endpoints");
    EdgeKey e = io::as_edge(io::require(msg, "edge", "message"), "message.edge");
    if (!s.patch.contains(e)) throw std::invalid_argument("edge " + e.str() + " is not in the tessellation");
    if (universal_edge) *universal_edge = e;
    return e.lambda();
  }

  static Json tone(const NoteEvent& ev, const Integer& lam) {
    return {{"type", "tone"}, {"freq", ev.frequency}, {"dur", ev.duration}, {"ch", ev.channel}, {"t", ev.start},
            {"lambda", integer_json(lam)}};
  }

  NoteEvent sound(State& s, const Integer& lam, int channel) const {
    if (lam > 100000) throw std::invalid_argument("lambda " + lam.str() + " is beyond the audible range");
    NoteEvent ev = tap_event(to_int64(lam), s.clock, cfg_.tuning, untuned(s), channel);
    return ev;
  }

  Json view(const State& s) const {
    if (s.equivariant)
      return lifted_viewport_json(develop(s.quotient, s.table, cfg_.develop_depth),
                                  s.quotient);
    return viewport_json(s.patch, s.view_gen);
  }

  static int channel_of(const Json& msg) {
    if (!msg.contains("ch")) return 0;
    long long ch = io::as_integer(msg["ch"], "message.ch");
    if (ch < 0 || ch > 15) throw FormatError("message.ch: must lie in [0, 15]");
    return static_cast<int>(ch);
  }

  std::vector<Json> apply(State& s, const Json& msg, std::vector<NoteEvent>& sounded) const {
    const std::string type = message_type(msg);
    if (type == "hello") {
      detail::reject_unknown(msg, {"type", "version"}, "message");
      if (io::as_integer(io::require(msg, "version", "message"), "message.version") != 1)
        throw FormatError("message.version: only protocol version 1 is supported");
      Json r{{"type", "hello"}, {"version", 1}};
      if (s.equivariant) r["group"] = s.group;
      return {r};
    }
    if (type == "viewport") {
      detail::reject_unknown(msg, {"type", "gen"}, "message");
      if (msg.contains("gen")) {
        long long g = io::as_integer(msg["gen"], "message.gen");
        if (g < 0 || g > 12) throw FormatError("message.gen: must lie in [0, 12]");
        s.view_gen = static_cast<unsigned>(g);
      }
      return {view(s)};
    }
    if (type == "tap") {
      detail::reject_unknown(msg, {"type", "edge", "edge_id", "ch"}, "message");
      Integer lam = edge_lambda(s, msg);
      NoteEvent ev = sound(s, lam, channel_of(msg));
      s.clock += cfg_.step;
      sounded.push_back(ev);
      return {tone(ev, lam)};
    }
    if (type == "hold_start") {
      detail::reject_unknown(msg, {"type", "edge", "edge_id", "d", "ch"}, "message");
      Integer lam = edge_lambda(s, msg);
      double d = msg.contains("d") ? io::as_number(msg["d"], "message.d") : 0.0;
      if (lam > 100000) throw std::invalid_argument("lambda " + lam.str() + " is beyond the audible range");
      long long base = untuned(s) ? 0 : to_int64(lam);
      double f = hold_frequency_from(base, d, cfg_.tuning);
      if (!std::isfinite(f) || !(f > 0)) throw std::invalid_argument("hold frequency out of range");
      long long id = s.next_hold++;
      s.holds[id] = {s.clock, f, channel_of(msg)};
      Json r{{"type", "tone_start"}, {"hold_id", id}, {"freq", f}, {"ch", s.holds[id].channel}, {"t", s.clock}};
      s.clock += cfg_.step;
      return {r};
    }
    if (type == "hold_stop") {
      detail::reject_unknown(msg, {"type", "hold_id"}, "message");
      long long id = io::as_integer(io::require(msg, "hold_id", "message"), "message.hold_id");
      auto it = s.holds.find(id);
      if (it == s.holds.end()) throw std::invalid_argument("no active hold with id " + std::to_string(id));
      sounded.push_back({it->second.start, s.clock - it->second.start, it->second.frequency, 1.0, it->second.channel});
      s.holds.erase(it);
      return {Json{{"type", "tone_stop"}, {"hold_id", id}, {"t", s.clock}}};
    }
    if (type == "pedal_tap") {
      detail::reject_unknown(msg, {"type", "edge", "edge_id", "ch"}, "message");
      Integer lam;
      if (s.equivariant) {
        std::size_t id = 0;
        edge_lambda(s, msg, nullptr, &id);
        lam = s.quotient.flip(id);
      } else {
        EdgeKey e = io::as_edge(io::require(msg, "edge", "message"), "message.edge");
        edge_lambda(s, msg);
        auto rec = s.patch.flip(e);
        lam = rec.f;
      }
      std::vector<Json> out{view(s)};
      if (lam <= 100000) {
        NoteEvent ev = sound(s, lam, channel_of(msg));
        s.clock += cfg_.step;
        sounded.push_back(ev);
        out.push_back(tone(ev, lam));
      }
      return out;
    }
    if (type == "triangle_tap") {
      detail::reject_unknown(msg, {"type", "vertices", "tri_id", "ch"}, "message");
      std::array<Integer, 3> chord;
      if (s.equivariant) {
        if (msg.contains("vertices")) throw FormatError("message.vertices: equivariant sessions address triangles by tri_id");
        long long id = io::as_integer(io::require(msg, "tri_id", "message"), "message.tri_id");
        if (id < 0 || static_cast<std::size_t>(id) >= s.quotient.triangle_count())
          throw std::invalid_argument("no quotient triangle with id " + std::to_string(id));
        chord = s.quotient.chord(static_cast<std::size_t>(id));
      } else {
        if (msg.contains("tri_id")) throw FormatError("message.tri_id: universal sessions address triangles by vertices");
        const Json& v = io::require(msg, "vertices", "message");
        if (!v.is_array() || v.size() != 3) throw FormatError("message.vertices: expected three \"p/q\" strings");
        TriangleKey tri(io::as_rational(v[0], "message.vertices[0]"), io::as_rational(v[1], "message.vertices[1]"),
                        io::as_rational(v[2], "message.vertices[2]"));
        if (!s.patch.is_face(tri)) throw std::invalid_argument("triangle " + tri.str() + " is not a face");
        chord = chord_of(tri);
      }
      int ch = channel_of(msg);
      std::vector<Json> out;
      std::vector<NoteEvent> evs;
      for (const auto& lam : chord) evs.push_back(sound(s, lam, ch));
      for (std::size_t i = 0; i < 3; ++i) {
        out.push_back(tone(evs[i], chord[i]));
        sounded.push_back(evs[i]);
      }
      s.clock += cfg_.step;
      return out;
    }
    if (type == "mode") {
      detail::reject_unknown(msg, {"type", "equivariant", "group", "table"}, "message");
      const Json& eq = io::require(msg, "equivariant", "message");
      if (!eq.is_boolean()) throw FormatError("message.equivariant: expected a boolean");
      State fresh;
      fresh.clock = s.clock;
      fresh.view_gen = s.view_gen;
      fresh.next_hold = s.next_hold;
      if (eq.get<bool>()) {
        fresh.equivariant = true;
        if (msg.contains("table")) {
          fresh.table = coset_table_from_json(msg["table"]);
          fresh.group = msg.contains("group") ? msg["group"].get<std::string>() : std::string("custom");
        } else {
          fresh.group = msg.contains("group") ? msg["group"].get<std::string>() : std::string("commutator");
          try {
            fresh.table = builtin_group(fresh.group);
          } catch (const std::invalid_argument& e) {
            throw FormatError(io::at_path("message.group", e.what()));
          }
        }
        fresh.quotient = quotient_triangulation(fresh.table);
      } else if (msg.contains("group") || msg.contains("table")) {
        throw FormatError("message.group: universal mode takes no group");
      }
      s = std::move(fresh);
      Json r{{"type", "mode"}, {"equivariant", s.equivariant}};
      if (s.equivariant) {
        SurfaceType st = s.quotient.topology();
        r["group"] = s.group;
        r["genus"] = st.genus;
        r["punctures"] = st.punctures;
        r["edges"] = s.quotient.edge_count();
        r["triangles"] = s.quotient.triangle_count();
      }
      return {r, view(s)};
    }
    throw FormatError("message.type: unknown message type '" + type + "'");
  }

  SessionConfig cfg_;
  State state_;
  std::vector<Json> log_;
  Score score_;
};

inline Json save_session_json(const Session& s) {
  return {{"format", "hormonica-session"},
          {"version", 1},
          {"config", config_to_json(s.config())},
          {"log", s.log()},
          {"state", s.state_json()}};
}

/// Rebuild a session from its saved form by replaying the log; the saved
/// state summary must match what the replay produces.
inline Session load_session_json(const Json& j) {
  if (!j.is_object()) throw FormatError("document: expected an object");
  const Json& fmt = io::require(j, "format", "");
  if (fmt != "hormonica-session") throw FormatError("format: not a hormonica session");
  if (io::as_integer(io::require(j, "version", ""), "version") != 1) throw FormatError("version: unsupported");
  Session s(config_from_json(io::require(j, "config", "")));
  const Json& log = io::require(j, "log", "");
  if (!log.is_array()) throw FormatError("log: expected a list of messages");
  for (std::size_t i = 0; i < log.size(); ++i) {
    auto responses = s.handle(log[i]);
    if (responses.size() == 1 && responses[0]["type"] == "error")
      throw FormatError("log[" + std::to_string(i) + "]: " + responses[0]["reason"].get<std::string>());
  }
  if (j.contains("state") && j["state"] != s.state_json())
    throw FormatError("state: does not match the state replayed from the log");
  return s;
}

inline void save_session(const Session& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << save_session_json(s).dump(2) << '\n';
}

inline Session load_session(const std::string& path) { return load_session_json(io::read_file(path)); }

/// Serve newline-delimited JSON: one request per line, one response per line.
inline void serve_stream(std::istream& in, std::ostream& out, Session& s) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<Json> responses;
    try {
      responses = s.handle(Json::parse(line));
    } catch (const Json::parse_error& e) {
      responses = {Json{{"type", "error"},
                        {"reason", std::string("malformed JSON: ") + e.what()},
                        {"mode", s.equivariant() ? "equivariant" : "universal"}}};
    }
    for (const auto& r : responses) out << r.dump() << '\n';
    out.flush();
  }
}

}  // namespace hormonica
