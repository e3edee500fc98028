#pragma once

// JSON and SVG encodings shared by the CLI, the session and the tests.

#include "audio.hpp"
#include "chord.hpp"
#include "surface.hpp"
#include "tessellation.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hormonica {

using Json = nlohmann::json;

/// A schema violation; `what()` starts with the offending field path.
struct FormatError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

namespace io {

inline std::string at_path(const std::string& path, const std::string& msg) {
  return (path.empty() ? std::string("document") : path) + ": " + msg;
}

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FormatError(at_path(path, "expected an object"));
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(at_path(path, "missing field '" + key + "'"));
  return *it;
}

inline long long as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError(at_path(path, "expected an integer"));
  return j.get<long long>();
}

inline double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw FormatError(at_path(path, "expected a number"));
  return j.get<double>();
}

inline ExtendedRational as_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return ExtendedRational(j.get<long long>());
  if (!j.is_string()) throw FormatError(at_path(path, "expected a \"p/q\" string"));
  try {
    return ExtendedRational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw FormatError(at_path(path, e.what()));
  }
}

inline EdgeKey as_edge(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw FormatError(at_path(path, "an edge is a pair of \"p/q\" strings"));
  auto a = as_rational(j[0], path + "[0]");
  auto b = as_rational(j[1], path + "[1]");
  if (a == b) throw FormatError(at_path(path, "edge endpoints coincide"));
  return {a, b};
}

inline Json point(const DiskPoint& p) { return Json::array({p.x, p.y}); }

inline Json read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line number.
    std::string text = buf.str();
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i) line += text[i] == '\n';
    throw FormatError(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace io

// Integers that fit stay JSON numbers; larger ones become decimal strings.
inline Json integer_json(const Integer& x) {
  if (abs(x) < Integer(1) << 62) return to_int64(x);
  return x.str();
}

inline Json to_json(const ExtendedRational& x) { return x.str(); }
inline Json to_json(const EdgeKey& e) { return Json::array({e.lo.str(), e.hi.str()}); }

inline Json to_json(const GeodesicArc& g) {
  Json j{{"kind", g.kind == GeodesicArc::Kind::diameter ? "diameter" : "arc"},
         {"from", io::point(g.from)},
         {"to", io::point(g.to)}};
  if (g.kind == GeodesicArc::Kind::arc) {
    j["center"] = io::point(g.center);
    j["radius"] = g.radius;
  }
  return j;
}

// [{"edge": ["p/q", "r/s"]}, ...]; a bare pair is accepted too.
inline std::vector<EdgeKey> parse_tuning_script(const Json& j) {
  if (!j.is_array()) throw FormatError("document: a tuning script is a list of flip instructions");
  std::vector<EdgeKey> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string path = "[" + std::to_string(i) + "]";
    out.push_back(j[i].is_object() ? io::as_edge(io::require(j[i], "edge", path), path + ".edge")
                                   : io::as_edge(j[i], path));
  }
  return out;
}

inline Json tuning_script_json(const std::vector<EdgeKey>& flips) {
  Json out = Json::array();
  for (const auto& e : flips) out.push_back({{"edge", to_json(e)}});
  return out;
}

inline Json certificate_json(const ChordTriple& t) {
  ChordVerdict v = check_chord(t);
  Json triple = Json::array();
  for (const auto& l : t.lambdas) triple.push_back(integer_json(l));
  Json j{{"triple", triple}, {"chord", v.chord}};
  if (v.chord) {
    ChordCertificate c = realize_chord(t);
    Json verts = Json::array(), lams = Json::array();
    for (const auto& x : c.vertices) verts.push_back(x.str());
    for (const auto& l : c.lambdas) lams.push_back(integer_json(l));
    j["certificate"] = {{"vertices", verts}, {"lambdas", lams}};
  } else {
    j["reason"] = v.reason;
  }
  return j;
}

inline Json score_to_json(const Score& s) {
  Json events = Json::array();
  for (const auto& e : s.events())
    events.push_back({{"t", e.start}, {"dur", e.duration}, {"freq", e.frequency}, {"vel", e.velocity}, {"ch", e.channel}});
  return {{"meta", {{"tempering", s.meta.tempering}, {"octave_shift", s.meta.octave_shift}, {"session_id", s.meta.session_id}}},
          {"events", events}};
}

inline Score score_from_json(const Json& j) {
  Score s;
  const Json& meta = io::require(j, "meta", "");
  if (meta.contains("tempering")) s.meta.tempering = meta["tempering"].get<std::string>();
  if (meta.contains("octave_shift")) s.meta.octave_shift = static_cast<int>(io::as_integer(meta["octave_shift"], "meta.octave_shift"));
  if (meta.contains("session_id")) s.meta.session_id = meta["session_id"].get<std::string>();
  const Json& events = io::require(j, "events", "");
  if (!events.is_array()) throw FormatError("events: expected a list");
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::string p = "events[" + std::to_string(i) + "]";
    NoteEvent e{io::as_number(io::require(events[i], "t", p), p + ".t"),
                io::as_number(io::require(events[i], "dur", p), p + ".dur"),
                io::as_number(io::require(events[i], "freq", p), p + ".freq"),
                events[i].contains("vel") ? io::as_number(events[i]["vel"], p + ".vel") : 1.0,
                events[i].contains("ch") ? static_cast<int>(io::as_integer(events[i]["ch"], p + ".ch")) : 0};
    try {
      s.add(e);
    } catch (const std::invalid_argument& ex) {
      throw FormatError(io::at_path(p, ex.what()));
    }
  }
  return s;
}

inline Json coset_table_json(const CosetTable& t) { return {{"n", t.index()}, {"S", t.S}, {"T", t.T}}; }

inline CosetTable coset_table_from_json(const Json& j) {
  auto perm = [&](const char* key) {
    const Json& a = io::require(j, key, "");
    if (!a.is_array()) throw FormatError(std::string(key) + ": expected a list");
    Permutation p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      long long v = io::as_integer(a[i], std::string(key) + "[" + std::to_string(i) + "]");
      if (v < 0) throw FormatError(std::string(key) + "[" + std::to_string(i) + "]: negative index");
      p.push_back(static_cast<std::size_t>(v));
    }
    return p;
  };
  Permutation S = perm("S"), T = perm("T");
  if (j.contains("n") && io::as_integer(j["n"], "n") != static_cast<long long>(S.size()))
    throw FormatError("n: does not match the length of S");
  try {
    return make_coset_table(std::move(S), std::move(T));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

inline Json frets_json(const EdgeKey& e) {
  FretSpec f = fret_points(e);
  Json frets = Json::array();
  for (const auto& [j, p] : f.frets) frets.push_back({{"index", j}, {"at", io::point(p)}});
  return {{"distinguished", io::point(f.distinguished)}, {"frets", frets}};
}

inline Json edge_json(const EdgeKey& e) {
  auto [tail, head] = orient_edge(e.lo, e.hi);
  Json frets = frets_json(e);
  return {{"a", e.lo.str()},
          {"b", e.hi.str()},
          {"lambda", integer_json(e.lambda())},
          {"orient", Json::array({tail.str(), head.str()})},
          {"arc", to_json(geodesic_arc(e.lo, e.hi))},
          {"distinguished", frets["distinguished"]},
          {"frets", frets["frets"]}};
}

inline Json triangle_json(const TriangleKey& t, const std::array<Integer, 3>& chord) {
  Json chord_j = Json::array();
  for (const auto& x : chord) chord_j.push_back(integer_json(x));
  return {{"vertices", Json::array({t.v[0].str(), t.v[1].str(), t.v[2].str()})}, {"chord", chord_j}};
}

/// Edges and faces of t whose vertices have generation <= G.
inline Json viewport_json(const TessellationPatch& t, unsigned G) {
  Json edges = Json::array(), tris = Json::array();
  for (const auto& ve : edges_in_viewport(t, G)) edges.push_back(edge_json(ve.edge));
  for (const auto& f : faces_in_viewport(t, G)) tris.push_back(triangle_json(f, chord_of(f)));
  return {{"type", "tessellation"}, {"gen", G}, {"edges", edges}, {"triangles", tris}};
}

// Lifted picture of a quotient: every edge carries its quotient edge id.
inline Json lifted_viewport_json(const LiftedPatch& patch, const QuotientTriangulation& q) {
  Json edges = Json::array(), tris = Json::array();
  for (const auto& le : patch.edges(q)) {
    Json e = edge_json(le.edge);
    e["edge_id"] = le.quotient_edge;
    edges.push_back(std::move(e));
  }
  for (const auto& lt : patch.triangles) {
    Json t = triangle_json(TriangleKey(lt.corners[0], lt.corners[1], lt.corners[2]), q.chord(lt.quotient_triangle));
    t["tri_id"] = lt.quotient_triangle;
    tris.push_back(std::move(t));
  }
  return {{"type", "tessellation"}, {"depth", patch.radius}, {"edges", edges}, {"triangles", tris}};
}

/// Disk picture of a tessellation message: boundary circle, edges colored by
/// the generation of their head, distinguished frets as crosses.
inline std::string viewport_svg(const Json& view, int size = 800) {
  const double half = size / 2.0, scale = size * 0.48;
  auto X = [&](double x) { return half + scale * x; };
  auto Y = [&](double y) { return half - scale * y; };
  static const char* palette[] = {"#1b4f72", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#148f77", "#566573"};
  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  svg << "<circle cx=\"" << half << "\" cy=\"" << half << "\" r=\"" << scale
      << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  for (const auto& e : view.at("edges")) {
    const Json& arc = e.at("arc");
    auto head = ExtendedRational::parse(e.at("orient")[1].get<std::string>());
    std::size_t g = static_cast<std::size_t>(std::min<long long>(to_int64(generation(head)), 6));
    double fx = arc["from"][0], fy = arc["from"][1], tx = arc["to"][0], ty = arc["to"][1];
    svg << "<path d=\"M " << X(fx) << ' ' << Y(fy) << ' ';
    if (arc["kind"] == "diameter") {
      svg << "L " << X(tx) << ' ' << Y(ty);
    } else {
      double r = arc["radius"].get<double>() * scale;
      // The arc bulges toward the disk center; pick the sweep accordingly.
      double cross = fx * ty - fy * tx;
      svg << "A " << r << ' ' << r << " 0 0 " << (cross > 0 ? 0 : 1) << ' ' << X(tx) << ' ' << Y(ty);
    }
    svg << "\" fill=\"none\" stroke=\"" << palette[g] << "\" stroke-width=\"1\"><title>" << e["a"].get<std::string>()
        << " - " << e["b"].get<std::string>() << " lambda " << e["lambda"] << "</title></path>\n";
    double px = e["distinguished"][0], py = e["distinguished"][1];
    double d = 3.0;
    svg << "<path d=\"M " << X(px) - d << ' ' << Y(py) - d << " L " << X(px) + d << ' ' << Y(py) + d << " M "
        << X(px) - d << ' ' << Y(py) + d << " L " << X(px) + d << ' ' << Y(py) - d
        << "\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace hormonica
