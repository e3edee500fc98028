// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <hormonica/hormonica.hpp>

#include "golden.hpp"

#include <chrono>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

using namespace hormonica;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream why;

  void fail(const std::string& what) {
    if (ok) why << what;
    ok = false;
  }
};

ChordTriple T(long long a, long long b, long long c) { return {Integer(a), Integer(b), Integer(c)}; }

void chord_theorem(Verdict& v) {
  std::vector<std::array<long long, 3>> triples;
  for (long long a = 1; a <= 12; ++a)
    for (long long b = a; b <= 12; ++b)
      for (long long c = b; c <= 12; ++c) triples.push_back({a, b, c});
  std::vector<std::future<std::string>> jobs;
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t w = 0; w < workers; ++w)
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < triples.size(); i += workers) {
        auto [a, b, c] = triples[i];
        auto found = brute_force_realize(T(a, b, c), 100);
        if (found.has_value() != is_chord(T(a, b, c)) || (found && !verify(*found, T(a, b, c))))
          return "oracle disagrees at (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
      }
      return std::string();
    }));
  for (auto& j : jobs)
    if (auto msg = j.get(); !msg.empty()) v.fail(msg);

  std::size_t certified = 0;
  for (long long a = 1; a <= 30; ++a)
    for (long long b = 1; b <= 30; ++b)
      for (long long c = 1; c <= 30; ++c) {
        if (!is_chord(T(a, b, c))) continue;
        if (opposite_lambdas(realize_chord(T(a, b, c)).vertices) != T(a, b, c).lambdas) v.fail("certificate mismatch");
        ++certified;
      }
  for (auto t : {T(10, 12, 15), T(2, 6, 9), T(3, 6, 10), T(2, 5, 8), T(160, 192, 231)})
    if (is_chord(t)) v.fail("accepted " + t.str());
  for (long long n = 1; n <= 100; ++n)
    for (auto t : {T(1, n, n + 1), T(1, n, 2 * n + 1), T(1, n + 1, 2 * n + 1)})
      if (!is_chord(t) || !verify(realize_chord(t), t)) v.fail("rejected " + t.str());
  v.why << triples.size() << " triples against the oracle, " << certified << " certificates";
}

void markoff_dynamics(Verdict& v) {
  QuotientTriangulation start = quotient_triangulation(builtin_group("commutator"));
  auto triple = [](const QuotientTriangulation& q) { return MarkoffTriple(q.lambda(0), q.lambda(1), q.lambda(2)); };
  std::vector<QuotientTriangulation> layer{start};
  std::set<MarkoffTriple> reached{triple(start).sorted()};
  std::size_t flips = 0;
  for (int d = 1; d <= 6; ++d) {
    std::vector<QuotientTriangulation> next;
    for (const auto& q : layer)
      for (std::size_t e = 0; e < 3; ++e) {
        next.push_back(equivariant_flip(q, e));
        ++flips;
        MarkoffTriple m = triple(next.back());
        if (!MarkoffTriple::satisfies(m.v)) v.fail("Markoff equation broken at " + m.str());
        reached.insert(m.sorted());
      }
    layer = std::move(next);
  }
  if (reached != markoff_tree(6)) v.fail("reached set differs from the Markoff tree");
  for (const auto& m : reached)
    if (!is_chord({m.v[0], m.v[1], m.v[2]})) v.fail(m.str() + " is not a chord");
  v.why << flips << " flips, " << reached.size() << " triples";
}

void ptolemy(Verdict& v) {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 1000 && v.ok; ++trial) {
    TessellationPatch t;
    std::vector<EdgeKey> done;
    for (int step = 0; step < 20; ++step) {
      auto view = edges_in_viewport(t, 3);
      EdgeKey e = view[rng() % view.size()].edge;
      Quad q = t.adjacent_quad(e);
      Integer a = lambda(q.vertices[0], q.vertices[1]), b = lambda(q.vertices[1], q.vertices[2]);
      Integer c = lambda(q.vertices[2], q.vertices[3]), d = lambda(q.vertices[3], q.vertices[0]);
      Integer num = a * c + b * d;
      FlipRecord rec = t.flip(e);
      if (num % e.lambda() != 0) v.fail("lambda(e) does not divide ac + bd");
      if (num / e.lambda() != rec.inserted.lambda() || rec.f != rec.inserted.lambda())
        v.fail("Ptolemy and determinant disagree on " + rec.inserted.str());
      done.push_back(rec.inserted);
    }
    for (auto it = done.rbegin(); it != done.rend(); ++it) t.flip(*it);
    if (!t.pristine()) v.fail("reversal did not restore the Farey tessellation");
  }
  v.why << "1000 sequences of 20 flips";
}

void hyperfan(Verdict& v) {
  TessellationPatch t;
  for (const auto& e : hyperfan_flips(10)) t.flip(e);
  const ExtendedRational oo = ExtendedRational::infinity();
  for (long long k = 1; k <= 10; ++k) {
    TriangleKey f(oo, ExtendedRational(Integer(1), Integer(k)), ExtendedRational(Integer(1), Integer(k + 1)));
    std::array<Integer, 3> want{Integer(1), Integer(k), Integer(k + 1)};
    std::sort(want.begin(), want.end());
    if (!t.is_face(f) || triangle_chord(t, f) != want) v.fail("fan triangle " + std::to_string(k));
  }
  v.why << "chords {1,k,k+1} for k = 1..10";
}

void surface_catalog(Verdict& v) {
  const std::map<std::string, SurfaceType> expected{{"gamma2", {0, 3}}, {"commutator", {1, 1}}, {"gamma3", {0, 4}}};
  std::mt19937_64 rng(7);
  for (const auto& [name, st] : expected) {
    CosetTable tbl = builtin_group(name);
    if (!(classify(tbl) == st)) v.fail(name + " misclassified");
    QuotientTriangulation q = quotient_triangulation(tbl);
    auto counts_ok = [&] {
      return q.edge_count() == 6 * st.genus - 6 + 3 * st.punctures &&
             q.triangle_count() == 4 * st.genus - 4 + 2 * st.punctures && q.topology() == st;
    };
    if (!counts_ok()) v.fail(name + " cell counts");
    for (int done = 0; done < 50;) {
      std::size_t e = rng() % q.edge_count();
      if (q.self_folded(e)) continue;
      q.flip(e);
      ++done;
      if (!counts_ok()) v.fail(name + " counts changed by a flip");
    }
  }
  v.why << "3 groups, 50 flips each";
}

void lift_consistency(Verdict& v) {
  CosetTable tbl = builtin_group("commutator");
  std::size_t sessions = 0;
  std::function<void(const QuotientTriangulation&, int)> walk = [&](const QuotientTriangulation& q, int left) {
    LiftedPatch p = develop(q, tbl, 3);
    ++sessions;
    for (const auto& le : p.edges(q))
      if (le.lambda != q.lambda(le.quotient_edge)) v.fail("lifted " + le.edge.str() + " disagrees");
    if (!lift_consistent(p, q)) v.fail("lifted gluing");
    if (left > 0)
      for (std::size_t e = 0; e < 3; ++e) walk(equivariant_flip(q, e), left - 1);
  };
  walk(quotient_triangulation(tbl), 5);
  v.why << sessions << " flip histories of length <= 5";
}

void frequency_law(Verdict& v) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  if (rel(freq_of_lambda(48), 440.0) > 1e-9) v.fail("lambda 48 is not 440 Hz");
  for (const std::string name : {"equal", "pythagorean", "just"}) {
    Tuning t{tempering_by_name(name)};
    for (long long l = 1; l <= 100; ++l)
      if (rel(freq_of_lambda(l + 12, t), 2 * freq_of_lambda(l, t)) > 1e-9) v.fail(name + " octave law");
  }
  const Tempering pythagorean = pythagorean_tempering();
  const auto& r = *pythagorean.exact;
  const std::array<std::pair<std::size_t, Rational>, 7> footnote{
      {{0, Rational(1)}, {2, Rational(9, 8)}, {4, Rational(81, 64)}, {5, Rational(4, 3)},
       {7, Rational(3, 2)}, {9, Rational(27, 16)}, {11, Rational(243, 128)}}};
  for (const auto& [deg, ratio] : footnote)
    if (r[deg] != ratio) v.fail("Pythagorean degree " + std::to_string(deg));
  v.why << "3 temperings, 7 Pythagorean degrees";
}

void arpeggio_check(Verdict& v) {
  TessellationPatch t;
  Score inf = arpeggio(t, ExtendedRational::infinity(), 5, 1.0, Tuning{});
  Score zero = arpeggio(t, ExtendedRational(0), 5, 1.0, Tuning{});
  if (inf.events().size() != 6 || zero.events().size() != 6) v.fail("expected 6 events");
  for (std::size_t k = 0; k < inf.events().size() && v.ok; ++k) {
    if (inf.events()[k].start != static_cast<double>(k)) v.fail("position " + std::to_string(k));
    if (inf.events()[k].frequency != freq_of_lambda(1)) v.fail("lambda is not 1");
    if (zero.events()[k].start != inf.events()[k].start) v.fail("recentering changes the rhythm");
  }
  for (const auto& c : horocycle_crossings(t, ExtendedRational::infinity(), 5))
    if (c.lambda != 1) v.fail("crossing with lambda != 1");
  v.why << "positions 0..5 at 1/0 and 0/1";
}

void wav_determinism(Verdict& v) {
  auto bytes = render_wav(golden_score(), golden_synth());
  if (bytes != read_bytes(golden_path())) v.fail("golden bytes differ");
  Score one;
  one.add({0, 0.98, 440});
  double period = mean_period(render_samples(one), 441, 40000);
  double err = std::abs(period - 44100.0 / 440) / (44100.0 / 440);
  if (err > 0.005) v.fail("period off by " + std::to_string(err));
  v.why << "period " << period << " samples";
}

void session_replay(Verdict& v) {
  Session s;
  std::mt19937_64 rng(50);
  while (s.log().size() < 50) {
    auto view = edges_in_viewport(s.patch(), 3);
    Json edge = to_json(view[rng() % view.size()].edge);
    switch (rng() % 4) {
      case 0:
      case 1: s.handle({{"type", "pedal_tap"}, {"edge", edge}}); break;
      case 2: s.handle({{"type", "tap"}, {"edge", edge}, {"ch", rng() % 3}}); break;
      default: {
        auto faces = faces_in_viewport(s.patch(), 3);
        if (faces.empty()) break;
        const TriangleKey& f = faces[rng() % faces.size()];
        s.handle({{"type", "triangle_tap"}, {"vertices", {f.v[0].str(), f.v[1].str(), f.v[2].str()}}});
      }
    }
  }
  Session t = load_session_json(Json::parse(save_session_json(s).dump()));
  if (!(t == s)) v.fail("replayed state differs");
  auto a = render_wav(s.score(), s.config().synth), b = render_wav(t.score(), t.config().synth);
  if (a != b) v.fail("WAV differs after replay");
  v.why << s.log().size() << " events, " << a.size() << " WAV bytes";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"chord theorem agrees with the brute-force oracle", chord_theorem},
      {"Markoff dynamics on the once-punctured torus", markoff_dynamics},
      {"Ptolemy integrality and involution", ptolemy},
      {"hyperfan chords", hyperfan},
      {"surface catalog and flip invariance", surface_catalog},
      {"lift consistency", lift_consistency},
      {"frequency law", frequency_law},
      {"arpeggio", arpeggio_check},
      {"WAV determinism", wav_determinism},
      {"session replay", session_replay},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    try {
      run(v);
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (v.ok ? "PASS" : "FAIL") << "  " << name << "  (" << v.why.str() << "; " << secs << " s)" << std::endl;
    failed += v.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
