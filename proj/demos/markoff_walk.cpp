// Pedal-tap around the once-punctured torus and watch the lambda lengths
// walk the Markoff tree. Every triangle stays a chord.
//
//   demo_markoff_walk [steps]

#include <hormonica/hormonica.hpp>

#include <iostream>
#include <string>

using namespace hormonica;

int main(int argc, char** argv) {
  int steps = argc > 1 ? std::stoi(argv[1]) : 8;
  CosetTable tbl = builtin_group("commutator");
  SurfaceType st = classify(tbl);
  std::cout << "commutator subgroup: genus " << st.genus << ", " << st.punctures << " puncture\n";

  QuotientTriangulation q = quotient_triangulation(tbl);
  for (int i = 0; i < steps; ++i) {
    // Always flip the smallest lambda: the walk climbs away from (1,1,1).
    std::size_t e = 0;
    for (std::size_t k = 1; k < q.edge_count(); ++k)
      if (q.lambda(k) < q.lambda(e)) e = k;
    const Integer& fresh = q.flip(e);
    MarkoffTriple m(q.lambda(0), q.lambda(1), q.lambda(2));
    ChordTriple c{m.v[0], m.v[1], m.v[2]};
    std::cout << "flip edge " << e << " -> " << fresh.str() << "   triple " << m.sorted().str()
              << (is_chord(c) ? "   chord" : "   NOT a chord") << "\n";
  }

  LiftedPatch lift = develop(q, tbl, 2);
  std::cout << lift.triangles.size() << " lifted triangles, "
            << (lift_consistent(lift, q) ? "consistent" : "inconsistent") << " with the quotient\n";
}
