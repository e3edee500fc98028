#include <hormonica/farey.hpp>

#include <catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <set>
#include <tuple>

using namespace hormonica;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExtendedRational R(long long p, long long q) { return {Integer(p), Integer(q)}; }
const ExtendedRational oo = ExtendedRational::infinity();

}  // namespace

template <>
struct Catch::StringMaker<ExtendedRational> {
  static std::string convert(const ExtendedRational& x) { return x.str(); }
};

namespace {

// Farey edges inside [0, 1] with denominators <= 30, as consecutive pairs of
// the Farey sequences F_1 .. F_30, tagged with their larger denominator.
const std::vector<std::tuple<Rational, Rational, long long>>& unit_interval_edges() {
  static const auto edges = [] {
    std::set<std::tuple<Rational, Rational, long long>> out;
    for (long long order = 1; order <= 30; ++order) {
      std::set<Rational> seq;
      for (long long q = 1; q <= order; ++q)
        for (long long p = 0; p <= q; ++p) seq.insert(Rational(p, q));
      for (auto it = seq.begin(); std::next(it) != seq.end(); ++it) {
        auto d = std::max(boost::multiprecision::denominator(*it), boost::multiprecision::denominator(*std::next(it)));
        out.insert({*it, *std::next(it), static_cast<long long>(d)});
      }
    }
    return std::vector<std::tuple<Rational, Rational, long long>>(out.begin(), out.end());
  }();
  return edges;
}

// Ray-walk oracle: open Farey triangles met by the geodesic from i to x
// equals one plus the number of Farey edges separating i from x.
long long ray_walk_generation(const Rational& x) {
  if (x == 0) return 0;
  long long m = boost::multiprecision::numerator(x) >= 0
                    ? static_cast<long long>(boost::multiprecision::numerator(x) / boost::multiprecision::denominator(x))
                    : -static_cast<long long>((-boost::multiprecision::numerator(x) + boost::multiprecision::denominator(x) - 1) /
                                              boost::multiprecision::denominator(x));
  long long q = static_cast<long long>(boost::multiprecision::denominator(x));
  long long crossed = 0;
  // Vertical edges {a, oo}: i has real part 0.
  for (long long a = -40; a <= 40; ++a) {
    if (a == 0 || Rational(a) == x) continue;
    if ((0 < a) != (x < a)) ++crossed;
  }
  for (const auto& [a0, b0, d] : unit_interval_edges()) {
    if (d > q) continue;
    Rational a = a0 + m, b = b0 + m;
    if (a == x || b == x) continue;
    bool x_inside = a < x && x < b;
    bool i_inside = a * b < -1;
    if (x_inside != i_inside) ++crossed;
  }
  return 1 + crossed;
}

std::complex<double> circumcenter(std::complex<double> a, std::complex<double> b, std::complex<double> c,
                                  double& radius) {
  double d = 2 * (a.real() * (b.imag() - c.imag()) + b.real() * (c.imag() - a.imag()) + c.real() * (a.imag() - b.imag()));
  double ux = (std::norm(a) * (b.imag() - c.imag()) + std::norm(b) * (c.imag() - a.imag()) + std::norm(c) * (a.imag() - b.imag())) / d;
  double uy = (std::norm(a) * (c.real() - b.real()) + std::norm(b) * (a.real() - c.real()) + std::norm(c) * (b.real() - a.real())) / d;
  std::complex<double> u(ux, uy);
  radius = std::abs(a - u);
  return u;
}

std::complex<double> to_disk(std::complex<double> z) {
  return (z - std::complex<double>(0, 1)) / (z + std::complex<double>(0, 1));
}

double hyperbolic_distance(std::complex<double> z, std::complex<double> w) {
  return std::acosh(1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag()));
}

// Brute-force distance between two finite horocycles (centers x, y, Euclidean
// diameters h, k): grid search over both circles then coordinate refinement.
double horocycle_distance(double x, double h, double y, double k) {
  auto on = [](double c, double d, double t) {
    return std::complex<double>(c, d / 2) + std::polar(d / 2, t);
  };
  auto f = [&](double s, double t) { return hyperbolic_distance(on(x, h, s), on(y, k, t)); };
  const double pi = std::acos(-1.0);
  double bs = 0, bt = 0, best = 1e300;
  for (int i = 1; i < 400; ++i)
    for (int j = 1; j < 400; ++j) {
      double s = -pi / 2 + 2 * pi * i / 400.0, t = -pi / 2 + 2 * pi * j / 400.0;
      double v = f(s, t);
      if (v < best) best = v, bs = s, bt = t;
    }
  for (double step = 2 * pi / 400; step > 1e-12; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [ds, dt] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        double v = f(bs + ds, bt + dt);
        if (v < best) best = v, bs += ds, bt += dt, moved = true;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("extended rationals reduce and order with infinity greatest") {
  CHECK(R(2, 4) == R(1, 2));
  CHECK(R(-3, -6) == R(1, 2));
  CHECK(R(3, -6) == R(-1, 2));
  CHECK(R(5, 0) == oo);
  CHECK(R(-5, 0) == oo);
  CHECK_THROWS_AS(R(0, 0), std::invalid_argument);
  CHECK(R(-7, 1) < R(0, 1));
  CHECK(R(1000, 1) < oo);
  CHECK(ExtendedRational::parse("-3/4") == R(-3, 4));
  CHECK(ExtendedRational::parse("1/0").is_infinity());
  CHECK(ExtendedRational::parse("7") == R(7, 1));
  CHECK_THROWS(ExtendedRational::parse("1/x"));
  CHECK(R(-3, 4).str() == "-3/4");
  CHECK(oo.str() == "1/0");
}

TEST_CASE("lambda length is the determinant") {
  CHECK(lambda(R(0, 1), oo) == 1);
  CHECK(lambda(R(0, 1), R(5, 7)) == 5);
  CHECK(lambda(R(1, 2), R(3, 5)) == 1);
  CHECK_THROWS_AS(lambda(R(1, 2), R(2, 4)), std::invalid_argument);
}

TEST_CASE("lambda_general on explicit horocycles") {
  CHECK(lambda_squared(Horocycle(R(0, 1), 1), Horocycle(R(1, 1), 1)) == 1);
  CHECK(lambda_squared(Horocycle(R(0, 1), Rational(1, 4)), Horocycle(oo, 1)) == 4);
  CHECK_THAT(lambda_general(Horocycle(R(0, 1), Rational(1, 4)), Horocycle(oo, 1)), WithinRel(2.0, 1e-15));
  CHECK(lambda_squared(farey_horocycle(R(0, 1)), farey_horocycle(R(5, 7))) == 25);
  CHECK_THROWS(lambda_squared(Horocycle(R(1, 3), 1), Horocycle(R(1, 3), 2)));
  CHECK_THROWS(Horocycle(R(1, 3), 0));
}

TEST_CASE("lambda_general matches lambda on Farey horocycles for random pairs") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> num(-60, 60), den(0, 40);
  int done = 0;
  while (done < 100) {
    ExtendedRational x;
    ExtendedRational y;
    try {
      x = R(num(rng), den(rng));
      y = R(num(rng), den(rng));
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (x == y) continue;
    Integer l = lambda(x, y);
    CHECK(lambda_squared(farey_horocycle(x), farey_horocycle(y)) == Rational(l * l));
    ++done;
  }
}

TEST_CASE("lambda_general agrees with brute-force hyperbolic distance") {
  // lambda = exp(d / 2) for disjoint horocycles at distance d.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> num(-20, 20), den(1, 9), dia(1, 12);
  int done = 0;
  while (done < 20) {
    Rational x(num(rng), den(rng)), y(num(rng), den(rng));
    Rational h(1, dia(rng)), k(1, dia(rng));
    if (x == y) continue;
    Rational sq = lambda_squared(Horocycle(ExtendedRational(boost::multiprecision::numerator(x), boost::multiprecision::denominator(x)), h),
                                 Horocycle(ExtendedRational(boost::multiprecision::numerator(y), boost::multiprecision::denominator(y)), k));
    if (sq < Rational(3, 2) || sq > 400) continue;
    double d = horocycle_distance(to_double(x), to_double(h), to_double(y), to_double(k));
    CHECK_THAT(std::sqrt(to_double(sq)), WithinRel(std::exp(d / 2), 1e-6));
    ++done;
  }
}

TEST_CASE("modular maps act and preserve lambda") {
  CHECK(apply(MoebiusMap::T(), R(0, 1)) == R(1, 1));
  CHECK(apply(MoebiusMap::S(), oo) == R(0, 1));
  CHECK(apply(MoebiusMap::U(), R(1, 1)) == R(1, 2));
  MoebiusMap S = MoebiusMap::S(), T = MoebiusMap::T();
  CHECK(S * S == MoebiusMap());
  CHECK(S * T * S * T * S * T == MoebiusMap());
  CHECK_THROWS(MoebiusMap(1, 1, 1, 1));

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 3), len(1, 12);
  std::uniform_int_distribution<long long> num(-50, 50), den(0, 50);
  const MoebiusMap gens[] = {S, T, T.inverse(), MoebiusMap::U()};
  for (int trial = 0; trial < 10000; ++trial) {
    MoebiusMap M, N;
    for (int i = len(rng); i > 0; --i) M = M * gens[pick(rng)];
    for (int i = len(rng); i > 0; --i) N = N * gens[pick(rng)];
    long long a = num(rng), b = den(rng), c = num(rng), d = den(rng);
    if ((a == 0 && b == 0) || (c == 0 && d == 0)) continue;
    ExtendedRational x = R(a, b), y = R(c, d);
    if (x == y) continue;
    REQUIRE(lambda(M(x), M(y)) == lambda(x, y));
    REQUIRE((M * N)(x) == M(N(x)));
  }
}

TEST_CASE("mediant and parents") {
  CHECK(mediant(R(0, 1), oo) == R(1, 1));
  CHECK(mediant(R(1, 2), R(1, 3)) == R(2, 5));
  CHECK(mediant(R(0, 1), R(-1, 1)) == R(-1, 2));
  CHECK_THROWS_AS(mediant(R(0, 1), R(2, 1)), std::invalid_argument);
  for (long long q = 1; q <= 25; ++q)
    for (long long p = -40; p <= 40; ++p) {
      if (gcd(Integer(p), Integer(q)) != 1) continue;
      ExtendedRational x = R(p, q);
      if (x == R(0, 1)) continue;
      auto [l, r] = parents(x);
      REQUIRE(lambda(l, r) == 1);
      // The base edge has two children, +1 and -1; its mediant is +1.
      if (x != R(-1, 1)) REQUIRE(mediant(l, r) == x);
      REQUIRE(lambda(x, l) == 1);
      REQUIRE(lambda(x, r) == 1);
      REQUIRE(generation(x) == 1 + std::max(generation(l), generation(r)));
      REQUIRE(lambda(x, oldest_neighbor(x)) == 1);
    }
}

TEST_CASE("generation examples and ray-walk oracle") {
  CHECK(generation(R(0, 1)) == 0);
  CHECK(generation(oo) == 0);
  CHECK(generation(R(1, 1)) == 1);
  CHECK(generation(R(1, 2)) == 2);
  for (long long q = 1; q <= 30; ++q)
    for (long long p = -30; p <= 30; ++p) {
      if (gcd(Integer(p), Integer(q)) != 1) continue;
      INFO(p << "/" << q);
      REQUIRE(generation(R(p, q)) == ray_walk_generation(Rational(p, q)));
      REQUIRE(generation(R(-p, q)) == generation(R(p, q)));
    }
}

TEST_CASE("normalizing map sends a point to infinity and its oldest neighbor to 0") {
  for (long long q = 1; q <= 15; ++q)
    for (long long p = -20; p <= 20; ++p) {
      if (gcd(Integer(p), Integer(q)) != 1) continue;
      MoebiusMap M = normalizing_map(R(p, q));
      REQUIRE(M(R(p, q)) == oo);
      REQUIRE(M(oldest_neighbor(R(p, q))) == R(0, 1));
    }
  CHECK(normalizing_map(oo) == MoebiusMap());
}

TEST_CASE("cayley transform and geodesic arcs") {
  auto near = [](DiskPoint p, double x, double y) { return std::abs(p.x - x) < 1e-12 && std::abs(p.y - y) < 1e-12; };
  CHECK(near(cayley(oo), 1, 0));
  CHECK(near(cayley(R(0, 1)), -1, 0));
  CHECK(near(cayley(R(1, 1)), 0, -1));
  for (long long p = -30; p <= 30; ++p) CHECK_THAT(cayley(R(p, 7)).norm2(), WithinAbs(1.0, 1e-12));

  GeodesicArc d = geodesic_arc(R(0, 1), oo);
  CHECK(d.kind == GeodesicArc::Kind::diameter);
  GeodesicArc a = geodesic_arc(R(0, 1), R(1, 1));
  REQUIRE(a.kind == GeodesicArc::Kind::arc);
  CHECK_THAT(a.center.x, WithinAbs(-1, 1e-12));
  CHECK_THAT(a.center.y, WithinAbs(-1, 1e-12));
  CHECK_THAT(a.radius, WithinAbs(1, 1e-12));
  GeodesicArc b = geodesic_arc(oo, R(1, 1));
  CHECK_THAT(b.center.x, WithinAbs(1, 1e-12));
  CHECK_THAT(b.center.y, WithinAbs(-1, 1e-12));
  CHECK_THROWS(geodesic_arc(R(1, 3), R(1, 3)));

  // Orthogonality: |C|^2 = 1 + r^2 and both endpoints on the arc's circle.
  for (long long p = -12; p <= 12; ++p)
    for (long long q = 1; q <= 6; ++q) {
      if (gcd(Integer(p), Integer(q)) != 1 || R(p, q) == R(2, 3)) continue;
      GeodesicArc g = geodesic_arc(R(p, q), R(2, 3));
      if (g.kind != GeodesicArc::Kind::arc) continue;
      CHECK_THAT(g.center.norm2(), WithinAbs(1 + g.radius * g.radius, 1e-9));
      CHECK_THAT(std::hypot(g.from.x - g.center.x, g.from.y - g.center.y), WithinAbs(g.radius, 1e-9));
      CHECK_THAT(std::hypot(g.to.x - g.center.x, g.to.y - g.center.y), WithinAbs(g.radius, 1e-9));
    }
}

TEST_CASE("horocycle circles match mapped half-plane horocycles") {
  DiskCircle at_inf = horocycle_circle(oo);
  CHECK_THAT(at_inf.center.x, WithinAbs(0.5, 1e-12));
  CHECK_THAT(at_inf.center.y, WithinAbs(0, 1e-12));
  CHECK_THAT(at_inf.radius, WithinAbs(0.5, 1e-12));
  DiskCircle at_zero = horocycle_circle(R(0, 1));
  CHECK_THAT(at_zero.center.x, WithinAbs(-0.5, 1e-12));
  CHECK_THAT(at_zero.radius, WithinAbs(0.5, 1e-12));
  CHECK(horocycle_circle(R(1, 1000)).radius < 1e-5);

  // Three points of the half-plane horocycle of diameter 1/q^2, mapped.
  for (long long q = 1; q <= 9; ++q)
    for (long long p = -9; p <= 9; ++p) {
      if (gcd(Integer(p), Integer(q)) != 1) continue;
      double x = static_cast<double>(p) / q, r = 0.5 / (q * q);
      std::complex<double> c(x, r);
      double rad = 0;
      auto u = circumcenter(to_disk(c + std::polar(r, 0.3)), to_disk(c + std::polar(r, 1.9)), to_disk(c + std::polar(r, 2.8)), rad);
      DiskCircle h = horocycle_circle(R(p, q));
      CHECK_THAT(h.center.x, WithinAbs(u.real(), 1e-9));
      CHECK_THAT(h.center.y, WithinAbs(u.imag(), 1e-9));
      CHECK_THAT(h.radius, WithinAbs(rad, 1e-9));
    }
}

TEST_CASE("edge orientation") {
  CHECK(orient_edge(R(0, 1), oo) == std::pair{R(0, 1), oo});
  CHECK(orient_edge(oo, R(0, 1)) == std::pair{R(0, 1), oo});
  CHECK(orient_edge(R(1, 1), oo) == std::pair{oo, R(1, 1)});
  CHECK(orient_edge(R(1, 1), R(-1, 1)) == std::pair{R(-1, 1), R(1, 1)});
}
