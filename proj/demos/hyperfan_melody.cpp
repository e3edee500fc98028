// Tune the hyperfan deep enough for a melody, play it by tapping fan edges
// and write the result as a WAV file.
//
//   demo_hyperfan_melody [out.wav]

#include <hormonica/hormonica.hpp>

#include <iostream>

using namespace hormonica;

int main(int argc, char** argv) {
  // Happy Birthday, lowest note one hemitone above A0.
  const std::vector<long long> tune{1, 1, 3, 1, 6, 5, 1, 1, 3, 1, 8, 6, 1, 1, 13, 10, 6, 5, 3, 11, 11, 10, 6, 8, 6};
  MelodyScript m = compile_melody(tune);

  Session s;
  for (const auto& e : m.tuning) s.handle({{"type", "pedal_tap"}, {"edge", to_json(e)}});
  std::cout << "tuned " << m.tuning.size() << " fan edges, depth " << m.fan_depth << "\n";

  // Only the taps go into the recording; the tuning flips sounded too.
  Score melody;
  double t0 = s.clock();
  for (const auto& e : m.taps) {
    auto r = s.handle({{"type", "tap"}, {"edge", to_json(e)}});
    if (r.at(0)["type"] != "tone") {
      std::cerr << r.at(0).dump() << "\n";
      return 1;
    }
    std::cout << e.lo.str() << " " << e.hi.str() << "  lambda " << r[0]["lambda"] << "  " << r[0]["freq"].get<double>()
              << " Hz\n";
    melody.add({r[0]["t"].get<double>() - t0, r[0]["dur"].get<double>(),
                r[0]["freq"].get<double>(), 1.0, 0});
  }

  std::string out = argc > 1 ? argv[1] : "happy_birthday.wav";
  write_file(out, render_wav(melody, s.config().synth));
  std::cout << "wrote " << out << "\n";
}
