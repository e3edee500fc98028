// hormonica: command-line front end to the instrument library.
//
// Exit codes: 0 success, 1 domain error (not a chord, bad script step, ...),
// 2 usage error.

#include <hormonica/hormonica.hpp>

#include <CLI11.hpp>
#include <boost/asio.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace h = hormonica;
using h::Json;

namespace {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  bool json = false;
  std::string config;
};

h::SessionConfig load_config(const Options& o) {
  if (!o.config.empty()) return h::config_from_json(h::io::read_file(o.config));
  return h::config_from_environment();
}

h::ChordTriple triple_of(const std::vector<std::string>& args) {
  auto parse = [](const std::string& s) {
    try {
      return h::Integer(s);
    } catch (const std::exception&) {
      throw CLI::ValidationError("chord entry", "'" + s + "' is not an integer");
    }
  };
  try {
    return {parse(args.at(0)), parse(args.at(1)), parse(args.at(2))};
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("chord entry", e.what());
  }
}

void print(const Options& o, const Json& j, const std::string& text) {
  if (o.json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << text;
}

int chord_check(const Options& o, const std::vector<std::string>& args, bool realize) {
  h::ChordTriple t = triple_of(args);
  Json j = h::certificate_json(t);
  std::ostringstream text;
  if (j["chord"].get<bool>()) {
    text << "chord";
    if (realize) {
      text << "\n";
      const auto& v = j["certificate"]["vertices"];
      for (std::size_t i = 0; i < 3; ++i)
        text << "  x" << i + 1 << " = " << v[i].get<std::string>() << "   opposite lambda " << j["certificate"]["lambdas"][i]
             << "\n";
    } else {
      text << " (vertices " << j["certificate"]["vertices"][0].get<std::string>() << ", "
           << j["certificate"]["vertices"][1].get<std::string>() << ", "
           << j["certificate"]["vertices"][2].get<std::string>() << ")\n";
    }
  } else {
    text << "not a chord (" << j["reason"].get<std::string>() << ")\n";
  }
  print(o, j, text.str());
  return j["chord"].get<bool>() ? 0 : 1;
}

int chord_sweep(const Options& o, long long max) {
  if (max < 1) throw CLI::ValidationError("--max", "must be >= 1");
  Json chords = Json::array();
  long long rejected = 0, total = 0;
  for (long long a = 1; a <= max; ++a)
    for (long long b = a; b <= max; ++b)
      for (long long c = b; c <= max; ++c) {
        ++total;
        h::ChordTriple t(a, b, c);
        if (!h::is_chord(t)) {
          ++rejected;
          continue;
        }
        if (!h::verify(h::realize_chord(t), t)) throw std::logic_error("certificate failed for " + t.str());
        chords.push_back({a, b, c});
      }
  std::ostringstream text;
  text << total << " triples with entries <= " << max << ": " << chords.size() << " chords, " << rejected
       << " rejected; every certificate verified\n";
  print(o, {{"max", max}, {"triples", total}, {"chords", chords}, {"rejected", rejected}}, text.str());
  return 0;
}

int markoff(const Options& o, unsigned depth) {
  Json list = Json::array();
  std::ostringstream text;
  for (const auto& m : h::markoff_tree(depth)) {
    list.push_back({h::integer_json(m.v[0]), h::integer_json(m.v[1]), h::integer_json(m.v[2])});
    text << m.str() << "\n";
  }
  print(o, {{"depth", depth}, {"triples", list}}, text.str());
  return 0;
}

int surface_info(const Options& o, const std::string& group, const std::string& table_file) {
  h::CosetTable tbl;
  std::string name = group;
  if (!table_file.empty()) {
    tbl = h::coset_table_from_json(h::io::read_file(table_file));
    if (name.empty()) name = table_file;
  } else {
    if (group.empty()) throw CLI::ValidationError("surface info", "give a group name or --table");
    try {
      tbl = h::builtin_group(group);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("group", std::string(e.what()) + " (built in: gamma2, commutator, gamma3)");
    }
  }
  h::SurfaceType st = h::classify(tbl);
  h::QuotientTriangulation q = h::quotient_triangulation(tbl);
  Json lams = Json::array(), chords = Json::array();
  for (const auto& l : q.lambdas()) lams.push_back(h::integer_json(l));
  for (std::size_t t = 0; t < q.triangle_count(); ++t) {
    Json c = Json::array();
    for (const auto& x : q.chord(t)) c.push_back(h::integer_json(x));
    chords.push_back(c);
  }
  std::ostringstream text;
  text << name << ": index " << tbl.index() << ", g=" << st.genus << ", s=" << st.punctures
       << ", edges=" << q.edge_count() << ", triangles=" << q.triangle_count() << "\n";
  print(o,
        {{"group", name}, {"index", tbl.index()}, {"genus", st.genus}, {"punctures", st.punctures},
         {"edges", q.edge_count()}, {"triangles", q.triangle_count()}, {"lambdas", lams}, {"chords", chords}},
        text.str());
  return 0;
}

// Script files: a list of flips (endpoint pairs, quotient edge ids or full
// protocol messages), or an object
// {"mode": "equivariant", "group": ..., "steps": [...], "repeats": k}.
std::vector<Json> script_messages(const Json& doc) {
  auto step_message = [](const Json& step, const std::string& path) -> Json {
    if (step.is_array()) return {{"type", "pedal_tap"}, {"edge", step}};
    if (step.is_number_integer()) return {{"type", "pedal_tap"}, {"edge_id", step}};
    if (!step.is_object()) throw h::FormatError(path + ": expected a flip instruction or message");
    if (step.contains("type")) return step;
    if (step.contains("edge")) return {{"type", "pedal_tap"}, {"edge", step["edge"]}};
    if (step.contains("edge_id")) return {{"type", "pedal_tap"}, {"edge_id", step["edge_id"]}};
    throw h::FormatError(path + ": expected \"edge\", \"edge_id\" or \"type\"");
  };
  std::vector<Json> out;
  const Json* steps = &doc;
  unsigned repeats = 1;
  if (doc.is_object()) {
    if (doc.value("mode", std::string("universal")) == "equivariant") {
      Json m{{"type", "mode"}, {"equivariant", true}};
      if (doc.contains("group")) m["group"] = doc["group"];
      if (doc.contains("table")) m["table"] = doc["table"];
      out.push_back(m);
    }
    steps = &h::io::require(doc, "steps", "");
    if (doc.contains("repeats")) {
      long long r = h::io::as_integer(doc["repeats"], "repeats");
      if (r < 1 || r > 10000) throw h::FormatError("repeats: must lie in [1, 10000]");
      repeats = static_cast<unsigned>(r);
    }
  }
  if (!steps->is_array()) throw h::FormatError("steps: expected a list");
  for (unsigned r = 0; r < repeats; ++r)
    for (std::size_t i = 0; i < steps->size(); ++i) out.push_back(step_message((*steps)[i], "steps[" + std::to_string(i) + "]"));
  return out;
}

h::Session run_messages(h::Session s, const std::vector<Json>& msgs, Json& responses) {
  responses = Json::array();
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    for (auto& r : s.handle(msgs[i])) {
      if (r["type"] == "error") throw DomainError("step " + std::to_string(i) + ": " + r["reason"].get<std::string>());
      if (r["type"] != "tessellation") responses.push_back(r);
    }
  }
  return s;
}

void write_outputs(const h::Session& s, const std::string& wav, const std::string& save) {
  if (!wav.empty()) h::write_file(wav, h::render_wav(s.score(), s.config().synth));
  if (!save.empty()) h::save_session(s, save);
}

std::string describe(const Json& responses) {
  std::ostringstream text;
  text.setf(std::ios::fixed);
  text.precision(3);
  for (const auto& r : responses) {
    if (r["type"] == "tone")
      text << "t=" << r["t"].get<double>() << "  tone " << r["freq"].get<double>() << " Hz  lambda " << r["lambda"] << "\n";
    else if (r["type"] == "tone_start")
      text << "t=" << r["t"].get<double>() << "  hold " << r["hold_id"] << " at " << r["freq"].get<double>() << " Hz\n";
    else if (r["type"] == "tone_stop")
      text << "t=" << r["t"].get<double>() << "  release hold " << r["hold_id"] << "\n";
    else if (r["type"] == "mode")
      text << "mode " << r["mode"].get<std::string>() << (r.contains("group") ? " " + r["group"].get<std::string>() : "")
           << "\n";
  }
  return text.str();
}

int script_run(const Options& o, const std::string& file, const std::string& wav, const std::string& save) {
  Json responses;
  h::Session s = run_messages(h::Session(load_config(o)), script_messages(h::io::read_file(file)), responses);
  write_outputs(s, wav, save);
  print(o, {{"responses", responses}, {"state", s.state_json()}}, describe(responses));
  return 0;
}

int session_load(const Options& o, const std::string& file, const std::string& wav) {
  h::Session s = h::load_session(file);
  write_outputs(s, wav, "");
  std::ostringstream text;
  text << "replayed " << s.log().size() << " messages; mode " << s.state_json()["mode"].get<std::string>() << ", "
       << s.score().events().size() << " note events, clock " << s.clock() << " s\n";
  print(o, {{"messages", s.log().size()}, {"state", s.state_json()}, {"score", h::score_to_json(s.score())}}, text.str());
  return 0;
}

h::TessellationPatch tuned_patch(const std::string& script) {
  h::TessellationPatch t;
  if (script.empty()) return t;
  auto flips = h::parse_tuning_script(h::io::read_file(script));
  for (std::size_t i = 0; i < flips.size(); ++i) {
    try {
      t.flip(flips[i]);
    } catch (const std::invalid_argument& e) {
      throw DomainError("step " + std::to_string(i) + ": " + e.what());
    }
  }
  return t;
}

int arpeggio(const Options& o, const std::string& center, double window, double tempo, const std::string& script,
             const std::string& wav, const std::string& score_out) {
  h::SessionConfig cfg = load_config(o);
  h::ExtendedRational c;
  try {
    c = h::ExtendedRational::parse(center);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--center", e.what());
  }
  if (!(window > 0)) throw CLI::ValidationError("--window", "must be positive");
  if (!(tempo > 0)) throw CLI::ValidationError("--tempo", "must be positive");
  h::TessellationPatch t = tuned_patch(script);
  auto crossings = h::horocycle_crossings(t, c, window);
  h::Score s = h::arpeggio(crossings, tempo, cfg.tuning);
  if (!wav.empty()) h::write_file(wav, h::render_wav(s, cfg.synth));
  if (!score_out.empty()) {
    std::ofstream f(score_out);
    f << h::score_to_json(s).dump(2) << '\n';
  }
  Json list = Json::array();
  std::ostringstream text;
  text.setf(std::ios::fixed);
  text.precision(4);
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    const auto& x = crossings[i];
    const auto& ev = s.events()[i];
    list.push_back({{"edge", h::to_json(x.edge)}, {"position", x.position}, {"lambda", h::integer_json(x.lambda)},
                    {"t", ev.start}, {"freq", ev.frequency}});
    text << "t=" << ev.start << "  " << x.edge.str() << "  lambda " << x.lambda << "  " << ev.frequency << " Hz\n";
  }
  print(o, {{"center", c.str()}, {"window", window}, {"events", list}}, text.str());
  return 0;
}

std::vector<long long> read_melody(const std::string& file) {
  std::ifstream f(file);
  if (!f) throw std::runtime_error("cannot open '" + file + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();
  std::vector<long long> notes;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    Json j = Json::parse(text);
    const Json& list = j.is_object() ? h::io::require(j, "hemitones", "") : j;
    if (!list.is_array()) throw h::FormatError("hemitones: expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) notes.push_back(h::io::as_integer(list[i], "hemitones[" + std::to_string(i) + "]"));
    return notes;
  }
  // Plain text: integers separated by whitespace, '|' bar lines and '#' comments.
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    line = line.substr(0, line.find('#'));
    for (auto& ch : line)
      if (ch == '|' || ch == ',') ch = ' ';
    std::istringstream words(line);
    std::string w;
    while (words >> w) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(w, &used);
        if (used != w.size()) throw std::invalid_argument(w);
        notes.push_back(v);
      } catch (const std::exception&) {
        throw h::FormatError(file + ":" + std::to_string(lineno) + ": '" + w + "' is not an integer");
      }
    }
  }
  return notes;
}

int melody_compile(const Options& o, const std::string& file, const std::string& wav) {
  h::MelodyScript m;
  try {
    m = h::compile_melody(read_melody(file));
  } catch (const h::FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw DomainError(e.what());
  }
  Json taps = Json::array();
  for (const auto& e : m.taps) taps.push_back({{"type", "tap"}, {"edge", h::to_json(e)}});
  Json out{{"fan_depth", m.fan_depth}, {"tuning", h::tuning_script_json(m.tuning)}, {"taps", taps}};
  if (!wav.empty()) {
    // Tuning flips sound on channel 1 and are left out of the rendering.
    std::vector<Json> msgs;
    for (const auto& e : m.tuning) msgs.push_back({{"type", "pedal_tap"}, {"edge", h::to_json(e)}, {"ch", 1}});
    for (const auto& t : taps) msgs.push_back(t);
    Json ignored;
    h::Session s = run_messages(h::Session(load_config(o)), msgs, ignored);
    h::Score melody;
    melody.meta = s.score().meta;
    double offset = -1;
    for (const auto& ev : s.score().events()) {
      if (ev.channel == 1) continue;
      if (offset < 0) offset = ev.start;
      melody.add({ev.start - offset, ev.duration, ev.frequency, ev.velocity, ev.channel});
    }
    h::write_file(wav, h::render_wav(melody, s.config().synth));
  }
  std::ostringstream text;
  text << "fan depth " << m.fan_depth << ": " << m.tuning.size() << " tuning flips, " << m.taps.size() << " taps\n";
  print(o, out, o.json ? "" : text.str() + out.dump(2) + "\n");
  return 0;
}

int viewport(const Options& o, unsigned gen, const std::string& format, const std::string& script, const std::string& out) {
  Json view = h::viewport_json(tuned_patch(script), gen);
  std::string body = format == "svg" ? h::viewport_svg(view) : view.dump(2) + "\n";
  (void)o;
  if (out.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open '" + out + "' for writing");
    f << body;
  }
  return 0;
}

void serve_connection(boost::asio::ip::tcp::socket sock, h::SessionConfig cfg) {
  h::Session s(std::move(cfg));
  boost::asio::streambuf buf;
  boost::system::error_code ec;
  while (true) {
    std::size_t n = boost::asio::read_until(sock, buf, '\n', ec);
    if (ec) break;
    std::string line(boost::asio::buffers_begin(buf.data()), boost::asio::buffers_begin(buf.data()) + static_cast<std::ptrdiff_t>(n));
    buf.consume(n);
    std::istringstream in(line);
    std::ostringstream out;
    h::serve_stream(in, out, s);
    boost::asio::write(sock, boost::asio::buffer(out.str()), ec);
    if (ec) break;
  }
}

int serve(const Options& o, unsigned port, bool stdio) {
  h::SessionConfig cfg = load_config(o);
  if (stdio) {
    h::Session s(cfg);
    h::serve_stream(std::cin, std::cout, s);
    return 0;
  }
  boost::asio::io_context io;
  boost::asio::ip::tcp::acceptor acceptor(io, {boost::asio::ip::make_address("127.0.0.1"), static_cast<unsigned short>(port)});
  std::cerr << "listening on 127.0.0.1:" << acceptor.local_endpoint().port() << "\n";
  while (true) {
    boost::asio::ip::tcp::socket sock(io);
    acceptor.accept(sock);
    std::thread(serve_connection, std::move(sock), cfg).detach();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hormonica: a musical instrument on the Farey tessellation"};
  app.require_subcommand(1);
  Options opt;
  app.add_flag("--json", opt.json, "Machine-readable JSON on stdout");
  app.add_option("--config", opt.config, "Config file (overrides HOROMONICA_CONFIG)");
  std::function<int()> action;

  auto* chord = app.add_subcommand("chord", "Triangular chords");
  chord->require_subcommand(1);
  std::vector<std::string> triple;
  auto* check = chord->add_subcommand("check", "Decide whether A B C is a chord");
  check->add_option("entries", triple, "A B C")->expected(3)->required();
  check->callback([&] { action = [&] { return chord_check(opt, triple, false); }; });
  auto* realize = chord->add_subcommand("realize", "Realize A B C as a triangle with vertices in Q u {oo}");
  realize->add_option("entries", triple, "A B C")->expected(3)->required();
  realize->callback([&] { action = [&] { return chord_check(opt, triple, true); }; });
  long long sweep_max = 12;
  auto* sweep = chord->add_subcommand("sweep", "Classify and realize every triple up to --max");
  sweep->add_option("--max", sweep_max, "Largest entry")->required();
  sweep->callback([&] { action = [&] { return chord_sweep(opt, sweep_max); }; });

  unsigned depth = 3;
  auto* mk = app.add_subcommand("markoff", "Markoff triples up to a tree depth");
  mk->add_option("--depth", depth, "Tree depth")->required()->check(CLI::Range(0u, 30u));
  mk->callback([&] { action = [&] { return markoff(opt, depth); }; });

  auto* surface = app.add_subcommand("surface", "Surfaces from coset tables");
  surface->require_subcommand(1);
  std::string group, table_file;
  auto* info = surface->add_subcommand("info", "Genus, punctures and cells of a quotient");
  info->add_option("group", group, "gamma2 | commutator | gamma3");
  info->add_option("--table", table_file, "Coset table JSON {\"n\",\"S\",\"T\"}");
  info->callback([&] { action = [&] { return surface_info(opt, group, table_file); }; });

  std::string file, wav, save;
  auto* script = app.add_subcommand("script", "Session scripts");
  script->require_subcommand(1);
  auto* run = script->add_subcommand("run", "Play a script through a session");
  run->add_option("file", file, "Script JSON")->required();
  run->add_option("--wav", wav, "Render the session score to a WAV file");
  run->add_option("--save", save, "Save the session");
  run->callback([&] { action = [&] { return script_run(opt, file, wav, save); }; });

  auto* session = app.add_subcommand("session", "Saved sessions");
  session->require_subcommand(1);
  auto* load = session->add_subcommand("load", "Replay a saved session");
  load->add_option("file", file, "Saved session")->required();
  load->add_option("--wav", wav, "Render the replayed score");
  load->callback([&] { action = [&] { return session_load(opt, file, wav); }; });

  std::string center = "1/0", tuning_script, score_out;
  double window = 5, tempo = 0.5;
  auto* arp = app.add_subcommand("arpeggio", "Automatic play along a Farey horocycle");
  arp->add_option("--center", center, "Horocycle center p/q");
  arp->add_option("--window", window, "Arc length to traverse");
  arp->add_option("--tempo", tempo, "Seconds per unit of arc length");
  arp->add_option("--script", tuning_script, "Tuning script applied first");
  arp->add_option("--wav", wav, "WAV output");
  arp->add_option("--score", score_out, "Score JSON output");
  arp->callback([&] { action = [&] { return arpeggio(opt, center, window, tempo, tuning_script, wav, score_out); }; });

  auto* melody = app.add_subcommand("melody", "Melodies on the hyperfan");
  melody->require_subcommand(1);
  auto* compile = melody->add_subcommand("compile", "Compile hemitones into tuning and tap scripts");
  compile->add_option("file", file, "Hemitones: JSON list or whitespace separated")->required();
  compile->add_option("--wav", wav, "Render the taps");
  compile->callback([&] { action = [&] { return melody_compile(opt, file, wav); }; });

  unsigned gen = 3;
  std::string format = "json", out;
  auto* vp = app.add_subcommand("viewport", "Export the tessellation near the base triangle");
  vp->add_option("--gen", gen, "Largest vertex generation")->check(CLI::Range(0u, 12u));
  vp->add_option("--format", format, "json | svg")->check(CLI::IsMember({"json", "svg"}));
  vp->add_option("--script", tuning_script, "Tuning script applied first");
  vp->add_option("-o,--output", out, "Output file");
  vp->callback([&] { action = [&] { return viewport(opt, gen, format, tuning_script, out); }; });

  unsigned port = 7117;
  bool stdio = false;
  auto* srv = app.add_subcommand("serve", "Newline-delimited JSON protocol server");
  srv->add_option("--port", port, "TCP port on 127.0.0.1")->check(CLI::Range(0u, 65535u));
  srv->add_flag("--stdio", stdio, "Serve one session on stdin/stdout");
  srv->callback([&] { action = [&] { return serve(opt, port, stdio); }; });

  try {
    app.parse(argc, argv);
    return action();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const h::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
